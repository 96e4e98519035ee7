#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

namespace cox {

using Int = mpz_class;
using Rat = mpq_class;

// floor(sqrt(n)), n >= 0.
Int isqrt(const Int& n);

// Square root if n is a perfect square (n >= 0), otherwise nullopt.
std::optional<Int> perfect_square_root(const Int& n);

// Square root if |q| has perfect-square numerator and denominator and
// q >= 0, otherwise nullopt.
std::optional<Rat> perfect_square_root(const Rat& q);

// Prime factorisation of |n|, n != 0.  Trial division with a Pollard rho
// fallback; intended for the modest radicands and norms seen here.
std::map<Int, int> factorize(const Int& n);

// n = u^2 * e with e squarefree and sign(e) = sign(n).  Returns (u, e).
// n must be nonzero.
std::pair<Int, Int> squarefree_split(const Int& n);

// Squarefree part of a nonzero rational: q = r^2 * e with e a squarefree
// integer of the same sign as q.  Returns (r, e).
std::pair<Rat, Int> squarefree_split(const Rat& q);

// Legendre symbol (a|p) for odd prime p.
int legendre(const Int& a, const Int& p);

// x mod m normalised to [0, m).
Int mod_pos(const Int& x, const Int& m);

// Inverse of x mod m (gcd(x, m) = 1).
Int mod_inverse(const Int& x, const Int& m);

// base^exp mod m.
Int mod_pow(const Int& base, const Int& exp, const Int& m);

// p-adic valuation of n != 0.
long padic_valuation(const Int& n, const Int& p);

// p-adic valuation of q != 0 (may be negative).
long padic_valuation(const Rat& q, const Int& p);

// Reduce a rational with denominator coprime to p into Z/p.
Int rat_mod(const Rat& q, const Int& p);

}  // namespace cox
