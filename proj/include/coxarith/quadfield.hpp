#pragma once

#include <string>
#include <vector>

#include "coxarith/tower.hpp"

namespace cox {

// Q(sqrt(d)) for squarefree d > 1, or Q itself encoded as d = 1.
struct QuadField {
  Int d = 1;
  bool is_rational() const { return d == 1; }
  // True when d = 1 mod 4, i.e. the ring of integers is Z[(1+sqrt d)/2].
  bool half_integral() const { return !is_rational() && mod_pos(d, 4) == 1; }
  std::string str() const;
  bool operator==(const QuadField& o) const { return d == o.d; }
};

// Smallest rational-radical field containing x.  Errors when x has formal
// support or spans more than one radicand.
QuadField field_of(const TowerElement& x);

// x = first + second*sqrt(K.d); errors when x does not lie in K.  Handles
// elements whose tower writes sqrt(K.d) as a product of generators.
std::pair<Rat, Rat> as_pair(const TowerElement& x, const QuadField& K);

// Field norm and trace down to Q.
Rat norm(const TowerElement& x, const QuadField& K);
Rat trace(const TowerElement& x, const QuadField& K);

// Membership in the ring of integers O_K.
bool is_integral(const TowerElement& x, const QuadField& K);

// The element sqrt(d) of a genuine quadratic field K.
TowerElement field_generator(const QuadField& K);

// Sign of x at a real place of K; conjugate_embedding selects the
// nonidentity embedding (for K = Q both flags give the single place).
int sign_at_place(const TowerElement& x, const QuadField& K,
                  bool conjugate_embedding);

// Whether x is a square of an element of K itself.  This is stricter than
// is_square on the ambient tower: 2 is a square in a tower containing
// sqrt(2) but not in Q.
bool is_square_in(const TowerElement& x, const QuadField& K);

// Fundamental unit > 1 of O_K, computed from the continued fraction of
// sqrt(d) (or (1+sqrt d)/2 when d = 1 mod 4).  Requires a genuine
// quadratic field.
TowerElement fundamental_unit(const QuadField& K);

// Representatives of the unit square classes O_K^* / (O_K^*)^2:
// {1, -1} over Q and {1, -1, u, -u} over a real quadratic field.
std::vector<TowerElement> unit_square_class_reps(const QuadField& K);

enum class SplitType { Rational, Split, Inert, Ramified };

// A prime of K over an odd rational prime p.  For split p the member root
// identifies the factor: it is the r in (p, sqrt(d) - r) with r^2 = d
// (mod p), normalised to 0 < r < p.  Rational means K = Q.
struct PrimeIdeal {
  Int p;
  SplitType type = SplitType::Rational;
  Int root = 0;
  std::string str() const;
  bool operator==(const PrimeIdeal& o) const {
    return p == o.p && type == o.type && root == o.root;
  }
};

// Splitting of an odd prime p in K.  For split p returns the factor with
// the smaller root.  Dyadic primes are excluded by contract; p = 2 throws.
PrimeIdeal factor_rational_prime(const Int& p, const QuadField& K);
PrimeIdeal conjugate_prime(const PrimeIdeal& P);
std::vector<PrimeIdeal> primes_above(const Int& p, const QuadField& K);

// P-adic valuation of x != 0 in K.
long valuation(const TowerElement& x, const QuadField& K, const PrimeIdeal& P);

// Quadratic residue character of a P-unit x in the residue field (F_p for
// rational/split/ramified, F_{p^2} for inert).  Errors if v_P(x) != 0.
int residue_character(const TowerElement& x, const QuadField& K,
                      const PrimeIdeal& P);

// Hilbert symbol (x, y)_P at an odd finite place: with x = pi^a u and
// y = pi^b w for a uniformizer pi and P-units u, w,
//   (x, y)_P = chi(-1)^(ab) * chi(u)^b * chi(w)^a.
int hilbert_symbol(const TowerElement& x, const TowerElement& y,
                   const QuadField& K, const PrimeIdeal& P);

// Hilbert symbol at a real place of K: -1 iff both arguments negative
// there.  conjugate_embedding selects the nonidentity real embedding.
int hilbert_symbol_real(const TowerElement& x, const TowerElement& y,
                        const QuadField& K, bool conjugate_embedding);

// Dyadic Hilbert symbol over Q, via the classical epsilon/omega formula.
// Used to close product-formula checks; only valid for K = Q.
int hilbert_symbol_dyadic_rational(const Rat& x, const Rat& y);

// Whether K has a single prime over 2, so the dyadic Hilbert symbol is
// determined by the product formula.  True for Q; true for Q(sqrt d)
// exactly when 2 does not split, i.e. d != 1 (mod 8).
bool unique_dyadic_place(const QuadField& K);

}  // namespace cox
