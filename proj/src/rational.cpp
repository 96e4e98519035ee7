#include "coxarith/rational.hpp"

#include <stdexcept>

namespace cox {

namespace {

bool is_probable_prime(const Int& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), 30) != 0;
}

// Pollard rho (Brent variant).  Caller guarantees n odd composite > 1.
Int pollard_rho(const Int& n) {
  for (Int c = 1; ; ++c) {
    Int x = 2, y = 2, d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      Int diff = x - y;
      if (diff < 0) diff = -diff;
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_into(Int n, std::map<Int, int>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out[n] += 1;
    return;
  }
  Int d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

std::optional<Int> perfect_square_root(const Int& n) {
  if (n < 0) return std::nullopt;
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return std::nullopt;
  return isqrt(n);
}

std::optional<Rat> perfect_square_root(const Rat& q) {
  if (q < 0) return std::nullopt;
  auto num = perfect_square_root(Int(q.get_num()));
  if (!num) return std::nullopt;
  auto den = perfect_square_root(Int(q.get_den()));
  if (!den) return std::nullopt;
  return Rat(*num, *den);
}

std::map<Int, int> factorize(const Int& n) {
  if (n == 0) throw std::domain_error("factorize(0)");
  std::map<Int, int> out;
  Int m = n < 0 ? Int(-n) : n;
  for (Int p = 2; p * p <= m && p < 100000; p == 2 ? p = 3 : p += 2) {
    while (m % p == 0) {
      out[p] += 1;
      m /= p;
    }
  }
  factor_into(m, out);
  return out;
}

std::pair<Int, Int> squarefree_split(const Int& n) {
  if (n == 0) throw std::domain_error("squarefree_split(0)");
  Int u = 1, e = n < 0 ? Int(-1) : Int(1);
  for (const auto& [p, k] : factorize(n)) {
    for (int i = 0; i + 1 < k; i += 2) u *= p;
    if (k % 2) e *= p;
  }
  return {u, e};
}

std::pair<Rat, Int> squarefree_split(const Rat& q) {
  if (q == 0) throw std::domain_error("squarefree_split(0)");
  // q = n/d = (n*d)/d^2, so the squarefree part of q is that of n*d.
  Int nd = Int(q.get_num()) * Int(q.get_den());
  auto [u, e] = squarefree_split(nd);
  Rat r(u, Int(q.get_den()));
  r.canonicalize();
  return {r, e};
}

int legendre(const Int& a, const Int& p) {
  return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

Int mod_pos(const Int& x, const Int& m) {
  Int r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int mod_inverse(const Int& x, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: not invertible");
  return r;
}

Int mod_pow(const Int& base, const Int& exp, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
  return r;
}

long padic_valuation(const Int& n, const Int& p) {
  if (n == 0) throw std::domain_error("padic_valuation(0)");
  long v = 0;
  Int m = n;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

long padic_valuation(const Rat& q, const Int& p) {
  if (q == 0) throw std::domain_error("padic_valuation(0)");
  long v = 0;
  Int num(q.get_num()), den(q.get_den());
  if (num % p == 0) v = padic_valuation(num, p);
  if (den % p == 0) v -= padic_valuation(den, p);
  return v;
}

Int rat_mod(const Rat& q, const Int& p) {
  Int den(q.get_den());
  if (den % p == 0) throw std::domain_error("rat_mod: denominator divisible by p");
  return mod_pos(Int(q.get_num()) * mod_inverse(den, p), p);
}

}  // namespace cox
