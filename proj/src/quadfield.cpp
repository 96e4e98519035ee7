#include "coxarith/quadfield.hpp"

#include <stdexcept>
#include <utility>

namespace cox {

namespace {

// prod_{i in mask} g_i = m * sqrt(r) with r squarefree; returns (r, m).
// Requires every generator in the mask to be a rational radical.
std::pair<Int, Int> mask_radical(const TowerPtr& t, uint32_t mask) {
  Int prod = 1;
  for (int i = 0; i < t->height(); ++i) {
    if (!(mask >> i & 1)) continue;
    const Generator& g = t->gen(i);
    if (!g.is_radical)
      throw std::domain_error("element has formal (non-radical) support");
    prod *= g.radicand;
  }
  auto [m, r] = squarefree_split(prod);
  return {r, m};
}

TowerElement sqrt_of_d(const QuadField& K) {
  auto [t, w] = adjoin_sqrt(Tower::rationals(), TowerElement(Rat(K.d)));
  return w;
}

int rat_sign(const Rat& q) { return sgn(q); }

// Sign of A + B*sqrt(d) (conjugate embedding when conj is set).
int pair_sign(Rat A, Rat B, const Int& d, bool conj) {
  if (conj) B = -B;
  if (B == 0) return rat_sign(A);
  if (A == 0) return rat_sign(B);
  if (rat_sign(A) == rat_sign(B)) return rat_sign(A);
  // Opposite signs: |A| vs |B| sqrt(d).  Equality is impossible because
  // sqrt(d) is irrational.
  Rat gap = A * A - Rat(d) * B * B;
  return gap > 0 ? rat_sign(A) : rat_sign(B);
}

// Multiplication in F_p[t]/(t^2 - d).
std::pair<Int, Int> fp2_mul(const std::pair<Int, Int>& x,
                            const std::pair<Int, Int>& y, const Int& d,
                            const Int& p) {
  return {mod_pos(x.first * y.first + d * x.second * y.second, p),
          mod_pos(x.first * y.second + x.second * y.first, p)};
}

// z^(  (p^2-1)/2 ) in F_{p^2}; the result is +-1 for z != 0.
int fp2_euler(std::pair<Int, Int> z, const Int& d, const Int& p) {
  Int e = (p * p - 1) / 2;
  std::pair<Int, Int> acc{1, 0};
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = fp2_mul(acc, z, d, p);
    z = fp2_mul(z, z, d, p);
    e >>= 1;
  }
  if (acc.second != 0 || (acc.first != 1 && acc.first != p - 1))
    throw std::logic_error("Euler power did not land in {1,-1}");
  return acc.first == 1 ? 1 : -1;
}

// Root of d mod p^(prec) lifted from P.root; p odd, p does not divide d.
Int lift_root(const Int& d, const Int& p, const Int& r0, long prec) {
  Int r = r0;
  Int mod = p;
  for (long i = 1; i < prec; ++i) {
    Int next = mod * p;
    Int corr = mod_pos(r * r - d, next) * mod_inverse(mod_pos(2 * r, next), next);
    r = mod_pos(r - corr, next);
    mod = next;
  }
  return r;
}

// x written with a common denominator: x*den = a + b*sqrt(d), a, b, den
// integers, den > 0.
struct ClearedPair {
  Int a, b, den;
};

ClearedPair cleared(const TowerElement& x, const QuadField& K) {
  auto [A, B] = as_pair(x, K);
  Int den = lcm(A.get_den(), B.get_den());
  Rat ar = A * Rat(den), br = B * Rat(den);
  return {ar.get_num(), br.get_num(), den};
}

}  // namespace

std::string QuadField::str() const {
  if (is_rational()) return "Q";
  return "Q(sqrt(" + d.get_str() + "))";
}

std::string PrimeIdeal::str() const {
  switch (type) {
    case SplitType::Rational:
    case SplitType::Inert:
      return "(" + p.get_str() + ")";
    case SplitType::Ramified:
      return "(" + p.get_str() + ", sqrt(d))";
    case SplitType::Split:
      return "(" + p.get_str() + ", sqrt(d)-" + root.get_str() + ")";
  }
  return "";
}

QuadField field_of(const TowerElement& x) {
  Int d = 1;
  for (const auto& [mask, c] : x.coeffs()) {
    if (mask == 0) continue;
    Int r = mask_radical(x.tower(), mask).first;
    if (d == 1)
      d = r;
    else if (d != r)
      throw std::domain_error("element spans more than one quadratic field");
  }
  return QuadField{d};
}

std::pair<Rat, Rat> as_pair(const TowerElement& x, const QuadField& K) {
  Rat A(0), B(0);
  for (const auto& [mask, c] : x.coeffs()) {
    if (mask == 0) {
      A = c;
      continue;
    }
    auto [r, m] = mask_radical(x.tower(), mask);
    if (K.is_rational() || r != K.d)
      throw std::domain_error("element does not lie in " + K.str());
    B += c * Rat(m);
  }
  return {A, B};
}

Rat norm(const TowerElement& x, const QuadField& K) {
  auto [A, B] = as_pair(x, K);
  if (K.is_rational()) return A;
  return A * A - Rat(K.d) * B * B;
}

Rat trace(const TowerElement& x, const QuadField& K) {
  auto [A, B] = as_pair(x, K);
  if (K.is_rational()) return A;
  return 2 * A;
}

bool is_integral(const TowerElement& x, const QuadField& K) {
  return trace(x, K).get_den() == 1 && norm(x, K).get_den() == 1;
}

TowerElement field_generator(const QuadField& K) {
  if (K.is_rational())
    throw std::domain_error("field_generator: the field is Q");
  return sqrt_of_d(K);
}

int sign_at_place(const TowerElement& x, const QuadField& K,
                  bool conjugate_embedding) {
  auto [A, B] = as_pair(x, K);
  return pair_sign(A, B, K.d, conjugate_embedding);
}

bool is_square_in(const TowerElement& x, const QuadField& K) {
  if (x.is_zero()) return true;
  auto [A, B] = as_pair(x, K);
  if (K.is_rational()) return perfect_square_root(A).has_value();
  if (B == 0) {
    if (perfect_square_root(A)) return true;
    return perfect_square_root(Rat(A / Rat(K.d))).has_value();
  }
  // x = (c + e sqrt d)^2 forces N(x) = (c^2 - d e^2)^2, and then
  // c^2 = (A + n)/2 for one choice of the root n; the matching e = B/(2c)
  // works out automatically.
  auto n = perfect_square_root(Rat(A * A - Rat(K.d) * B * B));
  if (!n) return false;
  for (int sg : {+1, -1}) {
    Rat csq = (A + (sg > 0 ? *n : Rat(-*n))) / 2;
    if (csq == 0) continue;
    if (perfect_square_root(csq)) return true;
  }
  return false;
}

TowerElement fundamental_unit(const QuadField& K) {
  if (K.is_rational())
    throw std::domain_error("fundamental_unit: the field is Q");
  const Int& d = K.d;
  const bool half = K.half_integral();
  const Int sq = isqrt(d);

  // Continued fraction of omega = (P0 + sqrt d)/Q0 by the standard (P, Q)
  // recurrence; the pair (P1, Q1) recurs exactly at the period.
  Int P = half ? 1 : 0, Q = half ? 2 : 1;
  auto step = [&](Int& Pk, Int& Qk) {
    Int a = (Pk + sq) / Qk;
    Int Pn = a * Qk - Pk;
    Int Qn = (d - Pn * Pn) / Qk;
    Pk = Pn;
    Qk = Qn;
    return a;
  };

  Int a0 = step(P, Q);
  const Int Pref = P, Qref = Q;
  // Convergents p_{k-1}/q_{k-1} of omega.
  Int pc = a0, pp = 1, qc = 1, qp = 0;
  while (true) {
    Int Pk = P, Qk = Q;
    Int a = step(Pk, Qk);
    if (Pk == Pref && Qk == Qref) break;
    Int pn = a * pc + pp, qn = a * qc + qp;
    pp = pc;
    pc = pn;
    qp = qc;
    qc = qn;
    P = Pk;
    Q = Qk;
  }

  // eps = p_{l-1} - q_{l-1} * conj(omega).
  TowerElement rd = sqrt_of_d(K);
  TowerElement omega_bar =
      half ? (TowerElement(1) - rd) / TowerElement(2) : -rd;
  TowerElement eps = TowerElement(Rat(pc)) - TowerElement(Rat(qc)) * omega_bar;

  Rat n = norm(eps, K);
  if (n != 1 && n != -1)
    throw std::logic_error("continued fraction did not produce a unit");
  if (sign_of(eps - TowerElement(1)) <= 0)
    throw std::logic_error("fundamental unit candidate not > 1");
  return eps;
}

std::vector<TowerElement> unit_square_class_reps(const QuadField& K) {
  if (K.is_rational()) return {TowerElement(1), TowerElement(-1)};
  TowerElement u = fundamental_unit(K);
  return {TowerElement(1), TowerElement(-1), u, -u};
}

PrimeIdeal factor_rational_prime(const Int& p, const QuadField& K) {
  if (p < 2 || mpz_probab_prime_p(p.get_mpz_t(), 30) == 0)
    throw std::invalid_argument("factor_rational_prime: p is not prime");
  if (K.is_rational()) return {p, SplitType::Rational, 0};
  if (p == 2)
    throw std::domain_error("dyadic primes of a quadratic field are not factored here");
  if (mod_pos(K.d, p) == 0) return {p, SplitType::Ramified, 0};
  if (legendre(K.d, p) == -1) return {p, SplitType::Inert, 0};
  Int target = mod_pos(K.d, p);
  Int r = 1;
  while (mod_pos(r * r, p) != target) ++r;
  if (p - r < r) r = p - r;
  return {p, SplitType::Split, r};
}

PrimeIdeal conjugate_prime(const PrimeIdeal& P) {
  if (P.type != SplitType::Split) return P;
  return {P.p, SplitType::Split, P.p - P.root};
}

std::vector<PrimeIdeal> primes_above(const Int& p, const QuadField& K) {
  PrimeIdeal P = factor_rational_prime(p, K);
  if (P.type == SplitType::Split) return {P, conjugate_prime(P)};
  return {P};
}

long valuation(const TowerElement& x, const QuadField& K,
               const PrimeIdeal& P) {
  if (x.is_zero()) throw std::domain_error("valuation of zero");
  const Int& p = P.p;
  switch (P.type) {
    case SplitType::Rational:
      return padic_valuation(x.rational_value(), p);
    case SplitType::Inert: {
      long vn = padic_valuation(norm(x, K), p);
      if (vn % 2 != 0)
        throw std::logic_error("odd norm valuation at an inert prime");
      return vn / 2;
    }
    case SplitType::Ramified:
      return padic_valuation(norm(x, K), p);
    case SplitType::Split: {
      auto [a, b, den] = cleared(x, K);
      Int nrm = a * a - K.d * b * b;
      long m = padic_valuation(nrm, p);
      Int r = lift_root(K.d, p, P.root, m + 1);
      Int w = a + b * r;
      if (w == 0) throw std::logic_error("split valuation witness vanished");
      return padic_valuation(w, p) - padic_valuation(den, p);
    }
  }
  throw std::logic_error("unreachable");
}

int residue_character(const TowerElement& x, const QuadField& K,
                      const PrimeIdeal& P) {
  if (P.p == 2)
    throw std::domain_error("quadratic residue characters need an odd place");
  if (valuation(x, K, P) != 0)
    throw std::domain_error("residue character of a non-unit");
  const Int& p = P.p;
  switch (P.type) {
    case SplitType::Rational:
      return legendre(rat_mod(x.rational_value(), p), p);
    case SplitType::Ramified: {
      // x = A + B sqrt(d) with v_p(A) = 0; sqrt(d) dies in the residue
      // field.
      auto [A, B] = as_pair(x, K);
      return legendre(rat_mod(A, p), p);
    }
    case SplitType::Split: {
      auto [a, b, den] = cleared(x, K);
      long e = padic_valuation(den, p);
      Int r = lift_root(K.d, p, P.root, e + 1);
      Int w = a + b * r;
      if (padic_valuation(w, p) != e)
        throw std::logic_error("split residue witness has wrong valuation");
      Int pe = 1;
      for (long i = 0; i < e; ++i) pe *= p;
      return legendre(mod_pos((w / pe) * (den / pe), p), p);
    }
    case SplitType::Inert: {
      auto [A, B] = as_pair(x, K);
      std::pair<Int, Int> z{rat_mod(A, p), rat_mod(B, p)};
      return fp2_euler(z, mod_pos(K.d, p), p);
    }
  }
  throw std::logic_error("unreachable");
}

int hilbert_symbol(const TowerElement& x, const TowerElement& y,
                   const QuadField& K, const PrimeIdeal& P) {
  if (x.is_zero() || y.is_zero())
    throw std::domain_error("Hilbert symbol of zero");
  if (P.p == 2)
    throw std::domain_error("the tame Hilbert formula needs an odd place");
  long a = valuation(x, K, P), b = valuation(y, K, P);
  int s = 1;
  if ((a & 1) && (b & 1)) {
    // chi(-1): always +1 in F_{p^2}; Legendre(-1 | p) otherwise.
    if (P.type != SplitType::Inert && mod_pos(P.p, 4) == 3) s = -s;
  }
  if ((a & 1) || (b & 1)) {
    TowerElement pi = P.type == SplitType::Ramified ? sqrt_of_d(K)
                                                    : TowerElement(Rat(P.p));
    if (b & 1) s *= residue_character(x / pi.pow(a), K, P);
    if (a & 1) s *= residue_character(y / pi.pow(b), K, P);
  }
  return s;
}

int hilbert_symbol_real(const TowerElement& x, const TowerElement& y,
                        const QuadField& K, bool conjugate_embedding) {
  if (x.is_zero() || y.is_zero())
    throw std::domain_error("Hilbert symbol of zero");
  int sx = sign_at_place(x, K, conjugate_embedding);
  int sy = sign_at_place(y, K, conjugate_embedding);
  return (sx < 0 && sy < 0) ? -1 : 1;
}

int hilbert_symbol_dyadic_rational(const Rat& x, const Rat& y) {
  if (x == 0 || y == 0) throw std::domain_error("Hilbert symbol of zero");
  auto odd_part = [](const Rat& q, long v) -> Rat {
    Rat scale;
    if (v >= 0) {
      scale = Rat(Int(1), Int(1) << v);
      scale.canonicalize();
    } else {
      scale = Rat(Int(1) << (-v));
    }
    return q * scale;
  };
  long al = padic_valuation(x, 2), be = padic_valuation(y, 2);
  Int um = rat_mod(odd_part(x, al), 8), wm = rat_mod(odd_part(y, be), 8);
  int eps_u = (um == 3 || um == 7) ? 1 : 0;
  int eps_w = (wm == 3 || wm == 7) ? 1 : 0;
  int om_u = (um == 3 || um == 5) ? 1 : 0;
  int om_w = (wm == 3 || wm == 5) ? 1 : 0;
  long e = static_cast<long>(eps_u) * eps_w + (al & 1) * om_w + (be & 1) * om_u;
  return (e & 1) ? -1 : 1;
}

bool unique_dyadic_place(const QuadField& K) {
  return K.is_rational() || mod_pos(K.d, 8) != 1;
}

}  // namespace cox
