#include "coxarith/qforms.hpp"

#include <stdexcept>
#include <utility>

namespace cox {

namespace {

// Everything the local-global tests consume, computed once per form.  det
// is the product of the diagonal entries, which is square-class equal to
// the determinant of the original Gram matrix.
struct FormData {
  int n = 0;
  TowerElement det;
  std::vector<TowerElement> diag;
  Signature sig_id, sig_conj;
  std::set<Int> support;
};

Signature signature_at(const std::vector<TowerElement>& diag,
                       const QuadField& K, bool conj) {
  Signature s;
  for (const TowerElement& x : diag)
    (sign_at_place(x, K, conj) > 0 ? s.pos : s.neg)++;
  return s;
}

bool same_sig(const Signature& a, const Signature& b) {
  return a.pos == b.pos && a.neg == b.neg && a.zero == b.zero;
}

FormData analyze(const Mat& gram, const QuadField& K) {
  DiagonalForm df = diagonalize(gram);
  FormData fd;
  fd.n = static_cast<int>(df.diag.size());
  fd.det = TowerElement(1);
  for (const TowerElement& x : df.diag) fd.det *= x;
  fd.diag = std::move(df.diag);
  fd.sig_id = signature_at(fd.diag, K, false);
  fd.sig_conj = K.is_rational() ? fd.sig_id : signature_at(fd.diag, K, true);
  fd.support = odd_support_primes(fd.diag, K);
  return fd;
}

FormData scaled(const FormData& fd, const TowerElement& lam,
                const QuadField& K) {
  FormData out;
  out.n = fd.n;
  out.det = fd.det * lam.pow(fd.n);
  out.diag.reserve(fd.diag.size());
  for (const TowerElement& x : fd.diag) out.diag.push_back(lam * x);
  out.sig_id = signature_at(out.diag, K, false);
  out.sig_conj = K.is_rational() ? out.sig_id : signature_at(out.diag, K, true);
  out.support = fd.support;
  for (const Int& p : odd_support_primes({lam}, K)) out.support.insert(p);
  return out;
}

IsometryResult isometric_data(const FormData& a, const FormData& b,
                              const QuadField& K) {
  using Status = IsometryResult::Status;
  if (a.n != b.n) return {Status::NotIsometric, "dimension"};
  if (!is_square_in(a.det * b.det, K))
    return {Status::NotIsometric, "determinant class"};
  if (!same_sig(a.sig_id, b.sig_id))
    return {Status::NotIsometric, "signature at the identity real place"};
  if (!same_sig(a.sig_conj, b.sig_conj))
    return {Status::NotIsometric, "signature at the conjugate real place"};
  std::set<Int> ps = a.support;
  ps.insert(b.support.begin(), b.support.end());
  for (const Int& p : ps)
    for (const PrimeIdeal& P : primes_above(p, K))
      if (hasse_invariant(a.diag, K, P) != hasse_invariant(b.diag, K, P))
        return {Status::NotIsometric, "Hasse invariant at " + P.str() +
                                          " over " + p.get_str()};
  if (!unique_dyadic_place(K))
    return {Status::Inconclusive,
            "two dyadic places; the product formula fixes only their "
            "product"};
  return {Status::Isometric, ""};
}

}  // namespace

DiagonalForm diagonalize(const Mat& gram) {
  if (gram.empty()) throw std::invalid_argument("empty form");
  SymDiagonalization sd = sym_diagonalize(gram);
  for (const TowerElement& e : sd.diag)
    if (e.is_zero()) throw std::domain_error("degenerate form");
  return {std::move(sd.diag), std::move(sd.basis)};
}

TowerElement det_square_class(const TowerElement& x, const QuadField& K) {
  if (x.is_zero()) throw std::domain_error("square class of zero");
  auto [A, B] = as_pair(x, K);
  Int den = lcm(A.get_den(), B.get_den());
  Rat ar = A * Rat(den), br = B * Rat(den);
  Int a = ar.get_num(), b = br.get_num();
  // x ~ den*(a + b sqrt d) modulo squares.
  Int g = gcd(a, b);
  Int m = a / g, n = b / g;
  auto [u, e] = squarefree_split(Int(den * g));
  if (!K.is_rational()) {
    // d itself is a square in K, so the rational factor reduces modulo d.
    auto [u2, e2] = squarefree_split(Int(e * K.d));
    if (e2 < e) e = e2;
  }
  TowerElement out =
      n == 0 ? TowerElement(Rat(e * m))
             : TowerElement(Rat(e)) * (TowerElement(Rat(m)) +
                                       TowerElement(Rat(n)) * field_generator(K));
  // A class containing a rational unit gets the unit as representative.
  for (int s : {1, -1})
    if (is_square_in(out * TowerElement(s), K)) return TowerElement(s);
  return out;
}

std::set<Int> odd_support_primes(const std::vector<TowerElement>& diag,
                                 const QuadField& K) {
  std::set<Int> out;
  auto add_factors = [&out](const Int& v) {
    if (v == 1 || v == -1) return;
    for (const auto& [p, e] : factorize(v))
      if (p != 2) out.insert(p);
  };
  for (const TowerElement& x : diag) {
    if (x.is_zero()) throw std::domain_error("support of a degenerate form");
    auto [A, B] = as_pair(x, K);
    Int den = lcm(A.get_den(), B.get_den());
    Rat ar = A * Rat(den), br = B * Rat(den);
    Int nrm = K.is_rational()
                  ? ar.get_num()
                  : Int(ar.get_num() * ar.get_num() -
                        K.d * br.get_num() * br.get_num());
    add_factors(den);
    add_factors(nrm);
  }
  return out;
}

int hasse_invariant(const std::vector<TowerElement>& diag, const QuadField& K,
                    const PrimeIdeal& P) {
  int h = 1;
  for (size_t i = 0; i < diag.size(); ++i)
    for (size_t j = i + 1; j < diag.size(); ++j)
      h *= hilbert_symbol(diag[i], diag[j], K, P);
  return h;
}

int hasse_invariant_real(const std::vector<TowerElement>& diag,
                         const QuadField& K, bool conjugate_embedding) {
  int h = 1;
  for (size_t i = 0; i < diag.size(); ++i)
    for (size_t j = i + 1; j < diag.size(); ++j)
      h *= hilbert_symbol_real(diag[i], diag[j], K, conjugate_embedding);
  return h;
}

FormInvariants form_invariants(const Mat& gram, const QuadField& K) {
  FormData fd = analyze(gram, K);
  FormInvariants inv;
  inv.dim = fd.n;
  inv.field = K;
  inv.det_class = det_square_class(fd.det, K);
  inv.sig_id = fd.sig_id;
  inv.sig_conj = fd.sig_conj;
  for (const Int& p : fd.support)
    for (const PrimeIdeal& P : primes_above(p, K))
      inv.hasse[P.str()] = hasse_invariant(fd.diag, K, P);
  return inv;
}

IsometryResult isometric_over_K(const Mat& a, const Mat& b,
                                const QuadField& K) {
  if (a.size() != b.size())
    return {IsometryResult::Status::NotIsometric, "dimension"};
  return isometric_data(analyze(a, K), analyze(b, K), K);
}

SimilarityResult similar_over_K(const Mat& a, const Mat& b,
                                const QuadField& K) {
  using Status = SimilarityResult::Status;
  if (a.size() != b.size())
    return {Status::NotSimilar, std::nullopt, "dimension"};
  FormData fa = analyze(a, K), fb = analyze(b, K);

  if (fa.n % 2 == 1) {
    // det(lambda b) = lambda^n det(b) forces lambda up to squares.
    TowerElement lam = det_square_class(fa.det * fb.det, K);
    IsometryResult iso = isometric_data(fa, scaled(fb, lam, K), K);
    switch (iso.status) {
      case IsometryResult::Status::Isometric:
        return {Status::Similar, lam, ""};
      case IsometryResult::Status::NotIsometric:
        return {Status::NotSimilar, std::nullopt,
                "with the forced ratio " + lam.to_expr() + ": " +
                    iso.obstruction};
      case IsometryResult::Status::Inconclusive:
        return {Status::Inconclusive, std::nullopt, iso.obstruction};
    }
  }

  // Even dimension: the determinant class is scaling-invariant.
  if (!is_square_in(fa.det * fb.det, K))
    return {Status::NotSimilar, std::nullopt,
            "determinant classes differ by " +
                det_square_class(fa.det * fb.det, K).to_expr()};

  std::vector<TowerElement> gens{TowerElement(-1)};
  if (!K.is_rational()) gens.push_back(fundamental_unit(K));
  gens.push_back(TowerElement(2));
  std::set<Int> ps = fa.support;
  ps.insert(fb.support.begin(), fb.support.end());
  for (const Int& p : ps) gens.push_back(TowerElement(Rat(p)));

  bool hit_inconclusive = false;
  for (uint32_t pick = 0; pick < (uint32_t{1} << gens.size()); ++pick) {
    TowerElement lam(1);
    for (size_t i = 0; i < gens.size(); ++i)
      if (pick >> i & 1) lam *= gens[i];
    FormData fbl = scaled(fb, lam, K);
    if (!same_sig(fa.sig_id, fbl.sig_id) ||
        !same_sig(fa.sig_conj, fbl.sig_conj))
      continue;
    IsometryResult iso = isometric_data(fa, fbl, K);
    if (iso.status == IsometryResult::Status::Isometric)
      return {Status::Similar, lam, ""};
    if (iso.status == IsometryResult::Status::Inconclusive)
      hit_inconclusive = true;
  }
  return {Status::Inconclusive, std::nullopt,
          hit_inconclusive
              ? "a candidate ratio matched every computed invariant"
              : "no candidate ratio matched the invariants"};
}

}  // namespace cox
