#include "coxarith/vinberg.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

namespace cox {

namespace {

std::vector<std::vector<int>> support_adjacency(const Mat& m) {
  int n = static_cast<int>(m.size());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && !m[i][j].is_zero()) adj[i].push_back(j);
  return adj;
}

// BFS spanning tree rooted at node 0.  parent[0] = -1.  Throws when the
// support graph is disconnected.
std::vector<int> spanning_tree(const Mat& m) {
  int n = static_cast<int>(m.size());
  auto adj = support_adjacency(m);
  std::vector<int> parent(n, -2);
  std::vector<int> queue{0};
  parent[0] = -1;
  for (size_t q = 0; q < queue.size(); ++q) {
    int v = queue[q];
    for (int w : adj[v])
      if (parent[w] == -2) {
        parent[w] = v;
        queue.push_back(w);
      }
  }
  if (static_cast<int>(queue.size()) != n)
    throw std::domain_error("support graph is disconnected");
  return parent;
}

// F_2 span of 32-bit masks in reduced echelon form: distinct leading bits,
// and each leading bit occurs in its own row only.
class MaskSpan {
 public:
  void insert(uint32_t m) {
    m = reduce(m);
    if (m == 0) return;
    uint32_t lead = std::bit_floor(m);
    for (uint32_t& r : rows_)
      if (r & lead) r ^= m;
    rows_.push_back(m);
    std::sort(rows_.begin(), rows_.end(), std::greater<uint32_t>());
  }
  uint32_t reduce(uint32_t m) const {
    for (uint32_t r : rows_)
      if (m & std::bit_floor(r)) m ^= r;
    return m;
  }
  bool contains(uint32_t m) const { return reduce(m) == 0; }
  const std::vector<uint32_t>& rows() const { return rows_; }

 private:
  std::vector<uint32_t> rows_;
};

MaskSpan span_of(const std::vector<TowerElement>& values) {
  MaskSpan span;
  for (const auto& v : values)
    for (const auto& [mask, c] : v.coeffs()) span.insert(mask);
  return span;
}

// Deepest tower among the values; they must lie on one tower chain.
TowerPtr common_tower(std::vector<TowerElement>& values) {
  TowerPtr t = Tower::rationals();
  for (const auto& v : values)
    if (v.tower()->height() > t->height()) t = v.tower();
  for (auto& v : values) v = v.promoted(t);
  return t;
}

// Squarefree part of the product of the generators' radicands over the
// mask.  The generators are squarefree but can share prime factors.
Int mask_radicand(const TowerPtr& t, uint32_t mask) {
  Int r = 1;
  for (int i = 0; i < t->height(); ++i)
    if (mask & (uint32_t{1} << i)) {
      Int s = t->gen(i).radicand;
      Int g = gcd(r, s);
      r = (r / g) * (s / g);
    }
  return r;
}

struct Rescaled {
  Mat f;
  std::vector<TowerElement> lam;
};

// Basis rescaling along the spanning tree: lambda_root = 1, lambda_child =
// lambda_parent * 2M(parent, child); entry (i, j) of the result is
// lambda_i lambda_j M_ij.
Rescaled rescale_tree(const Mat& m, const std::vector<int>& parent) {
  int n = static_cast<int>(m.size());
  std::vector<TowerElement> lam(n, TowerElement(1));
  // parent[] came from a BFS, so parents precede children in index order
  // of discovery; recompute in one pass over the BFS invariant instead of
  // assuming an order: iterate until settled (n is small).
  std::vector<bool> done(n, false);
  done[0] = true;
  for (int settled = 1; settled < n;) {
    for (int v = 1; v < n; ++v)
      if (!done[v] && done[parent[v]]) {
        lam[v] = lam[parent[v]] * (2 * m[parent[v]][v]);
        done[v] = true;
        ++settled;
      }
  }
  Mat f(n, std::vector<TowerElement>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f[i][j] = lam[i] * lam[j] * m[i][j];
  align_mat(f);
  return {std::move(f), std::move(lam)};
}

void verify_in_span(const Mat& f, const MaskSpan& span) {
  for (const auto& row : f)
    for (const auto& x : row)
      for (const auto& [mask, c] : x.coeffs())
        if (!span.contains(mask))
          throw std::domain_error("rescaled entry " + x.to_expr() +
                                  " lies outside the trace field");
}

// Indices of a lexicographically first maximal independent row set.
std::vector<int> independent_rows(const Mat& m0) {
  Mat a = m0;
  align_mat(a);
  int n = static_cast<int>(a.size());
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < n && r < n; ++c) {
    int p = -1;
    for (int i = r; i < n && p < 0; ++i)
      if (!a[i][c].is_zero()) p = i;
    if (p < 0) continue;
    std::swap(a[p], a[r]);
    std::swap(rows[p], rows[r]);
    for (int i = r + 1; i < n; ++i)
      if (!a[i][c].is_zero()) {
        TowerElement factor = a[i][c] / a[r][c];
        for (int j = 0; j < n; ++j) a[i][j] -= factor * a[r][j];
      }
    pivots.push_back(rows[r]);
    ++r;
  }
  std::sort(pivots.begin(), pivots.end());
  return pivots;
}

// Cuts off the vertices of a simplex Gram matrix that lie beyond the
// sphere at infinity, recognized by positive diagonal entries of the
// inverse.  The cutting normal for vertex i is u_i = -v_i / sqrt(c_i) with
// v_i the i-th row of G^-1 and c_i = (G^-1)_ii, so (u_i, e_j) =
// -delta_ij / sqrt(c_i) and (u_i, u_j) = (G^-1)_ij / sqrt(c_i c_j).
Mat truncate_matrix(const Mat& g0, const Mat& gi0) {
  Mat g = g0;
  Mat gi = gi0;
  TowerPtr t = align_mat(gi);
  int n = static_cast<int>(g.size());
  std::vector<int> hyper;
  for (int i = 0; i < n; ++i)
    if (sign_of(gi[i][i]) > 0) hyper.push_back(i);
  std::vector<TowerElement> roots;
  for (int i : hyper) {
    auto [ext, root] = adjoin_sqrt(t, gi[i][i].promoted(t));
    t = ext;
    roots.push_back(root);
  }
  int h = static_cast<int>(hyper.size());
  Mat out(n + h, std::vector<TowerElement>(n + h, TowerElement(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = g[i][j];
  for (int k = 0; k < h; ++k) {
    out[n + k][n + k] = TowerElement(1);
    TowerElement v = -(TowerElement(1) / roots[k]);
    out[hyper[k]][n + k] = v;
    out[n + k][hyper[k]] = v;
    for (int l = 0; l < k; ++l) {
      TowerElement w =
          gi[hyper[k]][hyper[l]].promoted(t) / (roots[k] * roots[l]);
      out[n + k][n + l] = w;
      out[n + l][n + k] = w;
    }
  }
  align_mat(out);
  return out;
}

}  // namespace

CyclicProductSet cyclic_products(const Mat& m0) {
  Mat m = m0;
  align_mat(m);
  int n = static_cast<int>(m.size());
  std::vector<int> parent = spanning_tree(m);
  CyclicProductSet out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!m[i][j].is_zero())
        out.pair_products.push_back((2 * m[i][j]) * (2 * m[j][i]));
  // Fundamental cycle per non-tree edge: chord plus the two tree paths up
  // to the nearest common ancestor.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (m[i][j].is_zero() || parent[i] == j || parent[j] == i) continue;
      std::vector<bool> anc(n, false);
      for (int v = i; v != -1; v = parent[v]) anc[v] = true;
      int lca = j;
      while (!anc[lca]) lca = parent[lca];
      TowerElement prod = 2 * m[j][i];
      for (int v = i; v != lca; v = parent[v]) prod *= 2 * m[v][parent[v]];
      for (int v = j; v != lca; v = parent[v]) prod *= 2 * m[parent[v]][v];
      out.cycle_products.push_back(prod);
    }
  return out;
}

std::set<Int> radicand_span(const std::vector<TowerElement>& values) {
  std::vector<TowerElement> vals = values;
  for (const auto& v : vals)
    if (v.has_formal_support())
      throw std::domain_error("value " + v.to_expr() +
                              " involves a formal generator; the field it "
                              "generates is not multiquadratic");
  TowerPtr t = common_tower(vals);
  MaskSpan span = span_of(vals);
  std::set<Int> out;
  for (uint32_t r : span.rows()) out.insert(mask_radicand(t, r));
  return out;
}

std::set<Int> trace_field(const Mat& m) {
  CyclicProductSet prods = cyclic_products(m);
  std::vector<TowerElement> all = prods.pair_products;
  all.insert(all.end(), prods.cycle_products.begin(),
             prods.cycle_products.end());
  return radicand_span(all);
}

AmbientForm ambient_form(const Mat& m0) {
  Mat m = m0;
  align_mat(m);
  if (det(m).is_zero())
    throw std::domain_error("Gram matrix is degenerate");
  return ambient_form_restricted(m);
}

AmbientForm ambient_form_restricted(const Mat& m0) {
  Mat m = m0;
  align_mat(m);
  std::vector<int> parent = spanning_tree(m);
  CyclicProductSet prods = cyclic_products(m);
  std::vector<TowerElement> all = prods.pair_products;
  all.insert(all.end(), prods.cycle_products.begin(),
             prods.cycle_products.end());
  AmbientForm out;
  out.field = radicand_span(all);
  Rescaled r = rescale_tree(m, parent);
  verify_in_span(r.f, span_of(all));
  if (det(m).is_zero())
    r.f = principal_submatrix(r.f, independent_rows(r.f));
  out.matrix = std::move(r.f);
  out.scalings = std::move(r.lam);
  return out;
}

std::vector<Mat> reflection_matrices(const Mat& m0) {
  Mat m = m0;
  TowerPtr t = align_mat(m);
  if (det(m).is_zero())
    throw std::domain_error("Gram matrix is degenerate");
  int n = static_cast<int>(m.size());
  std::vector<Mat> out;
  for (int i = 0; i < n; ++i) {
    if (m[i][i].is_zero())
      throw std::domain_error("cannot reflect in an isotropic normal");
    Mat g = mat_identity(n, t);
    for (int j = 0; j < n; ++j) g[i][j] -= 2 * m[i][j] / m[i][i];
    align_mat(g);
    out.push_back(std::move(g));
  }
  return out;
}

bool admissible(const Mat& f0, int d) {
  Mat f = f0;
  align_mat(f);
  int n = static_cast<int>(f.size());
  std::vector<TowerElement> entries;
  for (const auto& row : f)
    for (const auto& x : row) {
      if (x.has_formal_support())
        throw std::domain_error("form entry " + x.to_expr() +
                                " lies outside the rational-radical subfield");
      entries.push_back(x);
    }
  Signature s = sym_signature(f);
  if (!(s.pos == d && s.neg == 1 && s.zero == 0)) return false;
  // Embeddings of the field generated by the entries correspond to sign
  // patterns on a reduced echelon basis of the entry masks; the pattern
  // flipping exactly basis row i is realized by flipping its leading bit,
  // which no other row contains.
  MaskSpan span = span_of(entries);
  const auto& rows = span.rows();
  int k = static_cast<int>(rows.size());
  for (uint32_t eps = 1; eps < (uint32_t{1} << k); ++eps) {
    FlipMask sigma = 0;
    for (int i = 0; i < k; ++i)
      if (eps & (uint32_t{1} << i)) sigma |= std::bit_floor(rows[i]);
    Mat c(n, std::vector<TowerElement>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c[i][j] = galois_conjugate(f[i][j], sigma);
    Signature cs = sym_signature(c);
    if (!(cs.pos == n && cs.neg == 0 && cs.zero == 0)) return false;
  }
  return true;
}

bool admissible(const AmbientForm& f, int d) { return admissible(f.matrix, d); }

bool is_algebraic_integer(const TowerElement& x) {
  if (x.has_formal_support())
    throw std::domain_error("integrality of " + x.to_expr() +
                            " cannot be decided over a formal generator");
  if (x.is_zero()) return true;
  uint32_t u = x.support_mask();
  if (u == 0) return x.rational_value().get_den() == 1;
  // Monic product of (T - sigma(x)) over all embeddings of the field
  // spanned by the support: a power of the minimal polynomial, integral
  // exactly when the minimal polynomial is.
  std::vector<TowerElement> poly{TowerElement(1)};
  uint32_t sigma = u;
  for (;;) {
    TowerElement c = galois_conjugate(x, sigma);
    std::vector<TowerElement> next(poly.size() + 1, TowerElement(0));
    for (size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= c * poly[i];
    }
    poly = std::move(next);
    if (sigma == 0) break;
    sigma = (sigma - 1) & u;
  }
  for (size_t i = 0; i + 1 < poly.size(); ++i) {
    if (!poly[i].is_rational())
      throw std::logic_error("conjugate product has an irrational coefficient");
    if (poly[i].rational_value().get_den() != 1) return false;
  }
  return true;
}

const char* to_string(ArithClass c) {
  switch (c) {
    case ArithClass::Arithmetic: return "arithmetic";
    case ArithClass::ProperlyQuasiArithmetic: return "properly-quasi-arithmetic";
    case ArithClass::QuasiArithmeticUndeterminedIntegrality:
      return "quasi-arithmetic-undetermined-integrality";
    case ArithClass::NotQuasiArithmetic: return "not-quasi-arithmetic";
  }
  return "?";
}

ArithClass classify(const Mat& m0, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  Mat g = m0;
  align_mat(g);
  int n = static_cast<int>(g.size());
  if (n == d + 1 && !det(g).is_zero()) {
    Signature s = sym_signature(g);
    if (s.pos == d && s.neg == 1) {
      Mat gi = mat_inverse(g);
      bool hyper = false;
      for (int i = 0; i < n; ++i) hyper = hyper || sign_of(gi[i][i]) > 0;
      if (hyper) {
        g = truncate_matrix(g, gi);
        n = static_cast<int>(g.size());
      }
    }
  }

  std::vector<int> parent = spanning_tree(g);
  CyclicProductSet prods = cyclic_products(g);
  std::vector<TowerElement> all = prods.pair_products;
  all.insert(all.end(), prods.cycle_products.begin(),
             prods.cycle_products.end());
  std::vector<TowerElement> clean;
  bool formal = false;
  for (const auto& v : all) {
    if (v.has_formal_support())
      formal = true;
    else
      clean.push_back(v);
  }
  if (radicand_span(clean).size() > 1) return ArithClass::NotQuasiArithmetic;

  if (formal) {
    // The field gate stays open but the products cannot be certified to
    // lie in it, let alone in its ring of integers.  Admissibility is
    // still tested when the rescaled entries stay radical.
    try {
      Mat f = rescale_tree(g, parent).f;
      if (det(g).is_zero()) f = principal_submatrix(f, independent_rows(f));
      if (!admissible(f, d)) return ArithClass::NotQuasiArithmetic;
    } catch (const std::domain_error&) {
    }
    return ArithClass::QuasiArithmeticUndeterminedIntegrality;
  }

  Mat f = rescale_tree(g, parent).f;
  verify_in_span(f, span_of(clean));
  if (det(g).is_zero()) f = principal_submatrix(f, independent_rows(f));
  if (!admissible(f, d)) return ArithClass::NotQuasiArithmetic;

  for (const auto& v : all)
    if (!is_algebraic_integer(v)) return ArithClass::ProperlyQuasiArithmetic;
  return ArithClass::Arithmetic;
}

}  // namespace cox
