#include "coxarith/matrix.hpp"

#include <stdexcept>

namespace cox {

namespace {

void require_square(const Mat& a) {
  for (const auto& row : a)
    if (row.size() != a.size()) throw std::invalid_argument("matrix not square");
}

}  // namespace

Mat mat_identity(int n, const TowerPtr& t) {
  Mat m(n, std::vector<TowerElement>(n, TowerElement::rational(Rat(0), t)));
  for (int i = 0; i < n; ++i) m[i][i] = TowerElement::rational(Rat(1), t);
  return m;
}

Mat mat_zero(int rows, int cols, const TowerPtr& t) {
  return Mat(rows, std::vector<TowerElement>(cols, TowerElement::rational(Rat(0), t)));
}

TowerPtr align_mat(Mat& m) {
  TowerPtr deep = Tower::rationals();
  for (const auto& row : m)
    for (const auto& e : row)
      if (e.tower()->height() > deep->height()) deep = e.tower();
  for (auto& row : m)
    for (auto& e : row) e = e.promoted(deep);
  return deep;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  if (!a.empty() && a[0].size() != k)
    throw std::invalid_argument("matrix dimension mismatch");
  Mat c = mat_zero(static_cast<int>(n), static_cast<int>(m),
                   a.empty() ? Tower::rationals() : a[0][0].tower());
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) {
      TowerElement s = c[i][j];
      for (size_t l = 0; l < k; ++l) s += a[i][l] * b[l][j];
      c[i][j] = s;
    }
  return c;
}

Mat mat_transpose(const Mat& a) {
  if (a.empty()) return {};
  Mat t(a[0].size(), std::vector<TowerElement>(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

bool mat_equal(const Mat& a, const Mat& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != b[i][j]) return false;
  }
  return true;
}

Mat mat_scale(const Mat& a, const TowerElement& s) {
  Mat r = a;
  for (auto& row : r)
    for (auto& e : row) e = e * s;
  return r;
}

Mat submatrix(const Mat& a, const std::vector<int>& rows,
              const std::vector<int>& cols) {
  Mat r(rows.size(), std::vector<TowerElement>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) r[i][j] = a[rows[i]][cols[j]];
  return r;
}

Mat principal_submatrix(const Mat& a, const std::vector<int>& idx) {
  return submatrix(a, idx, idx);
}

TowerElement det(const Mat& a) {
  require_square(a);
  int n = static_cast<int>(a.size());
  if (n == 0) return TowerElement(Rat(1));
  Mat w = a;
  TowerPtr t = align_mat(w);
  TowerElement result = TowerElement::rational(Rat(1), t);
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int i = k; i < n; ++i)
      if (!w[i][k].is_zero()) {
        pivot = i;
        break;
      }
    if (pivot < 0) return TowerElement::rational(Rat(0), t);
    if (pivot != k) {
      std::swap(w[pivot], w[k]);
      result = -result;
    }
    result *= w[k][k];
    for (int i = k + 1; i < n; ++i) {
      if (w[i][k].is_zero()) continue;
      TowerElement f = w[i][k] / w[k][k];
      for (int j = k; j < n; ++j) w[i][j] -= f * w[k][j];
    }
  }
  return result;
}

Mat mat_inverse(const Mat& a) {
  require_square(a);
  int n = static_cast<int>(a.size());
  Mat w = a;
  TowerPtr t = align_mat(w);
  Mat inv = mat_identity(n, t);
  for (int k = 0; k < n; ++k) {
    int pivot = -1;
    for (int i = k; i < n; ++i)
      if (!w[i][k].is_zero()) {
        pivot = i;
        break;
      }
    if (pivot < 0) throw std::domain_error("matrix is singular");
    if (pivot != k) {
      std::swap(w[pivot], w[k]);
      std::swap(inv[pivot], inv[k]);
    }
    TowerElement d = w[k][k];
    for (int j = 0; j < n; ++j) {
      w[k][j] /= d;
      inv[k][j] /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k || w[i][k].is_zero()) continue;
      TowerElement f = w[i][k];
      for (int j = 0; j < n; ++j) {
        w[i][j] -= f * w[k][j];
        inv[i][j] -= f * inv[k][j];
      }
    }
  }
  return inv;
}

SymDiagonalization sym_diagonalize(const Mat& m) {
  require_square(m);
  int n = static_cast<int>(m.size());
  Mat w = m;
  TowerPtr t = align_mat(w);
  Mat basis = mat_identity(n, t);
  // One congruence column operation and its mirrored row operation.
  auto add_col = [&](int dst, int src, const TowerElement& f) {
    for (int i = 0; i < n; ++i) w[i][dst] += f * w[i][src];
    for (int j = 0; j < n; ++j) w[dst][j] += f * w[src][j];
    for (int i = 0; i < n; ++i) basis[i][dst] += f * basis[i][src];
  };
  auto swap_cols = [&](int a, int b) {
    for (int i = 0; i < n; ++i) std::swap(w[i][a], w[i][b]);
    for (int j = 0; j < n; ++j) std::swap(w[a][j], w[b][j]);
    for (int i = 0; i < n; ++i) std::swap(basis[i][a], basis[i][b]);
  };
  for (int k = 0; k < n; ++k) {
    if (w[k][k].is_zero()) {
      int dp = -1;
      for (int i = k + 1; i < n; ++i)
        if (!w[i][i].is_zero()) {
          dp = i;
          break;
        }
      if (dp >= 0) {
        swap_cols(k, dp);
      } else {
        // Diagonal block is zero; bring in any nonzero off-diagonal pair.
        int p = -1, q = -1;
        for (int i = k; i < n && p < 0; ++i)
          for (int j = i + 1; j < n; ++j)
            if (!w[i][j].is_zero()) {
              p = i;
              q = j;
              break;
            }
        if (p < 0) break;  // remaining block identically zero
        add_col(p, q, TowerElement::rational(Rat(1), t));
        if (p != k) swap_cols(k, p);
      }
    }
    for (int j = k + 1; j < n; ++j) {
      if (w[k][j].is_zero()) continue;
      add_col(j, k, -(w[k][j] / w[k][k]));
    }
  }
  SymDiagonalization out;
  out.basis = basis;
  out.diag.reserve(n);
  for (int i = 0; i < n; ++i) out.diag.push_back(w[i][i]);
  return out;
}

Signature sym_signature(const Mat& m) {
  Signature s;
  for (const auto& d : sym_diagonalize(m).diag) {
    int sg = sign_of(d);
    if (sg > 0)
      ++s.pos;
    else if (sg < 0)
      ++s.neg;
    else
      ++s.zero;
  }
  return s;
}

}  // namespace cox
