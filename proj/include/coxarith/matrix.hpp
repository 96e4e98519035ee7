#pragma once

#include <vector>

#include "coxarith/tower.hpp"

namespace cox {

// Dense matrices over a tower.  All entries of one matrix are kept in a
// single common tower (align_mat promotes in place).
using Mat = std::vector<std::vector<TowerElement>>;

Mat mat_identity(int n, const TowerPtr& t);
Mat mat_zero(int rows, int cols, const TowerPtr& t);
// Promote every entry to the deepest tower present; returns that tower.
TowerPtr align_mat(Mat& m);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_transpose(const Mat& a);
bool mat_equal(const Mat& a, const Mat& b);
Mat mat_scale(const Mat& a, const TowerElement& s);
Mat submatrix(const Mat& a, const std::vector<int>& rows,
              const std::vector<int>& cols);
Mat principal_submatrix(const Mat& a, const std::vector<int>& idx);

// Exact determinant of a square matrix (Gaussian elimination with exact
// division).
TowerElement det(const Mat& a);

// Inverse of a nonsingular square matrix; throws on singular input.
Mat mat_inverse(const Mat& a);

struct Signature {
  int pos = 0, neg = 0, zero = 0;
};

struct SymDiagonalization {
  std::vector<TowerElement> diag;  // entries of B^T M B
  Mat basis;                       // B, unimodular product of elementary ops
};

// Congruence diagonalization of a symmetric matrix (may be degenerate;
// zero diagonal entries report the kernel).  Postcondition, checked by
// tests: basis^T * M * basis == diag.
SymDiagonalization sym_diagonalize(const Mat& m);

// Exact inertia of a symmetric matrix via sign certification of the
// congruence-diagonal entries.
Signature sym_signature(const Mat& m);

}  // namespace cox
