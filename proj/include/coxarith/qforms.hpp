#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coxarith/matrix.hpp"
#include "coxarith/quadfield.hpp"

namespace cox {

// Nondegenerate diagonal model of a symmetric bilinear form:
// basis^T * gram * basis is the diagonal matrix with these entries.
struct DiagonalForm {
  std::vector<TowerElement> diag;
  Mat basis;
};

// Congruence-diagonalizes a symmetric matrix; throws on a degenerate form.
DiagonalForm diagonalize(const Mat& gram);

// Deterministic representative of x modulo nonzero squares of K: an
// integer-coefficient element g0*(m + n*sqrt(d)) with gcd(m, n) = 1 and g0
// a positive squarefree integer.  Representatives of one class can still
// differ; class equality is always decided via is_square of a product.
TowerElement det_square_class(const TowerElement& x, const QuadField& K);

// Odd rational primes p such that some entry can have a nonzero valuation
// at a prime of K over p (a superset is fine; extra primes only add places
// where every symbol is trivial).
std::set<Int> odd_support_primes(const std::vector<TowerElement>& diag,
                                 const QuadField& K);

// Hasse invariant prod_{i<j} (a_i, a_j)_P of a diagonalized form.
int hasse_invariant(const std::vector<TowerElement>& diag, const QuadField& K,
                    const PrimeIdeal& P);
int hasse_invariant_real(const std::vector<TowerElement>& diag,
                         const QuadField& K, bool conjugate_embedding);

// Everything that decides the K-isometry class of a nondegenerate form
// over a field with a unique dyadic place.
struct FormInvariants {
  int dim = 0;
  QuadField field;
  TowerElement det_class;
  Signature sig_id, sig_conj;
  std::map<std::string, int> hasse;  // keyed by PrimeIdeal::str()
};

FormInvariants form_invariants(const Mat& gram, const QuadField& K);

struct IsometryResult {
  enum class Status { Isometric, NotIsometric, Inconclusive } status;
  // The invariant and place that separates the forms, when one does.
  std::string obstruction;
};

// Decides K-isometry by dimension, determinant class, the two real
// signatures, and Hasse invariants over the odd support primes.  When all
// of those match the verdict is Isometric if K has a unique dyadic place
// (the remaining local condition follows from the product formula) and
// Inconclusive otherwise.
IsometryResult isometric_over_K(const Mat& a, const Mat& b,
                                const QuadField& K);

struct SimilarityResult {
  enum class Status { Similar, NotSimilar, Inconclusive } status;
  // Scaling factor with a isometric to ratio * b, when Similar.
  std::optional<TowerElement> ratio;
  std::string obstruction;
};

// Decides whether a is isometric to lambda * b for some lambda in K^*.
// Odd dimension forces lambda = det(a)det(b) up to squares.  In even
// dimension the determinant classes must agree, and lambda is searched
// over subset products of {-1, fundamental unit, 2, odd support primes};
// failure of the search is Inconclusive, not a disproof.
SimilarityResult similar_over_K(const Mat& a, const Mat& b,
                                const QuadField& K);

}  // namespace cox
