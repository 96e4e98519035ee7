#pragma once

#include <set>
#include <vector>

#include "coxarith/matrix.hpp"
#include "coxarith/rational.hpp"
#include "coxarith/tower.hpp"

namespace cox {

// Invariants of a hyperbolic reflection group read off its Gram matrix:
// the field generated by cyclic products of entries, the ambient quadratic
// form obtained by rescaling the basis, and the arithmetic classification.
//
// All products are taken over the doubled matrix 2M.  Its label entries
// -2cos(pi/m) are algebraic integers, which is the normalization under
// which the integrality criterion below is stated; products of the unit
// diagonal matrix differ by powers of 4 and generate the same field.

struct CyclicProductSet {
  // (2M)_ij (2M)_ji over all i < j with a nonzero entry.
  std::vector<TowerElement> pair_products;
  // Products of (2M)-entries around a fundamental cycle basis of the
  // support graph (one cycle per non-tree edge of a BFS spanning tree).
  std::vector<TowerElement> cycle_products;
};

// Throws std::domain_error when the support graph is disconnected.
CyclicProductSet cyclic_products(const Mat& m);

// Canonical radicand set of the multiquadratic field generated by the
// given values: the F_2 span of their coefficient masks in reduced echelon
// form, each basis monomial mapped to the squarefree part of the product
// of its generators' radicands.  Empty set means the values are rational.
// Throws std::domain_error when a value involves a formal generator, since
// the field it generates is then not multiquadratic.
std::set<Int> radicand_span(const std::vector<TowerElement>& values);

// Radicands of the field generated by all cyclic products of 2M.  The pair
// and fundamental-cycle products span it: any cyclic product is a monomial
// in these up to squares of entries, and squares of entries are pair
// products.  Errors as in cyclic_products and radicand_span.
std::set<Int> trace_field(const Mat& m);

struct AmbientForm {
  Mat matrix;                          // lambda_i lambda_j M_ij
  std::set<Int> field;                 // radicands of the trace field
  std::vector<TowerElement> scalings;  // the lambda_i
};

// Rescales basis vector i by lambda_i, where lambda over a BFS spanning
// tree of the support graph satisfies lambda_root = 1 and lambda_child =
// lambda_parent * 2M(parent, child).  Every entry of the result is checked
// to lie in the trace field; a failure is a std::domain_error, never a
// coerced value.  Requires M nondegenerate.
AmbientForm ambient_form(const Mat& m);

// Variant for possibly-degenerate Gram matrices (truncated and doubled
// polyhedra): the rescaled form is restricted to a lexicographically first
// maximal independent subset of basis vectors, which represents the form
// on the span of the normals.  scalings keeps the full length.
AmbientForm ambient_form_restricted(const Mat& m);

// Reflections gamma_i = I - (2 / M_ii) e_i (M e_i)^T in the facet normals.
// Exactly involutive and M-orthogonal.  Requires M nondegenerate with a
// nonzero diagonal.
std::vector<Mat> reflection_matrices(const Mat& m);

// True iff f has signature (d, 1) and every nonidentity embedding of the
// field generated by its entries makes it positive definite.  Embeddings
// are enumerated on the span of the entry coefficient masks, so generators
// of the ambient tower that the entries do not see contribute no spurious
// identity conjugates.  Entries must be free of formal generators.
bool admissible(const Mat& f, int d);
bool admissible(const AmbientForm& f, int d);

// True iff x satisfies a monic integer polynomial, decided on the monic
// product of (T - sigma(x)) over the embeddings of the multiquadratic
// field spanned by x's support.  Throws std::domain_error on formal
// support.
bool is_algebraic_integer(const TowerElement& x);

enum class ArithClass {
  Arithmetic,
  ProperlyQuasiArithmetic,
  // The products involve a formal generator, so membership of the group
  // ring traces in the ring of integers cannot be certified either way.
  QuasiArithmeticUndeterminedIntegrality,
  NotQuasiArithmetic,
};
const char* to_string(ArithClass c);

// Arithmetic classification of the reflection group of M acting on H^d.
//
// A nondegenerate (d+1)-node matrix of signature (d, 1) whose inverse has
// positive diagonal entries describes a simplex with hyperideal vertices;
// those are cut off first (by the polar hyperplane construction, at the
// matrix level), since the classification concerns the group of the
// resulting compact polyhedron.
//
// Then: not-quasi-arithmetic when the trace field has more than one
// radicand or the ambient form is inadmissible for (d, 1); arithmetic when
// every pair and fundamental-cycle product is an algebraic integer;
// properly-quasi-arithmetic otherwise.  When a product involves a formal
// generator but the remaining products keep the field gate open (and
// admissibility, when the rescaled entries stay radical, does not close
// it), the integrality question is left undetermined rather than guessed.
//
// Degenerate matrices (truncated or doubled polyhedra) are handled by
// restricting the rescaled form to a maximal independent subset of basis
// vectors before the admissibility test.
ArithClass classify(const Mat& m, int d);

}  // namespace cox
