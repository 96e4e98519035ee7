#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coxarith/matrix.hpp"
#include "coxarith/tower.hpp"

namespace cox {

// Coxeter diagrams with exact edge data.  Nodes stand for facet normals of
// an acute-angled polyhedron; an absent edge means the facets meet at a
// right angle.  Label(m) edges carry the dihedral angle pi/m, Heavy edges
// mark parallel facets (Gram entry -1), Dotted edges mark diverging facets
// and carry the entry magnitude, which exceeds 1 when known.

enum class EdgeKind { Label, Heavy, Dotted };

struct Edge {
  EdgeKind kind = EdgeKind::Label;
  int m = 3;                           // Label only, m >= 3
  std::optional<TowerElement> weight;  // Dotted only; empty means unknown
  std::string weight_src;              // Dotted only; verbatim source text

  static Edge label(int m);
  static Edge heavy();
  static Edge dotted(TowerElement w, std::string src = "");
  static Edge dotted_unknown();
};

struct CoxeterDiagram {
  std::string name;
  int n = 0;
  // Keys are (i, j) with 0 <= i < j < n.
  std::map<std::pair<int, int>, Edge> edges;
  // Common tower holding every known weight.
  TowerPtr tower = Tower::rationals();

  const Edge* edge(int i, int j) const;
  void set_edge(int i, int j, Edge e);
  bool all_weights_known() const;
};

// File format, one diagram per file, '#' starts a comment:
//   diagram NAME          (optional)
//   vertices N
//   edge I J m=M          dihedral angle pi/M, M >= 3
//   edge I J m=inf        parallel facets
//   edge I J dotted w=EXPR
//   edge I J dotted w=?
// I, J are 1-based.  EXPR follows the expression grammar of parse_expr and
// extends to the end of the line.
CoxeterDiagram parse_diagram(const std::string& text);

// Inverse of parse_diagram up to comments and edge order: edges are sorted,
// known weights are emitted verbatim from their source text (or canonically
// when constructed programmatically), so emitting a parsed file is stable
// byte for byte.
std::string emit_diagram(const CoxeterDiagram& d);

// cos(pi/m) as an exact tower element, extending t as needed.  Supported:
// m in {2,3,4,5,6} and even m >= 8 reachable from them by angle halving,
// so every m whose odd part is 1, 3 or 5.  Everything else (7, 9, 11, 14,
// ...) is rejected; cos(pi/m) then generates a non-quadratic extension.
std::pair<TowerPtr, TowerElement> label_cos(const TowerPtr& t, int m);

// Gram matrix of the diagram: unit diagonal, -cos(pi/m) for Label(m), -1
// for Heavy, -weight for Dotted.  Throws std::domain_error on unknown
// weights or unsupported labels.
Mat gram_matrix(const CoxeterDiagram& d);

enum class SubdiagramClass {
  Elliptic,             // positive definite
  Parabolic,            // PSD, every connected component degenerate
  HyperbolicCompact,    // signature (k-1,1), Lanner condition
  HyperbolicNoncompact, // signature (k-1,1) otherwise
  IndefiniteOther,      // everything else
};
const char* to_string(SubdiagramClass c);

// Classifies a principal submatrix of a Gram matrix.  The Lanner condition
// asks every proper principal submatrix of each connected component to be
// positive definite; positive definiteness is hereditary, so checking the
// one-node-deleted submatrices suffices.
SubdiagramClass classify_subdiagram(const Mat& m);

enum class VertexKind { Ordinary, Ideal, Hyperideal };
const char* to_string(VertexKind k);

struct VertexLink {
  int opposite = 0;  // facet whose omission gives the link
  VertexKind kind = VertexKind::Ordinary;
  SubdiagramClass link_class = SubdiagramClass::Elliptic;
};

// Per-vertex link classification for a simplex diagram: n nodes, Gram
// signature (n-1, 1).  The link of the vertex opposite facet i is the
// principal submatrix omitting i; elliptic, parabolic and compact
// hyperbolic links give ordinary, ideal and hyperideal vertices.  Throws
// std::domain_error when the diagram is not a simplex or some link falls
// outside those classes.
std::vector<VertexLink> vertex_links(const CoxeterDiagram& d);

// Cuts every hyperideal vertex of a simplex diagram by the hyperplane
// polar to it.  The truncating normal for the vertex opposite facet i is
// u_i = -v_i / sqrt(c_i), where v_i is the i-th row of the inverse Gram
// matrix and c_i = (G^-1)_ii > 0; the new node is orthogonal to every old
// facet except facet i.  Truncation nodes are appended in increasing order
// of i.  A diagram without hyperideal vertices comes back unchanged.
CoxeterDiagram truncate_hyperideal(const CoxeterDiagram& d);

// Combinatorial double of a polyhedron along facet f, which must meet
// every adjacent facet at a right angle (edges at f all Dotted or Heavy).
// Facets orthogonal to f merge; the rest come in two mirror copies.  Edges
// inside either copy are inherited; every cross-copy pair diverges (forced
// by the precondition), so those edges are Dotted with unknown weight, to
// be solved for or filled in by double_exact.
CoxeterDiagram double_template(const CoxeterDiagram& d, int f);

// Exact double along facet f: same node set as double_template, entries of
// the mirror copy computed through the reflection x -> x - 2(x, e_f) e_f.
// Requires all weights known.  Throws std::domain_error when a computed
// entry is not realizable in a Coxeter diagram (obtuse angle or an angle
// pi/m with unsupported m).
CoxeterDiagram double_exact(const CoxeterDiagram& d, int f);

struct MinorCondition {
  std::vector<int> indices;  // principal minor rows, 0-based
  bool vanishes = false;
};

struct TruncationReport {
  std::vector<MinorCondition> minors;
  bool det_zero = false;
  Signature sig;
  bool signature_ok = false;  // (d, 1, n-1-d)
  bool pass = false;
};

// Exact check that the listed principal minors and the determinant of the
// Gram matrix vanish and that the signature is (d, 1) plus zeros.  With no
// list given, an (d+3)-node diagram checks the leading and trailing minors
// of order n-1 (the corner minors), and any other size checks only the
// determinant.  All weights must be known.
TruncationReport verify_truncation_weights(
    const CoxeterDiagram& d, int dim,
    const std::vector<std::vector<int>>& minors = {});

struct NumericWeightSolution {
  std::map<std::pair<int, int>, double> weights;  // one per unknown edge
  double residual = 0;
};

// Floating-point search for unknown dotted weights making the same minor
// conditions vanish (defaults as in verify_truncation_weights).  Runs
// Gauss-Newton from a grid of starting weights in (1, 4]; keeps solutions
// with every weight > 1, deduplicated and sorted.  The result is meant to
// be matched against closed-form candidates and then certified exactly.
// Throws std::invalid_argument without unknowns or with fewer conditions
// than unknowns.
std::vector<NumericWeightSolution> solve_truncation_weights_numeric(
    const CoxeterDiagram& tmpl, int dim,
    const std::vector<std::vector<int>>& minors = {});

}  // namespace cox
