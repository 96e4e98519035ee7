#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coxarith/coxeter.hpp"
#include "coxarith/qforms.hpp"
#include "coxarith/vinberg.hpp"

namespace cox {

// Garlands: compact polyhedra glued from a chain of pieces along isometric
// facets that meet all their neighbors orthogonally.  A word over {1, 2}
// names which of the catalog's two pieces sits at each position.

struct GarlandWord {
  std::vector<int> seq;

  GarlandWord() = default;
  // Throws std::invalid_argument on an empty sequence or a letter outside
  // {1, 2}.
  explicit GarlandWord(std::vector<int> s);
};

// Reversal; an involution.
GarlandWord mirror(const GarlandWord& w);

// The class relation of garlands: true iff the doubled words (a, mirror a)
// and (b, mirror b) are cyclic rotations of one another.  Words of
// different lengths are never equivalent.
bool equivalent(const GarlandWord& a, const GarlandWord& b);

// Canonical key of a word's class: equal keys iff `equivalent`.  Packs the
// length and the least rotation of the doubled word; defined for words of
// length <= 24.
std::uint64_t class_key(const GarlandWord& w);

// Number of classes of {1,2}^n under `equivalent`, by exhaustive
// enumeration with canonical least-rotation keys.  Requires 1 <= n <= 24.
long long count_classes(int n);

enum class AssumptionStatus { TwoSided, OneSided, Fails };

struct AssumptionCheck {
  AssumptionStatus status;
  std::string reason;  // set when status == Fails
};

// Checks that the marked nodes are gluing facets: no Label(m >= 3) edge at
// a marked node, so the facet meets every intersecting facet orthogonally
// (this also keeps two marked facets nonadjacent), and for two marked
// nodes the orthogonal links (nodes joined by absent edges) induce
// isomorphic subdiagrams.  One marked node passes as OneSided, two as
// TwoSided.  Indices are 0-based; failure reasons quote the 1-based node
// numbering of the diagram files.
AssumptionCheck check_assumption(const CoxeterDiagram& d,
                                 const std::vector<int>& marked);

struct GarlandPiece {
  std::string name;
  CoxeterDiagram diagram;
  // Boundary facet nodes, 0-based: {minus, plus}, or a single node for a
  // one-sided (capping) piece.
  std::vector<int> boundary;
  Rat volume;
  ArithClass cls;
  FormInvariants invariants;  // of the restricted ambient form
};

// Two pieces plus the verified precondition that their ambient forms are
// not similar over the common trace field.
struct PieceCatalog {
  int dim = 0;
  QuadField field;
  std::vector<GarlandPiece> pieces;
  std::string distinction;  // witness separating the two ambient forms
};

// Loads and verifies a catalog file.  Format, '#' starts a comment:
//   dim = 4
//   [piece.1]
//   diagram = "P1_4_full.cox"
//   boundary = [6, 8]
//   volume = 1
//   [piece.2]
//   ...
// boundary nodes are 1-based as in the diagram files; volume is a positive
// rational (default 1); an optional name key overrides the diagram name.
// Diagram paths are resolved relative to the catalog file.  Loading checks
// the gluing assumption for every piece and the isomorphism of every
// interface link pair, computes each piece's arithmeticity class and
// restricted ambient form, and proves the two ambient forms dissimilar
// over the common trace field.  Any failure is a std::domain_error.
PieceCatalog load_catalog(const std::string& path);

// Classes among the nonempty words whose piece volumes sum to at most V.
// Throws std::invalid_argument when V <= 0 or the enumeration would exceed
// words of length 24.
long long count_by_volume(const Rat& V, const PieceCatalog& cat);

// Glued diagram of the word: the boundary nodes at each interface
// disappear, their links are identified along the lexicographically least
// isomorphism, piece edges are inherited, and facet pairs that share no
// piece are joined by Dotted(Unknown) edges.  The result is combinatorial:
// gram_matrix rejects it while unknown weights remain.  A one-sided piece
// serves at most one interface, so it can only cap an end.
CoxeterDiagram garland_diagram(const PieceCatalog& cat, const GarlandWord& w);

// Words using both pieces give not-quasi-arithmetic garlands; a garland of
// copies of one piece keeps that piece's class.
ArithClass classify_garland(const PieceCatalog& cat, const GarlandWord& w);

}  // namespace cox
