#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coxarith/rational.hpp"

namespace cox {

// A tower of real quadratic extensions of Q.  Each generator g_i satisfies
// g_i^2 = s_i, where s_i lives in the subtower generated by g_0..g_{i-1},
// s_i is positive at the distinguished embedding, and s_i is not a square
// there (enforced when extending).  Under that invariant every element has
// a unique coordinate vector over the 2^height basis monomials
// g_S = prod_{i in S} g_i, S a subset of generators.
//
// The distinguished real embedding sends every generator to the positive
// square root of its (embedded) square.
//
// Towers are immutable and hash-consed: extending the same tower by the
// same square yields the same object, so elements built independently from
// equal data are directly compatible.

struct Generator {
  std::string name;
  // Coordinates of g^2 over the subsets of the earlier generators.
  std::map<uint32_t, Rat> square;
  // True when g^2 is a squarefree rational integer e > 1, in which case
  // radicand holds e.  Such generators are the ones rational-radical field
  // arithmetic (conjugation, field recognition) can act on.
  bool is_radical = false;
  Int radicand = 0;
};

class Tower;
using TowerPtr = std::shared_ptr<const Tower>;

class Tower {
 public:
  static const TowerPtr& rationals();
  // Interned: extending equal parents by equal generators returns the same
  // object.  Height is capped at 31 (subset masks are uint32_t).
  static TowerPtr extend(const TowerPtr& parent, Generator g);

  int height() const { return static_cast<int>(gens_.size()); }
  const Generator& gen(int i) const { return gens_[i]; }
  const TowerPtr& parent() const { return parent_; }

  // True when this tower is an initial segment of (or equal to) other.
  bool is_prefix_of(const Tower* other) const;

 private:
  Tower() = default;
  TowerPtr parent_;
  std::vector<Generator> gens_;
};

// Which generators are sent to the negative square root; bit i flips g_i.
using FlipMask = uint32_t;

class TowerElement {
 public:
  TowerElement() : tower_(Tower::rationals()) {}
  TowerElement(const Rat& r);
  TowerElement(long n) : TowerElement(Rat(n)) {}
  TowerElement(int n) : TowerElement(Rat(n)) {}

  static TowerElement rational(const Rat& r, const TowerPtr& t);
  static TowerElement generator(const TowerPtr& t, int i);
  static TowerElement from_coeffs(const TowerPtr& t,
                                  std::map<uint32_t, Rat> coeffs);

  const TowerPtr& tower() const { return tower_; }
  const std::map<uint32_t, Rat>& coeffs() const { return coeffs_; }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_rational() const;
  // Value of a rational element; throws otherwise.
  Rat rational_value() const;
  // OR of all basis-subset masks in the support.
  uint32_t support_mask() const;
  // True when the support involves a generator whose square is not a
  // rational integer.
  bool has_formal_support() const;

  // Reinterpret over a taller tower; t must extend tower().
  TowerElement promoted(const TowerPtr& t) const;

  TowerElement operator-() const;
  TowerElement& operator+=(const TowerElement& o);
  TowerElement& operator-=(const TowerElement& o);
  TowerElement& operator*=(const TowerElement& o);
  TowerElement& operator/=(const TowerElement& o);
  friend TowerElement operator+(TowerElement a, const TowerElement& b) { return a += b; }
  friend TowerElement operator-(TowerElement a, const TowerElement& b) { return a -= b; }
  friend TowerElement operator*(TowerElement a, const TowerElement& b) { return a *= b; }
  friend TowerElement operator/(TowerElement a, const TowerElement& b) { return a /= b; }
  TowerElement pow(long k) const;
  bool operator==(const TowerElement& o) const;
  bool operator!=(const TowerElement& o) const { return !(*this == o); }

  // Canonical serialization in the expression grammar: terms ordered by
  // subset mask, each "coeff*sqrt(..)*sqrt(..)"; parses back to an equal
  // element.
  std::string to_expr() const;

 private:
  TowerPtr tower_;
  std::map<uint32_t, Rat> coeffs_;  // no zero entries
};

struct RatInterval {
  Rat lo, hi;
  bool contains_zero() const { return lo <= 0 && 0 <= hi; }
  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
};

// Rational enclosure of x under the embedding selected by flips, with
// width at most 2^-bits.  Throws if the flip assignment is inconsistent
// (some generator's square becomes nonpositive under it).
RatInterval embed_interval(const TowerElement& x, FlipMask flips, int bits);

// Exact sign (-1, 0, +1) of x at the selected embedding.
int sign_of(const TowerElement& x, FlipMask flips = 0);

// Double approximation at the distinguished embedding.
double to_double(const TowerElement& x);

// Field automorphism flipping the selected rational-radical generators.
// Throws if flips or the support of x touch a formal generator.
TowerElement galois_conjugate(const TowerElement& x, FlipMask flips);

// Exact square test in the element's own tower.  Witness, when present, is
// normalised nonnegative at the distinguished embedding.
std::optional<TowerElement> is_square(const TowerElement& x);

// Square root of x, extending the tower when needed.  x must be positive
// at the distinguished embedding; x's tower must be a prefix of t.  When x
// is already a square the tower comes back unchanged.  New generators get
// a squarefree integer radicand when x is rational and a formal square
// otherwise.  Result is positive at the distinguished embedding.
std::pair<TowerPtr, TowerElement> adjoin_sqrt(const TowerPtr& t,
                                              const TowerElement& x);

}  // namespace cox
