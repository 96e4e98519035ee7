#pragma once

#include <set>
#include <string>
#include <vector>

#include "coxarith/matrix.hpp"
#include "coxarith/quadfield.hpp"

namespace cox {

// "(p,n,z)".
std::string signature_str(const Signature& s);

// "Q" for an empty radicand set, else "Q(sqrt 5)", "Q(sqrt 2, sqrt 5)", ...
std::string field_str(const std::set<Int>& radicands);

// x written over the integral basis of O_K: "1-2a" with a = (1+sqrt d)/2
// when d = 1 mod 4, else in terms of sqrt(d); a denominator D come out as
// "(...)/D" and plain rationals as themselves.
std::string render_quad(const TowerElement& x, const QuadField& K);

// Compact place name: "p7" for inert or rational primes, generator form
// "p5=(1-2a)" for ramified ones, "p11=(11, 2-2a)" for split ones.
std::string render_place(const PrimeIdeal& P, const QuadField& K);

// similar_over_K with a printable certificate.  On not-similar the
// obstruction is re-derived: the reduced non-square determinant ratio with
// its norm in even dimension, the witness place with both Hasse invariants
// in odd dimension.
struct SimilarityPresentation {
  std::string verdict;  // "similar", "not-similar" or "inconclusive"
  std::string text;     // one-line rendering, e.g. "similar: lambda=1"
  std::vector<std::string> witnesses;
};
SimilarityPresentation present_similarity(const Mat& a, const Mat& b,
                                          const QuadField& K);

// A named symmetric matrix read from a .form file:
//   form NAME            (optional)
//   size N               (required, first)
//   entry I J EXPR       (1-based; EXPR runs to the end of the line)
// '#' starts a comment.  Unset entries default to 1 on the diagonal and 0
// elsewhere; entries fill symmetrically.  Setting the same entry twice is
// an error.
struct NamedForm {
  std::string name;
  Mat matrix;
};
NamedForm parse_form(const std::string& text);
NamedForm load_form(const std::string& path);
// Inverse of parse_form, stable byte for byte: non-default entries of the
// upper triangle in row-major order, serialized canonically.
std::string emit_form(const NamedForm& f);

// One record of the reproduction battery.
struct CheckRecord {
  std::string name;     // stable identifier; sorting by name is run order
  std::string inputs;   // files and parameters consumed
  std::string verdict;  // "pass", "fail" or "inconclusive"
  // Computed values, places and obstructions, serialized canonically.
  std::vector<std::string> witnesses;
  long long micros = 0;  // wall time; never serialized into payloads
};

struct Report {
  std::vector<CheckRecord> checks;
  bool pass = false;  // every check passed
};

// Runs the whole reproduction battery against the bundled dataset
// directory: Gram signatures, simplex vertex links, trace fields, ambient
// forms with their admissibility and their match against the bundled
// forms, arithmeticity classes, the two form-similarity verdicts,
// truncation weight verification, and garland class counts.  Records come
// back sorted by name.  Missing or unreadable dataset files surface as
// failed records, not exceptions.
Report paper_report(const std::string& data_dir);

// Plain-text rendering, one "verdict name witnesses" line per check plus a
// summary line.  Timings go to a separate channel, never in here.
std::string report_text(const Report& r);

// Deterministic JSON rendering: insertion-ordered keys, no timing data,
// byte-identical across runs on identical inputs.
std::string report_json(const Report& r);

}  // namespace cox
