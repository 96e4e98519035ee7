#include "coxarith/coxeter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "coxarith/expr.hpp"

namespace cox {

Edge Edge::label(int m) {
  if (m < 3) throw std::invalid_argument("label edges need m >= 3");
  Edge e;
  e.kind = EdgeKind::Label;
  e.m = m;
  return e;
}

Edge Edge::heavy() {
  Edge e;
  e.kind = EdgeKind::Heavy;
  return e;
}

Edge Edge::dotted(TowerElement w, std::string src) {
  Edge e;
  e.kind = EdgeKind::Dotted;
  e.weight_src = src.empty() ? w.to_expr() : std::move(src);
  e.weight = std::move(w);
  return e;
}

Edge Edge::dotted_unknown() {
  Edge e;
  e.kind = EdgeKind::Dotted;
  e.weight_src = "?";
  return e;
}

const Edge* CoxeterDiagram::edge(int i, int j) const {
  auto it = edges.find(std::minmax(i, j));
  return it == edges.end() ? nullptr : &it->second;
}

void CoxeterDiagram::set_edge(int i, int j, Edge e) {
  if (i == j) throw std::invalid_argument("self-edge");
  edges[std::minmax(i, j)] = std::move(e);
}

bool CoxeterDiagram::all_weights_known() const {
  for (const auto& [key, e] : edges)
    if (e.kind == EdgeKind::Dotted && !e.weight) return false;
  return true;
}

namespace {

struct Tok {
  std::string text;
  int col;  // 1-based
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

int parse_int(const Tok& t, int line, const char* what) {
  size_t pos = 0;
  if (!t.text.empty() && (std::isdigit(static_cast<unsigned char>(t.text[0])) ||
                          t.text[0] == '-')) {
    try {
      int v = std::stoi(t.text, &pos);
      if (pos == t.text.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ParseError(line, t.col, std::string("expected ") + what);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Message part of a ParseError's what() string, i.e. everything after the
// position prefix the constructor prepends.
std::string parse_error_msg(const ParseError& e) {
  std::string w = e.what();
  size_t p = w.find(": ");
  return p == std::string::npos ? w : w.substr(p + 2);
}

}  // namespace

CoxeterDiagram parse_diagram(const std::string& text) {
  CoxeterDiagram d;
  TowerPtr tower = Tower::rationals();
  bool have_vertices = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::vector<Tok> tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& head = tok[0].text;
    if (head == "diagram") {
      if (have_vertices || !d.name.empty())
        throw ParseError(lineno, tok[0].col,
                         "diagram line must come first, once");
      if (tok.size() != 2)
        throw ParseError(lineno, tok[0].col, "expected: diagram NAME");
      d.name = tok[1].text;
    } else if (head == "vertices") {
      if (have_vertices)
        throw ParseError(lineno, tok[0].col, "duplicate vertices line");
      if (tok.size() != 2)
        throw ParseError(lineno, tok[0].col, "expected: vertices N");
      d.n = parse_int(tok[1], lineno, "a vertex count");
      if (d.n < 1)
        throw ParseError(lineno, tok[1].col, "vertex count must be positive");
      have_vertices = true;
    } else if (head == "edge") {
      if (!have_vertices)
        throw ParseError(lineno, tok[0].col,
                         "edge before the vertices line");
      if (tok.size() < 4)
        throw ParseError(lineno, tok[0].col,
                         "expected: edge I J m=M | edge I J dotted w=EXPR");
      int i = parse_int(tok[1], lineno, "a vertex index");
      int j = parse_int(tok[2], lineno, "a vertex index");
      for (int v : {i, j})
        if (v < 1 || v > d.n)
          throw ParseError(lineno, tok[v == i ? 1 : 2].col,
                           "vertex index out of range");
      if (i == j) throw ParseError(lineno, tok[2].col, "self-edge");
      std::pair<int, int> key = std::minmax(i - 1, j - 1);
      if (d.edges.count(key))
        throw ParseError(lineno, tok[1].col, "duplicate edge");
      const Tok& spec = tok[3];
      if (spec.text.rfind("m=", 0) == 0) {
        if (tok.size() != 4)
          throw ParseError(lineno, tok[4].col, "trailing tokens after m=");
        std::string val = spec.text.substr(2);
        if (val == "inf") {
          d.edges[key] = Edge::heavy();
        } else {
          Tok vt{val, spec.col + 2};
          int m = parse_int(vt, lineno, "an integer or inf after m=");
          if (m < 3)
            throw ParseError(lineno, vt.col,
                             "m must be at least 3; omit the edge for m = 2");
          d.edges[key] = Edge::label(m);
        }
      } else if (spec.text == "dotted") {
        if (tok.size() < 5 || tok[4].text.rfind("w=", 0) != 0)
          throw ParseError(
              lineno,
              tok.size() >= 5 ? tok[4].col
                              : spec.col + static_cast<int>(spec.text.size()),
              "expected w=EXPR or w=? after dotted");
        // The expression runs to the end of the line.
        int off = tok[4].col + 1;          // 0-based index just past "w="
        std::string tail = line.substr(off);
        size_t lead = tail.find_first_not_of(" \t\r\n");
        int exprcol = off + static_cast<int>(lead == std::string::npos ? 0 : lead) + 1;
        std::string expr = trim(tail);
        if (expr.empty())
          throw ParseError(lineno, exprcol, "expected expression after w=");
        if (expr == "?") {
          d.edges[key] = Edge::dotted_unknown();
        } else {
          TowerElement w;
          try {
            w = parse_expr(expr, tower, lineno);
          } catch (const ParseError& e) {
            throw ParseError(lineno, exprcol + e.col - 1, parse_error_msg(e));
          }
          if (sign_of(w - TowerElement(1)) <= 0)
            throw ParseError(lineno, exprcol,
                             "dotted weight must exceed 1");
          Edge e;
          e.kind = EdgeKind::Dotted;
          e.weight = w;
          e.weight_src = expr;
          d.edges[key] = std::move(e);
        }
      } else {
        throw ParseError(lineno, spec.col, "expected m=... or dotted");
      }
    } else {
      throw ParseError(lineno, tok[0].col,
                       "expected diagram, vertices or edge");
    }
  }
  if (!have_vertices)
    throw ParseError(lineno + 1, 1, "missing vertices line");
  d.tower = tower;
  for (auto& [key, e] : d.edges)
    if (e.weight) e.weight = e.weight->promoted(tower);
  return d;
}

std::string emit_diagram(const CoxeterDiagram& d) {
  std::ostringstream out;
  if (!d.name.empty()) out << "diagram " << d.name << "\n";
  out << "vertices " << d.n << "\n";
  for (const auto& [key, e] : d.edges) {
    out << "edge " << key.first + 1 << " " << key.second + 1 << " ";
    switch (e.kind) {
      case EdgeKind::Label:
        out << "m=" << e.m;
        break;
      case EdgeKind::Heavy:
        out << "m=inf";
        break;
      case EdgeKind::Dotted:
        if (!e.weight)
          out << "dotted w=?";
        else if (!e.weight_src.empty())
          out << "dotted w=" << e.weight_src;
        else
          out << "dotted w=" << e.weight->to_expr();
        break;
    }
    out << "\n";
  }
  return out.str();
}

std::pair<TowerPtr, TowerElement> label_cos(const TowerPtr& t, int m) {
  switch (m) {
    case 2:
      return {t, TowerElement(0)};
    case 3:
      return {t, TowerElement(Rat(1, 2))};
    case 4: {
      auto [t2, r] = adjoin_sqrt(t, TowerElement(2));
      return {t2, r / 2};
    }
    case 5: {
      auto [t2, r] = adjoin_sqrt(t, TowerElement(5));
      return {t2, (TowerElement(1).promoted(t2) + r) / 4};
    }
    case 6: {
      auto [t2, r] = adjoin_sqrt(t, TowerElement(3));
      return {t2, r / 2};
    }
    default:
      break;
  }
  if (m >= 8 && m % 2 == 0) {
    // cos(pi/m)^2 = (1 + cos(2 pi/m)) / 2, and 2 pi/m = pi/(m/2).
    auto [t2, c] = label_cos(t, m / 2);
    return adjoin_sqrt(t2, (c + 1) / 2);
  }
  throw std::domain_error("unsupported label m=" + std::to_string(m) +
                          ": cos(pi/m) is not in a quadratic tower");
}

Mat gram_matrix(const CoxeterDiagram& d) {
  if (!d.all_weights_known())
    throw std::domain_error("diagram has unknown dotted weights");
  TowerPtr t = d.tower;
  std::set<int> labels;
  for (const auto& [key, e] : d.edges)
    if (e.kind == EdgeKind::Label) labels.insert(e.m);
  std::map<int, TowerElement> cosv;
  for (int m : labels) {
    auto [t2, c] = label_cos(t, m);
    t = t2;
    cosv.emplace(m, c);
  }
  Mat g(d.n, std::vector<TowerElement>(d.n, TowerElement(0)));
  for (int i = 0; i < d.n; ++i) g[i][i] = TowerElement(1);
  for (const auto& [key, e] : d.edges) {
    TowerElement v;
    switch (e.kind) {
      case EdgeKind::Label:
        v = -cosv.at(e.m);
        break;
      case EdgeKind::Heavy:
        v = TowerElement(-1);
        break;
      case EdgeKind::Dotted:
        v = -*e.weight;
        break;
    }
    g[key.first][key.second] = v;
    g[key.second][key.first] = v;
  }
  align_mat(g);
  return g;
}

const char* to_string(SubdiagramClass c) {
  switch (c) {
    case SubdiagramClass::Elliptic: return "elliptic";
    case SubdiagramClass::Parabolic: return "parabolic";
    case SubdiagramClass::HyperbolicCompact: return "hyperbolic-compact";
    case SubdiagramClass::HyperbolicNoncompact: return "hyperbolic-noncompact";
    case SubdiagramClass::IndefiniteOther: return "indefinite-other";
  }
  return "?";
}

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Ordinary: return "ordinary";
    case VertexKind::Ideal: return "ideal";
    case VertexKind::Hyperideal: return "hyperideal";
  }
  return "?";
}

namespace {

std::vector<std::vector<int>> components_of(const Mat& m) {
  int k = static_cast<int>(m.size());
  std::vector<int> comp(k, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < k; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int w = 0; w < k; ++w)
        if (w != v && comp[w] < 0 && !m[v][w].is_zero()) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

bool positive_definite(const Mat& m) {
  Signature s = sym_signature(m);
  return s.neg == 0 && s.zero == 0;
}

}  // namespace

SubdiagramClass classify_subdiagram(const Mat& m) {
  Signature sig = sym_signature(m);
  if (sig.neg == 0 && sig.zero == 0) return SubdiagramClass::Elliptic;
  if (sig.neg == 0) {
    // PSD with kernel: parabolic asks every connected component to be
    // degenerate on its own.
    bool all_degenerate = true;
    for (const auto& c : components_of(m))
      if (sym_signature(principal_submatrix(m, c)).zero == 0)
        all_degenerate = false;
    return all_degenerate ? SubdiagramClass::Parabolic
                          : SubdiagramClass::IndefiniteOther;
  }
  if (sig.neg == 1 && sig.zero == 0) {
    // Lanner: every proper principal submatrix of each component is
    // elliptic; hereditarily it is enough to delete single nodes.
    for (const auto& c : components_of(m))
      for (int drop : c) {
        std::vector<int> rest;
        for (int v : c)
          if (v != drop) rest.push_back(v);
        if (!positive_definite(principal_submatrix(m, rest)))
          return SubdiagramClass::HyperbolicNoncompact;
      }
    return SubdiagramClass::HyperbolicCompact;
  }
  return SubdiagramClass::IndefiniteOther;
}

std::vector<VertexLink> vertex_links(const CoxeterDiagram& d) {
  Mat g = gram_matrix(d);
  Signature sig = sym_signature(g);
  if (sig.neg != 1 || sig.zero != 0)
    throw std::domain_error("not a simplex diagram: Gram signature is not (n-1, 1)");
  std::vector<VertexLink> out;
  for (int i = 0; i < d.n; ++i) {
    std::vector<int> rest;
    for (int j = 0; j < d.n; ++j)
      if (j != i) rest.push_back(j);
    SubdiagramClass cls = classify_subdiagram(principal_submatrix(g, rest));
    VertexKind kind;
    switch (cls) {
      case SubdiagramClass::Elliptic: kind = VertexKind::Ordinary; break;
      case SubdiagramClass::Parabolic: kind = VertexKind::Ideal; break;
      case SubdiagramClass::HyperbolicCompact: kind = VertexKind::Hyperideal; break;
      default:
        throw std::domain_error(
            std::string("link opposite facet ") + std::to_string(i + 1) +
            " is " + to_string(cls) + "; truncation is undefined");
    }
    out.push_back({i, kind, cls});
  }
  return out;
}

namespace {

// Edge realizing an exact Gram entry x < 0, or nullopt for x == 0.  Angles
// pi/m are recognized by rounding the numeric angle and certifying the
// candidate exactly.
std::optional<Edge> edge_from_entry(TowerPtr& t, const TowerElement& x) {
  int sx = sign_of(x);
  if (sx == 0) return std::nullopt;
  if (sx > 0)
    throw std::domain_error("Gram entry " + x.to_expr() +
                            " is positive: not an acute-angled polyhedron");
  TowerElement w = -x;
  int cmp = sign_of(w - TowerElement(1));
  if (cmp > 0) return Edge::dotted(w);
  if (cmp == 0) return Edge::heavy();
  double v = to_double(w);  // in (0, 1)
  int guess = static_cast<int>(std::lround(M_PI / std::acos(v)));
  for (int m = std::max(3, guess - 1); m <= guess + 1; ++m) {
    TowerPtr t2 = t;
    TowerElement c;
    try {
      std::tie(t2, c) = label_cos(t, m);
    } catch (const std::domain_error&) {
      continue;
    }
    if (c == w.promoted(t2)) {
      t = t2;
      return Edge::label(m);
    }
  }
  throw std::domain_error("Gram entry " + x.to_expr() +
                          " is not a supported Coxeter angle");
}

}  // namespace

CoxeterDiagram truncate_hyperideal(const CoxeterDiagram& d) {
  std::vector<VertexLink> links = vertex_links(d);
  std::vector<int> hyper;
  for (const VertexLink& l : links)
    if (l.kind == VertexKind::Hyperideal) hyper.push_back(l.opposite);
  if (hyper.empty()) return d;

  Mat g = gram_matrix(d);
  Mat gi = mat_inverse(g);
  TowerPtr t = align_mat(gi);
  int h = static_cast<int>(hyper.size());
  std::vector<TowerElement> root(h);  // sqrt((G^-1)_ii)
  for (int k = 0; k < h; ++k) {
    TowerElement c = gi[hyper[k]][hyper[k]];
    if (sign_of(c) <= 0)
      throw std::logic_error("hyperideal vertex with (G^-1)_ii <= 0");
    std::tie(t, root[k]) = adjoin_sqrt(t, c);
  }

  CoxeterDiagram out = d;
  out.n = d.n + h;
  // (u_k, e_j) = -delta_{i_k j} / sqrt(c_k): each truncating hyperplane is
  // orthogonal to every original facet except the one it faces.
  for (int k = 0; k < h; ++k) {
    auto e = edge_from_entry(t, -(TowerElement(1).promoted(t) / root[k]));
    if (e) out.set_edge(hyper[k], d.n + k, *e);
  }
  for (int k = 0; k < h; ++k)
    for (int l = k + 1; l < h; ++l) {
      TowerElement entry =
          gi[hyper[k]][hyper[l]].promoted(t) / (root[k] * root[l]);
      auto e = edge_from_entry(t, entry);
      if (e) out.set_edge(d.n + k, d.n + l, *e);
    }
  out.tower = t;
  for (auto& [key, e] : out.edges)
    if (e.weight) e.weight = e.weight->promoted(t);
  return out;
}

namespace {

// Node layout shared by double_template and double_exact: facets
// orthogonal to f (absent edge) merge across the double, the others come
// in two copies.  Returns (merged, doubled).
std::pair<std::vector<int>, std::vector<int>> double_split(
    const CoxeterDiagram& d, int f) {
  if (f < 0 || f >= d.n) throw std::invalid_argument("facet index out of range");
  std::vector<int> merged, doubled;
  for (int g = 0; g < d.n; ++g) {
    if (g == f) continue;
    const Edge* e = d.edge(f, g);
    if (!e) {
      merged.push_back(g);
    } else if (e->kind == EdgeKind::Label) {
      throw std::domain_error(
          "facet meets facet " + std::to_string(g + 1) +
          " at angle pi/m: doubling needs an all-right-angled facet");
    } else {
      doubled.push_back(g);
    }
  }
  return {merged, doubled};
}

}  // namespace

CoxeterDiagram double_template(const CoxeterDiagram& d, int f) {
  auto [merged, doubled] = double_split(d, f);
  int nm = static_cast<int>(merged.size());
  int nd = static_cast<int>(doubled.size());
  // New indices: merged nodes, then copy 1, then copy 2.
  std::vector<int> pos(d.n, -1);
  for (int k = 0; k < nm; ++k) pos[merged[k]] = k;
  for (int k = 0; k < nd; ++k) pos[doubled[k]] = nm + k;

  CoxeterDiagram out;
  out.name = d.name;
  out.n = nm + 2 * nd;
  out.tower = d.tower;
  for (const auto& [key, e] : d.edges) {
    auto [i, j] = key;
    if (i == f || j == f) continue;
    out.set_edge(pos[i], pos[j], e);                    // inside copy 1
    if (pos[i] >= nm || pos[j] >= nm)                   // mirror image
      out.set_edge(pos[i] >= nm ? pos[i] + nd : pos[i],
                   pos[j] >= nm ? pos[j] + nd : pos[j], e);
  }
  // Every cross-copy pair diverges: both factors of (e_h, e_f)(e_k, e_f)
  // are <= -1 and (e_h, e_k) <= 0, so the mirrored entry is <= -2.
  for (int k = 0; k < nd; ++k)
    for (int l = 0; l < nd; ++l)
      out.set_edge(nm + k, nm + nd + l, Edge::dotted_unknown());
  return out;
}

CoxeterDiagram double_exact(const CoxeterDiagram& d, int f) {
  auto [merged, doubled] = double_split(d, f);
  Mat g = gram_matrix(d);
  TowerPtr t = align_mat(g);
  int nm = static_cast<int>(merged.size());
  int nd = static_cast<int>(doubled.size());
  std::vector<int> pos(d.n, -1);
  for (int k = 0; k < nm; ++k) pos[merged[k]] = k;
  for (int k = 0; k < nd; ++k) pos[doubled[k]] = nm + k;

  CoxeterDiagram out;
  out.name = d.name;
  out.n = nm + 2 * nd;
  for (const auto& [key, e] : d.edges) {
    auto [i, j] = key;
    if (i == f || j == f) continue;
    out.set_edge(pos[i], pos[j], e);
    if (pos[i] >= nm || pos[j] >= nm)
      out.set_edge(pos[i] >= nm ? pos[i] + nd : pos[i],
                   pos[j] >= nm ? pos[j] + nd : pos[j], e);
  }
  // (e_h, R e_k) = g_hk - 2 g_hf g_kf across the two copies.
  for (int k = 0; k < nd; ++k)
    for (int l = 0; l < nd; ++l) {
      TowerElement entry = g[doubled[k]][doubled[l]] -
                           2 * g[doubled[k]][f] * g[doubled[l]][f];
      auto e = edge_from_entry(t, entry);
      if (e) out.set_edge(nm + k, nm + nd + l, *e);
    }
  out.tower = t;
  for (auto& [key, e] : out.edges)
    if (e.weight) e.weight = e.weight->promoted(t);
  return out;
}

namespace {

std::vector<std::vector<int>> default_minors(int n, int dim) {
  std::vector<std::vector<int>> out;
  if (n == dim + 3) {
    std::vector<int> lead, trail;
    for (int i = 0; i + 1 < n; ++i) lead.push_back(i);
    for (int i = 1; i < n; ++i) trail.push_back(i);
    out.push_back(lead);
    out.push_back(trail);
  }
  return out;
}

void check_minor_indices(const std::vector<std::vector<int>>& minors, int n) {
  for (const auto& idx : minors) {
    if (idx.empty()) throw std::invalid_argument("empty minor index set");
    for (int i : idx)
      if (i < 0 || i >= n)
        throw std::invalid_argument("minor index out of range");
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("repeated minor index");
  }
}

}  // namespace

TruncationReport verify_truncation_weights(
    const CoxeterDiagram& d, int dim,
    const std::vector<std::vector<int>>& minors) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  Mat g = gram_matrix(d);
  std::vector<std::vector<int>> conds =
      minors.empty() ? default_minors(d.n, dim) : minors;
  check_minor_indices(conds, d.n);

  TruncationReport rep;
  rep.pass = true;
  for (const auto& idx : conds) {
    MinorCondition mc;
    mc.indices = idx;
    mc.vanishes = det(principal_submatrix(g, idx)).is_zero();
    rep.pass = rep.pass && mc.vanishes;
    rep.minors.push_back(std::move(mc));
  }
  rep.det_zero = det(g).is_zero();
  rep.sig = sym_signature(g);
  rep.signature_ok =
      rep.sig.pos == dim && rep.sig.neg == 1 && rep.sig.zero == d.n - 1 - dim;
  rep.pass = rep.pass && rep.det_zero && rep.signature_ok;
  return rep;
}

namespace {

double det_numeric(std::vector<std::vector<double>> m) {
  int n = static_cast<int>(m.size());
  double d = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[p][c])) p = r;
    if (m[p][c] == 0) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

// Solves the u x u system A x = b in place; returns false when singular.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  int n = static_cast<int>(a.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    if (std::fabs(a[p][c]) < 1e-300) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 0; c < n; ++c) b[c] /= a[c][c];
  return true;
}

}  // namespace

std::vector<NumericWeightSolution> solve_truncation_weights_numeric(
    const CoxeterDiagram& tmpl, int dim,
    const std::vector<std::vector<int>>& minors) {
  std::vector<std::pair<int, int>> unknowns;
  for (const auto& [key, e] : tmpl.edges)
    if (e.kind == EdgeKind::Dotted && !e.weight) unknowns.push_back(key);
  int u = static_cast<int>(unknowns.size());
  if (u == 0) throw std::invalid_argument("no unknown dotted weights");

  std::vector<std::vector<int>> conds =
      minors.empty() ? default_minors(tmpl.n, dim) : minors;
  check_minor_indices(conds, tmpl.n);
  int ne = static_cast<int>(conds.size()) + 1;  // plus the full determinant
  if (ne < u)
    throw std::invalid_argument("fewer vanishing conditions than unknowns");

  // Numeric Gram matrix with unknown entries left to the solver.
  int n = tmpl.n;
  std::vector<std::vector<double>> base(n, std::vector<double>(n, 0));
  for (int i = 0; i < n; ++i) base[i][i] = 1;
  for (const auto& [key, e] : tmpl.edges) {
    double v = 0;
    switch (e.kind) {
      case EdgeKind::Label: v = -std::cos(M_PI / e.m); break;
      case EdgeKind::Heavy: v = -1; break;
      case EdgeKind::Dotted: v = e.weight ? -to_double(*e.weight) : 0; break;
    }
    base[key.first][key.second] = v;
    base[key.second][key.first] = v;
  }

  auto residuals = [&](const std::vector<double>& x,
                       const std::vector<std::vector<int>>& cs) {
    std::vector<std::vector<double>> g = base;
    for (int k = 0; k < u; ++k) {
      auto [i, j] = unknowns[k];
      g[i][j] = g[j][i] = -x[k];
    }
    std::vector<double> r;
    for (const auto& idx : cs) {
      std::vector<std::vector<double>> sub(idx.size(),
                                           std::vector<double>(idx.size()));
      for (size_t a = 0; a < idx.size(); ++a)
        for (size_t b = 0; b < idx.size(); ++b)
          sub[a][b] = g[idx[a]][idx[b]];
      r.push_back(det_numeric(sub));
    }
    r.push_back(det_numeric(g));
    return r;
  };
  auto norm_inf = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };

  // Gauss-Newton with backtracking on the given condition set; returns the
  // final max-norm residual.
  auto gauss_newton = [&](std::vector<double>& x,
                          const std::vector<std::vector<int>>& cs) {
    int m = static_cast<int>(cs.size()) + 1;
    double fx = norm_inf(residuals(x, cs));
    for (int it = 0; it < 200 && fx >= 1e-14; ++it) {
      std::vector<double> r = residuals(x, cs);
      // Jacobian by central differences.
      std::vector<std::vector<double>> jac(m, std::vector<double>(u));
      for (int k = 0; k < u; ++k) {
        double h = 1e-7 * std::max(1.0, std::fabs(x[k]));
        std::vector<double> xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        std::vector<double> rp = residuals(xp, cs), rm = residuals(xm, cs);
        for (int e = 0; e < m; ++e) jac[e][k] = (rp[e] - rm[e]) / (2 * h);
      }
      // Gauss-Newton step: (J^T J) delta = -J^T r.
      std::vector<std::vector<double>> jtj(u, std::vector<double>(u, 0));
      std::vector<double> jtr(u, 0);
      for (int a = 0; a < u; ++a) {
        for (int b = 0; b < u; ++b)
          for (int e = 0; e < m; ++e) jtj[a][b] += jac[e][a] * jac[e][b];
        for (int e = 0; e < m; ++e) jtr[a] += jac[e][a] * r[e];
      }
      for (double& v : jtr) v = -v;
      if (!solve_linear(jtj, jtr)) break;
      // Backtracking keeps the step from overshooting.
      double scale = 1;
      bool improved = false;
      for (int bt = 0; bt < 40; ++bt, scale /= 2) {
        std::vector<double> xn = x;
        for (int k = 0; k < u; ++k) xn[k] += scale * jtr[k];
        double fn = norm_inf(residuals(xn, cs));
        if (fn < fx) {
          x = xn;
          fx = fn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    return fx;
  };

  // Minors of the stated conditions can be flat at the solution: at the
  // target rank dim+1 the adjugates of the full matrix and of any submatrix
  // missing an unknown edge vanish, so whole Jacobian columns can be zero
  // and Gauss-Newton then leaves ~sqrt(tolerance) errors.  The principal
  // minors of order dim+2 (the smallest order forced to vanish) have rank-1
  // adjugates at the solution and see every edge, so a second pass on all
  // of them sharpens the root.  The pass is kept only when it stays local
  // and does not hurt the stated conditions.
  std::vector<std::vector<int>> polish_conds = conds;
  if (dim + 2 < n) {
    std::vector<int> idx(dim + 2);
    for (int k = 0; k < dim + 2; ++k) idx[k] = k;
    long count = 1;
    for (int k = 1; k <= dim + 2; ++k) count = count * (n - k + 1) / k;
    if (count <= 256) {
      for (;;) {
        polish_conds.push_back(idx);
        int k = dim + 1;
        while (k >= 0 && idx[k] == n - (dim + 2) + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int l = k + 1; l < dim + 2; ++l) idx[l] = idx[l - 1] + 1;
      }
    }
  }
  auto polish = [&](std::vector<double>& x, double fx) {
    if (polish_conds.size() == conds.size()) return fx;
    std::vector<double> xp = x;
    double fp = gauss_newton(xp, polish_conds);
    if (fp >= 1e-12) return fx;
    double step = 0;
    for (int k = 0; k < u; ++k) step = std::max(step, std::fabs(xp[k] - x[k]));
    double forig = norm_inf(residuals(xp, conds));
    if (step > 1e-2 || forig > std::max(fx, 1e-12)) return fx;
    x = xp;
    return forig;
  };

  std::vector<NumericWeightSolution> found;
  std::vector<double> grid;
  for (double s = 1.05; s < 4.0; s += (u > 3 ? 0.8 : 0.4)) grid.push_back(s);
  std::vector<size_t> pick(u, 0);
  while (true) {
    std::vector<double> x(u);
    for (int k = 0; k < u; ++k) x[k] = grid[pick[k]];

    double fx = gauss_newton(x, conds);
    if (fx < 1e-12) {
      fx = polish(x, fx);
      bool positive = true;
      for (double v : x) positive = positive && v > 1.0;
      if (positive) {
        bool fresh = true;
        for (const auto& s : found) {
          double dist = 0;
          int k = 0;
          for (const auto& [key, w] : s.weights)
            dist = std::max(dist, std::fabs(w - x[k++]));
          if (dist < 1e-6) fresh = false;
        }
        if (fresh) {
          NumericWeightSolution sol;
          sol.residual = fx;
          for (int k = 0; k < u; ++k) sol.weights[unknowns[k]] = x[k];
          found.push_back(std::move(sol));
        }
      }
    }

    int k = 0;
    while (k < u && ++pick[k] == grid.size()) pick[k++] = 0;
    if (k == u) break;
  }
  std::sort(found.begin(), found.end(),
            [](const NumericWeightSolution& a, const NumericWeightSolution& b) {
              auto ia = a.weights.begin();
              auto ib = b.weights.begin();
              for (; ia != a.weights.end(); ++ia, ++ib)
                if (ia->second != ib->second) return ia->second < ib->second;
              return false;
            });
  return found;
}

}  // namespace cox
