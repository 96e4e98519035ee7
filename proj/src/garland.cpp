#include "coxarith/garland.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "coxarith/expr.hpp"

namespace cox {

namespace {

void validate_word(const GarlandWord& w) {
  if (w.seq.empty())
    throw std::invalid_argument("garland word must be nonempty");
  for (int x : w.seq)
    if (x != 1 && x != 2)
      throw std::invalid_argument("garland word letters must be 1 or 2");
}

std::vector<int> doubled_word(const GarlandWord& w) {
  std::vector<int> d = w.seq;
  d.insert(d.end(), w.seq.rbegin(), w.seq.rend());
  return d;
}

// Booth's least-rotation algorithm: index of the lexicographically
// smallest rotation of s.
int least_rotation(const std::vector<int>& s) {
  int n = static_cast<int>(s.size());
  std::vector<int> f(2 * n, -1);
  int k = 0;
  for (int j = 1; j < 2 * n; ++j) {
    int sj = s[j % n];
    int i = f[j - k - 1];
    while (i != -1 && sj != s[(k + i + 1) % n]) {
      if (sj < s[(k + i + 1) % n]) k = j - i - 1;
      i = f[i];
    }
    if (sj != s[(k + i + 1) % n]) {
      if (sj < s[k % n]) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

// Length-tagged bit encoding of the least rotation of the doubled word.
// Words have length <= 24, so the doubled word fits in 48 bits.
uint64_t canonical_key(const GarlandWord& w) {
  std::vector<int> d = doubled_word(w);
  int len = static_cast<int>(d.size());
  int r = least_rotation(d);
  uint64_t bits = 0;
  for (int i = 0; i < len; ++i)
    bits = bits << 1 | static_cast<uint64_t>(d[(r + i) % len] - 1);
  return (static_cast<uint64_t>(len) << 48) | bits;
}

// Nodes whose facets meet `node` orthogonally: joined by an absent edge.
std::vector<int> orthogonal_link(const CoxeterDiagram& d, int node) {
  std::vector<int> out;
  for (int j = 0; j < d.n; ++j)
    if (j != node && d.edge(node, j) == nullptr) out.push_back(j);
  return out;
}

bool edges_match(const Edge* a, const Edge* b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case EdgeKind::Label:
      return a->m == b->m;
    case EdgeKind::Heavy:
      return true;
    case EdgeKind::Dotted:
      if (a->weight.has_value() != b->weight.has_value()) return false;
      return !a->weight || *a->weight == *b->weight;
  }
  return false;
}

// Lexicographically least edge-preserving bijection from the induced
// subdiagram on `from` onto the one on `to` (both taken ascending); empty
// when the subdiagrams are not isomorphic.
std::vector<int> link_isomorphism(const CoxeterDiagram& da,
                                  std::vector<int> from,
                                  const CoxeterDiagram& db,
                                  std::vector<int> to) {
  if (from.size() != to.size()) return {};
  std::sort(from.begin(), from.end());
  std::sort(to.begin(), to.end());
  std::vector<int> perm = to;
  do {
    bool ok = true;
    for (size_t i = 0; i < from.size() && ok; ++i)
      for (size_t j = i + 1; j < from.size() && ok; ++j)
        ok = edges_match(da.edge(from[i], from[j]),
                         db.edge(perm[i], perm[j]));
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {};
}

long long unique_count(std::vector<uint64_t>& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return static_cast<long long>(keys.size());
}

}  // namespace

GarlandWord::GarlandWord(std::vector<int> s) : seq(std::move(s)) {
  validate_word(*this);
}

GarlandWord mirror(const GarlandWord& w) {
  validate_word(w);
  GarlandWord out;
  out.seq.assign(w.seq.rbegin(), w.seq.rend());
  return out;
}

std::uint64_t class_key(const GarlandWord& w) {
  if (w.seq.size() > 24)
    throw std::invalid_argument("word length must be at most 24");
  return canonical_key(w);
}

bool equivalent(const GarlandWord& a, const GarlandWord& b) {
  if (a.seq.size() != b.seq.size()) return false;
  std::vector<int> da = doubled_word(a);
  std::vector<int> db = doubled_word(b);
  int len = static_cast<int>(da.size());
  for (int r = 0; r < len; ++r) {
    bool ok = true;
    for (int i = 0; i < len && ok; ++i) ok = da[(r + i) % len] == db[i];
    if (ok) return true;
  }
  return false;
}

long long count_classes(int n) {
  if (n < 1 || n > 24)
    throw std::invalid_argument("word length must be between 1 and 24");
  std::vector<uint64_t> keys;
  keys.reserve(uint64_t{1} << n);
  GarlandWord w;
  w.seq.resize(n);
  for (uint32_t word = 0; word < (uint32_t{1} << n); ++word) {
    for (int i = 0; i < n; ++i) w.seq[i] = 1 + ((word >> i) & 1);
    keys.push_back(canonical_key(w));
  }
  return unique_count(keys);
}

AssumptionCheck check_assumption(const CoxeterDiagram& d,
                                 const std::vector<int>& marked) {
  if (marked.empty() || marked.size() > 2)
    throw std::invalid_argument("mark one or two boundary nodes");
  for (int f : marked)
    if (f < 0 || f >= d.n)
      throw std::invalid_argument("marked node out of range");
  if (marked.size() == 2 && marked[0] == marked[1])
    throw std::invalid_argument("marked nodes must be distinct");
  for (int f : marked)
    for (int j = 0; j < d.n; ++j) {
      if (j == f) continue;
      const Edge* e = d.edge(f, j);
      if (e && e->kind == EdgeKind::Label)
        return {AssumptionStatus::Fails,
                "node " + std::to_string(f + 1) + " meets node " +
                    std::to_string(j + 1) + " at angle pi/" +
                    std::to_string(e->m)};
    }
  if (marked.size() == 1) return {AssumptionStatus::OneSided, ""};
  std::vector<int> la = orthogonal_link(d, marked[0]);
  std::vector<int> lb = orthogonal_link(d, marked[1]);
  if (link_isomorphism(d, la, d, lb).empty())
    return {AssumptionStatus::Fails,
            "the links of nodes " + std::to_string(marked[0] + 1) + " and " +
                std::to_string(marked[1] + 1) + " are not isomorphic"};
  return {AssumptionStatus::TwoSided, ""};
}

namespace {

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string unquoted(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"')
    throw std::domain_error("catalog line " + std::to_string(line) +
                            ": expected a quoted string");
  return s.substr(1, s.size() - 2);
}

Rat parse_rational(const std::string& s, int line) {
  try {
    size_t slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(Int(s.substr(0, slash))) / Rat(den);
  } catch (const std::invalid_argument&) {
    throw std::domain_error("catalog line " + std::to_string(line) +
                            ": bad rational '" + s + "'");
  }
}

std::vector<int> parse_int_list(const std::string& s, int line) {
  std::string t = trimmed(s);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw std::domain_error("catalog line " + std::to_string(line) +
                            ": expected [..]");
  std::vector<int> out;
  std::istringstream in(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trimmed(item);
    size_t used = 0;
    int v = std::stoi(item, &used);
    if (used != item.size())
      throw std::domain_error("catalog line " + std::to_string(line) +
                              ": bad integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::domain_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

PieceCatalog load_catalog(const std::string& path) {
  struct RawPiece {
    bool seen = false;
    std::string name, diagram;
    std::vector<int> boundary;
    Rat volume = 1;
  };
  RawPiece raw[2];
  int dim = 0;
  {
    std::istringstream in(read_text_file(path));
    std::string line;
    int lineno = 0;
    int cur = -1;
    while (std::getline(in, line)) {
      ++lineno;
      size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trimmed(line);
      if (line.empty()) continue;
      if (line == "[piece.1]" || line == "[piece.2]") {
        cur = line[7] - '1';
        if (raw[cur].seen)
          throw std::domain_error("catalog line " + std::to_string(lineno) +
                                  ": duplicate section " + line);
        raw[cur].seen = true;
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::domain_error("catalog line " + std::to_string(lineno) +
                                ": expected key = value");
      std::string key = trimmed(line.substr(0, eq));
      std::string val = trimmed(line.substr(eq + 1));
      if (key == "dim" && cur == -1) {
        dim = std::stoi(val);
      } else if (cur == -1) {
        throw std::domain_error("catalog line " + std::to_string(lineno) +
                                ": key '" + key + "' outside piece section");
      } else if (key == "diagram") {
        raw[cur].diagram = unquoted(val, lineno);
      } else if (key == "name") {
        raw[cur].name = unquoted(val, lineno);
      } else if (key == "boundary") {
        raw[cur].boundary = parse_int_list(val, lineno);
      } else if (key == "volume") {
        raw[cur].volume = parse_rational(val, lineno);
      } else {
        throw std::domain_error("catalog line " + std::to_string(lineno) +
                                ": unknown key '" + key + "'");
      }
    }
  }
  if (dim < 2) throw std::domain_error("catalog must set dim >= 2");
  for (const RawPiece& r : raw)
    if (!r.seen || r.diagram.empty())
      throw std::domain_error("catalog must define [piece.1] and [piece.2] "
                              "with diagram files");

  size_t slash = path.find_last_of('/');
  std::string dir = slash == std::string::npos ? "." : path.substr(0, slash);

  PieceCatalog cat;
  cat.dim = dim;
  Mat ambient[2];
  for (int p = 0; p < 2; ++p) {
    GarlandPiece gp;
    std::string dpath = raw[p].diagram;
    if (dpath[0] != '/') dpath = dir + "/" + dpath;
    gp.diagram = parse_diagram(read_text_file(dpath));
    gp.name = raw[p].name.empty() ? gp.diagram.name : raw[p].name;
    if (raw[p].boundary.empty() || raw[p].boundary.size() > 2)
      throw std::domain_error(gp.name + ": boundary must mark 1 or 2 nodes");
    for (int b : raw[p].boundary) {
      if (b < 1 || b > gp.diagram.n)
        throw std::domain_error(gp.name + ": boundary node " +
                                std::to_string(b) + " out of range");
      gp.boundary.push_back(b - 1);
    }
    if (raw[p].volume <= 0)
      throw std::domain_error(gp.name + ": volume must be positive");
    gp.volume = raw[p].volume;
    AssumptionCheck ac = check_assumption(gp.diagram, gp.boundary);
    if (ac.status == AssumptionStatus::Fails)
      throw std::domain_error(gp.name + ": " + ac.reason);
    Mat g = gram_matrix(gp.diagram);
    gp.cls = classify(g, dim);
    AmbientForm af = ambient_form_restricted(g);
    if (af.field.size() != 1)
      throw std::domain_error(gp.name + ": trace field is not a real "
                              "quadratic field");
    if (p == 1 && *af.field.begin() != cat.field.d)
      throw std::domain_error("pieces have different trace fields");
    if (p == 0) cat.field = QuadField{*af.field.begin()};
    gp.invariants = form_invariants(af.matrix, cat.field);
    ambient[p] = af.matrix;
    cat.pieces.push_back(std::move(gp));
  }

  // every juxtaposition of pieces must glue
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const GarlandPiece& pa = cat.pieces[a];
      const GarlandPiece& pb = cat.pieces[b];
      std::vector<int> plus = orthogonal_link(pa.diagram, pa.boundary.back());
      std::vector<int> minus =
          orthogonal_link(pb.diagram, pb.boundary.front());
      if (link_isomorphism(pa.diagram, plus, pb.diagram, minus).empty())
        throw std::domain_error("interface links of " + pa.name + " and " +
                                pb.name + " do not match");
    }

  SimilarityResult sim = similar_over_K(ambient[0], ambient[1], cat.field);
  if (sim.status != SimilarityResult::Status::NotSimilar)
    throw std::domain_error(
        "ambient forms of the two pieces are not provably distinct");
  cat.distinction = sim.obstruction;
  return cat;
}

long long count_by_volume(const Rat& V, const PieceCatalog& cat) {
  if (cat.pieces.size() != 2)
    throw std::invalid_argument("catalog must hold two pieces");
  if (V <= 0) throw std::invalid_argument("volume budget must be positive");
  const Rat& v1 = cat.pieces[0].volume;
  const Rat& v2 = cat.pieces[1].volume;
  Rat minv = std::min(v1, v2);
  int maxlen = 0;
  while (maxlen <= 24 && Rat(maxlen + 1) * minv <= V) ++maxlen;
  if (maxlen > 24)
    throw std::invalid_argument(
        "volume budget needs words longer than 24 pieces");
  std::vector<uint64_t> keys;
  GarlandWord w;
  for (int n = 1; n <= maxlen; ++n) {
    // qualification depends only on the letter counts
    std::vector<char> fits(n + 1);
    for (int ones = 0; ones <= n; ++ones)
      fits[ones] = Rat(ones) * v1 + Rat(n - ones) * v2 <= V;
    w.seq.assign(n, 1);
    for (uint32_t word = 0; word < (uint32_t{1} << n); ++word) {
      if (!fits[n - __builtin_popcount(word)]) continue;
      for (int i = 0; i < n; ++i) w.seq[i] = 1 + ((word >> i) & 1);
      keys.push_back(canonical_key(w));
    }
  }
  return unique_count(keys);
}

CoxeterDiagram garland_diagram(const PieceCatalog& cat, const GarlandWord& w) {
  if (cat.pieces.size() != 2)
    throw std::invalid_argument("catalog must hold two pieces");
  validate_word(w);
  int n = static_cast<int>(w.seq.size());
  if (n == 1) return cat.pieces[w.seq[0] - 1].diagram;

  struct CopyInfo {
    const GarlandPiece* pc;
    std::vector<int> global;  // local node -> glued node, -1 when removed
    int bplus;
  };
  std::vector<CopyInfo> copies(n);
  int next_id = 0;
  for (int k = 0; k < n; ++k) {
    CopyInfo& cp = copies[k];
    cp.pc = &cat.pieces[w.seq[k] - 1];
    const CoxeterDiagram& d = cp.pc->diagram;
    bool needs_minus = k > 0;
    bool needs_plus = k + 1 < n;
    if (cp.pc->boundary.size() == 1 && needs_minus && needs_plus)
      throw std::domain_error("piece " + cp.pc->name +
                              " has a single boundary facet and cannot sit "
                              "between two interfaces");
    int bminus = cp.pc->boundary.front();
    cp.bplus = cp.pc->boundary.back();
    cp.global.assign(d.n, -1);
    std::vector<bool> removed(d.n, false);
    if (needs_minus) removed[bminus] = true;
    if (needs_plus) removed[cp.bplus] = true;
    if (needs_minus) {
      const CopyInfo& prev = copies[k - 1];
      std::vector<int> plus = orthogonal_link(prev.pc->diagram, prev.bplus);
      std::vector<int> minus = orthogonal_link(d, bminus);
      std::vector<int> iso =
          link_isomorphism(prev.pc->diagram, plus, d, minus);
      if (iso.empty())
        throw std::domain_error("interface links of " + prev.pc->name +
                                " and " + cp.pc->name + " do not match");
      for (size_t t = 0; t < plus.size(); ++t) {
        if (removed[iso[t]])
          throw std::domain_error("boundary facet of " + cp.pc->name +
                                  " lies in its own interface link");
        cp.global[iso[t]] = prev.global[plus[t]];
      }
    }
    for (int v = 0; v < d.n; ++v)
      if (cp.global[v] < 0 && !removed[v]) cp.global[v] = next_id++;
  }

  // collect inherited edges and the pairs that share a piece
  std::map<std::pair<int, int>, Edge> glued;
  std::vector<bool> together(static_cast<size_t>(next_id) * next_id, false);
  for (const CopyInfo& cp : copies) {
    const CoxeterDiagram& d = cp.pc->diagram;
    for (int x = 0; x < d.n; ++x) {
      if (cp.global[x] < 0) continue;
      for (int y = x + 1; y < d.n; ++y) {
        if (cp.global[y] < 0) continue;
        int gx = cp.global[x], gy = cp.global[y];
        if (gx > gy) std::swap(gx, gy);
        together[static_cast<size_t>(gx) * next_id + gy] = true;
        const Edge* e = d.edge(x, y);
        if (!e) continue;
        auto [it, fresh] = glued.emplace(std::pair{gx, gy}, *e);
        if (!fresh && !edges_match(&it->second, e))
          throw std::logic_error("identified interface edges disagree");
      }
    }
  }

  CoxeterDiagram out;
  out.n = next_id;
  out.name = "garland_";
  for (int x : w.seq) out.name += static_cast<char>('0' + x);
  for (const auto& [key, e] : glued) {
    if (e.kind == EdgeKind::Dotted && e.weight) {
      // reparse so every weight lives on the output diagram's tower
      std::string src =
          e.weight_src.empty() ? (*e.weight).to_expr() : e.weight_src;
      out.set_edge(key.first, key.second,
                   Edge::dotted(parse_expr(src, out.tower), src));
    } else {
      out.set_edge(key.first, key.second, e);
    }
  }
  for (int i = 0; i < next_id; ++i)
    for (int j = i + 1; j < next_id; ++j)
      if (!together[static_cast<size_t>(i) * next_id + j])
        out.set_edge(i, j, Edge::dotted_unknown());
  return out;
}

ArithClass classify_garland(const PieceCatalog& cat, const GarlandWord& w) {
  if (cat.pieces.size() != 2 || cat.distinction.empty())
    throw std::invalid_argument(
        "catalog does not certify distinct ambient forms");
  validate_word(w);
  bool has1 = false, has2 = false;
  for (int x : w.seq) (x == 1 ? has1 : has2) = true;
  if (has1 && has2) return ArithClass::NotQuasiArithmetic;
  return cat.pieces[w.seq[0] - 1].cls;
}

}  // namespace cox
