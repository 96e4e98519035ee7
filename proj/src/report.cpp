#include "coxarith/report.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "coxarith/coxeter.hpp"
#include "coxarith/expr.hpp"
#include "coxarith/garland.hpp"
#include "coxarith/qforms.hpp"
#include "coxarith/quadfield.hpp"
#include "coxarith/vinberg.hpp"

namespace cox {

std::string signature_str(const Signature& s) {
  return "(" + std::to_string(s.pos) + "," + std::to_string(s.neg) + "," +
         std::to_string(s.zero) + ")";
}

std::string field_str(const std::set<Int>& radicands) {
  if (radicands.empty()) return "Q";
  std::string s = "Q(";
  bool first = true;
  for (const Int& d : radicands) {
    if (!first) s += ", ";
    s += "sqrt " + d.get_str();
    first = false;
  }
  return s + ")";
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::domain_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool sig_eq(const Signature& a, const Signature& b) {
  return a.pos == b.pos && a.neg == b.neg && a.zero == b.zero;
}

// x written over the integral basis of O_K: "p+qa" with a = (1+sqrt d)/2
// when d = 1 mod 4, else "p+q*sqrt(d)"; a denominator D shows up as
// "(...)/D".  Rational values print as plain rationals.
std::string fmt_int_pair(const Int& p, const Int& q, const std::string& sym) {
  std::string s;
  if (p != 0) s += p.get_str();
  if (q != 0) {
    if (q > 0 && !s.empty()) s += "+";
    if (q == -1)
      s += "-";
    else if (q != 1)
      s += q.get_str();
    s += sym;
  }
  return s.empty() ? "0" : s;
}

}  // namespace

std::string render_quad(const TowerElement& x, const QuadField& K) {
  auto [A, B] = as_pair(x, K);
  if (B == 0) return A.get_str();
  Rat c0 = A, c1 = B;
  std::string sym = "*sqrt(" + K.d.get_str() + ")";
  if (K.half_integral()) {
    c0 = A - B;
    c1 = 2 * B;
    sym = "a";
  }
  Int D = lcm(c0.get_den(), c1.get_den());
  std::string body =
      fmt_int_pair(Rat(c0 * Rat(D)).get_num(), Rat(c1 * Rat(D)).get_num(), sym);
  if (D == 1) return body;
  return "(" + body + ")/" + D.get_str();
}

std::string render_place(const PrimeIdeal& P, const QuadField& K) {
  std::string head = "p" + P.p.get_str();
  if (P.type == SplitType::Rational || P.type == SplitType::Inert) return head;
  TowerElement gen = field_generator(K);
  if (P.type == SplitType::Split) gen = gen - TowerElement(Rat(P.root));
  std::string body = render_quad(gen, K);
  if (!body.empty() && body[0] == '-') body = render_quad(-gen, K);
  if (P.type == SplitType::Split)
    return head + "=(" + P.p.get_str() + ", " + body + ")";
  return head + "=(" + body + ")";
}

namespace {

// Divides the largest square integer factor out of an integral square-class
// representative, keeping the class.
TowerElement reduce_class_rep(const TowerElement& x, const QuadField& K) {
  auto [A, B] = as_pair(x, K);
  Rat c0 = A, c1 = B;
  TowerElement unit = field_generator(K);
  if (K.half_integral()) {
    c0 = A - B;
    c1 = 2 * B;
    unit = (TowerElement(1) + unit) / TowerElement(2);
  }
  Int D = lcm(c0.get_den(), c1.get_den());
  Int p = Rat(c0 * Rat(D)).get_num(), q = Rat(c1 * Rat(D)).get_num();
  // x ~ D * (p + q w) modulo squares, w the basis generator.
  auto [u0, e] = squarefree_split(D);
  p *= e;
  q *= e;
  Int g = q == 0 ? p : gcd(p, q);
  Int u = squarefree_split(g).first;
  return TowerElement(Rat(p / (u * u))) +
         TowerElement(Rat(q / (u * u))) * unit;
}

}  // namespace

SimilarityPresentation present_similarity(const Mat& a, const Mat& b,
                                          const QuadField& K) {
  using Status = SimilarityResult::Status;
  SimilarityResult r = similar_over_K(a, b, K);
  SimilarityPresentation out;
  if (r.status == Status::Similar) {
    out.verdict = "similar";
    std::string lam = render_quad(*r.ratio, K);
    out.text = "similar: lambda=" + lam;
    out.witnesses = {"lambda=" + lam};
    return out;
  }
  if (r.status == Status::Inconclusive) {
    out.verdict = "inconclusive";
    out.text = "inconclusive: " + r.obstruction;
    out.witnesses = {r.obstruction};
    return out;
  }

  out.verdict = "not-similar";
  if (a.size() != b.size()) {
    out.text = "not-similar: dimension mismatch";
    out.witnesses = {"dim " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size())};
    return out;
  }

  // Re-derive a printable certificate.
  DiagonalForm da = diagonalize(a), db = diagonalize(b);
  TowerElement dprod(1);
  for (const TowerElement& e : da.diag) dprod *= e;
  for (const TowerElement& e : db.diag) dprod *= e;

  if (a.size() % 2 == 0) {
    // only the scaling-invariant determinant class can separate here
    TowerElement ratio = reduce_class_rep(det_square_class(dprod, K), K);
    Rat N = norm(ratio, K);
    std::string rs = render_quad(ratio, K);
    out.text =
        "not-similar: det ratio " + rs + " not a square (norm " +
        N.get_str() + ")";
    out.witnesses = {"ratio=" + rs, "norm=" + N.get_str()};
    return out;
  }

  TowerElement lam = det_square_class(dprod, K);
  std::vector<TowerElement> sb;
  sb.reserve(db.diag.size());
  for (const TowerElement& e : db.diag) sb.push_back(lam * e);
  auto sig_of = [&](const std::vector<TowerElement>& diag, bool conj) {
    Signature s;
    for (const TowerElement& x : diag)
      (sign_at_place(x, K, conj) > 0 ? s.pos : s.neg)++;
    return s;
  };
  if (!sig_eq(sig_of(da.diag, false), sig_of(sb, false)) ||
      (!K.is_rational() &&
       !sig_eq(sig_of(da.diag, true), sig_of(sb, true)))) {
    out.text = "not-similar: real signature mismatch with the forced ratio " +
               render_quad(lam, K);
    out.witnesses = {"lambda=" + render_quad(lam, K)};
    return out;
  }
  std::set<Int> ps = odd_support_primes(da.diag, K);
  for (const Int& p : odd_support_primes(sb, K)) ps.insert(p);
  for (const Int& p : ps)
    for (const PrimeIdeal& P : primes_above(p, K)) {
      int ha = hasse_invariant(da.diag, K, P);
      int hb = hasse_invariant(sb, K, P);
      if (ha == hb) continue;
      std::string place = render_place(P, K);
      out.text = "not-similar: Hasse mismatch at " + place;
      out.witnesses = {"place=" + place,
                       "h_a=" + std::string(ha > 0 ? "+1" : "-1"),
                       "h_b=" + std::string(hb > 0 ? "+1" : "-1"),
                       "lambda=" + render_quad(lam, K)};
      return out;
    }
  out.text = "not-similar: " + r.obstruction;
  out.witnesses = {r.obstruction};
  return out;
}

NamedForm parse_form(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  NamedForm f;
  int n = -1;
  TowerPtr t = Tower::rationals();
  std::map<std::pair<int, int>, TowerElement> entries;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    auto bad = [&](const std::string& why) {
      return std::domain_error("form line " + std::to_string(lineno) + ": " +
                               why);
    };
    if (key == "form") {
      ls >> f.name;
    } else if (key == "size") {
      if (!(ls >> n) || n < 1 || n > 64) throw bad("bad size");
    } else if (key == "entry") {
      int i = 0, j = 0;
      if (!(ls >> i >> j)) throw bad("bad entry indices");
      if (n < 0) throw bad("entry before size");
      if (i < 1 || i > n || j < 1 || j > n) throw bad("entry out of range");
      std::string expr;
      std::getline(ls, expr);
      expr = trimmed(expr);
      if (expr.empty()) throw bad("missing entry value");
      std::pair<int, int> at{std::min(i, j) - 1, std::max(i, j) - 1};
      if (entries.count(at)) throw bad("duplicate entry");
      entries.emplace(at, parse_expr(expr, t, lineno));
    } else {
      throw bad("unknown directive '" + key + "'");
    }
  }
  if (n < 0) throw std::domain_error("form file without a size line");
  f.matrix.assign(n, std::vector<TowerElement>(n, TowerElement(0)));
  for (int i = 0; i < n; ++i) f.matrix[i][i] = TowerElement(1);
  for (const auto& [at, v] : entries) {
    f.matrix[at.first][at.second] = v;
    f.matrix[at.second][at.first] = v;
  }
  align_mat(f.matrix);
  return f;
}

NamedForm load_form(const std::string& path) {
  NamedForm f = parse_form(slurp(path));
  if (f.name.empty()) {
    size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    f.name = base.substr(0, dot);
  }
  return f;
}

std::string emit_form(const NamedForm& f) {
  std::ostringstream os;
  if (!f.name.empty()) os << "form " << f.name << "\n";
  int n = static_cast<int>(f.matrix.size());
  os << "size " << n << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const TowerElement& v = f.matrix[i][j];
      bool is_default = i == j ? v == TowerElement(1) : v.is_zero();
      if (!is_default)
        os << "entry " << i + 1 << " " << j + 1 << " " << v.to_expr() << "\n";
    }
  return os.str();
}

namespace {

struct Battery {
  std::string dir;
  Report rep;

  CoxeterDiagram diagram(const std::string& file) {
    return parse_diagram(slurp(dir + "/" + file));
  }
  Mat gram(const std::string& file) { return gram_matrix(diagram(file)); }

  template <typename Fn>
  void run(const std::string& name, const std::string& inputs, Fn fn) {
    CheckRecord rec;
    rec.name = name;
    rec.inputs = inputs;
    rec.verdict = "fail";
    auto start = std::chrono::steady_clock::now();
    try {
      fn(rec);
    } catch (const std::exception& e) {
      rec.verdict = "fail";
      rec.witnesses.push_back(std::string("error: ") + e.what());
    }
    rec.micros = std::chrono::duration_cast<std::chrono::microseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    rep.checks.push_back(std::move(rec));
  }
};

std::string stem_of(const std::string& file) {
  return file.substr(0, file.find_last_of('.'));
}

}  // namespace

Report paper_report(const std::string& data_dir) {
  Battery B{data_dir, {}};
  const QuadField K{5};

  // 1: exact Gram signatures
  struct SigCase {
    const char* file;
    Signature want;
  };
  const SigCase sig_cases[] = {
      {"S1_4.cox", {4, 1, 0}}, {"S2_4.cox", {4, 1, 0}},
      {"S1_5.cox", {5, 1, 0}}, {"S2_5.cox", {5, 1, 0}},
      {"P1_4.cox", {4, 1, 2}}, {"P2_4.cox", {4, 1, 2}},
      {"P1_5.cox", {5, 1, 1}}, {"P_5.cox", {5, 1, 1}},
  };
  for (const SigCase& c : sig_cases)
    B.run("1.signature." + stem_of(c.file), c.file, [&](CheckRecord& rec) {
      Signature s = sym_signature(B.gram(c.file));
      rec.witnesses = {signature_str(s) + " expected " + signature_str(c.want)};
      rec.verdict = sig_eq(s, c.want) ? "pass" : "fail";
    });

  // 2: simplex vertex links; the truncated vertices must be exactly the
  // hyperideal ones
  struct LinkCase {
    const char* file;
    std::set<int> hyper;
  };
  const LinkCase link_cases[] = {
      {"S1_4.cox", {0, 4}},
      {"S2_4.cox", {0, 4}},
      {"S1_5.cox", {5}},
      {"S2_5.cox", {5}},
  };
  for (const LinkCase& c : link_cases)
    B.run("2.links." + stem_of(c.file), c.file, [&](CheckRecord& rec) {
      std::set<int> hyper;
      for (const VertexLink& l : vertex_links(B.diagram(c.file))) {
        if (l.kind == VertexKind::Hyperideal) hyper.insert(l.opposite);
        rec.witnesses.push_back("opposite " + std::to_string(l.opposite + 1) +
                                ": " + to_string(l.kind) + ", link " +
                                to_string(l.link_class));
      }
      rec.verdict = hyper == c.hyper ? "pass" : "fail";
    });

  // 3: trace fields of the bundled simplices
  for (const char* file :
       {"S1_4.cox", "S2_4.cox", "S1_5.cox", "S2_5.cox", "T1_3.cox",
        "T2_3.cox", "T3_3.cox", "R_4.cox"})
    B.run("3.tracefield." + stem_of(file), file, [&](CheckRecord& rec) {
      std::set<Int> fs = trace_field(B.gram(file));
      rec.witnesses = {field_str(fs)};
      rec.verdict = fs == std::set<Int>{5} ? "pass" : "fail";
    });

  // 4: ambient forms match the bundled forms and are admissible
  struct AmbientCase {
    const char* piece;
    const char* form;
    int dim;
  };
  const AmbientCase ambient_cases[] = {
      {"P1_4.cox", "Q1_4.form", 4},
      {"P2_4.cox", "Q2_4.form", 4},
      {"P1_5.cox", "Q1_5.form", 5},
      {"P_5.cox", "Q2_5.form", 5},
  };
  for (const AmbientCase& c : ambient_cases)
    B.run("4.ambient." + stem_of(c.piece) + "-" + stem_of(c.form),
          std::string(c.piece) + " " + c.form, [&](CheckRecord& rec) {
            AmbientForm af = ambient_form_restricted(B.gram(c.piece));
            NamedForm nf = load_form(B.dir + "/" + c.form);
            bool adm_a = admissible(af, c.dim);
            bool adm_b = admissible(nf.matrix, c.dim);
            SimilarityPresentation sp =
                present_similarity(af.matrix, nf.matrix, K);
            rec.witnesses = {
                "ambient field " + field_str(af.field),
                std::string("ambient admissible ") + (adm_a ? "yes" : "no"),
                std::string("bundled admissible ") + (adm_b ? "yes" : "no"),
                sp.text};
            rec.verdict = adm_a && adm_b && sp.verdict == "similar"
                              ? "pass"
                              : "fail";
          });

  // 5: arithmeticity classes
  struct ClassCase {
    const char* file;
    int dim;
    ArithClass want;
  };
  const ClassCase class_cases[] = {
      {"S1_4.cox", 4, ArithClass::ProperlyQuasiArithmetic},
      {"S2_4.cox", 4, ArithClass::ProperlyQuasiArithmetic},
      {"S1_5.cox", 5, ArithClass::Arithmetic},
      {"S2_5.cox", 5, ArithClass::Arithmetic},
  };
  for (const ClassCase& c : class_cases)
    B.run("5.class." + stem_of(c.file), c.file, [&](CheckRecord& rec) {
      ArithClass cls = classify(B.gram(c.file), c.dim);
      rec.witnesses = {to_string(cls)};
      rec.verdict = cls == c.want ? "pass" : "fail";
    });

  std::optional<PieceCatalog> h4;
  B.run("5.catalog.h4", "catalog_h4.txt", [&](CheckRecord& rec) {
    h4 = load_catalog(B.dir + "/catalog_h4.txt");
    bool ok = h4->pieces.size() == 2 && !h4->distinction.empty();
    for (const GarlandPiece& p : h4->pieces) {
      rec.witnesses.push_back(p.name + ": " + to_string(p.cls));
      ok = ok && p.cls == ArithClass::ProperlyQuasiArithmetic;
    }
    rec.witnesses.push_back("distinction: " + h4->distinction);
    rec.verdict = ok ? "pass" : "fail";
  });
  B.run("5.catalog.h5", "catalog_h5.txt", [&](CheckRecord& rec) {
    PieceCatalog h5 = load_catalog(B.dir + "/catalog_h5.txt");
    bool ok = h5.pieces.size() == 2 && !h5.distinction.empty();
    for (const GarlandPiece& p : h5.pieces) {
      rec.witnesses.push_back(p.name + ": " + to_string(p.cls));
      ok = ok && p.cls == ArithClass::Arithmetic;
    }
    rec.witnesses.push_back("distinction: " + h5.distinction);
    rec.verdict = ok ? "pass" : "fail";
  });

  // 6: the two similarity obstructions
  B.run("6.similar.Q1_4-Q2_4", "Q1_4.form Q2_4.form", [&](CheckRecord& rec) {
    SimilarityPresentation sp =
        present_similarity(load_form(B.dir + "/Q1_4.form").matrix,
                           load_form(B.dir + "/Q2_4.form").matrix, K);
    rec.witnesses = {sp.text};
    for (const std::string& w : sp.witnesses) rec.witnesses.push_back(w);
    rec.verdict = sp.verdict == "not-similar" &&
                          sp.text.find("Hasse mismatch at p5") !=
                              std::string::npos
                      ? "pass"
                      : "fail";
  });
  B.run("6.similar.Q1_5-Q2_5", "Q1_5.form Q2_5.form", [&](CheckRecord& rec) {
    SimilarityPresentation sp =
        present_similarity(load_form(B.dir + "/Q1_5.form").matrix,
                           load_form(B.dir + "/Q2_5.form").matrix, K);
    rec.witnesses = {sp.text};
    for (const std::string& w : sp.witnesses) rec.witnesses.push_back(w);
    rec.verdict =
        sp.verdict == "not-similar" &&
                sp.text.find("det ratio") != std::string::npos
            ? "pass"
            : "fail";
  });

  // 7: truncation weight verification
  struct WeightCase {
    const char* file;
    int dim;
  };
  const WeightCase weight_cases[] = {
      {"P1_4.cox", 4}, {"P2_4.cox", 4}, {"P1_5.cox", 5}, {"P_5.cox", 5}};
  for (const WeightCase& c : weight_cases)
    B.run("7.weights." + stem_of(c.file), c.file, [&](CheckRecord& rec) {
      TruncationReport tr = verify_truncation_weights(B.diagram(c.file), c.dim);
      for (const MinorCondition& m : tr.minors) {
        std::string idx;
        for (int i : m.indices) idx += (idx.empty() ? "" : ",") +
                                       std::to_string(i + 1);
        rec.witnesses.push_back("minor [" + idx + "] " +
                                (m.vanishes ? "zero" : "nonzero"));
      }
      rec.witnesses.push_back(std::string("determinant ") +
                              (tr.det_zero ? "zero" : "nonzero"));
      rec.witnesses.push_back("signature " + signature_str(tr.sig));
      rec.verdict = tr.pass ? "pass" : "fail";
    });

  // 8: garland class counts
  const std::map<int, long long> pinned{{1, 2}, {2, 3}, {3, 6}};
  for (int n = 1; n <= 12; ++n) {
    char name[40];
    std::snprintf(name, sizeof name, "8.garland.count.%02d", n);
    B.run(name, "n=" + std::to_string(n), [&](CheckRecord& rec) {
      long long c = count_classes(n);
      long long words = 1LL << n;
      bool ok = c <= words && c * 2 * n >= words && c * n >= words;
      auto pin = pinned.find(n);
      if (pin != pinned.end()) ok = ok && c == pin->second;
      rec.witnesses = {std::to_string(c) + " classes"};
      rec.verdict = ok ? "pass" : "fail";
    });
  }
  B.run("8.garland.volume.3", "catalog_h4.txt V=3", [&](CheckRecord& rec) {
    if (!h4) h4 = load_catalog(B.dir + "/catalog_h4.txt");
    long long c = count_by_volume(3, *h4);
    rec.witnesses = {std::to_string(c) + " classes within volume 3"};
    rec.verdict = c == 11 ? "pass" : "fail";
  });

  std::sort(B.rep.checks.begin(), B.rep.checks.end(),
            [](const CheckRecord& x, const CheckRecord& y) {
              return x.name < y.name;
            });
  B.rep.pass = std::all_of(B.rep.checks.begin(), B.rep.checks.end(),
                           [](const CheckRecord& c) {
                             return c.verdict == "pass";
                           });
  return B.rep;
}

std::string report_text(const Report& r) {
  std::ostringstream os;
  for (const CheckRecord& c : r.checks) {
    os << (c.verdict == "pass" ? "PASS" : c.verdict == "fail" ? "FAIL"
                                                              : "????")
       << " " << c.name;
    if (!c.witnesses.empty()) {
      os << ": ";
      for (size_t i = 0; i < c.witnesses.size(); ++i)
        os << (i ? "; " : "") << c.witnesses[i];
    }
    os << "\n";
  }
  os << "overall " << (r.pass ? "pass" : "fail") << "\n";
  return os.str();
}

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema"] = "coxarith-report-v1";
  j["checks"] = nlohmann::ordered_json::array();
  for (const CheckRecord& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["inputs"] = c.inputs;
    jc["verdict"] = c.verdict;
    jc["witnesses"] = c.witnesses;
    j["checks"].push_back(std::move(jc));
  }
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace cox
