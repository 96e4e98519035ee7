// Command-line driver: diagram queries, form similarity, truncation weight
// checks, garland enumeration, and the bundled-dataset reproduction report.
//
// Exit codes: 0 when every verdict passes, 1 on a failed or inconclusive
// verdict, 2 on bad input or a math-domain error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "coxarith/coxeter.hpp"
#include "coxarith/garland.hpp"
#include "coxarith/qforms.hpp"
#include "coxarith/quadfield.hpp"
#include "coxarith/rational.hpp"
#include "coxarith/report.hpp"
#include "coxarith/vinberg.hpp"

using namespace cox;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::domain_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

CoxeterDiagram load_diagram(const std::string& path) {
  CoxeterDiagram d = parse_diagram(slurp(path));
  if (d.name.empty()) d.name = stem_of(path);
  return d;
}

// Result of one command: text payload plus the same content as report
// checks, so --json can reuse the report schema verbatim.
struct Output {
  Report rep;
  std::string text;

  void line(const std::string& s) { text += s + "\n"; }
  void check(std::string name, std::string inputs, std::string verdict,
             std::vector<std::string> witnesses) {
    CheckRecord rec;
    rec.name = std::move(name);
    rec.inputs = std::move(inputs);
    rec.verdict = std::move(verdict);
    rec.witnesses = std::move(witnesses);
    rep.checks.push_back(std::move(rec));
  }
  int finish(bool json) {
    rep.pass = true;
    for (const CheckRecord& c : rep.checks)
      rep.pass = rep.pass && c.verdict == "pass";
    std::fputs(json ? report_json(rep).c_str() : text.c_str(), stdout);
    return rep.pass ? 0 : 1;
  }
};

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string fmt_digits(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string minor_str(const std::vector<int>& indices) {
  std::string s = "[";
  for (size_t i = 0; i < indices.size(); ++i)
    s += (i ? "," : "") + std::to_string(indices[i] + 1);
  return s + "]";
}

// "1,2,3" with 1-based indices.
std::vector<int> parse_minor(const std::string& arg) {
  std::vector<int> out;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v < 1)
      throw std::invalid_argument("bad minor index '" + tok + "'");
    out.push_back(v - 1);
  }
  if (out.empty()) throw std::invalid_argument("empty minor list");
  return out;
}

std::vector<std::vector<int>> parse_minors(const std::vector<std::string>& args) {
  std::vector<std::vector<int>> out;
  for (const std::string& a : args) out.push_back(parse_minor(a));
  return out;
}

GarlandWord word_from_digits(const std::string& s) {
  std::vector<int> seq;
  for (char c : s) {
    if (c != '1' && c != '2')
      throw std::invalid_argument("word letters must be 1 or 2");
    seq.push_back(c - '0');
  }
  return GarlandWord(std::move(seq));
}

std::string digits_of(const std::vector<int>& seq) {
  std::string s;
  for (int v : seq) s += static_cast<char>('0' + v);
  return s;
}

std::string resolve_catalog(const std::string& data_dir, const std::string& name) {
  if (name == "h4" || name == "h5")
    return data_dir + "/catalog_" + name + ".txt";
  return name;
}

Rat parse_budget(const std::string& s) {
  try {
    size_t slash = s.find('/');
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rat(num) / Rat(den);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad volume '" + s + "', expected N or N/D");
  }
}

QuadField field_from_flag(long dd) {
  if (dd < 1) throw std::invalid_argument("--field must be a positive integer");
  auto [u, e] = squarefree_split(Int(dd));
  if (u != 1) throw std::invalid_argument("--field must be squarefree");
  return QuadField{Int(dd)};
}

// Single quadratic field spanned by the entries of both forms.
QuadField derive_field(const Mat& a, const Mat& b) {
  std::vector<TowerElement> entries;
  for (const Mat* m : {&a, &b})
    for (const auto& row : *m)
      for (const TowerElement& x : row) entries.push_back(x);
  std::set<Int> rads = radicand_span(entries);
  if (rads.empty()) return QuadField{};
  if (rads.size() == 1) return QuadField{*rads.begin()};
  throw std::domain_error(
      "form entries span more than one quadratic field; pass --field");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arithmetic invariants of hyperbolic Coxeter polyhedra"};
  app.require_subcommand(1);

  bool json = false;
  int precision = 128;
  std::string data_dir = "data";
  app.add_flag("--json", json, "emit the report JSON schema instead of text");
  app.add_option("--precision", precision,
                 "bits for numeric interval starts (default 128)")
      ->check(CLI::PositiveNumber);
  app.add_option("--data", data_dir, "bundled dataset directory (default data)");

  int code = 0;

  struct {
    std::string gram_file;
    std::string sig_file;
    std::string tf_file;
    std::string cls_file;
    int cls_dim = 0;
    std::string links_file;
    std::string sim_a, sim_b;
    long sim_field = 0;
    std::string vw_file;
    int vw_dim = 0;
    std::vector<std::string> vw_minors;
    std::string sw_file;
    int sw_dim = 0;
    std::vector<std::string> sw_minors;
    int count_n = 0;
    int census_n = 0;
    std::string census_catalog;
    std::string word;
    std::string word_catalog;
    std::string budget;
    std::string budget_catalog;
  } o;

  auto* cmd_gram = app.add_subcommand(
      "gram", "Gram matrix of a diagram, in form-file syntax");
  cmd_gram->fallthrough();
  cmd_gram->add_option("file", o.gram_file, "diagram file")->required();
  cmd_gram->callback([&] {
    CoxeterDiagram d = load_diagram(o.gram_file);
    NamedForm f{d.name, gram_matrix(d)};
    std::string text = emit_form(f);
    Output out;
    out.text = text;
    out.check("gram." + d.name, o.gram_file, "pass", {text});
    code = out.finish(json);
  });

  auto* cmd_sig = app.add_subcommand(
      "signature", "exact signature (p,n,z) of the Gram matrix");
  cmd_sig->fallthrough();
  cmd_sig->add_option("file", o.sig_file, "diagram file")->required();
  cmd_sig->callback([&] {
    CoxeterDiagram d = load_diagram(o.sig_file);
    std::string s = signature_str(sym_signature(gram_matrix(d)));
    Output out;
    out.line(s);
    out.check("signature." + d.name, o.sig_file, "pass", {s});
    code = out.finish(json);
  });

  auto* cmd_tf = app.add_subcommand(
      "tracefield", "trace field generated by the cyclic Gram products");
  cmd_tf->fallthrough();
  cmd_tf->add_option("file", o.tf_file, "diagram file")->required();
  cmd_tf->callback([&] {
    CoxeterDiagram d = load_diagram(o.tf_file);
    std::string s = field_str(trace_field(gram_matrix(d)));
    Output out;
    out.line(s);
    out.check("tracefield." + d.name, o.tf_file, "pass", {s});
    code = out.finish(json);
  });

  auto* cmd_cls = app.add_subcommand(
      "classify", "arithmeticity class and trace field of a diagram");
  cmd_cls->fallthrough();
  cmd_cls->add_option("file", o.cls_file, "diagram file")->required();
  cmd_cls->add_option("--dim", o.cls_dim,
                      "ambient dimension (default: positive inertia index)");
  cmd_cls->callback([&] {
    CoxeterDiagram d = load_diagram(o.cls_file);
    Mat g = gram_matrix(d);
    int dim = o.cls_dim > 0 ? o.cls_dim : sym_signature(g).pos;
    ArithClass cls = classify(g, dim);
    std::string field;
    try {
      field = field_str(trace_field(g));
    } catch (const std::domain_error&) {
      field = "undetermined";
    }
    std::string s = std::string(to_string(cls)) + ", trace field " + field;
    Output out;
    out.line(s);
    out.check("classify." + d.name, o.cls_file + " dim=" + std::to_string(dim),
              "pass", {s});
    code = out.finish(json);
  });

  auto* cmd_links = app.add_subcommand(
      "links", "vertex kinds and link classes of a simplex diagram");
  cmd_links->fallthrough();
  cmd_links->add_option("file", o.links_file, "diagram file")->required();
  cmd_links->callback([&] {
    CoxeterDiagram d = load_diagram(o.links_file);
    Output out;
    std::vector<std::string> lines;
    for (const VertexLink& l : vertex_links(d)) {
      std::string s = "opposite " + std::to_string(l.opposite + 1) + ": " +
                      to_string(l.kind) + ", link " + to_string(l.link_class);
      out.line(s);
      lines.push_back(s);
    }
    out.check("links." + d.name, o.links_file, "pass", lines);
    code = out.finish(json);
  });

  auto* cmd_sim = app.add_subcommand(
      "similar", "decide similarity of two forms over a quadratic field");
  cmd_sim->fallthrough();
  cmd_sim->add_option("a", o.sim_a, "first form file")->required();
  cmd_sim->add_option("b", o.sim_b, "second form file")->required();
  cmd_sim->add_option("--field", o.sim_field,
                      "radicand d of Q(sqrt d) (default: derived from entries)");
  cmd_sim->callback([&] {
    NamedForm a = load_form(o.sim_a);
    NamedForm b = load_form(o.sim_b);
    QuadField K = o.sim_field ? field_from_flag(o.sim_field)
                              : derive_field(a.matrix, b.matrix);
    SimilarityPresentation p = present_similarity(a.matrix, b.matrix, K);
    Output out;
    out.line(p.text);
    std::vector<std::string> wit{p.text};
    wit.insert(wit.end(), p.witnesses.begin(), p.witnesses.end());
    out.check("similar." + a.name + "-" + b.name,
              o.sim_a + " " + o.sim_b + " over " + K.str(),
              p.verdict == "inconclusive" ? "inconclusive" : "pass", wit);
    code = out.finish(json);
  });

  auto* cmd_vw = app.add_subcommand(
      "verify-weights", "exact check of vanishing minors, determinant and "
                        "signature for a weighted diagram");
  cmd_vw->fallthrough();
  cmd_vw->add_option("file", o.vw_file, "diagram file")->required();
  cmd_vw->add_option("--dim", o.vw_dim,
                     "ambient dimension (default: positive inertia index)");
  cmd_vw->add_option("--minor", o.vw_minors,
                     "principal minor rows, 1-based comma list (repeatable)");
  cmd_vw->callback([&] {
    CoxeterDiagram d = load_diagram(o.vw_file);
    int dim = o.vw_dim > 0 ? o.vw_dim : sym_signature(gram_matrix(d)).pos;
    TruncationReport tr =
        verify_truncation_weights(d, dim, parse_minors(o.vw_minors));
    Output out;
    std::vector<std::string> wit;
    for (const MinorCondition& mc : tr.minors)
      wit.push_back("minor " + minor_str(mc.indices) +
                    (mc.vanishes ? " zero" : " nonzero"));
    wit.push_back(std::string("determinant ") + (tr.det_zero ? "zero" : "nonzero"));
    wit.push_back("signature " + signature_str(tr.sig) +
                  (tr.signature_ok ? "" : " unexpected"));
    for (const std::string& s : wit) out.line(s);
    out.line(tr.pass ? "pass" : "fail");
    out.check("weights." + d.name, o.vw_file + " dim=" + std::to_string(dim),
              tr.pass ? "pass" : "fail", wit);
    code = out.finish(json);
  });

  auto* cmd_sw = app.add_subcommand(
      "solve-weights", "numeric search for unknown dotted weights that make "
                       "the truncation conditions vanish");
  cmd_sw->fallthrough();
  cmd_sw->add_option("file", o.sw_file, "template diagram file")->required();
  cmd_sw->add_option("--dim", o.sw_dim,
                     "ambient dimension (default: node count minus 3)");
  cmd_sw->add_option("--minor", o.sw_minors,
                     "principal minor rows, 1-based comma list (repeatable)");
  cmd_sw->callback([&] {
    CoxeterDiagram d = load_diagram(o.sw_file);
    int dim = o.sw_dim > 0 ? o.sw_dim : d.n - 3;
    if (dim < 2) throw std::invalid_argument("pass --dim for this diagram");
    auto sols = solve_truncation_weights_numeric(d, dim, parse_minors(o.sw_minors));
    int digits = std::clamp(static_cast<int>(precision * 0.30103), 6, 17);
    Output out;
    std::vector<std::string> wit;
    for (size_t k = 0; k < sols.size(); ++k) {
      out.line("solution " + std::to_string(k + 1) + ":");
      for (const auto& [ij, v] : sols[k].weights) {
        std::string s = "w(" + std::to_string(ij.first + 1) + "," +
                        std::to_string(ij.second + 1) + ") = " +
                        fmt_digits(v, digits);
        out.line("  " + s);
        wit.push_back(s);
      }
      out.line("  residual = " + fmt_digits(sols[k].residual, 3));
    }
    if (sols.empty()) out.line("no solutions");
    out.check("solve." + d.name, o.sw_file + " dim=" + std::to_string(dim),
              sols.empty() ? "fail" : "pass", wit);
    code = out.finish(json);
  });

  auto* cmd_garland = app.add_subcommand(
      "garland", "enumeration and classification of garland words");
  cmd_garland->fallthrough();
  cmd_garland->require_subcommand(1);

  auto* g_count = cmd_garland->add_subcommand(
      "count", "number of garland classes of length n");
  g_count->fallthrough();
  g_count->add_option("--n", o.count_n, "word length")->required();
  g_count->callback([&] {
    long long c = count_classes(o.count_n);
    double twon = std::pow(2.0, o.count_n);
    double low1 = twon / (2 * o.count_n);
    double low2 = twon / o.count_n;
    bool ok = c >= low1 && c >= low2 && c <= twon;
    Output out;
    out.line(std::to_string(c) + " classes");
    out.line("bound 2^n/(2n) = " + fmt_g(low1) +
             (c >= low1 ? ": satisfied" : ": violated"));
    out.line("bound 2^n/n = " + fmt_g(low2) +
             (c >= low2 ? ": satisfied" : ": violated"));
    out.line("bound 2^n = " + fmt_g(twon) +
             (c <= twon ? ": satisfied" : ": violated"));
    out.check("garland.count." + std::to_string(o.count_n),
              "n=" + std::to_string(o.count_n), ok ? "pass" : "fail",
              {std::to_string(c) + " classes"});
    code = out.finish(json);
  });

  auto* g_census = cmd_garland->add_subcommand(
      "census", "representatives and sizes of all classes of length n");
  g_census->fallthrough();
  g_census->add_option("--n", o.census_n, "word length")->required();
  g_census->add_option("--catalog", o.census_catalog,
                       "piece catalog (h4, h5 or a path) for arithmetic tags");
  g_census->callback([&] {
    if (o.census_n < 1 || o.census_n > 16)
      throw std::invalid_argument("census supports lengths 1 to 16");
    PieceCatalog cat;
    bool tagged = !o.census_catalog.empty();
    if (tagged) cat = load_catalog(resolve_catalog(data_dir, o.census_catalog));
    int n = o.census_n;
    std::map<std::uint64_t, std::pair<std::vector<int>, long long>> classes;
    GarlandWord w;
    w.seq.resize(n);
    for (std::uint32_t word = 0; word < (std::uint32_t{1} << n); ++word) {
      for (int i = 0; i < n; ++i) w.seq[i] = 1 + ((word >> i) & 1);
      auto [it, fresh] = classes.try_emplace(class_key(w), w.seq, 0);
      if (!fresh && w.seq < it->second.first) it->second.first = w.seq;
      ++it->second.second;
    }
    std::vector<std::pair<std::vector<int>, long long>> rows;
    for (const auto& [key, rep] : classes) rows.push_back(rep);
    std::sort(rows.begin(), rows.end());
    Output out;
    std::vector<std::string> wit;
    for (const auto& [rep, size] : rows) {
      std::string s = digits_of(rep) + " size " + std::to_string(size);
      if (tagged) s += std::string(" ") + to_string(classify_garland(cat, GarlandWord(rep)));
      out.line(s);
      wit.push_back(s);
    }
    out.line(std::to_string(rows.size()) + " classes");
    out.check("garland.census." + std::to_string(n),
              "n=" + std::to_string(n) +
                  (tagged ? " catalog=" + o.census_catalog : ""),
              "pass", wit);
    code = out.finish(json);
  });

  auto* g_classify = cmd_garland->add_subcommand(
      "classify", "arithmeticity class of the garland of a word");
  g_classify->fallthrough();
  g_classify->add_option("--word", o.word, "word over {1,2}, e.g. 121")->required();
  g_classify->add_option("--catalog", o.word_catalog,
                         "piece catalog (h4, h5 or a path)")->required();
  g_classify->callback([&] {
    PieceCatalog cat = load_catalog(resolve_catalog(data_dir, o.word_catalog));
    std::string s = to_string(classify_garland(cat, word_from_digits(o.word)));
    Output out;
    out.line(s);
    out.check("garland.classify." + o.word,
              "word=" + o.word + " catalog=" + o.word_catalog, "pass", {s});
    code = out.finish(json);
  });

  auto* g_volume = cmd_garland->add_subcommand(
      "volume", "number of classes within a total volume budget");
  g_volume->fallthrough();
  g_volume->add_option("--v", o.budget, "volume budget, N or N/D")->required();
  g_volume->add_option("--catalog", o.budget_catalog,
                       "piece catalog (h4, h5 or a path)")->required();
  g_volume->callback([&] {
    PieceCatalog cat = load_catalog(resolve_catalog(data_dir, o.budget_catalog));
    long long c = count_by_volume(parse_budget(o.budget), cat);
    Output out;
    std::string s = std::to_string(c) + " classes within volume " + o.budget;
    out.line(s);
    out.check("garland.volume." + o.budget,
              "v=" + o.budget + " catalog=" + o.budget_catalog, "pass", {s});
    code = out.finish(json);
  });

  auto* cmd_report = app.add_subcommand(
      "paper-report", "full reproduction battery over the bundled dataset");
  cmd_report->fallthrough();
  cmd_report->callback([&] {
    Output out;
    out.rep = paper_report(data_dir);
    out.text = report_text(out.rep);
    long long total = 0;
    for (const CheckRecord& c : out.rep.checks) {
      std::fprintf(stderr, "%s: %lld us\n", c.name.c_str(), c.micros);
      total += c.micros;
    }
    std::fprintf(stderr, "total: %lld us\n", total);
    code = out.finish(json);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return code;
}
