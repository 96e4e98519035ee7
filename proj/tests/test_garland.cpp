#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coxarith/coxeter.hpp"
#include "coxarith/garland.hpp"
#include "coxarith/vinberg.hpp"

using namespace cox;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CoxeterDiagram load(const std::string& name) {
  return parse_diagram(read_file(std::string(COXARITH_DATA_DIR) + "/" + name));
}

PieceCatalog catalog(const std::string& name) {
  return load_catalog(std::string(COXARITH_DATA_DIR) + "/" + name);
}

GarlandWord W(std::vector<int> s) { return GarlandWord(std::move(s)); }

std::vector<int> word_of_mask(int n, uint32_t mask) {
  std::vector<int> w(n);
  for (int i = 0; i < n; ++i) w[i] = 1 + ((mask >> i) & 1);
  return w;
}

// Oracle partition: two words are in one class exactly when the doubled
// word of one is a rotation of the doubled word of the other.  Orbits are
// enumerated directly from the rotations.
std::vector<int> doubled(const std::vector<int>& w) {
  std::vector<int> d = w;
  d.insert(d.end(), w.rbegin(), w.rend());
  return d;
}

std::vector<std::vector<int>> orbit_of(const std::vector<int>& w) {
  int n = static_cast<int>(w.size());
  std::vector<int> d = doubled(w);
  std::set<std::vector<int>> members;
  for (int r = 0; r < 2 * n; ++r) {
    std::vector<int> rot(2 * n);
    for (int i = 0; i < 2 * n; ++i) rot[i] = d[(r + i) % (2 * n)];
    std::vector<int> cand(rot.begin(), rot.begin() + n);
    if (doubled(cand) == rot) members.insert(cand);
  }
  return {members.begin(), members.end()};
}

// Class id per mask, or -1 before assignment; ids count up from 0.
std::vector<int> oracle_partition(int n) {
  std::vector<int> id(uint32_t{1} << n, -1);
  int next = 0;
  for (uint32_t m = 0; m < (uint32_t{1} << n); ++m) {
    if (id[m] >= 0) continue;
    for (const std::vector<int>& w : orbit_of(word_of_mask(n, m))) {
      uint32_t k = 0;
      for (int i = 0; i < n; ++i)
        if (w[i] == 2) k |= uint32_t{1} << i;
      REQUIRE(id[k] == -1);
      id[k] = next;
    }
    ++next;
  }
  return id;
}

PieceCatalog stub_catalog(const Rat& v1, const Rat& v2) {
  PieceCatalog cat;
  cat.dim = 4;
  cat.pieces.resize(2);
  cat.pieces[0].volume = v1;
  cat.pieces[1].volume = v2;
  return cat;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = "/tmp/" + name;
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
  return path;
}

int count_edges(const CoxeterDiagram& d, EdgeKind kind, bool known = true) {
  int c = 0;
  for (int i = 0; i < d.n; ++i)
    for (int j = i + 1; j < d.n; ++j) {
      const Edge* e = d.edge(i, j);
      if (e && e->kind == kind &&
          (kind != EdgeKind::Dotted || e->weight.has_value() == known))
        ++c;
    }
  return c;
}

}  // namespace

TEST_CASE("garland words and their mirrors") {
  CHECK_THROWS_AS(W({}), std::invalid_argument);
  CHECK_THROWS_AS(W({1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(W({0, 2}), std::invalid_argument);

  CHECK(mirror(W({1, 2, 2})).seq == std::vector<int>{2, 2, 1});
  CHECK(mirror(W({1})).seq == std::vector<int>{1});
  for (int n = 1; n <= 8; ++n)
    for (uint32_t m = 0; m < (uint32_t{1} << n); ++m) {
      GarlandWord w = W(word_of_mask(n, m));
      CHECK(mirror(mirror(w)).seq == w.seq);
    }
  CHECK_THROWS_AS(mirror(GarlandWord{}), std::invalid_argument);
}

TEST_CASE("word equivalence") {
  CHECK(equivalent(W({1, 2}), W({2, 1})));
  CHECK_FALSE(equivalent(W({1, 1}), W({1, 2})));
  CHECK_FALSE(equivalent(W({1}), W({1, 1})));

  // reflexive, and every word matches its mirror
  for (int n = 1; n <= 10; ++n)
    for (uint32_t m = 0; m < (uint32_t{1} << n); ++m) {
      GarlandWord w = W(word_of_mask(n, m));
      CHECK(equivalent(w, w));
      CHECK(equivalent(w, mirror(w)));
    }

  // agrees with the orbit oracle on every pair, which also gives
  // symmetry and transitivity
  for (int n = 1; n <= 7; ++n) {
    std::vector<int> id = oracle_partition(n);
    for (uint32_t x = 0; x < (uint32_t{1} << n); ++x)
      for (uint32_t y = x; y < (uint32_t{1} << n); ++y) {
        bool eq = equivalent(W(word_of_mask(n, x)), W(word_of_mask(n, y)));
        CHECK(eq == (id[x] == id[y]));
      }
  }
}

TEST_CASE("class counting") {
  CHECK(count_classes(1) == 2);
  CHECK(count_classes(2) == 3);
  CHECK(count_classes(3) == 6);
  CHECK_THROWS_AS(count_classes(0), std::invalid_argument);
  CHECK_THROWS_AS(count_classes(25), std::invalid_argument);

  // against the orbit oracle, which also bounds the class sizes
  for (int n = 1; n <= 10; ++n) {
    std::vector<int> id = oracle_partition(n);
    long long classes = 1 + *std::max_element(id.begin(), id.end());
    CHECK(count_classes(n) == classes);
    std::map<int, int> size;
    for (int c : id) ++size[c];
    for (const auto& [cls, s] : size) CHECK(s <= n);
  }

  // 2^n / 2n <= classes <= 2^n, and the sharper lower bound 2^n / n
  for (int n = 1; n <= 20; ++n) {
    long long c = count_classes(n);
    long long words = 1LL << n;
    CHECK(c <= words);
    CHECK(c * 2 * n >= words);
    CHECK(c * n >= words);
  }
}

TEST_CASE("volume-bounded counting") {
  PieceCatalog unit = stub_catalog(1, 1);
  CHECK(count_by_volume(1, unit) == 2);
  CHECK(count_by_volume(3, unit) == 11);

  // with unit volumes the count is the sum over lengths up to V
  for (int V = 1; V <= 8; ++V) {
    long long sum = 0;
    for (int n = 1; n <= V; ++n) sum += count_classes(n);
    CHECK(count_by_volume(V, unit) == sum);
  }

  // monotone in the budget
  long long prev = 0;
  for (int V = 1; V <= 8; ++V) {
    long long c = count_by_volume(V, unit);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(count_by_volume(Rat(5) / 2, unit) == count_by_volume(2, unit));

  PieceCatalog mixed = stub_catalog(1, 2);
  CHECK(count_by_volume(2, mixed) == 3);

  CHECK_THROWS_AS(count_by_volume(0, unit), std::invalid_argument);
  CHECK_THROWS_AS(count_by_volume(-1, unit), std::invalid_argument);
  CHECK_THROWS_AS(count_by_volume(30, unit), std::invalid_argument);
  CHECK_THROWS_AS(count_by_volume(1, stub_catalog(Rat(1) / 30, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(count_by_volume(1, PieceCatalog{}), std::invalid_argument);
}

TEST_CASE("boundary assumption checks") {
  CoxeterDiagram p14f = load("P1_4_full.cox");
  CoxeterDiagram p24f = load("P2_4_full.cox");
  CoxeterDiagram p15 = load("P1_5.cox");
  CoxeterDiagram p25f = load("P2_5_full.cox");
  CoxeterDiagram p14 = load("P1_4.cox");
  CoxeterDiagram s14 = load("S1_4.cox");

  CHECK(check_assumption(p14f, {5, 7}).status == AssumptionStatus::TwoSided);
  CHECK(check_assumption(p24f, {5, 7}).status == AssumptionStatus::TwoSided);
  CHECK(check_assumption(p25f, {6, 7}).status == AssumptionStatus::TwoSided);
  CHECK(check_assumption(p15, {6}).status == AssumptionStatus::OneSided);

  // facet meeting a neighbour at a finite dihedral angle
  AssumptionCheck angle = check_assumption(s14, {0});
  CHECK(angle.status == AssumptionStatus::Fails);
  CHECK(angle.reason.find("pi/4") != std::string::npos);
  CHECK(check_assumption(p15, {5}).status == AssumptionStatus::Fails);

  // the two truncating facets of the one-sided truncation have links
  // [4,3,5] and [3,5,3], so they cannot be matched up
  AssumptionCheck links = check_assumption(p14, {5, 6});
  CHECK(links.status == AssumptionStatus::Fails);
  CHECK(links.reason.find("not isomorphic") != std::string::npos);

  CHECK_THROWS_AS(check_assumption(p14f, {}), std::invalid_argument);
  CHECK_THROWS_AS(check_assumption(p14f, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(check_assumption(p14f, {4, 4}), std::invalid_argument);
  CHECK_THROWS_AS(check_assumption(p14f, {8}), std::invalid_argument);
  CHECK_THROWS_AS(check_assumption(p14f, {-1}), std::invalid_argument);
}

TEST_CASE("piece catalogs") {
  PieceCatalog h4 = catalog("catalog_h4.txt");
  CHECK(h4.dim == 4);
  CHECK(h4.field.d == 5);
  REQUIRE(h4.pieces.size() == 2);
  CHECK(h4.pieces[0].name == "P1_4_full");
  CHECK(h4.pieces[1].name == "P2_4_full");
  CHECK(h4.pieces[0].volume == 1);
  CHECK(h4.pieces[0].cls == ArithClass::ProperlyQuasiArithmetic);
  CHECK(h4.pieces[1].cls == ArithClass::ProperlyQuasiArithmetic);
  CHECK(h4.pieces[0].invariants.dim == 5);
  CHECK(h4.pieces[1].invariants.dim == 5);
  CHECK(h4.pieces[0].invariants.hasse != h4.pieces[1].invariants.hasse);
  CHECK(h4.distinction.find("Hasse invariant") != std::string::npos);

  PieceCatalog h5 = catalog("catalog_h5.txt");
  CHECK(h5.dim == 5);
  CHECK(h5.field.d == 5);
  REQUIRE(h5.pieces.size() == 2);
  CHECK(h5.pieces[0].boundary == std::vector<int>{6});
  CHECK(h5.pieces[1].boundary == std::vector<int>{6, 7});
  CHECK(h5.pieces[0].cls == ArithClass::Arithmetic);
  CHECK(h5.pieces[1].cls == ArithClass::Arithmetic);
  CHECK(h5.pieces[0].invariants.dim == 6);
  CHECK(h5.pieces[1].invariants.dim == 6);
  CHECK(h5.distinction.find("determinant classes differ") !=
        std::string::npos);

  std::string data = COXARITH_DATA_DIR;
  // boundary node with a finite dihedral angle
  CHECK_THROWS_AS(
      load_catalog(write_temp(
          "cat_bad_boundary.txt",
          "dim = 4\n[piece.1]\ndiagram = \"" + data +
              "/P1_4_full.cox\"\nboundary = [1, 2]\n[piece.2]\ndiagram = \"" +
              data + "/P2_4_full.cox\"\nboundary = [6, 8]\n")),
      std::domain_error);
  // mismatched truncating links
  CHECK_THROWS_AS(
      load_catalog(write_temp(
          "cat_bad_links.txt",
          "dim = 4\n[piece.1]\ndiagram = \"" + data +
              "/P1_4.cox\"\nboundary = [6, 7]\n[piece.2]\ndiagram = \"" +
              data + "/P2_4_full.cox\"\nboundary = [6, 8]\n")),
      std::domain_error);
  CHECK_THROWS_AS(load_catalog(write_temp(
                      "cat_missing_piece.txt",
                      "dim = 4\n[piece.1]\ndiagram = \"" + data +
                          "/P1_4_full.cox\"\nboundary = [6, 8]\n")),
                  std::domain_error);
  CHECK_THROWS_AS(
      load_catalog(write_temp(
          "cat_bad_volume.txt",
          "dim = 4\n[piece.1]\ndiagram = \"" + data +
              "/P1_4_full.cox\"\nboundary = [6, 8]\nvolume = -1\n"
              "[piece.2]\ndiagram = \"" +
              data + "/P2_4_full.cox\"\nboundary = [6, 8]\n")),
      std::domain_error);
  CHECK_THROWS_AS(load_catalog(write_temp("cat_garbled.txt", "dim 4\n")),
                  std::domain_error);
  CHECK_THROWS_AS(load_catalog("/tmp/no_such_catalog.txt"),
                  std::domain_error);
}

TEST_CASE("garland diagrams") {
  PieceCatalog h4 = catalog("catalog_h4.txt");
  PieceCatalog h5 = catalog("catalog_h5.txt");

  // a single-letter garland is the piece itself
  CoxeterDiagram g1 = garland_diagram(h4, W({1}));
  CHECK(g1.n == 8);
  CHECK(g1.name == "P1_4_full");
  CHECK(g1.all_weights_known());

  CoxeterDiagram g12 = garland_diagram(h4, W({1, 2}));
  CHECK(g12.name == "garland_12");
  CHECK(g12.n == 10);
  CHECK_FALSE(g12.all_weights_known());
  CHECK_THROWS_AS(gram_matrix(g12), std::domain_error);

  // interface nodes are shared, everything else is disjoint
  CHECK(count_edges(g12, EdgeKind::Label) == 7);
  CHECK(count_edges(g12, EdgeKind::Dotted, true) == 6);
  CHECK(count_edges(g12, EdgeKind::Dotted, false) == 9);
  REQUIRE(g12.edge(0, 1) != nullptr);
  CHECK(g12.edge(0, 1)->m == 4);
  REQUIRE(g12.edge(1, 7) != nullptr);
  CHECK(g12.edge(1, 7)->m == 5);
  REQUIRE(g12.edge(3, 8) != nullptr);
  CHECK(g12.edge(3, 8)->m == 3);

  // the glued diagram reparses from its own serialization
  CoxeterDiagram round = parse_diagram(emit_diagram(g12));
  CHECK(round.n == g12.n);
  CHECK(emit_diagram(round) == emit_diagram(g12));

  // end copies keep one boundary node's worth more than middle copies:
  // 7 + 2 + 2 + 3 with interfaces of four shared nodes each
  CHECK(garland_diagram(h4, W({2, 1, 1, 2})).n == 14);

  // the one-sided piece can cap an end but cannot sit in the middle
  CHECK(garland_diagram(h5, W({1, 2})).n == 8);
  CHECK(garland_diagram(h5, W({2, 1})).n == 8);
  CHECK(garland_diagram(h5, W({1, 2, 2})).n == 9);
  CHECK(garland_diagram(h5, W({1, 1})).n == 7);
  CHECK_THROWS_AS(garland_diagram(h5, W({2, 1, 2})), std::domain_error);

  CHECK_THROWS_AS(garland_diagram(h4, GarlandWord{}), std::invalid_argument);
  CHECK_THROWS_AS(garland_diagram(PieceCatalog{}, W({1})),
                  std::invalid_argument);
}

TEST_CASE("garland classification") {
  PieceCatalog h4 = catalog("catalog_h4.txt");
  PieceCatalog h5 = catalog("catalog_h5.txt");

  CHECK(classify_garland(h4, W({1, 2, 1})) ==
        ArithClass::NotQuasiArithmetic);
  CHECK(classify_garland(h4, W({1, 2})) == ArithClass::NotQuasiArithmetic);
  CHECK(classify_garland(h4, W({1, 1})) ==
        ArithClass::ProperlyQuasiArithmetic);
  CHECK(classify_garland(h4, W({2})) == ArithClass::ProperlyQuasiArithmetic);
  CHECK(classify_garland(h5, W({2, 2, 2})) == ArithClass::Arithmetic);
  CHECK(classify_garland(h5, W({1})) == ArithClass::Arithmetic);
  CHECK(classify_garland(h5, W({1, 2})) == ArithClass::NotQuasiArithmetic);

  CHECK_THROWS_AS(classify_garland(PieceCatalog{}, W({1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify_garland(h4, GarlandWord{}),
                  std::invalid_argument);
}
