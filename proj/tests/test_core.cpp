#include <doctest.h>

#include "mhsbm/core.hpp"
#include "test_support.hpp"

using namespace mhsbm;

TEST_CASE("parse_hyperedges reads weight then node ids") {
  auto layer = parse_hyperedges("1 0 1 2\n2 0 1\n");
  REQUIRE(layer.num_hyperedges() == 2);
  CHECK(layer.num_nodes() == 3);
  CHECK(layer.hyperedges()[0] == Hyperedge{{0, 1}, 2.0});
  CHECK(layer.hyperedges()[1] == Hyperedge{{0, 1, 2}, 1.0});
}

TEST_CASE("duplicate node sets merge by weight") {
  auto layer = parse_hyperedges("1 0 1\n1 1 0\n");
  REQUIRE(layer.num_hyperedges() == 1);
  CHECK(layer.hyperedges()[0] == Hyperedge{{0, 1}, 2.0});
}

TEST_CASE("parse_hyperedges rejects malformed input") {
  CHECK_THROWS_AS(parse_hyperedges("1 0\n"), InputError);
  CHECK_THROWS_AS(parse_hyperedges("-1 0 1\n"), InputError);
  CHECK_THROWS_AS(parse_hyperedges("1 0 5\n", 3), InputError);
  CHECK_THROWS_AS(parse_hyperedges("1 0 0\n"), InputError);
  CHECK_THROWS_AS(parse_hyperedges("x 0 1\n"), InputError);
  try {
    parse_hyperedges("1 0 1\n# comment\n1 2\n");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are skipped") {
  auto layer = parse_hyperedges("# header\n\n1 0 1\n  \n", 4);
  CHECK(layer.num_nodes() == 4);
  CHECK(layer.num_hyperedges() == 1);
}

TEST_CASE("inter-edge parsing normalizes layer order") {
  auto a = parse_inter_edges("0 1 3 7 1.0\n");
  auto b = parse_inter_edges("1 0 7 3 1.0\n");
  REQUIRE(a.size() == 1);
  CHECK(a[0].layer_a == 0);
  CHECK(a[0].layer_b == 1);
  REQUIRE(a[0].edges.size() == 1);
  CHECK(a[0].edges[0] == InterEdge{3, 7, 1.0});
  CHECK(a == b);
  CHECK_THROWS_AS(parse_inter_edges("0 0 1 2 1.0\n"), InputError);
  CHECK_THROWS_AS(parse_inter_edges("0 1 1 2 -1\n"), InputError);
}

TEST_CASE("inter-edge duplicates merge") {
  auto s = parse_inter_edges("0 1 3 7 1\n1 0 7 3 2\n0 1 0 0 1\n");
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].edges.size() == 2);
  CHECK(s[0].edges[1] == InterEdge{3, 7, 3.0});
}

TEST_CASE("write_matrix uses full precision CSV") {
  test::TempDir dir("core");
  Matrix z = Matrix::Zero(1, 1);
  write_matrix(dir.file("z.csv"), z);
  CHECK(test::read_text(dir.file("z.csv")) == "0\n");
  write_matrix(dir.file("i.csv"), Matrix::Identity(2, 2));
  CHECK(test::read_text(dir.file("i.csv")) == "1,0\n0,1\n");

  Matrix m(2, 3);
  m << 1.0 / 3.0, 2e-300, 7, 0.1, 123456.789, 1e10;
  write_matrix(dir.file("m.csv"), m);
  CHECK(read_matrix(dir.file("m.csv")) == m);
}

TEST_CASE("multi-hypergraph validates inter-edge ranges") {
  HypergraphLayer a(3, {make_hyperedge({0, 1})});
  HypergraphLayer b(2, {make_hyperedge({0, 1})});
  CHECK_NOTHROW(MultiHypergraph({a, b}, {make_inter_edge_set(0, 1, {{2, 1, 1.0}})}));
  CHECK_THROWS_AS(MultiHypergraph({a, b}, {make_inter_edge_set(0, 1, {{1, 2, 1.0}})}), InputError);
  CHECK_THROWS_AS(MultiHypergraph({a, b}, {make_inter_edge_set(0, 2, {{0, 0, 1.0}})}), InputError);
  CHECK_THROWS_AS(MultiHypergraph({a, b}, {make_inter_edge_set(0, 1, {}), make_inter_edge_set(0, 1, {})}),
                  InputError);
}

TEST_CASE("manifest round trip") {
  test::TempDir dir("manifest");
  HypergraphLayer a(4, {make_hyperedge({0, 1, 2}, 2.0), make_hyperedge({2, 3})}, std::vector<int>{0, 0, 1, 1});
  HypergraphLayer b(3, {make_hyperedge({0, 2})}, std::vector<int>{1, -1, 0});
  MultiHypergraph mh({a, b}, {make_inter_edge_set(0, 1, {{3, 2, 1.5}, {0, 0, 1.0}})});
  write_multi_hypergraph(dir.path().string(), mh, {2, 2});
  auto m = Manifest::parse_file(dir.file("manifest.cfg"));
  CHECK(m.num_layers() == 2);
  CHECK(m.k_per_layer() == std::vector<std::size_t>{2, 2});
  CHECK(m.load() == mh);
}

TEST_CASE("manifest errors") {
  CHECK_THROWS_AS(Manifest::parse("no equals sign\n"), InputError);
  auto m = Manifest::parse("layer.0.edges = missing.txt\n");
  CHECK_THROWS_AS(m.load(), InputError);
  CHECK_THROWS_AS(m.require("inter_edges"), InputError);
}

TEST_CASE("ground truth file leaves unlisted nodes unlabeled") {
  test::TempDir dir("truth");
  test::write_text(dir.file("t.txt"), "0 1\n2 0\n");
  CHECK(parse_ground_truth_file(dir.file("t.txt"), 3) == std::vector<int>{1, -1, 0});
  CHECK_THROWS_AS(parse_ground_truth_file(dir.file("t.txt"), 2), InputError);
}
