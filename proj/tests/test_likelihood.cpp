#include <doctest.h>

#include <cmath>
#include <random>

#include "mhsbm/likelihood.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mhsbm;

TEST_CASE("mu counts node pairs") {
  CHECK(mu(2) == 1.0);
  CHECK(mu(3) == 3.0);
  CHECK(mu(10) == 45.0);
}

TEST_CASE("lambda_e worked examples") {
  const std::vector<double> ones{1, 1, 1};
  const std::vector<NodeId> e{0, 1, 2};
  CHECK(lambda_e(e, ones, Matrix::Ones(3, 1), Matrix::Ones(1, 1)) == doctest::Approx(3.0));
  CHECK(lambda_e(e, ones, Matrix::Ones(3, 2), Matrix::Zero(2, 2)) == 0.0);

  Matrix u(3, 2);
  u << 1, 0, 0, 1, 1, 1;
  Matrix w(2, 2);
  w << 1, 2, 2, 3;
  CHECK(lambda_e(e, ones, u, w) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(oracle::lambda_e(e, ones, u, w) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(lambda_e_premultiplied(e, ones, u, u * w) == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("lambda_e matches the double sum on random instances") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 11), k = 1 + static_cast<int>(rng() % 4);
    auto u = test::random_matrix(rng, n, k);
    auto w = test::random_symmetric(rng, k);
    std::vector<NodeId> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(2 + rng() % std::min(5, n - 1));
    std::sort(all.begin(), all.end());
    std::vector<double> theta(all.size());
    for (auto& x : theta) x = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    const double want = oracle::lambda_e(all, theta, u, w);
    CHECK(std::abs(lambda_e(all, theta, u, w) - want) <= 1e-9 * want);
  }
}

TEST_CASE("lambda_ij") {
  Eigen::RowVectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  Matrix w(2, 2);
  w << 0, 5, 0, 0;
  CHECK(lambda_ij(a, b, w) == 5.0);
  CHECK(lambda_ij(a, b, Matrix::Zero(2, 2)) == 0.0);
  a << 1, 2;
  b << 3, 1;
  w << 1, 0, 0, 2;
  CHECK(lambda_ij(a, b, w) == 7.0);
  CHECK_THROWS_AS(lambda_ij(a, b, Matrix::Ones(3, 2)), InputError);
}

TEST_CASE("pairwise_sum is the sum over node pairs") {
  std::mt19937_64 rng(5);
  auto u = test::random_matrix(rng, 7, 3);
  auto w = test::random_symmetric(rng, 3);
  double want = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) want += u.row(i) * w * u.row(j).transpose();
  CHECK(pairwise_sum(u, w) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("negatives are unobserved and size matched") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto neg = sample_negatives(layer, seed);
    REQUIRE(neg.size() == 1);
    CHECK(neg[0].size() == 2);
    CHECK(neg[0].weight == 0.0);
    CHECK((neg[0].nodes == std::vector<NodeId>{0, 2} || neg[0].nodes == std::vector<NodeId>{1, 2}));
  }
  CHECK(sample_negatives(layer, 4) == sample_negatives(layer, 4));

  HypergraphLayer full(3, {make_hyperedge({0, 1}), make_hyperedge({0, 2}), make_hyperedge({1, 2})});
  try {
    sample_negatives(full, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("size 2") != std::string::npos);
  }
}

TEST_CASE("layer constants") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  auto c = layer_constants(layer, sample_negatives(layer, 0));
  CHECK(c.q_pairs == 1);
  CHECK(c.m_count == 1);
  CHECK(c.c_l == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  HypergraphLayer whole(5, {make_hyperedge({0, 1, 2, 3, 4})});
  auto d = layer_constants(whole, {});
  CHECK(d.q_pairs == 10);
  CHECK(d.c_l == doctest::Approx(2.0 / 20.0 + 2.0 / 20.0));
  CHECK(layer_constants(layer, {}, 5).c_l == doctest::Approx(5 * 4.0 / 3.0));
}

TEST_CASE("surrogate objective scalar case") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  MultiHypergraph mh({layer});
  LatentState s{{Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1)}, {}};
  std::vector<InternalDegreeTable> theta{InternalDegreeTable::uniform(layer)};
  std::vector<LayerConstants> consts{layer_constants(layer, {})};
  CHECK(surrogate_objective(mh, theta, s, consts) == doctest::Approx(-4.0).epsilon(1e-15));

  LatentState zero{{Matrix::Zero(3, 1)}, {Matrix::Ones(1, 1)}, {}};
  CHECK_THROWS_AS(surrogate_objective(mh, theta, zero, consts), DegenerateStateError);
}

TEST_CASE("surrogate objective adds the cross terms") {
  HypergraphLayer a(2, {make_hyperedge({0, 1})});
  HypergraphLayer b(3, {make_hyperedge({0, 2})});
  auto set = make_inter_edge_set(0, 1, {{0, 1, 2.0}});
  MultiHypergraph with({a, b}, {set});
  MultiHypergraph without({a, b});
  std::vector<InternalDegreeTable> theta{InternalDegreeTable(a), InternalDegreeTable(b)};
  std::vector<LayerConstants> consts{layer_constants(a, {}), layer_constants(b, {})};
  Matrix wc(1, 1);
  wc << 0.5;
  LatentState s{{Matrix::Ones(2, 1), Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1), Matrix::Ones(1, 1)}, {wc}};
  LatentState s0{s.u, s.w, {}};
  const double base = surrogate_objective(without, theta, s0, consts);
  // -(2)(0.5)(3) + 2 log(0.5)
  CHECK(surrogate_objective(with, theta, s, consts) == doctest::Approx(base - 3.0 + 2.0 * std::log(0.5)));
}

TEST_CASE("state validation") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  MultiHypergraph mh({layer});
  Matrix w(2, 2);
  w << 1, 2, 3, 1;
  CHECK_THROWS_AS((LatentState{{Matrix::Ones(3, 2)}, {w}, {}}.validate(mh)), InputError);
  CHECK_THROWS_AS((LatentState{{Matrix::Ones(2, 1)}, {Matrix::Ones(1, 1)}, {}}.validate(mh)), InputError);
  CHECK_THROWS_AS((LatentState{{-Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1)}, {}}.validate(mh)), InputError);
  CHECK_NOTHROW((LatentState{{Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1)}, {}}.validate(mh)));
}
