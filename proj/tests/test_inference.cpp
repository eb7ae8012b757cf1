#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mhsbm/inference.hpp"
#include "mhsbm/synth.hpp"
#include "test_support.hpp"

using namespace mhsbm;

namespace {

InferenceConfig config(std::vector<std::size_t> k, std::size_t restarts = 1) {
  InferenceConfig cfg;
  cfg.k_per_layer = std::move(k);
  cfg.restarts = restarts;
  cfg.threads = 1;
  return cfg;
}

MultiHypergraph random_multi(std::mt19937_64& rng, bool inter) {
  const std::size_t na = 10 + rng() % 30, nb = 10 + rng() % 30;
  auto a = test::random_layer(rng, na, 3 * na, 4);
  auto b = test::random_layer(rng, nb, 3 * nb, 4);
  std::vector<InterEdgeSet> sets;
  if (inter) {
    std::vector<InterEdge> edges;
    for (int t = 0; t < 40; ++t)
      edges.push_back({static_cast<NodeId>(rng() % na), static_cast<NodeId>(rng() % nb), 1.0});
    sets.push_back(make_inter_edge_set(0, 1, std::move(edges)));
  }
  return MultiHypergraph({a, b}, std::move(sets));
}

}  // namespace

TEST_CASE("initialization") {
  HypergraphLayer layer(5, {make_hyperedge({0, 1}), make_hyperedge({2, 3, 4})});
  MultiHypergraph mh({layer, layer}, {make_inter_edge_set(0, 1, {{0, 0, 1.0}})});
  auto cfg = config({3, 2});
  auto s = initialize(mh, cfg, 9);
  CHECK(s.u[0].rows() == 5);
  CHECK(s.u[0].cols() == 3);
  CHECK(s.w_cross[0].rows() == 3);
  CHECK(s.w_cross[0].cols() == 2);
  CHECK(s.w[0].minCoeff() > 0.0);
  CHECK(s.u[1].minCoeff() > 0.05);
  CHECK(s.w[0] == s.w[0].transpose());
  auto again = initialize(mh, cfg, 9);
  CHECK(again.u == s.u);
  CHECK(again.w == s.w);
  CHECK(again.w_cross == s.w_cross);

  cfg.assortative = true;
  auto a = initialize(mh, cfg, 9);
  for (int k = 0; k < 3; ++k)
    for (int q = 0; q < 3; ++q) CHECK((k == q) == (a.w[0](k, q) > 0.0));
}

TEST_CASE("hyperedge E-step") {
  const std::vector<NodeId> e{0, 1, 2};
  auto m = e_step_hyperedge(e, std::vector<double>{1, 1, 1}, Matrix::Ones(3, 1), Matrix::Ones(1, 1));
  for (int a = 0; a < 3; ++a) CHECK(m.node(a, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(m.pair(0, 0) == doctest::Approx(1.0));

  auto p = e_step_hyperedge(std::vector<NodeId>{1, 2}, std::vector<double>{1, 1}, Matrix::Ones(3, 1),
                            Matrix::Ones(1, 1));
  CHECK(p.node(0, 0) == doctest::Approx(1.0));
  CHECK(p.node(1, 0) == doctest::Approx(1.0));
  CHECK(p.pair(0, 0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(e_step_hyperedge(e, std::vector<double>{1, 1, 1}, Matrix::Zero(3, 1), Matrix::Ones(1, 1)),
                  DegenerateStateError);
}

TEST_CASE("hyperedge E-step marginals are consistent") {
  std::mt19937_64 rng(2);
  auto u = test::random_matrix(rng, 6, 3);
  auto w = test::random_symmetric(rng, 3);
  const std::vector<NodeId> e{0, 2, 3, 5};
  auto m = e_step_hyperedge(e, std::vector<double>{1.2, 0.8, 1.0, 1.0}, u, w);
  CHECK(m.node.sum() == doctest::Approx(2.0));
  CHECK(m.pair.sum() == doctest::Approx(1.0));
  CHECK((m.pair - m.pair.transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pair E-step") {
  Eigen::RowVectorXd a(1), b(1);
  a << 2;
  b << 3;
  CHECK(e_step_pair(a, b, Matrix::Ones(1, 1))(0, 0) == doctest::Approx(1.0));

  Eigen::RowVectorXd x(2), y(2);
  x << 1, 2;
  y << 3, 1;
  Matrix w(2, 2);
  w << 1, 0, 0, 2;
  auto rho = e_step_pair(x, y, w);
  CHECK(rho(0, 0) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(rho(1, 1) == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
  CHECK(rho(0, 1) == 0.0);
  CHECK(rho(1, 0) == 0.0);

  x << 1, 0;
  auto one_row = e_step_pair(x, y, Matrix::Ones(2, 2));
  CHECK(one_row.row(1).sum() == 0.0);
  CHECK(one_row.row(0).sum() == doctest::Approx(1.0));
}

TEST_CASE("scalar updates") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  MultiHypergraph mh({layer});
  auto cfg = config({1});
  ModelData data(mh, cfg);
  CHECK(data.consts[0].c_l == doctest::Approx(4.0 / 3.0));
  LatentState s{{Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1)}, {}};
  auto u = update_u(data, 0, s);
  CHECK(std::abs(u(0, 0) - 3.0 / 8.0) <= 1e-12);
  CHECK(u(2, 0) == 0.0);  // node 2 is in no hyperedge
  auto w = update_w(data, 0, s);
  CHECK(std::abs(w(0, 0) - 1.0 / 4.0) <= 1e-12);

  HypergraphLayer a(2, {make_hyperedge({0, 1})});
  HypergraphLayer b(3, {make_hyperedge({0, 1})});
  MultiHypergraph pair({a, b}, {make_inter_edge_set(0, 1, {{1, 2, 1.0}})});
  ModelData pdata(pair, config({1, 1}));
  LatentState ps{{Matrix::Ones(2, 1), Matrix::Ones(3, 1)}, {Matrix::Ones(1, 1), Matrix::Ones(1, 1)},
                 {Matrix::Ones(1, 1)}};
  CHECK(std::abs(update_w_cross(pdata, 0, ps)(0, 0) - 1.0 / 6.0) <= 1e-12);

  MultiHypergraph empty({a, b}, {make_inter_edge_set(0, 1, {})});
  ModelData edata(empty, config({1, 1}));
  CHECK(update_w_cross(edata, 0, ps)(0, 0) == 0.0);
}

TEST_CASE("affinities with no supporting hyperedges go to zero") {
  HypergraphLayer layer(4, {make_hyperedge({0, 1}), make_hyperedge({2, 3})});
  MultiHypergraph mh({layer});
  ModelData data(mh, config({2}));
  Matrix u(4, 2);
  u << 1, 0, 1, 0, 0, 1, 0, 1;
  Matrix w(2, 2);
  w << 1, 0.5, 0.5, 1;
  auto next = update_w(data, 0, LatentState{{u}, {w}, {}});
  CHECK(next(0, 1) == 0.0);
  CHECK(next(1, 0) == 0.0);
  CHECK(next(0, 0) > 0.0);
}

TEST_CASE("sweeps never decrease the objective") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 6; ++t) {
    auto mh = random_multi(rng, t % 2 == 0);
    auto cfg = config({1 + rng() % 4, 1 + rng() % 4});
    ModelData data(mh, cfg);
    auto s = initialize(mh, cfg, rng());
    double prev = objective(data, s);
    for (int it = 0; it < 40; ++it) {
      s = sweep(data, std::move(s));
      const double cur = objective(data, s);
      CHECK(cur >= prev - 1e-8 * std::abs(prev));
      prev = cur;
    }
  }
}

TEST_CASE("fit is deterministic for a fixed seed") {
  auto inst = planted(PlantedConfig{30, 2, 2, 3, 0.2, 0.02, 0.05, 0.0, true, 4});
  auto cfg = config({2, 2}, 2);
  cfg.max_iters = 60;
  cfg.seed = 17;
  auto a = fit(inst.mh, cfg);
  cfg.threads = 2;
  auto b = fit(inst.mh, cfg);
  CHECK(a.state.u == b.state.u);
  CHECK(a.state.w == b.state.w);
  CHECK(a.state.w_cross == b.state.w_cross);
  CHECK(a.objective == b.objective);
  CHECK(a.best_restart == b.best_restart);
  REQUIRE(a.objective_trace.size() == b.objective_trace.size());
  CHECK(a.restarts[1].seed == 18);
}

TEST_CASE("layers without inter-edges fit independently") {
  std::mt19937_64 rng(21);
  auto mh = random_multi(rng, false);
  auto cfg = config({2, 3});
  cfg.tol = 1e-300;
  cfg.max_iters = 30;
  ModelData joint(mh, cfg);
  auto init = initialize(mh, cfg, 5);
  auto together = run_em(joint, cfg, init);
  REQUIRE(together.state);
  for (LayerId l = 0; l < 2; ++l) {
    MultiHypergraph alone({mh.layer(l)});
    auto single = config({cfg.k_per_layer[l]});
    single.tol = cfg.tol;
    single.max_iters = cfg.max_iters;
    ModelData data(alone, single);
    auto r = run_em(data, single, LatentState{{init.u[l]}, {init.w[l]}, {}});
    REQUIRE(r.state);
    CHECK(r.state->u[0] == together.state->u[l]);
    CHECK(r.state->w[0] == together.state->w[l]);
  }
  // Layer 0 of a joint restart starts exactly where a single-layer fit does.
  auto lone = initialize(MultiHypergraph({mh.layer(0)}), config({2}), 5);
  CHECK(lone.u[0] == init.u[0]);
}

TEST_CASE("a fixed point is unchanged by a sweep") {
  auto inst = planted(PlantedConfig{24, 2, 2, 3, 0.3, 0.03, 0.1, 0.0, true, 2});
  auto cfg = config({2, 2});
  cfg.tol = 1e-300;
  cfg.max_iters = 5000;
  ModelData data(inst.mh, cfg);
  auto r = run_em(data, cfg, initialize(inst.mh, cfg, 1));
  REQUIRE(r.state);
  // Slow modes can still drift after max_iters; finish converging by hand.
  LatentState fixed = *r.state;
  for (int it = 0; it < 200000; ++it) {
    auto next = sweep(data, fixed);
    double move = 0.0;
    for (LayerId l = 0; l < 2; ++l)
      move = std::max({move, (next.u[l] - fixed.u[l]).cwiseAbs().maxCoeff(),
                       (next.w[l] - fixed.w[l]).cwiseAbs().maxCoeff()});
    fixed = std::move(next);
    if (move <= 1e-13) break;
  }
  auto next = sweep(data, fixed);
  for (LayerId l = 0; l < 2; ++l) {
    CHECK((next.u[l] - fixed.u[l]).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((next.w[l] - fixed.w[l]).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("config validation") {
  HypergraphLayer layer(3, {make_hyperedge({0, 1})});
  MultiHypergraph mh({layer});
  CHECK_THROWS_AS(config({1, 1}).validate(mh), InputError);
  CHECK_THROWS_AS(config({0}).validate(mh), InputError);
  auto cfg = config({1});
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(mh), InputError);
  cfg = config({1});
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(mh), InputError);
}

TEST_CASE("hard labels take the lowest index on ties") {
  Matrix u(3, 3);
  u << 0.2, 0.5, 0.5, 0, 0, 0, 0.9, 0.1, 0.9;
  CHECK(hard_labels(u) == std::vector<int>{1, 0, 0});
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
}
