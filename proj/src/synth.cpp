#include "mhsbm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "mhsbm/inference.hpp"

namespace mhsbm {

namespace {

std::size_t ceil_count(double fraction, std::size_t n) {
  // Guard against 0.7 * 10 evaluating to 7.000000000000001.
  double x = fraction * static_cast<double>(n);
  double r = std::round(x);
  if (std::abs(x - r) < 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

using Pair = std::pair<NodeId, NodeId>;

// `count` distinct pairs (i, j), i < na, j < nb, satisfying `accept`, uniformly.
template <typename Accept>
std::vector<Pair> sample_pairs(std::size_t na, std::size_t nb, std::size_t count, std::uint64_t available,
                               Accept accept, const std::set<Pair>& exclude, std::mt19937_64& rng) {
  if (count == 0) return {};
  if (available < count)
    throw InputError("inter-edge budget " + std::to_string(count) + " exceeds the " + std::to_string(available) +
                     " available node pairs");
  std::vector<Pair> out;
  if (available <= 2'000'000 || available <= 4 * count) {
    std::vector<Pair> all;
    all.reserve(available);
    for (NodeId i = 0; i < na; ++i)
      for (NodeId j = 0; j < nb; ++j)
        if (accept(i, j) && !exclude.contains({i, j})) all.emplace_back(i, j);
    if (all.size() < count) throw InputError("inter-edge budget exceeds the available node pairs");
    for (std::size_t t = 0; t < count; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, all.size() - 1);
      std::swap(all[t], all[pick(rng)]);
    }
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    std::set<Pair> taken(exclude);
    std::uniform_int_distribution<NodeId> pa(0, static_cast<NodeId>(na - 1));
    std::uniform_int_distribution<NodeId> pb(0, static_cast<NodeId>(nb - 1));
    while (out.size() < count) {
      Pair p{pa(rng), pb(rng)};
      if (accept(p.first, p.second) && taken.insert(p).second) out.push_back(p);
    }
  }
  return out;
}

// Advances a sorted combination of `nodes.size()` values from [0, n).
bool next_combination(std::vector<NodeId>& nodes, std::size_t n) {
  const std::size_t k = nodes.size();
  for (std::size_t a = k; a-- > 0;) {
    if (nodes[a] < n - k + a) {
      ++nodes[a];
      for (std::size_t b = a + 1; b < k; ++b) nodes[b] = nodes[b - 1] + 1;
      return true;
    }
  }
  return false;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  long double r = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return static_cast<std::uint64_t>(std::llround(std::min(r, 1e19L)));
}

}  // namespace

void SynthConfig::validate() const {
  if (sample_fractions.empty()) throw InputError("synth: at least one layer is required");
  for (double f : sample_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw InputError("synth: sample fractions must lie in (0, 1]");
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) throw InputError("synth: noise fraction must lie in [0, 1)");
  if (num_layers() > 1 && inter_edge_budgets.size() != 1 && inter_edge_budgets.size() != num_layers() - 1)
    throw InputError("synth: give one inter-edge budget or one per layer pair (0, l)");
}

MultiHypergraph build_views(const HypergraphLayer& source, const SynthConfig& cfg) {
  cfg.validate();
  const auto& truth = source.ground_truth();
  std::vector<HypergraphLayer> layers;
  for (std::size_t l = 0; l < cfg.num_layers(); ++l) {
    std::mt19937_64 rng(derive_seed(cfg.seed, l));
    std::vector<std::size_t> order(source.num_hyperedges());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t keep = std::min(order.size(), ceil_count(cfg.sample_fractions[l], order.size()));
    for (std::size_t t = 0; t < keep; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, order.size() - 1);
      std::swap(order[t], order[pick(rng)]);
    }
    std::vector<Hyperedge> edges;
    for (std::size_t t = 0; t < keep; ++t) {
      edges.push_back(source.hyperedges()[order[t]]);
      if (cfg.unit_weights) edges.back().weight = 1.0;
    }
    layers.push_back(source.with_hyperedges(std::move(edges)));
  }

  std::map<int, std::uint64_t> community_sizes;
  std::uint64_t labeled = 0;
  for (int c : truth)
    if (c >= 0) {
      ++community_sizes[c];
      ++labeled;
    }
  std::uint64_t same_pairs = 0;
  for (const auto& [c, n] : community_sizes) same_pairs += n * n;
  const std::uint64_t diff_pairs = labeled * labeled - same_pairs;

  std::vector<InterEdgeSet> inter;
  const std::size_t n = source.num_nodes();
  for (std::size_t l = 1; l < cfg.num_layers(); ++l) {
    const std::size_t budget =
        cfg.inter_edge_budgets.size() == 1 ? cfg.inter_edge_budgets[0] : cfg.inter_edge_budgets[l - 1];
    std::mt19937_64 rng(derive_seed(cfg.seed, 0x1000 + l));
    auto same = [&](NodeId i, NodeId j) { return truth[i] >= 0 && truth[i] == truth[j]; };
    auto diff = [&](NodeId i, NodeId j) { return truth[i] >= 0 && truth[j] >= 0 && truth[i] != truth[j]; };
    auto aligned = sample_pairs(n, n, budget, same_pairs, same, {}, rng);
    auto noise = sample_pairs(n, n, ceil_count(cfg.noise_fraction, budget), diff_pairs, diff, {}, rng);
    std::vector<InterEdge> edges;
    for (const auto& [i, j] : aligned) edges.push_back({i, j, 1.0});
    for (const auto& [i, j] : noise) edges.push_back({i, j, 1.0});
    inter.push_back(make_inter_edge_set(0, l, std::move(edges)));
  }
  return MultiHypergraph(std::move(layers), std::move(inter));
}

MultiHypergraph remove_inter_edges(const MultiHypergraph& mh, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InputError("removal ratio must lie in [0, 1]");
  std::vector<InterEdgeSet> kept;
  for (std::size_t s = 0; s < mh.inter_edges().size(); ++s) {
    const auto& set = mh.inter_edges()[s];
    std::mt19937_64 rng(derive_seed(seed, s));
    auto edges = set.edges;
    const std::size_t drop = std::min(edges.size(), ceil_count(ratio, edges.size()));
    for (std::size_t t = 0; t < drop; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, edges.size() - 1);
      std::swap(edges[t], edges[pick(rng)]);
    }
    kept.push_back(make_inter_edge_set(
        set.layer_a, set.layer_b, std::vector<InterEdge>(edges.begin() + static_cast<std::ptrdiff_t>(drop), edges.end())));
  }
  return mh.with_inter_edges(std::move(kept));
}

MultiHypergraph sample_from_model(const LatentState& state, std::size_t max_size,
                                  const std::vector<std::pair<LayerId, LayerId>>& pairs, std::uint64_t seed) {
  if (max_size < 2) throw InputError("sample_from_model: max_size must be >= 2");
  if (pairs.size() != state.w_cross.size())
    throw InputError("sample_from_model: one layer pair is required per cross affinity");
  const std::size_t L = state.u.size();

  std::vector<HypergraphLayer> layers;
  for (std::size_t l = 0; l < L; ++l) {
    const Matrix& u = state.u[l];
    const auto n = static_cast<std::size_t>(u.rows());
    if (max_size > n) throw InputError("sample_from_model: max_size exceeds the number of nodes");
    std::uint64_t candidates = 0;
    for (std::size_t d = 2; d <= max_size; ++d) candidates += binomial(n, d);
    if (candidates > kMaxEnumeratedCandidates)
      throw InputError("sample_from_model: " + std::to_string(candidates) +
                       " candidate hyperedges exceed the enumeration bound");

    const Matrix uw = u * state.w[l];
    std::mt19937_64 rng(derive_seed(seed, l));
    std::vector<Hyperedge> edges;
    for (std::size_t d = 2; d <= max_size; ++d) {
      const std::vector<double> theta(d, 1.0);
      const double norm = mu(d);
      std::vector<NodeId> nodes(d);
      std::iota(nodes.begin(), nodes.end(), NodeId{0});
      do {
        double rate = lambda_e_premultiplied(nodes, theta, u, uw) / norm;
        if (rate <= 0.0) continue;
        std::poisson_distribution<long long> draw(rate);
        if (auto a = draw(rng); a > 0) edges.push_back(Hyperedge{nodes, static_cast<double>(a)});
      } while (next_combination(nodes, n));
    }
    layers.emplace_back(n, std::move(edges));
  }

  std::vector<InterEdgeSet> inter;
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    auto [a, b] = pairs[s];
    if (a >= b || b >= L) throw InputError("sample_from_model: invalid layer pair");
    const Matrix& ua = state.u[a];
    const Matrix& ub = state.u[b];
    const Matrix uaw = ua * state.w_cross[s];
    std::mt19937_64 rng(derive_seed(seed, L + s));
    std::vector<InterEdge> edges;
    for (Eigen::Index i = 0; i < ua.rows(); ++i)
      for (Eigen::Index j = 0; j < ub.rows(); ++j) {
        double rate = uaw.row(i).dot(ub.row(j));
        if (rate <= 0.0) continue;
        std::poisson_distribution<long long> draw(rate);
        if (auto x = draw(rng); x > 0)
          edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), static_cast<double>(x)});
      }
    inter.push_back(make_inter_edge_set(a, b, std::move(edges)));
  }
  return MultiHypergraph(std::move(layers), std::move(inter));
}

PlantedInstance planted(const PlantedConfig& cfg) {
  if (cfg.communities == 0 || cfg.num_nodes < cfg.communities)
    throw InputError("planted: need at least one node per community");
  if (cfg.num_layers == 0) throw InputError("planted: need at least one layer");
  const auto n = static_cast<Eigen::Index>(cfg.num_nodes);
  const auto k = static_cast<Eigen::Index>(cfg.communities);

  std::vector<int> labels(cfg.num_nodes);
  for (std::size_t i = 0; i < cfg.num_nodes; ++i)
    labels[i] = static_cast<int>(i * cfg.communities / cfg.num_nodes);

  PlantedInstance inst;
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    Matrix u = Matrix::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) u(i, labels[i]) = 1.0;
    Matrix w = Matrix::Constant(k, k, cfg.c_out);
    w.diagonal().setConstant(cfg.c_in);
    inst.truth_state.u.push_back(std::move(u));
    inst.truth_state.w.push_back(std::move(w));
  }
  std::vector<std::pair<LayerId, LayerId>> pairs;
  if (cfg.inter_edges) {
    for (std::size_t l = 0; l + 1 < cfg.num_layers; ++l) {
      Matrix wc = Matrix::Constant(k, k, cfg.cross_out);
      wc.diagonal().setConstant(cfg.cross_in);
      inst.truth_state.w_cross.push_back(std::move(wc));
      pairs.emplace_back(l, l + 1);
    }
  }
  auto sampled = sample_from_model(inst.truth_state, cfg.max_size, pairs, cfg.seed);
  std::vector<HypergraphLayer> layers;
  for (const auto& layer : sampled.layers()) layers.push_back(layer.with_ground_truth(labels));
  inst.mh = MultiHypergraph(std::move(layers), sampled.inter_edges());
  return inst;
}

}  // namespace mhsbm
