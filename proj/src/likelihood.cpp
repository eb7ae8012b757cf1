#include "mhsbm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

namespace mhsbm {

namespace {

// C(n, k) saturated at 2^62.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k) {
  constexpr std::uint64_t cap = std::uint64_t{1} << 62;
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double r = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (r >= static_cast<long double>(cap)) return cap;
  }
  return static_cast<std::uint64_t>(std::llround(r));
}

// Floyd's algorithm: n distinct values from [0, range), sorted.
std::vector<NodeId> draw_distinct(std::size_t range, std::size_t n, std::mt19937_64& rng) {
  std::set<NodeId> chosen;
  for (std::size_t j = range - n; j < range; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    auto t = static_cast<NodeId>(pick(rng));
    if (!chosen.insert(t).second) chosen.insert(static_cast<NodeId>(j));
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

void LatentState::validate(const MultiHypergraph& mh) const {
  auto check = [](const Matrix& m, const char* what) {
    if (!m.allFinite() || (m.size() > 0 && m.minCoeff() < 0.0))
      throw InputError(std::string(what) + " has negative or non-finite entries");
  };
  if (u.size() != mh.num_layers() || w.size() != mh.num_layers())
    throw InputError("latent state layer count does not match the multi-hypergraph");
  if (w_cross.size() != mh.inter_edges().size())
    throw InputError("latent state has the wrong number of cross affinities");
  for (std::size_t l = 0; l < u.size(); ++l) {
    check(u[l], "u");
    check(w[l], "w");
    if (static_cast<std::size_t>(u[l].rows()) != mh.layer(l).num_nodes())
      throw InputError("u row count does not match the layer size");
    if (w[l].rows() != u[l].cols() || w[l].cols() != u[l].cols()) throw InputError("w shape does not match K");
    if ((w[l] - w[l].transpose()).cwiseAbs().maxCoeff() > 1e-12) throw InputError("w must be symmetric");
  }
  for (std::size_t s = 0; s < w_cross.size(); ++s) {
    check(w_cross[s], "w_cross");
    const auto& set = mh.inter_edges()[s];
    if (w_cross[s].rows() != u[set.layer_a].cols() || w_cross[s].cols() != u[set.layer_b].cols())
      throw InputError("w_cross shape does not match K of its layers");
  }
}

double mu(std::size_t n) {
  if (n < 2) throw InputError("mu: hyperedge size must be >= 2");
  return static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
}

double lambda_e(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u, const Matrix& w) {
  Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Zero(u.cols());
  double rate = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    auto row = u.row(nodes[a]);
    if (a > 0) rate += theta[a] * (prefix * w).dot(row);
    prefix += theta[a] * row;
  }
  return rate;
}

double lambda_e(const Hyperedge& e, std::span<const double> theta, const Matrix& u, const Matrix& w) {
  return lambda_e(std::span<const NodeId>(e.nodes), theta, u, w);
}

double lambda_e_premultiplied(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u,
                              const Matrix& uw) {
  Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Zero(u.cols());
  double rate = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (a > 0) rate += theta[a] * prefix.dot(uw.row(nodes[a]));
    prefix += theta[a] * u.row(nodes[a]);
  }
  return rate;
}

double lambda_ij(const Eigen::Ref<const Eigen::RowVectorXd>& u_i, const Eigen::Ref<const Eigen::RowVectorXd>& u_j,
                 const Matrix& w_cross) {
  if (u_i.size() != w_cross.rows() || u_j.size() != w_cross.cols())
    throw InputError("lambda_ij: dimension mismatch");
  return (u_i * w_cross).dot(u_j);
}

double pairwise_sum(const Matrix& u, const Matrix& w) {
  Matrix uw = u * w;
  Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Zero(u.cols());
  double total = 0.0;
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    total += prefix.dot(uw.row(j));
    prefix += u.row(j);
  }
  return total;
}

// ---------------------------------------------------------------------------

std::vector<Hyperedge> sample_unobserved(std::size_t num_nodes, const std::vector<std::size_t>& sizes,
                                         const std::vector<std::vector<NodeId>>& forbidden, std::uint64_t seed) {
  std::set<std::vector<NodeId>> taken(forbidden.begin(), forbidden.end());
  std::map<std::size_t, std::uint64_t> used_per_size;
  for (const auto& f : taken) ++used_per_size[f.size()];

  std::mt19937_64 rng(seed);
  std::vector<Hyperedge> out;
  out.reserve(sizes.size());
  for (auto n : sizes) {
    if (n < 2 || n > num_nodes)
      throw InputError("cannot sample a hyperedge of size " + std::to_string(n) + " from " +
                       std::to_string(num_nodes) + " nodes");
    if (binomial_capped(num_nodes, n) <= used_per_size[n])
      throw InputError("no unobserved hyperedge of size " + std::to_string(n) + " left to sample");
    constexpr int max_attempts = 10000;
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      auto nodes = draw_distinct(num_nodes, n, rng);
      if (taken.insert(nodes).second) {
        out.push_back(Hyperedge{std::move(nodes), 0.0});
        ++used_per_size[n];
        ok = true;
        break;
      }
    }
    if (!ok)
      throw InputError("negative sampling failed for size " + std::to_string(n) + " after " +
                       std::to_string(max_attempts) + " attempts");
  }
  return out;
}

std::vector<Hyperedge> sample_negatives(const HypergraphLayer& layer, std::uint64_t seed) {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<NodeId>> observed;
  for (const auto& e : layer.hyperedges()) {
    sizes.push_back(e.size());
    observed.push_back(e.nodes);
  }
  return sample_unobserved(layer.num_nodes(), sizes, observed, seed);
}

LayerConstants layer_constants(const HypergraphLayer& layer, std::vector<Hyperedge> negatives,
                               std::optional<std::uint64_t> m_override) {
  LayerConstants c;
  for (const auto& e : layer.hyperedges()) c.q_pairs += e.size() * (e.size() - 1) / 2;
  if (c.q_pairs == 0) throw InputError("layer constants: layer has no observed hyperedges");
  c.m_count = m_override ? *m_override : layer.num_hyperedges();
  const double n = static_cast<double>(layer.num_nodes());
  const double all_pairs = n * (n - 1.0) / 2.0;
  c.c_l = static_cast<double>(c.m_count) * (1.0 / static_cast<double>(c.q_pairs) + (all_pairs > 0 ? 1.0 / all_pairs : 0.0));
  c.negatives = std::move(negatives);
  return c;
}

// ---------------------------------------------------------------------------

double surrogate_objective(const MultiHypergraph& mh, const std::vector<InternalDegreeTable>& theta,
                           const LatentState& state, const std::vector<LayerConstants>& consts) {
  double total = 0.0;
  for (std::size_t l = 0; l < mh.num_layers(); ++l) {
    const auto& u = state.u[l];
    Matrix uw = u * state.w[l];
    total -= consts[l].c_l * pairwise_sum(u, state.w[l]);
    const auto& edges = mh.layer(l).hyperedges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].weight == 0.0) continue;
      double rate = lambda_e_premultiplied(edges[e].nodes, theta[l][e], u, uw);
      if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (hyperedge)");
      total += edges[e].weight * std::log(rate);
    }
  }
  for (std::size_t s = 0; s < mh.inter_edges().size(); ++s) {
    const auto& set = mh.inter_edges()[s];
    const auto& ua = state.u[set.layer_a];
    const auto& ub = state.u[set.layer_b];
    const auto& wc = state.w_cross[s];
    total -= (ua.colwise().sum() * wc).dot(ub.colwise().sum());
    for (const auto& edge : set.edges) {
      double rate = (ua.row(edge.i) * wc).dot(ub.row(edge.j));
      if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (inter-edge)");
      total += edge.weight * std::log(rate);
    }
  }
  return total;
}

}  // namespace mhsbm
