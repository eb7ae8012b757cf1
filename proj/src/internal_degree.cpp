#include "mhsbm/internal_degree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mhsbm {

IncidenceIndex::IncidenceIndex(const HypergraphLayer& layer)
    : layer_(&layer), incident_(layer.num_nodes()) {
  const auto& edges = layer.hyperedges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (auto v : edges[e].nodes) incident_[v].push_back(e);
  for (auto& list : incident_)
    std::stable_sort(list.begin(), list.end(),
                     [&](std::size_t a, std::size_t b) { return edges[a].size() < edges[b].size(); });
}

std::vector<std::size_t> IncidenceIndex::sub_hyperedge_counts(const std::vector<NodeId>& nodes) const {
  const auto& edges = layer_->hyperedges();
  std::vector<std::size_t> eps(nodes.size(), 0);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (nodes[a] >= incident_.size()) throw InputError("node id out of range for layer");
    for (auto idx : incident_[nodes[a]]) {
      const auto& sub = edges[idx].nodes;
      if (sub.size() > nodes.size()) break;
      if (std::includes(nodes.begin(), nodes.end(), sub.begin(), sub.end())) ++eps[a];
    }
  }
  return eps;
}

std::vector<std::size_t> count_sub_hyperedges(const HypergraphLayer& layer, const Hyperedge& e) {
  return IncidenceIndex(layer).sub_hyperedge_counts(e.nodes);
}

std::vector<double> theta_from_counts(const std::vector<std::size_t>& eps) {
  const double total = static_cast<double>(std::accumulate(eps.begin(), eps.end(), std::size_t{0}));
  std::vector<double> theta(eps.size(), 1.0);
  if (total == 0.0) return theta;
  const double n = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) theta[i] = n * static_cast<double>(eps[i]) / total;
  return theta;
}

std::vector<double> compute_theta(const HypergraphLayer& layer, const Hyperedge& e) {
  return theta_from_counts(count_sub_hyperedges(layer, e));
}

InternalDegreeTable::InternalDegreeTable(const HypergraphLayer& layer) {
  IncidenceIndex index(layer);
  theta_.reserve(layer.num_hyperedges());
  for (const auto& e : layer.hyperedges()) theta_.push_back(theta_from_counts(index.sub_hyperedge_counts(e.nodes)));
}

InternalDegreeTable InternalDegreeTable::uniform(const HypergraphLayer& layer) {
  InternalDegreeTable t;
  t.theta_.reserve(layer.num_hyperedges());
  for (const auto& e : layer.hyperedges()) t.theta_.emplace_back(e.size(), 1.0);
  return t;
}

// ---------------------------------------------------------------------------

double hyperedge_entropy(const std::vector<std::size_t>& eps, EntropyBase base) {
  const double total = static_cast<double>(std::accumulate(eps.begin(), eps.end(), std::size_t{0}));
  if (total == 0.0) throw InputError("entropy undefined: no sub-hyperedges");
  double h = 0.0;
  for (auto c : eps) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  switch (base) {
    case EntropyBase::Nats:
      return h;
    case EntropyBase::Bits:
      return h / std::log(2.0);
    case EntropyBase::Normalized:
      return eps.size() > 1 ? h / std::log(static_cast<double>(eps.size())) : 0.0;
  }
  return h;
}

double hyperedge_entropy(const HypergraphLayer& layer, const Hyperedge& e, EntropyBase base) {
  return hyperedge_entropy(count_sub_hyperedges(layer, e), base);
}

EntropyReport entropy_report(const HypergraphLayer& layer, double threshold, EntropyBase base, std::size_t bins) {
  IncidenceIndex index(layer);
  EntropyReport r;
  r.threshold = threshold;
  r.base = base;
  bins = std::max<std::size_t>(bins, 1);

  std::vector<double> values;
  for (const auto& e : layer.hyperedges()) {
    if (e.size() < 3) continue;
    double h = hyperedge_entropy(index.sub_hyperedge_counts(e.nodes), base);
    values.push_back(h);
    if (h < threshold) ++r.below_threshold;
  }
  r.hyperedges_considered = values.size();
  r.fraction_below = values.empty() ? 0.0 : static_cast<double>(r.below_threshold) / values.size();

  double hi = 1.0;
  if (base != EntropyBase::Normalized) {
    double d = static_cast<double>(std::max<std::size_t>(layer.max_hyperedge_size(), 2));
    hi = std::log(d) / (base == EntropyBase::Bits ? std::log(2.0) : 1.0);
  }
  r.histogram.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) r.bin_edges.push_back(hi * static_cast<double>(b) / bins);
  for (double h : values) {
    auto b = static_cast<std::size_t>(std::floor(h / hi * static_cast<double>(bins)));
    ++r.histogram[std::min(b, bins - 1)];
  }

  // A size-2 hyperedge {a, b} is contained in a larger one iff some
  // hyperedge incident to a of size > 2 also holds b.
  std::vector<std::vector<std::size_t>> incident(layer.num_nodes());
  const auto& edges = layer.hyperedges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].size() > 2)
      for (auto v : edges[e].nodes) incident[v].push_back(e);
  for (const auto& e : edges) {
    if (e.size() != 2) continue;
    ++r.pairs_total;
    auto a = e.nodes[0], b = e.nodes[1];
    const auto& list = incident[a].size() <= incident[b].size() ? incident[a] : incident[b];
    auto other = incident[a].size() <= incident[b].size() ? b : a;
    bool found = std::any_of(list.begin(), list.end(), [&](std::size_t idx) {
      return std::binary_search(edges[idx].nodes.begin(), edges[idx].nodes.end(), other);
    });
    if (found) ++r.pairs_contained;
  }
  r.pair_containment_probability =
      r.pairs_total ? static_cast<double>(r.pairs_contained) / static_cast<double>(r.pairs_total) : 0.0;
  return r;
}

}  // namespace mhsbm
