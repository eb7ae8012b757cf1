#pragma once

#include <cstddef>
#include <vector>

#include "mhsbm/core.hpp"

namespace mhsbm {

/// Node -> incident hyperedges, each list ordered by hyperedge size so
/// containment queries can stop at |e|.
class IncidenceIndex {
 public:
  explicit IncidenceIndex(const HypergraphLayer& layer);

  /// For every node of `nodes` (sorted, any node set), the number of observed
  /// hyperedges e' with i in e' and e' a subset of `nodes`. A node set that is
  /// itself observed counts as its own sub-hyperedge.
  std::vector<std::size_t> sub_hyperedge_counts(const std::vector<NodeId>& nodes) const;

 private:
  const HypergraphLayer* layer_;
  std::vector<std::vector<std::size_t>> incident_;
};

std::vector<std::size_t> count_sub_hyperedges(const HypergraphLayer& layer, const Hyperedge& e);

/// theta_ie = |e| eps_ie / sum_j eps_je, or 1 for every node when no
/// sub-hyperedge is observed. Aligned with e.nodes; sums to |e|.
std::vector<double> theta_from_counts(const std::vector<std::size_t>& eps);
std::vector<double> compute_theta(const HypergraphLayer& layer, const Hyperedge& e);

/// theta of every observed hyperedge of a layer, aligned with layer.hyperedges().
class InternalDegreeTable {
 public:
  InternalDegreeTable() = default;
  explicit InternalDegreeTable(const HypergraphLayer& layer);

  /// All-ones table (the "simplified" internal degree).
  static InternalDegreeTable uniform(const HypergraphLayer& layer);

  const std::vector<double>& operator[](std::size_t hyperedge) const { return theta_[hyperedge]; }
  std::size_t size() const { return theta_.size(); }

 private:
  std::vector<std::vector<double>> theta_;
};

enum class EntropyBase { Nats, Bits, Normalized };

/// Entropy of p_i = eps_ie / sum_j eps_je. Throws InputError when every
/// count is zero.
double hyperedge_entropy(const std::vector<std::size_t>& eps, EntropyBase base);
double hyperedge_entropy(const HypergraphLayer& layer, const Hyperedge& e, EntropyBase base);

struct EntropyReport {
  std::size_t hyperedges_considered = 0;  // observed hyperedges of size >= 3
  std::size_t below_threshold = 0;
  double fraction_below = 0.0;
  double threshold = 0.0;
  EntropyBase base = EntropyBase::Normalized;
  /// Bin edges (bins + 1 values) and counts over the considered entropies.
  std::vector<double> bin_edges;
  std::vector<std::size_t> histogram;
  /// Size-2 hyperedges that are contained in some larger observed hyperedge.
  std::size_t pairs_total = 0;
  std::size_t pairs_contained = 0;
  double pair_containment_probability = 0.0;
};

EntropyReport entropy_report(const HypergraphLayer& layer, double threshold,
                             EntropyBase base = EntropyBase::Normalized, std::size_t bins = 10);

}  // namespace mhsbm
