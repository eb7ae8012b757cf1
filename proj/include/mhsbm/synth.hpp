#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mhsbm/core.hpp"
#include "mhsbm/likelihood.hpp"

namespace mhsbm {

/// Multi-view construction from one source hypergraph with ground truth.
struct SynthConfig {
  /// One sampling fraction per layer, each in (0, 1].
  std::vector<double> sample_fractions{0.7, 0.7};
  /// Same-community inter-edges between layer 0 and each layer l >= 1
  /// (entry l - 1). A single entry is reused for every pair.
  std::vector<std::size_t> inter_edge_budgets{0};
  /// Extra cross-community inter-edges, as a fraction of each budget.
  double noise_fraction = 0.0;
  /// Replace every sampled hyperedge weight by 1.
  bool unit_weights = false;
  std::uint64_t seed = 0;

  std::size_t num_layers() const { return sample_fractions.size(); }
  void validate() const;
};

/// Each layer is an independent uniform sample without replacement of
/// ceil(f |E|) source hyperedges (node ids and ground truth kept). Inter-edges
/// join layer 0 to every other layer: `budget` distinct same-community pairs
/// followed by ceil(noise * budget) distinct different-community pairs, all
/// with weight 1.
MultiHypergraph build_views(const HypergraphLayer& source, const SynthConfig& cfg);

/// Uniformly removes ceil(ratio |S|) edges from every inter-edge set.
MultiHypergraph remove_inter_edges(const MultiHypergraph& mh, double ratio, std::uint64_t seed);

/// Largest candidate space sample_from_model will enumerate per layer.
inline constexpr std::uint64_t kMaxEnumeratedCandidates = 5'000'000;

/// Draws A_e ~ Poisson(lambda_e / mu_e) (theta = 1) for every node set of
/// size 2..max_size of every layer, and S_ij ~ Poisson(lambda_ij) for every
/// cross pair of every entry of `pairs` (aligned with state.w_cross). Zero
/// draws are dropped.
MultiHypergraph sample_from_model(const LatentState& state, std::size_t max_size,
                                  const std::vector<std::pair<LayerId, LayerId>>& pairs, std::uint64_t seed);

/// Planted partition: equal-size communities, one-hot u, w = c_in on the
/// diagonal and c_out elsewhere (per layer); cross affinity cross_in on
/// matching communities and cross_out elsewhere between consecutive layers.
struct PlantedConfig {
  std::size_t num_nodes = 60;
  std::size_t communities = 3;
  std::size_t num_layers = 2;
  std::size_t max_size = 3;
  double c_in = 0.1;
  double c_out = 0.01;
  double cross_in = 0.05;
  double cross_out = 0.0;
  /// Connect consecutive layers with inter-edges.
  bool inter_edges = true;
  std::uint64_t seed = 0;
};

struct PlantedInstance {
  LatentState truth_state;
  MultiHypergraph mh;  // ground truth attached to every layer
};

/// "Strong signal" preset has c_in / c_out = 10.
PlantedInstance planted(const PlantedConfig& cfg);

}  // namespace mhsbm
