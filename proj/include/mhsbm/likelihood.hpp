#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mhsbm/core.hpp"
#include "mhsbm/internal_degree.hpp"

namespace mhsbm {

/// Model parameters: per-layer memberships u (N x K) and affinities w
/// (K x K, symmetric), plus one K^a x K^b affinity per inter-edge set,
/// aligned with MultiHypergraph::inter_edges().
struct LatentState {
  std::vector<Matrix> u;
  std::vector<Matrix> w;
  std::vector<Matrix> w_cross;

  /// Throws InputError on negative/non-finite entries, asymmetric w, or
  /// shapes that disagree with `mh`.
  void validate(const MultiHypergraph& mh) const;
};

struct LayerConstants {
  std::vector<Hyperedge> negatives;  // weight 0, size-matched to the positives
  std::uint64_t q_pairs = 0;         // sum over positives of |e|(|e|-1)/2
  std::uint64_t m_count = 0;         // |E+|
  double c_l = 0.0;                  // > 0, enters the objective with a minus sign
};

/// Number of node pairs in a hyperedge of size n.
double mu(std::size_t n);

/// Rate of hyperedge `nodes` (sum over unordered node pairs of
/// theta_i theta_j u_i w u_j^T). Accumulates prefix sums so every term is
/// non-negative; O(|e| K^2).
double lambda_e(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u, const Matrix& w);
double lambda_e(const Hyperedge& e, std::span<const double> theta, const Matrix& u, const Matrix& w);

/// Same as lambda_e with uw = u * w precomputed; O(|e| K).
double lambda_e_premultiplied(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u,
                              const Matrix& uw);

/// u_i w_cross u_j^T. Throws InputError on a dimension mismatch.
double lambda_ij(const Eigen::Ref<const Eigen::RowVectorXd>& u_i, const Eigen::Ref<const Eigen::RowVectorXd>& u_j,
                 const Matrix& w_cross);

/// sum over node pairs i < j of u_i w u_j^T.
double pairwise_sum(const Matrix& u, const Matrix& w);

/// One unobserved, size-matched hyperedge per observed hyperedge, drawn
/// uniformly and deduplicated. Deterministic given the seed.
std::vector<Hyperedge> sample_negatives(const HypergraphLayer& layer, std::uint64_t seed);

/// Same, but negatives must also avoid every node set in `forbidden`
/// (sorted node lists), and one is drawn per entry of `sizes`.
std::vector<Hyperedge> sample_unobserved(std::size_t num_nodes, const std::vector<std::size_t>& sizes,
                                         const std::vector<std::vector<NodeId>>& forbidden, std::uint64_t seed);

LayerConstants layer_constants(const HypergraphLayer& layer, std::vector<Hyperedge> negatives,
                               std::optional<std::uint64_t> m_override = std::nullopt);

/// Approximated log-likelihood at the optimal variational distributions:
///   sum_l [ -C_l sum_{i<j} u_i w u_j^T + sum_e A_e log lambda_e ]
/// + sum_pairs [ -(sum_i u_i) w' (sum_j u_j)^T + sum_S S_ij log lambda_ij ].
/// Throws DegenerateStateError if an observed interaction has zero rate.
double surrogate_objective(const MultiHypergraph& mh, const std::vector<InternalDegreeTable>& theta,
                           const LatentState& state, const std::vector<LayerConstants>& consts);

}  // namespace mhsbm
