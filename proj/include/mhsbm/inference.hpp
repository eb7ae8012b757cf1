#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mhsbm/core.hpp"
#include "mhsbm/internal_degree.hpp"
#include "mhsbm/likelihood.hpp"

namespace mhsbm {

struct TracePoint {
  std::size_t iteration = 0;
  double objective = 0.0;
};

struct InferenceConfig {
  std::vector<std::size_t> k_per_layer;
  std::size_t restarts = 10;
  std::size_t max_iters = 500;
  double tol = 1e-7;
  std::size_t check_every = 5;
  bool assortative = false;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> m_override;
  /// Worker threads for restarts (and for folds or repetitions in evaluation); 0 means hardware concurrency.
  std::size_t threads = 0;
  /// Keep the fitted state of every restart in FitResult::restarts.
  bool keep_restart_states = false;
  /// Called after every convergence check (from worker threads).
  std::function<void(std::size_t restart, const TracePoint&)> on_check;

  void validate(const MultiHypergraph& mh) const;
};

struct RestartSummary {
  std::size_t restart = 0;
  std::uint64_t seed = 0;
  bool failed = false;  // degenerate state
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<TracePoint> trace;
  std::optional<LatentState> state;
};

struct FitResult {
  LatentState state;
  std::vector<TracePoint> objective_trace;
  std::size_t best_restart = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<RestartSummary> restarts;
};

/// Data-derived quantities shared by every restart: internal degrees and
/// layer constants. Holds a reference to `mh`, which must outlive it.
struct ModelData {
  ModelData(const MultiHypergraph& mh, const InferenceConfig& cfg);

  const MultiHypergraph* mh;
  std::vector<InternalDegreeTable> theta;
  std::vector<LayerConstants> consts;
};

/// Per-layer and per-pair seeds derived from one base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// u ~ U(0.05, 1]; w symmetric with diagonal ~ U(0.05, 1] and off-diagonal
/// either U(0.05, 1] or exactly 0 (assortative); w_cross ~ U(0.05, 1].
/// Layer l draws from derive_seed(restart_seed, l) so layers seed independently.
LatentState initialize(const MultiHypergraph& mh, const InferenceConfig& cfg, std::uint64_t restart_seed);

/// Posterior marginals of one hyperedge.
struct HyperedgeMarginals {
  Matrix node;  // |e| x K: mass in which node e.nodes[a] carries community k (rows sum to 2 overall)
  Matrix pair;  // K x K: symmetrized community-pair mass (sums to 1)
};

HyperedgeMarginals e_step_hyperedge(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u,
                                    const Matrix& w);

/// rho_kc = u_ik w_kc u_jc / lambda_ij.
Matrix e_step_pair(const Eigen::Ref<const Eigen::RowVectorXd>& u_i, const Eigen::Ref<const Eigen::RowVectorXd>& u_j,
                   const Matrix& w_cross);

/// Membership update of layer l. Nodes are updated in index order and each
/// node's denominator sees the already-updated rows of earlier nodes, so
/// every node step maximizes the bound exactly. Other layers are read from
/// `state` as they are.
Matrix update_u(const ModelData& data, LayerId l, const LatentState& state);

/// Closed-form affinity update of layer l; symmetric by construction.
Matrix update_w(const ModelData& data, LayerId l, const LatentState& state);

/// Closed-form cross affinity update of inter-edge set s.
Matrix update_w_cross(const ModelData& data, std::size_t s, const LatentState& state);

/// One EM sweep: u of every layer, then w of every layer, then every w_cross.
LatentState sweep(const ModelData& data, LatentState state);

double objective(const ModelData& data, const LatentState& state);

/// Runs EM from `state` until convergence or cfg.max_iters sweeps.
RestartSummary run_em(const ModelData& data, const InferenceConfig& cfg, LatentState state, std::size_t restart = 0);

/// One restart: initialize with seed cfg.seed + restart, then run_em.
RestartSummary fit_restart(const ModelData& data, const InferenceConfig& cfg, std::size_t restart);

/// Runs cfg.restarts restarts and keeps the highest final objective.
/// Throws Error when every restart degenerates.
FitResult fit(const MultiHypergraph& mh, const InferenceConfig& cfg);
FitResult fit(const ModelData& data, const InferenceConfig& cfg);

/// Index of the largest entry of each row, lowest index on ties.
std::vector<int> hard_labels(const Matrix& u);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace mhsbm
