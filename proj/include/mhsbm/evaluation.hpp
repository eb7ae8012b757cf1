#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "mhsbm/core.hpp"
#include "mhsbm/inference.hpp"
#include "mhsbm/internal_degree.hpp"

namespace mhsbm {

// ---------------------------------------------------------------------------
// Community recovery. Labels are opaque ids; nodes whose truth label is
// negative are left out. Throws InputError when the vectors differ in length.

/// Mutual information normalized by the arithmetic mean of both entropies.
double nmi(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Best-match F1: each community is matched to the community of the other
/// partition with the highest F1, averaged weighted by community size, and
/// the two directions are averaged.
double community_f1(const std::vector<int>& predicted, const std::vector<int>& truth);

struct CosineOptions {
  /// true: pick the column permutation maximizing the summed per-node cosine.
  /// false: pick it from the overlap of L1-normalized rows with the truth.
  bool normalize_rows = true;
};

/// Mean per-node cosine between u rows and the one-hot truth after the best
/// column permutation. All-zero rows contribute 0.
double cosine_similarity(const Matrix& u, const std::vector<int>& truth, CosineOptions opts = {});

/// Maximum-weight perfect assignment on a square profit matrix; returns
/// column assigned to each row.
std::vector<int> max_weight_assignment(const Matrix& profit);

// ---------------------------------------------------------------------------
// Prediction

/// Fraction of positive/negative pairs ranked correctly, ties counted half.
double auc(std::span<const double> positives, std::span<const double> negatives);

/// Poisson rate lambda_e / mu_e of a candidate hyperedge, with theta from the
/// sub-hyperedges observed in the training layer (uniform when none).
double score_hyperedge(const std::vector<NodeId>& nodes, const IncidenceIndex& training, const Matrix& u,
                       const Matrix& w);
double score_hyperedge(const Hyperedge& e, const HypergraphLayer& training, const Matrix& u, const Matrix& w);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Sample mean and standard deviation (n - 1 in the denominator; sd = 0 for n < 2).
MeanSd mean_sd(std::span<const double> values);

struct HyperedgePredictionOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  /// Extra AUCs restricted to test hyperedges of size <= D.
  std::vector<std::size_t> max_sizes;
};

struct HyperedgeFoldResult {
  std::size_t fold = 0;
  std::size_t layer = 0;
  std::size_t test_positives = 0;
  double auc = 0.0;
  std::map<std::size_t, double> auc_by_max_size;
};

struct HyperedgePredictionReport {
  std::vector<HyperedgeFoldResult> folds;
  /// Per layer mean/sd over folds.
  std::vector<MeanSd> per_layer;
  /// Layer means and layer sds averaged across layers.
  MeanSd overall;
  std::map<std::size_t, MeanSd> by_max_size;
};

/// K-fold cross-validated hyperedge prediction. Each fold hides one slice of
/// every layer's hyperedges, fits on the rest, and ranks each hidden
/// hyperedge against one size-matched node set that is observed nowhere.
HyperedgePredictionReport hyperedge_prediction_cv(const MultiHypergraph& mh, const InferenceConfig& cfg,
                                                  const HyperedgePredictionOptions& opts);

struct InterEdgePredictionOptions {
  double removal_ratio = 0.0;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
};

struct InterEdgePredictionReport {
  double removal_ratio = 0.0;
  std::vector<double> auc_per_repeat;
  MeanSd auc;
};

/// Removes a fraction of inter-edges, splits the rest 4:1 into train/test,
/// fits on train and ranks test edges (by lambda_ij) against as many
/// unobserved cross pairs.
InterEdgePredictionReport inter_edge_prediction(const MultiHypergraph& mh, const InferenceConfig& cfg,
                                                const InterEdgePredictionOptions& opts);

struct KSelection {
  std::vector<std::vector<std::size_t>> grid;
  std::vector<MeanSd> auc;
  std::size_t best = 0;
};

/// Repeats hyperedge_prediction_cv for every K assignment of `grid` and
/// reports the one with the highest mean AUC.
KSelection select_k(const MultiHypergraph& mh, const InferenceConfig& cfg,
                    const std::vector<std::vector<std::size_t>>& grid, const HyperedgePredictionOptions& opts);

}  // namespace mhsbm
