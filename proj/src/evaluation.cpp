#include "mhsbm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "mhsbm/likelihood.hpp"
#include "mhsbm/synth.hpp"

namespace mhsbm {

namespace {

struct Contingency {
  std::vector<std::vector<double>> joint;  // [pred][truth]
  std::vector<double> pred_sizes;
  std::vector<double> truth_sizes;
  double total = 0.0;
};

std::vector<int> compact(const std::vector<int>& labels, const std::vector<bool>& keep, std::size_t& count) {
  std::map<int, int> ids;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (keep[i]) ids.emplace(labels[i], 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = ids.size();
  std::vector<int> out(labels.size(), -1);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (keep[i]) out[i] = ids[labels[i]];
  return out;
}

Contingency contingency(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw InputError("partition sizes differ: " + std::to_string(predicted.size()) + " vs " +
                     std::to_string(truth.size()));
  std::vector<bool> keep(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) keep[i] = truth[i] >= 0;
  std::size_t np = 0, nt = 0;
  auto p = compact(predicted, keep, np);
  auto t = compact(truth, keep, nt);
  Contingency c;
  c.joint.assign(np, std::vector<double>(nt, 0.0));
  c.pred_sizes.assign(np, 0.0);
  c.truth_sizes.assign(nt, 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!keep[i]) continue;
    c.joint[p[i]][t[i]] += 1.0;
    c.pred_sizes[p[i]] += 1.0;
    c.truth_sizes[t[i]] += 1.0;
    c.total += 1.0;
  }
  if (c.total == 0.0) throw InputError("no labeled nodes to compare");
  return c;
}

double entropy(const std::vector<double>& sizes, double total) {
  double h = 0.0;
  for (double s : sizes)
    if (s > 0.0) h -= s / total * std::log(s / total);
  return h;
}

// Size-weighted mean over rows of the best per-pair F1 against any column.
double directed_f1(const std::vector<std::vector<double>>& joint, const std::vector<double>& row_sizes,
                   const std::vector<double>& col_sizes) {
  double acc = 0.0, total = 0.0;
  for (std::size_t a = 0; a < row_sizes.size(); ++a) {
    double best = 0.0;
    for (std::size_t b = 0; b < col_sizes.size(); ++b)
      best = std::max(best, 2.0 * joint[a][b] / (row_sizes[a] + col_sizes[b]));
    acc += row_sizes[a] * best;
    total += row_sizes[a];
  }
  return acc / total;
}

}  // namespace

double nmi(const std::vector<int>& predicted, const std::vector<int>& truth) {
  auto c = contingency(predicted, truth);
  const double hp = entropy(c.pred_sizes, c.total);
  const double ht = entropy(c.truth_sizes, c.total);
  if (hp == 0.0 && ht == 0.0) return 1.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < c.pred_sizes.size(); ++a)
    for (std::size_t b = 0; b < c.truth_sizes.size(); ++b) {
      double n = c.joint[a][b];
      if (n > 0.0) mi += n / c.total * std::log(n * c.total / (c.pred_sizes[a] * c.truth_sizes[b]));
    }
  return std::clamp(mi / (0.5 * (hp + ht)), 0.0, 1.0);
}

double community_f1(const std::vector<int>& predicted, const std::vector<int>& truth) {
  auto c = contingency(predicted, truth);
  std::vector<std::vector<double>> transposed(c.truth_sizes.size(), std::vector<double>(c.pred_sizes.size()));
  for (std::size_t a = 0; a < c.pred_sizes.size(); ++a)
    for (std::size_t b = 0; b < c.truth_sizes.size(); ++b) transposed[b][a] = c.joint[a][b];
  double truth_dir = directed_f1(transposed, c.truth_sizes, c.pred_sizes);
  double pred_dir = directed_f1(c.joint, c.pred_sizes, c.truth_sizes);
  return 0.5 * (truth_dir + pred_dir);
}

std::vector<int> max_weight_assignment(const Matrix& profit) {
  const int n = static_cast<int>(profit.rows());
  if (profit.cols() != profit.rows()) throw InputError("assignment requires a square matrix");
  if (n == 0) return {};
  const double top = profit.maxCoeff();
  // Hungarian algorithm (potentials), minimizing top - profit; 1-based.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = (top - profit(i0 - 1, j - 1)) - row_pot[i0] - col_pot[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double cosine_similarity(const Matrix& u, const std::vector<int>& truth, CosineOptions opts) {
  if (static_cast<std::size_t>(u.rows()) != truth.size())
    throw InputError("cosine similarity: u has " + std::to_string(u.rows()) + " rows for " +
                     std::to_string(truth.size()) + " labels");
  std::vector<bool> keep(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) keep[i] = truth[i] >= 0;
  std::size_t t_count = 0;
  auto t = compact(truth, keep, t_count);
  const auto k = static_cast<std::size_t>(u.cols());
  if (t_count > k)
    throw InputError("cosine similarity: " + std::to_string(t_count) + " truth communities but K = " +
                     std::to_string(k));

  // cosine[k][c]: summed cosine if column k is matched to truth community c.
  Matrix cosine = Matrix::Zero(k, k);
  Matrix overlap = Matrix::Zero(k, k);
  std::size_t labeled = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!keep[i]) continue;
    ++labeled;
    double l2 = u.row(i).norm();
    double l1 = u.row(i).sum();
    if (l2 == 0.0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      cosine(c, t[i]) += u(i, c) / l2;
      overlap(c, t[i]) += u(i, c) / l1;
    }
  }
  if (labeled == 0) throw InputError("no labeled nodes to compare");
  auto perm = max_weight_assignment(opts.normalize_rows ? cosine : overlap);
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) total += cosine(c, perm[c]);
  return total / static_cast<double>(labeled);
}

// ---------------------------------------------------------------------------

double auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw InputError("auc requires non-empty score lists");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  // twice the number of correctly ordered pairs, counting ties once.
  std::uint64_t twice = 0;
  for (double p : positives) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    auto hi = std::upper_bound(lo, neg.end(), p);
    twice += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
  }
  const std::uint64_t all = 2 * static_cast<std::uint64_t>(positives.size()) * negatives.size();
  return static_cast<double>(twice) / static_cast<double>(all);
}

double score_hyperedge(const std::vector<NodeId>& nodes, const IncidenceIndex& training, const Matrix& u,
                       const Matrix& w) {
  if (!std::is_sorted(nodes.begin(), nodes.end())) {
    auto sorted = nodes;
    std::sort(sorted.begin(), sorted.end());
    return score_hyperedge(sorted, training, u, w);
  }
  auto theta = theta_from_counts(training.sub_hyperedge_counts(nodes));
  return lambda_e(std::span<const NodeId>(nodes), theta, u, w) / mu(nodes.size());
}

double score_hyperedge(const Hyperedge& e, const HypergraphLayer& training, const Matrix& u, const Matrix& w) {
  return score_hyperedge(e.nodes, IncidenceIndex(training), u, w);
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd r;
  if (values.empty()) return r;
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return r;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return r;
}

// ---------------------------------------------------------------------------

HyperedgePredictionReport hyperedge_prediction_cv(const MultiHypergraph& mh, const InferenceConfig& cfg,
                                                  const HyperedgePredictionOptions& opts) {
  if (opts.folds < 2) throw InputError("hyperedge prediction needs at least 2 folds");
  const std::size_t L = mh.num_layers();

  // fold_of[l][e]: fold holding hyperedge e of layer l.
  std::vector<std::vector<std::size_t>> fold_of(L);
  for (std::size_t l = 0; l < L; ++l) {
    const auto m = mh.layer(l).num_hyperedges();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(opts.seed, l));
    std::shuffle(order.begin(), order.end(), rng);
    fold_of[l].resize(m);
    for (std::size_t pos = 0; pos < m; ++pos) fold_of[l][order[pos]] = pos % opts.folds;
  }

  HyperedgePredictionReport report;
  std::vector<std::vector<double>> layer_aucs(L);
  std::map<std::size_t, std::vector<std::vector<double>>> size_aucs;
  for (auto d : opts.max_sizes) size_aucs[d].resize(L);

  // Folds are fitted concurrently; restarts inside a fold then run serially.
  InferenceConfig fold_cfg = cfg;
  if (opts.folds > 1 && cfg.threads != 1) fold_cfg.threads = 1;
  std::vector<std::vector<HyperedgeFoldResult>> per_fold(opts.folds);
  parallel_for(opts.folds, cfg.threads, [&](std::size_t f) {
    std::vector<HypergraphLayer> train_layers;
    std::vector<std::vector<Hyperedge>> tests(L);
    for (std::size_t l = 0; l < L; ++l) {
      const auto& layer = mh.layer(l);
      std::vector<Hyperedge> train;
      for (std::size_t e = 0; e < layer.num_hyperedges(); ++e)
        (fold_of[l][e] == f ? tests[l] : train).push_back(layer.hyperedges()[e]);
      if (train.empty())
        throw InputError("fold " + std::to_string(f) + " leaves layer " + std::to_string(l) +
                         " without training hyperedges");
      train_layers.push_back(layer.with_hyperedges(std::move(train)));
    }
    MultiHypergraph train_mh(std::move(train_layers), mh.inter_edges());
    auto result = fit(train_mh, fold_cfg);

    for (std::size_t l = 0; l < L; ++l) {
      if (tests[l].empty()) continue;
      const auto& layer = mh.layer(l);
      std::vector<std::size_t> sizes;
      std::vector<std::vector<NodeId>> observed;
      for (const auto& e : tests[l]) sizes.push_back(e.size());
      for (const auto& e : layer.hyperedges()) observed.push_back(e.nodes);
      auto negatives = sample_unobserved(layer.num_nodes(), sizes, observed,
                                         derive_seed(opts.seed, 0x10000 + f * L + l));
      IncidenceIndex index(train_mh.layer(l));
      const auto& u = result.state.u[l];
      const auto& w = result.state.w[l];
      std::vector<double> pos, neg;
      for (const auto& e : tests[l]) pos.push_back(score_hyperedge(e.nodes, index, u, w));
      for (const auto& e : negatives) neg.push_back(score_hyperedge(e.nodes, index, u, w));

      HyperedgeFoldResult fr;
      fr.fold = f;
      fr.layer = l;
      fr.test_positives = pos.size();
      fr.auc = auc(pos, neg);
      for (auto d : opts.max_sizes) {
        std::vector<double> p, n;
        for (std::size_t t = 0; t < pos.size(); ++t) {
          if (sizes[t] > d) continue;
          p.push_back(pos[t]);
          n.push_back(neg[t]);
        }
        if (!p.empty()) fr.auc_by_max_size[d] = auc(p, n);
      }
      per_fold[f].push_back(std::move(fr));
    }
  });

  for (auto& results : per_fold)
    for (auto& fr : results) {
      layer_aucs[fr.layer].push_back(fr.auc);
      for (const auto& [d, value] : fr.auc_by_max_size) size_aucs[d][fr.layer].push_back(value);
      report.folds.push_back(std::move(fr));
    }

  auto aggregate = [](const std::vector<std::vector<double>>& per_layer, std::vector<MeanSd>* keep) {
    std::vector<double> means, sds;
    for (const auto& values : per_layer) {
      if (values.empty()) continue;
      auto ms = mean_sd(values);
      if (keep) keep->push_back(ms);
      means.push_back(ms.mean);
      sds.push_back(ms.sd);
    }
    return MeanSd{mean_sd(means).mean, mean_sd(sds).mean};
  };
  report.overall = aggregate(layer_aucs, &report.per_layer);
  for (const auto& [d, values] : size_aucs) report.by_max_size[d] = aggregate(values, nullptr);
  return report;
}

// ---------------------------------------------------------------------------

InterEdgePredictionReport inter_edge_prediction(const MultiHypergraph& mh, const InferenceConfig& cfg,
                                                const InterEdgePredictionOptions& opts) {
  if (mh.inter_edges().empty()) throw InputError("inter-edge prediction needs at least one inter-edge set");
  if (!(opts.removal_ratio >= 0.0 && opts.removal_ratio < 1.0))
    throw InputError("removal ratio must lie in [0, 1)");
  if (opts.repeats == 0) throw InputError("inter-edge prediction needs at least one repeat");

  InterEdgePredictionReport report;
  report.removal_ratio = opts.removal_ratio;
  // Repetitions are fitted concurrently; restarts inside a repetition then run serially.
  report.auc_per_repeat.assign(opts.repeats, 0.0);
  parallel_for(opts.repeats, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(opts.seed, rep);
    auto reduced = remove_inter_edges(mh, opts.removal_ratio, rep_seed);

    std::vector<InterEdgeSet> train_sets;
    std::vector<std::vector<InterEdge>> tests;
    std::mt19937_64 rng(derive_seed(rep_seed, 1));
    for (const auto& set : reduced.inter_edges()) {
      auto edges = set.edges;
      std::shuffle(edges.begin(), edges.end(), rng);
      const std::size_t n_test = edges.size() / 5;
      tests.emplace_back(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_test));
      train_sets.push_back(make_inter_edge_set(
          set.layer_a, set.layer_b, std::vector<InterEdge>(edges.begin() + static_cast<std::ptrdiff_t>(n_test), edges.end())));
    }
    std::size_t total_test = 0;
    for (const auto& t : tests) total_test += t.size();
    if (total_test == 0) throw InputError("inter-edge test set is empty after removal");

    MultiHypergraph train(mh.layers(), std::move(train_sets));
    InferenceConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + rep * 1000;
    if (opts.repeats > 1 && cfg.threads != 1) run_cfg.threads = 1;
    auto result = fit(train, run_cfg);

    std::vector<double> pos, neg;
    for (std::size_t s = 0; s < tests.size(); ++s) {
      const auto& set = mh.inter_edges()[s];
      const auto& ua = result.state.u[set.layer_a];
      const auto& ub = result.state.u[set.layer_b];
      const auto& wc = result.state.w_cross[s];
      for (const auto& e : tests[s]) pos.push_back(lambda_ij(ua.row(e.i), ub.row(e.j), wc));

      const auto na = mh.layer(set.layer_a).num_nodes();
      const auto nb = mh.layer(set.layer_b).num_nodes();
      if (na * nb < set.edges.size() + tests[s].size())
        throw InputError("not enough unobserved cross pairs to sample negatives");
      std::set<std::pair<NodeId, NodeId>> taken;
      for (const auto& e : set.edges) taken.emplace(e.i, e.j);
      std::uniform_int_distribution<NodeId> pick_a(0, static_cast<NodeId>(na - 1));
      std::uniform_int_distribution<NodeId> pick_b(0, static_cast<NodeId>(nb - 1));
      for (std::size_t drawn = 0; drawn < tests[s].size();) {
        std::pair<NodeId, NodeId> p{pick_a(rng), pick_b(rng)};
        if (!taken.insert(p).second) continue;
        neg.push_back(lambda_ij(ua.row(p.first), ub.row(p.second), wc));
        ++drawn;
      }
    }
    report.auc_per_repeat[rep] = auc(pos, neg);
  });
  report.auc = mean_sd(report.auc_per_repeat);
  return report;
}

KSelection select_k(const MultiHypergraph& mh, const InferenceConfig& cfg,
                    const std::vector<std::vector<std::size_t>>& grid, const HyperedgePredictionOptions& opts) {
  if (grid.empty()) throw InputError("K grid is empty");
  KSelection sel;
  sel.grid = grid;
  for (const auto& ks : grid) {
    InferenceConfig c = cfg;
    c.k_per_layer = ks;
    sel.auc.push_back(hyperedge_prediction_cv(mh, c, opts).overall);
  }
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (sel.auc[g].mean > sel.auc[sel.best].mean) sel.best = g;
  return sel;
}

}  // namespace mhsbm
