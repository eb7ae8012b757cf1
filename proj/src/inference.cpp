#include "mhsbm/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace mhsbm {

namespace {

constexpr std::uint64_t kNegativeStream = 0x6e65676174697665ULL;  // "negative"
constexpr double kInitLow = 0.05;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on (kInitLow, 1].
double draw_init(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return 1.0 - (1.0 - kInitLow) * unit(rng);
}

double safe_ratio(double num, double den, const char* what) {
  if (num == 0.0) return 0.0;
  if (!(den > 0.0) || !std::isfinite(num / den))
    throw DegenerateStateError(std::string("non-finite ") + what + " update (zero denominator)");
  return num / den;
}

// Sum over i < j of u_i^T u_j (K x K, not symmetric).
Matrix ordered_pair_outer(const Matrix& u) {
  Matrix g = Matrix::Zero(u.cols(), u.cols());
  Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Zero(u.cols());
  for (Eigen::Index j = 0; j < u.rows(); ++j) {
    g.noalias() += prefix.transpose() * u.row(j);
    prefix += u.row(j);
  }
  return g;
}

}  // namespace

void InferenceConfig::validate(const MultiHypergraph& mh) const {
  if (k_per_layer.size() != mh.num_layers())
    throw InputError("k_per_layer has " + std::to_string(k_per_layer.size()) + " entries for " +
                     std::to_string(mh.num_layers()) + " layers");
  for (auto k : k_per_layer)
    if (k == 0) throw InputError("K must be positive");
  if (restarts == 0) throw InputError("restarts must be >= 1");
  if (!(tol > 0.0)) throw InputError("tol must be > 0");
  if (check_every == 0) throw InputError("check_every must be >= 1");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

ModelData::ModelData(const MultiHypergraph& mh_, const InferenceConfig& cfg) : mh(&mh_) {
  cfg.validate(mh_);
  for (std::size_t l = 0; l < mh_.num_layers(); ++l) {
    const auto& layer = mh_.layer(l);
    if (layer.num_hyperedges() == 0) throw InputError("layer " + std::to_string(l) + " has no hyperedges");
    theta.emplace_back(layer);
    // C_l does not depend on the negatives; a saturated layer just keeps none.
    std::vector<Hyperedge> negatives;
    try {
      negatives = sample_negatives(layer, derive_seed(cfg.seed ^ kNegativeStream, l));
    } catch (const Error&) {
    }
    consts.push_back(layer_constants(layer, std::move(negatives), cfg.m_override));
  }
}

LatentState initialize(const MultiHypergraph& mh, const InferenceConfig& cfg, std::uint64_t restart_seed) {
  cfg.validate(mh);
  LatentState s;
  const std::size_t L = mh.num_layers();
  for (std::size_t l = 0; l < L; ++l) {
    std::mt19937_64 rng(derive_seed(restart_seed, l));
    const auto n = static_cast<Eigen::Index>(mh.layer(l).num_nodes());
    const auto k = static_cast<Eigen::Index>(cfg.k_per_layer[l]);
    Matrix u(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < k; ++c) u(i, c) = draw_init(rng);
    Matrix w = Matrix::Zero(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = a; b < k; ++b) {
        double v = draw_init(rng);
        if (a != b && cfg.assortative) v = 0.0;
        w(a, b) = w(b, a) = v;
      }
    }
    s.u.push_back(std::move(u));
    s.w.push_back(std::move(w));
  }
  for (std::size_t p = 0; p < mh.inter_edges().size(); ++p) {
    const auto& set = mh.inter_edges()[p];
    std::mt19937_64 rng(derive_seed(restart_seed, L + p));
    Matrix wc(cfg.k_per_layer[set.layer_a], cfg.k_per_layer[set.layer_b]);
    for (Eigen::Index a = 0; a < wc.rows(); ++a)
      for (Eigen::Index b = 0; b < wc.cols(); ++b) wc(a, b) = draw_init(rng);
    s.w_cross.push_back(std::move(wc));
  }
  return s;
}

// ---------------------------------------------------------------------------
// E-step

HyperedgeMarginals e_step_hyperedge(std::span<const NodeId> nodes, std::span<const double> theta, const Matrix& u,
                                    const Matrix& w) {
  const std::size_t n = nodes.size();
  const Eigen::Index k = u.cols();
  Matrix uw(n, k);
  for (std::size_t a = 0; a < n; ++a) uw.row(a) = u.row(nodes[a]) * w;

  Matrix suffix = Matrix::Zero(n + 1, k);
  for (std::size_t a = n; a-- > 0;) suffix.row(a) = suffix.row(a + 1) + theta[a] * uw.row(a);

  HyperedgeMarginals m{Matrix::Zero(n, k), Matrix::Zero(k, k)};
  Eigen::RowVectorXd prefix_uw = Eigen::RowVectorXd::Zero(k);
  Eigen::RowVectorXd prefix_u = Eigen::RowVectorXd::Zero(k);
  Matrix ordered = Matrix::Zero(k, k);
  double rate = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    auto row = u.row(nodes[a]);
    rate += theta[a] * prefix_u.dot(uw.row(a));
    m.node.row(a) = theta[a] * row.cwiseProduct(prefix_uw + suffix.row(a + 1));
    ordered.noalias() += theta[a] * (prefix_u.transpose() * row);
    prefix_uw += theta[a] * uw.row(a);
    prefix_u += theta[a] * row;
  }
  if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (hyperedge)");
  m.node /= rate;
  m.pair = w.cwiseProduct(ordered + ordered.transpose()) / (2.0 * rate);
  return m;
}

Matrix e_step_pair(const Eigen::Ref<const Eigen::RowVectorXd>& u_i, const Eigen::Ref<const Eigen::RowVectorXd>& u_j,
                   const Matrix& w_cross) {
  double rate = lambda_ij(u_i, u_j, w_cross);
  if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (inter-edge)");
  Matrix rho = w_cross.cwiseProduct(u_i.transpose() * u_j);
  return rho / rate;
}

// ---------------------------------------------------------------------------
// M-step

Matrix update_u(const ModelData& data, LayerId l, const LatentState& state) {
  const auto& mh = *data.mh;
  const auto& layer = mh.layer(l);
  const Matrix& u = state.u[l];
  const Matrix& w = state.w[l];
  const Eigen::Index n = u.rows();
  const Eigen::Index k = u.cols();

  Matrix numer = Matrix::Zero(n, k);
  Eigen::RowVectorXd denom_cross = Eigen::RowVectorXd::Zero(k);

  // Hyperedge term: sum_e A_e p_ik^(e), with the per-edge marginal written
  // through prefix/suffix sums of theta_j (u w)_j.
  const Matrix uw = u * w;
  const auto& edges = layer.hyperedges();
  Matrix suffix;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& he = edges[e];
    if (he.weight == 0.0) continue;
    const auto& th = data.theta[l][e];
    const std::size_t m = he.size();
    suffix.setZero(m + 1, k);
    for (std::size_t a = m; a-- > 0;) suffix.row(a) = suffix.row(a + 1) + th[a] * uw.row(he.nodes[a]);
    Eigen::RowVectorXd prefix_u = Eigen::RowVectorXd::Zero(k);
    double rate = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      rate += th[a] * prefix_u.dot(uw.row(he.nodes[a]));
      prefix_u += th[a] * u.row(he.nodes[a]);
    }
    if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (hyperedge)");
    const double scale = he.weight / rate;
    // prefix of theta (u w) is suffix(0) - suffix(a), but recomputed forward to
    // keep every partial sum non-negative.
    Eigen::RowVectorXd prefix_uw = Eigen::RowVectorXd::Zero(k);
    for (std::size_t a = 0; a < m; ++a) {
      auto v = he.nodes[a];
      numer.row(v) += (scale * th[a]) * u.row(v).cwiseProduct(prefix_uw + suffix.row(a + 1));
      prefix_uw += th[a] * uw.row(v);
    }
  }

  // Inter-edge terms for every set touching l.
  for (std::size_t s = 0; s < mh.inter_edges().size(); ++s) {
    const auto& set = mh.inter_edges()[s];
    if (set.layer_a != l && set.layer_b != l) continue;
    const Matrix& wc = state.w_cross[s];
    const Matrix& ua = state.u[set.layer_a];
    const Matrix& ub = state.u[set.layer_b];
    if (set.layer_a == l) {
      denom_cross += (wc * ub.colwise().sum().transpose()).transpose();
      for (const auto& edge : set.edges) {
        Eigen::RowVectorXd wub = (wc * ub.row(edge.j).transpose()).transpose();
        double rate = ua.row(edge.i).dot(wub);
        if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (inter-edge)");
        numer.row(edge.i) += (edge.weight / rate) * ua.row(edge.i).cwiseProduct(wub);
      }
    } else {
      denom_cross += ua.colwise().sum() * wc;
      for (const auto& edge : set.edges) {
        Eigen::RowVectorXd uaw = ua.row(edge.i) * wc;
        double rate = uaw.dot(ub.row(edge.j));
        if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (inter-edge)");
        numer.row(edge.j) += (edge.weight / rate) * uaw.cwiseProduct(ub.row(edge.j));
      }
    }
  }

  // Gauss-Seidel over nodes: sum_{j != i} u_j uses updated rows for j < i
  // and current rows for j > i.
  Matrix suffix_old = Matrix::Zero(n + 1, k);
  for (Eigen::Index i = n; i-- > 0;) suffix_old.row(i) = suffix_old.row(i + 1) + u.row(i);

  const double c_l = data.consts[l].c_l;
  Matrix out = u;
  Eigen::RowVectorXd prefix_new = Eigen::RowVectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd others = prefix_new + suffix_old.row(i + 1);
    Eigen::RowVectorXd denom = c_l * (others * w) + denom_cross;
    for (Eigen::Index c = 0; c < k; ++c) out(i, c) = safe_ratio(numer(i, c), denom(c), "membership");
    prefix_new += out.row(i);
  }
  return out;
}

Matrix update_w(const ModelData& data, LayerId l, const LatentState& state) {
  const auto& layer = data.mh->layer(l);
  const Matrix& u = state.u[l];
  const Matrix& w = state.w[l];
  const Eigen::Index k = u.cols();
  const Matrix uw = u * w;

  // sum_e A_e / lambda_e * sum_{i<j in e} theta_i theta_j u_i^T u_j
  Matrix acc = Matrix::Zero(k, k);
  const auto& edges = layer.hyperedges();
  Matrix ordered(k, k);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& he = edges[e];
    if (he.weight == 0.0) continue;
    const auto& th = data.theta[l][e];
    ordered.setZero();
    Eigen::RowVectorXd prefix_u = Eigen::RowVectorXd::Zero(k);
    double rate = 0.0;
    for (std::size_t a = 0; a < he.size(); ++a) {
      auto row = u.row(he.nodes[a]);
      rate += th[a] * prefix_u.dot(uw.row(he.nodes[a]));
      ordered.noalias() += th[a] * (prefix_u.transpose() * row);
      prefix_u += th[a] * row;
    }
    if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (hyperedge)");
    acc += (he.weight / rate) * ordered;
  }
  const Matrix numer = w.cwiseProduct(acc + acc.transpose());  // 2x the symmetrized marginal
  const Matrix g = ordered_pair_outer(u);
  const Matrix denom = data.consts[l].c_l * (g + g.transpose());  // 2x the symmetrized pair sum

  Matrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = safe_ratio(numer(a, b), denom(a, b), "affinity");
  return out;
}

Matrix update_w_cross(const ModelData& data, std::size_t s, const LatentState& state) {
  const auto& set = data.mh->inter_edges()[s];
  const Matrix& ua = state.u[set.layer_a];
  const Matrix& ub = state.u[set.layer_b];
  const Matrix& wc = state.w_cross[s];

  Matrix acc = Matrix::Zero(wc.rows(), wc.cols());
  for (const auto& edge : set.edges) {
    double rate = (ua.row(edge.i) * wc).dot(ub.row(edge.j));
    if (!(rate > 0.0)) throw DegenerateStateError("zero rate on observed interaction (inter-edge)");
    acc.noalias() += (edge.weight / rate) * (ua.row(edge.i).transpose() * ub.row(edge.j));
  }
  const Matrix numer = wc.cwiseProduct(acc);
  const Matrix denom = ua.colwise().sum().transpose() * ub.colwise().sum();
  Matrix out(wc.rows(), wc.cols());
  for (Eigen::Index a = 0; a < out.rows(); ++a)
    for (Eigen::Index b = 0; b < out.cols(); ++b) out(a, b) = safe_ratio(numer(a, b), denom(a, b), "cross affinity");
  return out;
}

LatentState sweep(const ModelData& data, LatentState state) {
  const auto& mh = *data.mh;
  for (std::size_t l = 0; l < mh.num_layers(); ++l) state.u[l] = update_u(data, l, state);
  for (std::size_t l = 0; l < mh.num_layers(); ++l) state.w[l] = update_w(data, l, state);
  for (std::size_t s = 0; s < mh.inter_edges().size(); ++s) state.w_cross[s] = update_w_cross(data, s, state);
  return state;
}

double objective(const ModelData& data, const LatentState& state) {
  return surrogate_objective(*data.mh, data.theta, state, data.consts);
}

// ---------------------------------------------------------------------------
// Driver

RestartSummary run_em(const ModelData& data, const InferenceConfig& cfg, LatentState state, std::size_t restart) {
  RestartSummary r;
  r.restart = restart;
  try {
    double prev = objective(data, state);
    r.trace.push_back({0, prev});
    std::size_t quiet_checks = 0;
    std::size_t it = 0;
    while (it < cfg.max_iters) {
      state = sweep(data, std::move(state));
      ++it;
      if (it % cfg.check_every != 0 && it != cfg.max_iters) continue;
      double cur = objective(data, state);
      r.trace.push_back({it, cur});
      if (cfg.on_check) cfg.on_check(restart, r.trace.back());
      double rel = std::abs(cur - prev) / std::max(std::abs(prev), std::numeric_limits<double>::min());
      quiet_checks = rel < cfg.tol ? quiet_checks + 1 : 0;
      prev = cur;
      if (quiet_checks >= 2) {
        r.converged = true;
        break;
      }
    }
    r.iterations = it;
    r.objective = prev;
    r.state = std::move(state);
  } catch (const DegenerateStateError&) {
    r.failed = true;
    r.objective = -std::numeric_limits<double>::infinity();
    r.state.reset();
  }
  return r;
}

RestartSummary fit_restart(const ModelData& data, const InferenceConfig& cfg, std::size_t restart) {
  const std::uint64_t seed = cfg.seed + restart;
  auto r = run_em(data, cfg, initialize(*data.mh, cfg, seed), restart);
  r.seed = seed;
  return r;
}

FitResult fit(const ModelData& data, const InferenceConfig& cfg) {
  cfg.validate(*data.mh);
  std::vector<RestartSummary> runs(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) { runs[r] = fit_restart(data, cfg, r); });

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < runs.size(); ++r)
    if (!runs[r].failed && (!best || runs[r].objective > runs[*best].objective)) best = r;
  if (!best) throw Error("fitting failed: every restart reached a degenerate state");

  FitResult out;
  out.best_restart = *best;
  out.state = *runs[*best].state;
  out.objective_trace = runs[*best].trace;
  out.converged = runs[*best].converged;
  out.iterations = runs[*best].iterations;
  out.objective = runs[*best].objective;
  if (!cfg.keep_restart_states)
    for (auto& r : runs) r.state.reset();
  out.restarts = std::move(runs);
  return out;
}

FitResult fit(const MultiHypergraph& mh, const InferenceConfig& cfg) {
  ModelData data(mh, cfg);
  return fit(data, cfg);
}

std::vector<int> hard_labels(const Matrix& u) {
  std::vector<int> labels(u.rows(), 0);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < u.cols(); ++c)
      if (u(i, c) > u(i, best)) best = c;
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mhsbm
