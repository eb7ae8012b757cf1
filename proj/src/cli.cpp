#include "mhsbm/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhsbm/core.hpp"
#include "mhsbm/evaluation.hpp"
#include "mhsbm/inference.hpp"
#include "mhsbm/internal_degree.hpp"
#include "mhsbm/synth.hpp"

namespace mhsbm {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct FitFlags {
  std::vector<std::size_t> k;
  std::size_t restarts = 10;
  std::size_t max_iter = 500;
  double tol = 1e-7;
  std::size_t check_every = 5;
  bool assortative = false;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::optional<std::uint64_t> m_override;
  bool verbose = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_option("--k", f.k, "Communities per layer (defaults to layer.<l>.k in the manifest)")->delimiter(',');
  cmd->add_option("--restarts", f.restarts, "EM restarts")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Maximum EM sweeps per restart")->capture_default_str();
  cmd->add_option("--tol", f.tol, "Relative objective change for convergence")->capture_default_str();
  cmd->add_option("--check-every", f.check_every, "Sweeps between convergence checks")->capture_default_str();
  cmd->add_flag("--assortative", f.assortative, "Initialize off-diagonal affinities to zero");
  cmd->add_option("--seed", f.seed, "Base seed for all randomness")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--m-override", f.m_override, "Override the count M in the layer constant");
  cmd->add_flag("--verbose", f.verbose, "Log the objective at every convergence check");
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

InferenceConfig make_config(const FitFlags& f, const Manifest& manifest, const MultiHypergraph& mh, std::ostream& err,
                            std::mutex& log_mutex) {
  InferenceConfig cfg;
  cfg.k_per_layer = f.k.empty() ? manifest.k_per_layer() : f.k;
  if (cfg.k_per_layer.empty()) throw InputError("K is not given: pass --k or set layer.<l>.k in the manifest");
  cfg.restarts = f.restarts;
  cfg.max_iters = f.max_iter;
  cfg.tol = f.tol;
  cfg.check_every = f.check_every;
  cfg.assortative = f.assortative;
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  cfg.m_override = f.m_override;
  cfg.validate(mh);
  if (cfg.assortative)
    for (std::size_t l = 0; l < cfg.k_per_layer.size(); ++l)
      if (cfg.k_per_layer[l] == 1) err << "warning: --assortative has no effect on layer " << l << " (K = 1)\n";
  if (f.verbose) {
    cfg.on_check = [&err, &log_mutex](std::size_t restart, const TracePoint& p) {
      std::lock_guard lock(log_mutex);
      err << "restart " << restart << " iter " << p.iteration << " objective " << fmt(p.objective) << '\n';
    };
  }
  return cfg;
}

void record_config(Manifest& rm, const InferenceConfig& cfg) {
  rm.set("fit.k", join(cfg.k_per_layer));
  rm.set("fit.restarts", std::to_string(cfg.restarts));
  rm.set("fit.max_iter", std::to_string(cfg.max_iters));
  rm.set("fit.tol", fmt(cfg.tol));
  rm.set("fit.check_every", std::to_string(cfg.check_every));
  rm.set("fit.assortative", cfg.assortative ? "true" : "false");
  rm.set("fit.seed", std::to_string(cfg.seed));
  if (cfg.m_override) rm.set("fit.m_override", std::to_string(*cfg.m_override));
  std::string seeds;
  for (std::size_t r = 0; r < cfg.restarts; ++r) seeds += (r ? "," : "") + std::to_string(cfg.seed + r);
  rm.set("fit.restart_seeds", seeds);
}

Manifest run_manifest(const std::string& command, const std::string& input) {
  Manifest rm;
  rm.set("version", kVersion);
  rm.set("command", command);
  if (!input.empty()) {
    rm.set("input.manifest", input);
    auto in = Manifest::parse_file(input);
    for (const auto& [k, v] : in.entries()) rm.set("input." + k, v);
  }
  return rm;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::string layer_pair_name(const InterEdgeSet& s) {
  return std::to_string(s.layer_a) + "." + std::to_string(s.layer_b);
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string manifest;
  std::string out_dir;
  FitFlags flags;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  auto manifest = Manifest::parse_file(a.manifest);
  auto mh = manifest.load();
  std::mutex log_mutex;
  auto cfg = make_config(a.flags, manifest, mh, err, log_mutex);
  auto result = fit(mh, cfg);

  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  for (std::size_t l = 0; l < mh.num_layers(); ++l) {
    write_matrix((dir / ("u." + std::to_string(l) + ".csv")).string(), result.state.u[l]);
    write_matrix((dir / ("w." + std::to_string(l) + ".csv")).string(), result.state.w[l]);
  }
  for (std::size_t s = 0; s < mh.inter_edges().size(); ++s)
    write_matrix((dir / ("w_cross." + layer_pair_name(mh.inter_edges()[s]) + ".csv")).string(),
                 result.state.w_cross[s]);

  std::ostringstream trace;
  trace << "iteration,objective\n";
  for (const auto& p : result.objective_trace) trace << p.iteration << ',' << fmt(p.objective) << '\n';
  write_file(dir / "trace.csv", trace.str());

  ordered_json summary;
  summary["version"] = kVersion;
  summary["final_objective"] = result.objective;
  summary["iterations"] = result.iterations;
  summary["restart"] = result.best_restart;
  summary["converged"] = result.converged;
  summary["restarts"] = ordered_json::array();
  for (const auto& r : result.restarts) {
    ordered_json j;
    j["restart"] = r.restart;
    j["seed"] = r.seed;
    j["failed"] = r.failed;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["objective"] = r.failed ? ordered_json(nullptr) : ordered_json(r.objective);
    summary["restarts"].push_back(j);
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  auto rm = run_manifest("fit", a.manifest);
  record_config(rm, cfg);
  rm.write((dir / "run_manifest.cfg").string());
  out << "restart " << result.best_restart << " objective " << fmt(result.objective) << " iterations "
      << result.iterations << (result.converged ? " converged" : " not converged") << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string manifest;
  std::string fit_dir;
  std::string out_dir;
  bool cs_normalize_rows = true;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  auto mh = Manifest::parse_file(a.manifest).load();
  ordered_json report;
  report["version"] = kVersion;
  report["layers"] = ordered_json::array();
  for (std::size_t l = 0; l < mh.num_layers(); ++l) {
    const auto& layer = mh.layer(l);
    if (!layer.has_ground_truth()) continue;
    auto u = read_matrix((fs::path(a.fit_dir) / ("u." + std::to_string(l) + ".csv")).string());
    if (static_cast<std::size_t>(u.rows()) != layer.num_nodes())
      throw InputError("u." + std::to_string(l) + ".csv does not match the layer size");
    auto labels = hard_labels(u);
    ordered_json j;
    j["layer"] = l;
    j["nmi"] = nmi(labels, layer.ground_truth());
    j["f1"] = community_f1(labels, layer.ground_truth());
    j["cs"] = cosine_similarity(u, layer.ground_truth(), CosineOptions{a.cs_normalize_rows});
    report["layers"].push_back(j);
  }
  auto text = report.dump(2) + "\n";
  out << text;
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "communities.json", text);
    auto rm = run_manifest("eval-communities", a.manifest);
    rm.set("eval.fit_dir", a.fit_dir);
    rm.set("eval.cs_normalize_rows", a.cs_normalize_rows ? "true" : "false");
    rm.write((fs::path(a.out_dir) / "run_manifest.cfg").string());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct PredictHyperedgeArgs {
  std::string manifest;
  std::string out_dir;
  std::size_t folds = 5;
  std::vector<std::size_t> max_sizes;
  FitFlags flags;
};

int cmd_predict_hyperedges(const PredictHyperedgeArgs& a, std::ostream& out, std::ostream& err) {
  auto manifest = Manifest::parse_file(a.manifest);
  auto mh = manifest.load();
  std::mutex log_mutex;
  auto cfg = make_config(a.flags, manifest, mh, err, log_mutex);
  HyperedgePredictionOptions opts{a.folds, a.flags.seed, a.max_sizes};
  auto report = hyperedge_prediction_cv(mh, cfg, opts);

  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "fold,layer,test_positives,auc";
  for (auto d : a.max_sizes) csv << ",auc_max_size_" << d;
  csv << '\n';
  for (const auto& f : report.folds) {
    csv << f.fold << ',' << f.layer << ',' << f.test_positives << ',' << fmt(f.auc);
    for (auto d : a.max_sizes) {
      auto it = f.auc_by_max_size.find(d);
      csv << ',' << (it == f.auc_by_max_size.end() ? std::string() : fmt(it->second));
    }
    csv << '\n';
  }
  write_file(dir / "folds.csv", csv.str());

  ordered_json summary;
  summary["version"] = kVersion;
  summary["auc_mean"] = report.overall.mean;
  summary["auc_sd"] = report.overall.sd;
  summary["per_layer"] = ordered_json::array();
  for (std::size_t l = 0; l < report.per_layer.size(); ++l)
    summary["per_layer"].push_back({{"layer", l}, {"auc_mean", report.per_layer[l].mean}, {"auc_sd", report.per_layer[l].sd}});
  summary["by_max_size"] = ordered_json::array();
  for (const auto& [d, ms] : report.by_max_size)
    summary["by_max_size"].push_back({{"max_size", d}, {"auc_mean", ms.mean}, {"auc_sd", ms.sd}});
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  auto rm = run_manifest("predict-hyperedges", a.manifest);
  record_config(rm, cfg);
  rm.set("predict.folds", std::to_string(a.folds));
  rm.set("predict.max_sizes", join(a.max_sizes));
  rm.write((dir / "run_manifest.cfg").string());
  out << "AUC " << fmt(report.overall.mean) << " +- " << fmt(report.overall.sd) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct PredictInterArgs {
  std::string manifest;
  std::string out_dir;
  std::vector<double> ratios{0.0};
  std::size_t repeats = 5;
  FitFlags flags;
};

int cmd_predict_interedges(const PredictInterArgs& a, std::ostream& out, std::ostream& err) {
  auto manifest = Manifest::parse_file(a.manifest);
  auto mh = manifest.load();
  std::mutex log_mutex;
  auto cfg = make_config(a.flags, manifest, mh, err, log_mutex);

  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "removal_ratio,repeat,auc\n";
  ordered_json summary;
  summary["version"] = kVersion;
  summary["sweep"] = ordered_json::array();
  for (double r : a.ratios) {
    auto rep = inter_edge_prediction(mh, cfg, InterEdgePredictionOptions{r, a.repeats, a.flags.seed});
    for (std::size_t i = 0; i < rep.auc_per_repeat.size(); ++i)
      csv << fmt(r) << ',' << i << ',' << fmt(rep.auc_per_repeat[i]) << '\n';
    summary["sweep"].push_back({{"removal_ratio", r}, {"auc_mean", rep.auc.mean}, {"auc_sd", rep.auc.sd}});
    out << "r=" << fmt(r) << " AUC " << fmt(rep.auc.mean) << " +- " << fmt(rep.auc.sd) << '\n';
  }
  write_file(dir / "sweep.csv", csv.str());
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  auto rm = run_manifest("predict-interedges", a.manifest);
  record_config(rm, cfg);
  std::string ratios;
  for (std::size_t i = 0; i < a.ratios.size(); ++i) ratios += (i ? "," : "") + fmt(a.ratios[i]);
  rm.set("predict.removal_ratios", ratios);
  rm.set("predict.repeats", std::to_string(a.repeats));
  rm.write((dir / "run_manifest.cfg").string());
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string preset = "planted";
  std::string out_dir;
  // views
  std::string source;
  std::string truth;
  std::vector<double> fractions{0.7, 0.7};
  std::vector<std::size_t> budgets{0};
  double noise = 0.0;
  bool unit_weights = false;
  std::vector<std::size_t> k;
  // planted
  PlantedConfig planted;
  bool no_inter_edges = false;
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  MultiHypergraph mh;
  std::vector<std::size_t> ks;
  auto rm = run_manifest("synth", "");
  rm.set("synth.preset", a.preset);
  rm.set("synth.seed", std::to_string(a.seed));
  if (a.preset == "views") {
    if (a.source.empty() || a.truth.empty()) throw InputError("--preset views needs --source and --truth");
    auto source = parse_hyperedge_file(a.source);
    source = source.with_ground_truth(parse_ground_truth_file(a.truth, source.num_nodes()));
    SynthConfig cfg{a.fractions, a.budgets, a.noise, a.unit_weights, a.seed};
    mh = build_views(source, cfg);
    std::size_t labels = 0;
    for (int c : source.ground_truth()) labels = std::max<std::size_t>(labels, static_cast<std::size_t>(c + 1));
    ks = a.k.empty() ? std::vector<std::size_t>(mh.num_layers(), labels) : a.k;
    rm.set("synth.source", a.source);
    rm.set("synth.truth", a.truth);
    std::string fr, bu;
    for (std::size_t i = 0; i < a.fractions.size(); ++i) fr += (i ? "," : "") + fmt(a.fractions[i]);
    rm.set("synth.fractions", fr);
    rm.set("synth.budgets", join(a.budgets));
    rm.set("synth.noise", fmt(a.noise));
    rm.set("synth.unit_weights", a.unit_weights ? "true" : "false");
  } else {
    auto cfg = a.planted;
    cfg.inter_edges = !a.no_inter_edges;
    cfg.seed = a.seed;
    mh = planted(cfg).mh;
    ks.assign(mh.num_layers(), cfg.communities);
    rm.set("synth.nodes", std::to_string(cfg.num_nodes));
    rm.set("synth.communities", std::to_string(cfg.communities));
    rm.set("synth.layers", std::to_string(cfg.num_layers));
    rm.set("synth.max_size", std::to_string(cfg.max_size));
    rm.set("synth.c_in", fmt(cfg.c_in));
    rm.set("synth.c_out", fmt(cfg.c_out));
    rm.set("synth.cross_in", fmt(cfg.cross_in));
    rm.set("synth.cross_out", fmt(cfg.cross_out));
    rm.set("synth.inter_edges", cfg.inter_edges ? "true" : "false");
  }
  write_multi_hypergraph(a.out_dir, mh, ks);
  rm.write((fs::path(a.out_dir) / "run_manifest.cfg").string());
  out << "wrote " << mh.num_layers() << " layers";
  for (const auto& layer : mh.layers()) out << ' ' << layer.num_hyperedges();
  out << " hyperedges, " << mh.total_inter_edges() << " inter-edges to " << a.out_dir << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct EntropyArgs {
  std::string edges;
  std::optional<std::size_t> num_nodes;
  double threshold = 0.6;
  std::string base = "normalized";
  std::size_t bins = 10;
  std::string out_dir;
};

int cmd_entropy(const EntropyArgs& a, std::ostream& out) {
  auto layer = parse_hyperedge_file(a.edges, a.num_nodes);
  EntropyBase base = a.base == "nats" ? EntropyBase::Nats : a.base == "bits" ? EntropyBase::Bits : EntropyBase::Normalized;
  auto r = entropy_report(layer, a.threshold, base, a.bins);
  std::ostringstream csv;
  csv << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < r.histogram.size(); ++b)
    csv << fmt(r.bin_edges[b]) << ',' << fmt(r.bin_edges[b + 1]) << ',' << r.histogram[b] << '\n';
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "entropy_histogram.csv", csv.str());
    ordered_json j;
    j["version"] = kVersion;
    j["base"] = a.base;
    j["threshold"] = a.threshold;
    j["hyperedges_considered"] = r.hyperedges_considered;
    j["below_threshold"] = r.below_threshold;
    j["fraction_below"] = r.fraction_below;
    j["pairs_total"] = r.pairs_total;
    j["pairs_contained"] = r.pairs_contained;
    j["pair_containment_probability"] = r.pair_containment_probability;
    write_file(fs::path(a.out_dir) / "entropy_summary.json", j.dump(2) + "\n");
    auto rm = run_manifest("entropy-report", "");
    rm.set("entropy.edges", a.edges);
    rm.set("entropy.threshold", fmt(a.threshold));
    rm.set("entropy.base", a.base);
    rm.set("entropy.bins", std::to_string(a.bins));
    rm.write((fs::path(a.out_dir) / "run_manifest.cfg").string());
  } else {
    out << csv.str();
  }
  out << "hyperedges=" << r.hyperedges_considered << " below=" << r.below_threshold
      << " fraction=" << fmt(r.fraction_below) << " threshold=" << fmt(r.threshold) << " base=" << a.base
      << " pair_containment=" << fmt(r.pair_containment_probability) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-hypergraph stochastic block model: community and hyperedge inference", "mhsbm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Outputs: matrices and traces as CSV (u.<l>.csv, w.<l>.csv, w_cross.<a>.<b>.csv, trace.csv), "
      "metric summaries as JSON (summary.json, communities.json), and run_manifest.cfg in every output directory.");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model and write u, w, w_cross, trace and summary");
  fit_cmd->add_option("--manifest", fit_args.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out-dir", fit_args.out_dir, "Output directory")->required();
  add_fit_flags(fit_cmd, fit_args.flags);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval-communities", "NMI, F1 and CS of fitted memberships per layer (JSON)");
  eval_cmd->add_option("--manifest", eval_args.manifest, "Input manifest with ground truth")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--fit-dir", eval_args.fit_dir, "Directory written by `fit`")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out-dir", eval_args.out_dir, "Also write communities.json here");
  eval_cmd->add_option("--cs-normalize-rows", eval_args.cs_normalize_rows,
                       "Align CS columns by per-node cosine (true) or L1-normalized overlap (false)")
      ->capture_default_str();

  PredictHyperedgeArgs ph_args;
  auto* ph_cmd = app.add_subcommand("predict-hyperedges", "Cross-validated hyperedge prediction AUC");
  ph_cmd->add_option("--manifest", ph_args.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  ph_cmd->add_option("--out-dir", ph_args.out_dir, "Output directory")->required();
  ph_cmd->add_option("--folds", ph_args.folds, "Cross-validation folds")->capture_default_str();
  ph_cmd->add_option("--max-size", ph_args.max_sizes, "Also report AUC over test hyperedges of size <= D")
      ->delimiter(',');
  add_fit_flags(ph_cmd, ph_args.flags);

  PredictInterArgs pi_args;
  auto* pi_cmd = app.add_subcommand("predict-interedges", "Inter-hypergraph edge prediction AUC over removal ratios");
  pi_cmd->add_option("--manifest", pi_args.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  pi_cmd->add_option("--out-dir", pi_args.out_dir, "Output directory")->required();
  pi_cmd->add_option("--removal-ratio", pi_args.ratios, "Removal ratios r in [0, 1)")->delimiter(',');
  pi_cmd->add_option("--repeats", pi_args.repeats, "Seed repetitions per ratio")->capture_default_str();
  add_fit_flags(pi_cmd, pi_args.flags);

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Generate a benchmark multi-hypergraph");
  sy_cmd->add_option("--preset", sy.preset, "views | planted")
      ->check(CLI::IsMember({"views", "planted"}))
      ->capture_default_str();
  sy_cmd->add_option("--out-dir", sy.out_dir, "Output directory")->required();
  sy_cmd->add_option("--seed", sy.seed, "Seed")->capture_default_str();
  sy_cmd->add_option("--source", sy.source, "views: source hyperedge file");
  sy_cmd->add_option("--truth", sy.truth, "views: source ground truth file");
  sy_cmd->add_option("--fractions", sy.fractions, "views: per-layer sampling fractions")->delimiter(',');
  sy_cmd->add_option("--budgets", sy.budgets, "views: inter-edge budget per pair (0, l)")->delimiter(',');
  sy_cmd->add_option("--noise", sy.noise, "views: noise fraction of each budget")->capture_default_str();
  sy_cmd->add_flag("--unit-weights", sy.unit_weights, "views: set every hyperedge weight to 1");
  sy_cmd->add_option("--k", sy.k, "views: K per layer written to the manifest")->delimiter(',');
  sy_cmd->add_option("--nodes", sy.planted.num_nodes, "planted: nodes per layer")->capture_default_str();
  sy_cmd->add_option("--communities", sy.planted.communities, "planted: communities")->capture_default_str();
  sy_cmd->add_option("--layers", sy.planted.num_layers, "planted: layers")->capture_default_str();
  sy_cmd->add_option("--max-size", sy.planted.max_size, "planted: largest hyperedge size")->capture_default_str();
  sy_cmd->add_option("--c-in", sy.planted.c_in, "planted: within-community affinity")->capture_default_str();
  sy_cmd->add_option("--c-out", sy.planted.c_out, "planted: between-community affinity")->capture_default_str();
  sy_cmd->add_option("--cross-in", sy.planted.cross_in, "planted: aligned cross affinity")->capture_default_str();
  sy_cmd->add_option("--cross-out", sy.planted.cross_out, "planted: misaligned cross affinity")->capture_default_str();
  sy_cmd->add_flag("--no-inter-edges", sy.no_inter_edges, "planted: no inter-edges");

  EntropyArgs en;
  auto* en_cmd = app.add_subcommand("entropy-report", "Hyperedge information entropy histogram and summary");
  en_cmd->add_option("--edges", en.edges, "Hyperedge file")->required()->check(CLI::ExistingFile);
  en_cmd->add_option("--num-nodes", en.num_nodes, "Number of nodes (default 1 + max id)");
  en_cmd->add_option("--threshold", en.threshold, "Entropy threshold")->capture_default_str();
  en_cmd->add_option("--base", en.base, "nats | bits | normalized")
      ->check(CLI::IsMember({"nats", "bits", "normalized"}))
      ->capture_default_str();
  en_cmd->add_option("--bins", en.bins, "Histogram bins")->capture_default_str();
  en_cmd->add_option("--out-dir", en.out_dir, "Write entropy_histogram.csv and entropy_summary.json here");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_args, out, err);
    if (*eval_cmd) return cmd_eval(eval_args, out);
    if (*ph_cmd) return cmd_predict_hyperedges(ph_args, out, err);
    if (*pi_cmd) return cmd_predict_interedges(pi_args, out, err);
    if (*sy_cmd) return cmd_synth(sy, out);
    if (*en_cmd) return cmd_entropy(en, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mhsbm
