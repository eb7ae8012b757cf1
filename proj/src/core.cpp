#include "mhsbm/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mhsbm {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed: " + path);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_real(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError(where(line_no) + "invalid number '" + s + "'");
  return v;
}

std::uint64_t parse_index(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(where(line_no) + "invalid index '" + s + "'");
  return v;
}

std::string format_real(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Hyperedge make_hyperedge(std::vector<NodeId> nodes, double weight) {
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw InputError("hyperedge contains a repeated node");
  if (nodes.size() < 2) throw InputError("hyperedge must contain at least 2 nodes");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw InputError("hyperedge weight must be >= 0");
  return Hyperedge{std::move(nodes), weight};
}

// ---------------------------------------------------------------------------

HypergraphLayer::HypergraphLayer(std::size_t num_nodes, std::vector<Hyperedge> hyperedges,
                                 std::optional<std::vector<int>> ground_truth)
    : num_nodes_(num_nodes), ground_truth_(std::move(ground_truth)) {
  if (num_nodes_ == 0) throw InputError("layer must have at least one node");
  for (auto& e : hyperedges) {
    e = make_hyperedge(std::move(e.nodes), e.weight);
    if (e.nodes.back() >= num_nodes_)
      throw InputError("node id " + std::to_string(e.nodes.back()) + " out of range for " +
                       std::to_string(num_nodes_) + " nodes");
  }
  std::sort(hyperedges.begin(), hyperedges.end(),
            [](const Hyperedge& a, const Hyperedge& b) { return a.nodes < b.nodes; });
  for (auto& e : hyperedges) {
    if (!hyperedges_.empty() && hyperedges_.back().nodes == e.nodes)
      hyperedges_.back().weight += e.weight;
    else
      hyperedges_.push_back(std::move(e));
  }
  if (ground_truth_ && ground_truth_->size() != num_nodes_)
    throw InputError("ground truth size does not match the number of nodes");
}

std::size_t HypergraphLayer::max_hyperedge_size() const {
  std::size_t d = 0;
  for (const auto& e : hyperedges_) d = std::max(d, e.size());
  return d;
}

const std::vector<int>& HypergraphLayer::ground_truth() const {
  if (!ground_truth_) throw InputError("layer has no ground truth");
  return *ground_truth_;
}

std::optional<std::size_t> HypergraphLayer::find(const std::vector<NodeId>& nodes) const {
  auto it = std::lower_bound(hyperedges_.begin(), hyperedges_.end(), nodes,
                             [](const Hyperedge& e, const std::vector<NodeId>& n) { return e.nodes < n; });
  if (it != hyperedges_.end() && it->nodes == nodes)
    return static_cast<std::size_t>(it - hyperedges_.begin());
  return std::nullopt;
}

HypergraphLayer HypergraphLayer::with_ground_truth(std::vector<int> labels) const {
  return HypergraphLayer(num_nodes_, hyperedges_, std::move(labels));
}

HypergraphLayer HypergraphLayer::with_hyperedges(std::vector<Hyperedge> hyperedges) const {
  return HypergraphLayer(num_nodes_, std::move(hyperedges), ground_truth_);
}

// ---------------------------------------------------------------------------

double InterEdgeSet::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.weight;
  return s;
}

InterEdgeSet make_inter_edge_set(LayerId layer_a, LayerId layer_b, std::vector<InterEdge> edges) {
  if (layer_a >= layer_b) throw InputError("inter-edge set requires layer_a < layer_b");
  for (const auto& e : edges)
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw InputError("inter-edge weight must be >= 0");
  std::sort(edges.begin(), edges.end(),
            [](const InterEdge& x, const InterEdge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  InterEdgeSet set{layer_a, layer_b, {}};
  for (const auto& e : edges) {
    if (!set.edges.empty() && set.edges.back().i == e.i && set.edges.back().j == e.j)
      set.edges.back().weight += e.weight;
    else
      set.edges.push_back(e);
  }
  std::erase_if(set.edges, [](const InterEdge& e) { return e.weight == 0.0; });
  return set;
}

// ---------------------------------------------------------------------------

MultiHypergraph::MultiHypergraph(std::vector<HypergraphLayer> layers, std::vector<InterEdgeSet> inter_edges)
    : layers_(std::move(layers)), inter_edges_(std::move(inter_edges)) {
  std::sort(inter_edges_.begin(), inter_edges_.end(), [](const InterEdgeSet& a, const InterEdgeSet& b) {
    return std::tie(a.layer_a, a.layer_b) < std::tie(b.layer_a, b.layer_b);
  });
  for (std::size_t s = 0; s < inter_edges_.size(); ++s) {
    const auto& set = inter_edges_[s];
    if (set.layer_a >= set.layer_b || set.layer_b >= layers_.size())
      throw InputError("inter-edge set references a missing layer");
    if (s > 0 && inter_edges_[s - 1].layer_a == set.layer_a && inter_edges_[s - 1].layer_b == set.layer_b)
      throw InputError("more than one inter-edge set for layer pair (" + std::to_string(set.layer_a) + "," +
                       std::to_string(set.layer_b) + ")");
    for (const auto& e : set.edges) {
      if (e.i >= layers_[set.layer_a].num_nodes() || e.j >= layers_[set.layer_b].num_nodes())
        throw InputError("inter-edge node index out of range");
    }
  }
}

std::size_t MultiHypergraph::total_inter_edges() const {
  std::size_t n = 0;
  for (const auto& s : inter_edges_) n += s.edges.size();
  return n;
}

MultiHypergraph MultiHypergraph::with_layer(LayerId l, HypergraphLayer layer) const {
  auto layers = layers_;
  layers.at(l) = std::move(layer);
  return MultiHypergraph(std::move(layers), inter_edges_);
}

MultiHypergraph MultiHypergraph::with_inter_edges(std::vector<InterEdgeSet> inter_edges) const {
  return MultiHypergraph(layers_, std::move(inter_edges));
}

// ---------------------------------------------------------------------------
// Hyperedge files

HypergraphLayer parse_hyperedges(const std::string& text, std::optional<std::size_t> num_nodes) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Hyperedge> edges;
  std::uint64_t max_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() < 3)
      throw InputError(where(line_no) + "hyperedge needs a weight and at least 2 node ids");
    double weight = parse_real(fields[0], line_no);
    if (weight < 0.0) throw InputError(where(line_no) + "negative weight");
    std::vector<NodeId> nodes;
    for (std::size_t f = 1; f < fields.size(); ++f) {
      auto id = parse_index(fields[f], line_no);
      if (num_nodes && id >= *num_nodes)
        throw InputError(where(line_no) + "node id " + fields[f] + " >= declared num_nodes " +
                         std::to_string(*num_nodes));
      if (id > std::numeric_limits<NodeId>::max()) throw InputError(where(line_no) + "node id too large");
      max_id = std::max(max_id, id);
      nodes.push_back(static_cast<NodeId>(id));
    }
    try {
      edges.push_back(make_hyperedge(std::move(nodes), weight));
    } catch (const InputError& err) {
      throw InputError(where(line_no) + err.what());
    }
  }
  std::size_t n = num_nodes ? *num_nodes : (edges.empty() ? 0 : static_cast<std::size_t>(max_id) + 1);
  return HypergraphLayer(n, std::move(edges));
}

HypergraphLayer parse_hyperedge_file(const std::string& path, std::optional<std::size_t> num_nodes) {
  try {
    return parse_hyperedges(read_text(path), num_nodes);
  } catch (const InputError& err) {
    throw InputError(path + ": " + err.what());
  }
}

void write_hyperedge_file(const std::string& path, const HypergraphLayer& layer) {
  std::ostringstream out;
  out << "# num_nodes " << layer.num_nodes() << "\n";
  for (const auto& e : layer.hyperedges()) {
    out << format_real(e.weight);
    for (auto v : e.nodes) out << ' ' << v;
    out << '\n';
  }
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Inter-edge files

std::vector<InterEdgeSet> parse_inter_edges(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::pair<LayerId, LayerId>, std::vector<InterEdge>> grouped;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    auto f = split_fields(line);
    if (f.size() != 5) throw InputError(where(line_no) + "expected `layer_a layer_b i j weight`");
    auto la = parse_index(f[0], line_no);
    auto lb = parse_index(f[1], line_no);
    auto i = parse_index(f[2], line_no);
    auto j = parse_index(f[3], line_no);
    double w = parse_real(f[4], line_no);
    if (la == lb) throw InputError(where(line_no) + "self-pair: layer_a == layer_b");
    if (w < 0.0) throw InputError(where(line_no) + "negative weight");
    if (i > std::numeric_limits<NodeId>::max() || j > std::numeric_limits<NodeId>::max())
      throw InputError(where(line_no) + "node id too large");
    if (la > lb) {
      std::swap(la, lb);
      std::swap(i, j);
    }
    grouped[{la, lb}].push_back(InterEdge{static_cast<NodeId>(i), static_cast<NodeId>(j), w});
  }
  std::vector<InterEdgeSet> sets;
  for (auto& [key, edges] : grouped) sets.push_back(make_inter_edge_set(key.first, key.second, std::move(edges)));
  return sets;
}

std::vector<InterEdgeSet> parse_inter_edge_file(const std::string& path) {
  try {
    return parse_inter_edges(read_text(path));
  } catch (const InputError& err) {
    throw InputError(path + ": " + err.what());
  }
}

void write_inter_edge_file(const std::string& path, const std::vector<InterEdgeSet>& sets) {
  std::ostringstream out;
  out << "# layer_a layer_b i j weight\n";
  for (const auto& s : sets)
    for (const auto& e : s.edges)
      out << s.layer_a << ' ' << s.layer_b << ' ' << e.i << ' ' << e.j << ' ' << format_real(e.weight) << '\n';
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Ground truth

std::vector<int> parse_ground_truth_file(const std::string& path, std::size_t num_nodes) {
  std::istringstream in(read_text(path));
  std::vector<int> labels(num_nodes, -1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    auto f = split_fields(line);
    if (f.size() != 2) throw InputError(path + ": " + where(line_no) + "expected `node_id community_id`");
    auto node = parse_index(f[0], line_no);
    auto label = parse_index(f[1], line_no);
    if (node >= num_nodes) throw InputError(path + ": " + where(line_no) + "node id out of range");
    if (label > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
      throw InputError(path + ": " + where(line_no) + "community id too large");
    labels[node] = static_cast<int>(label);
  }
  return labels;
}

void write_ground_truth_file(const std::string& path, const std::vector<int>& labels) {
  std::ostringstream out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) out << i << ' ' << labels[i] << '\n';
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Matrices

void write_matrix(const std::string& path, const Matrix& m) {
  std::ostringstream out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) throw InputError("write_matrix: non-finite entry");
      if (c) out << ',';
      out << format_real(m(r, c));
    }
    out << '\n';
  }
  write_text(path, out.str());
}

Matrix read_matrix(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(parse_real(trim(cell), line_no));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(path + ": " + where(line_no) + "ragged matrix row");
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

// ---------------------------------------------------------------------------
// Manifest

Manifest Manifest::parse(const std::string& text, const std::string& base_dir) {
  Manifest m;
  m.base_dir_ = base_dir;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("manifest " + where(line_no) + "expected `key = value`");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("manifest " + where(line_no) + "empty key");
    m.entries_[key] = trim(line.substr(eq + 1));
  }
  return m;
}

Manifest Manifest::parse_file(const std::string& path) {
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse(read_text(path), dir.empty() ? "." : dir);
}

std::optional<std::string> Manifest::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Manifest::require(const std::string& key) const {
  auto v = get(key);
  if (!v) throw InputError("manifest is missing `" + key + "`");
  return *v;
}

std::string Manifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir_) / p).lexically_normal().string();
}

std::size_t Manifest::num_layers() const {
  std::size_t n = 0;
  while (get("layer." + std::to_string(n) + ".edges")) ++n;
  return n;
}

std::vector<std::size_t> Manifest::k_per_layer() const {
  std::vector<std::size_t> ks;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    auto k = get("layer." + std::to_string(l) + ".k");
    if (!k) return {};
    ks.push_back(static_cast<std::size_t>(parse_index(*k, 0)));
  }
  return ks;
}

MultiHypergraph Manifest::load() const {
  std::size_t n = num_layers();
  if (n == 0) throw InputError("manifest lists no layers (layer.0.edges)");
  std::vector<HypergraphLayer> layers;
  for (std::size_t l = 0; l < n; ++l) {
    auto prefix = "layer." + std::to_string(l) + ".";
    std::optional<std::size_t> num_nodes;
    if (auto v = get(prefix + "num_nodes")) num_nodes = static_cast<std::size_t>(parse_index(*v, 0));
    auto layer = parse_hyperedge_file(resolve(require(prefix + "edges")), num_nodes);
    if (auto truth = get(prefix + "truth"))
      layer = layer.with_ground_truth(parse_ground_truth_file(resolve(*truth), layer.num_nodes()));
    layers.push_back(std::move(layer));
  }
  std::vector<InterEdgeSet> inter;
  if (auto path = get("inter_edges"); path && !path->empty()) inter = parse_inter_edge_file(resolve(*path));
  return MultiHypergraph(std::move(layers), std::move(inter));
}

std::string Manifest::to_string() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  return out.str();
}

void Manifest::write(const std::string& path) const { write_text(path, to_string()); }

Manifest write_multi_hypergraph(const std::string& dir, const MultiHypergraph& mh,
                                const std::vector<std::size_t>& k_per_layer) {
  std::filesystem::create_directories(dir);
  Manifest m = Manifest::parse("", dir);
  for (std::size_t l = 0; l < mh.num_layers(); ++l) {
    auto prefix = "layer." + std::to_string(l) + ".";
    auto edges = "layer" + std::to_string(l) + ".edges";
    write_hyperedge_file((std::filesystem::path(dir) / edges).string(), mh.layer(l));
    m.set(prefix + "edges", edges);
    m.set(prefix + "num_nodes", std::to_string(mh.layer(l).num_nodes()));
    if (mh.layer(l).has_ground_truth()) {
      auto truth = "layer" + std::to_string(l) + ".truth";
      write_ground_truth_file((std::filesystem::path(dir) / truth).string(), mh.layer(l).ground_truth());
      m.set(prefix + "truth", truth);
    }
    if (l < k_per_layer.size()) m.set(prefix + "k", std::to_string(k_per_layer[l]));
  }
  if (!mh.inter_edges().empty()) {
    write_inter_edge_file((std::filesystem::path(dir) / "inter.edges").string(), mh.inter_edges());
    m.set("inter_edges", "inter.edges");
  }
  m.write((std::filesystem::path(dir) / "manifest.cfg").string());
  return m;
}

}  // namespace mhsbm
