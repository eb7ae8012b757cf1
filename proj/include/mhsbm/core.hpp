#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mhsbm {

using NodeId = std::uint32_t;
using LayerId = std::size_t;

/// Dense row-major matrix; rows are nodes (u) or communities (w).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (files, manifests, arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The model reached a state where the likelihood is undefined
/// (a zero rate on an observed interaction, a non-finite update).
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

struct Hyperedge {
  std::vector<NodeId> nodes;  // strictly increasing
  double weight = 1.0;

  std::size_t size() const { return nodes.size(); }
  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
};

/// Sorts and validates a node set; throws InputError on duplicates or size < 2.
Hyperedge make_hyperedge(std::vector<NodeId> nodes, double weight = 1.0);

class HypergraphLayer {
 public:
  HypergraphLayer() = default;

  /// Validates, merges duplicate node sets by weight summation and sorts
  /// hyperedges lexicographically by node set.
  HypergraphLayer(std::size_t num_nodes, std::vector<Hyperedge> hyperedges,
                  std::optional<std::vector<int>> ground_truth = std::nullopt);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Hyperedge>& hyperedges() const { return hyperedges_; }
  std::size_t num_hyperedges() const { return hyperedges_.size(); }
  std::size_t max_hyperedge_size() const;

  bool has_ground_truth() const { return ground_truth_.has_value(); }
  /// One label per node; -1 marks a node without a label.
  const std::vector<int>& ground_truth() const;

  /// Index of the hyperedge with exactly this node set, if present.
  std::optional<std::size_t> find(const std::vector<NodeId>& nodes) const;
  bool contains(const std::vector<NodeId>& nodes) const { return find(nodes).has_value(); }

  HypergraphLayer with_ground_truth(std::vector<int> labels) const;
  HypergraphLayer with_hyperedges(std::vector<Hyperedge> hyperedges) const;

  friend bool operator==(const HypergraphLayer&, const HypergraphLayer&) = default;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<Hyperedge> hyperedges_;
  std::optional<std::vector<int>> ground_truth_;
};

struct InterEdge {
  NodeId i = 0;  // node in layer_a
  NodeId j = 0;  // node in layer_b
  double weight = 1.0;
  friend bool operator==(const InterEdge&, const InterEdge&) = default;
};

/// Sparse S between two layers. Edges are sorted by (i, j) with unique pairs
/// and strictly positive weights.
struct InterEdgeSet {
  LayerId layer_a = 0;
  LayerId layer_b = 1;
  std::vector<InterEdge> edges;

  double total_weight() const;
  friend bool operator==(const InterEdgeSet&, const InterEdgeSet&) = default;
};

/// Sorts, merges duplicates and drops zero weights. Throws on negative
/// weights or when layer_a >= layer_b.
InterEdgeSet make_inter_edge_set(LayerId layer_a, LayerId layer_b, std::vector<InterEdge> edges);

class MultiHypergraph {
 public:
  MultiHypergraph() = default;
  MultiHypergraph(std::vector<HypergraphLayer> layers, std::vector<InterEdgeSet> inter_edges = {});

  std::size_t num_layers() const { return layers_.size(); }
  const HypergraphLayer& layer(LayerId l) const { return layers_.at(l); }
  const std::vector<HypergraphLayer>& layers() const { return layers_; }
  const std::vector<InterEdgeSet>& inter_edges() const { return inter_edges_; }
  std::size_t total_inter_edges() const;

  MultiHypergraph with_layer(LayerId l, HypergraphLayer layer) const;
  MultiHypergraph with_inter_edges(std::vector<InterEdgeSet> inter_edges) const;

  friend bool operator==(const MultiHypergraph&, const MultiHypergraph&) = default;

 private:
  std::vector<HypergraphLayer> layers_;
  std::vector<InterEdgeSet> inter_edges_;
};

// ---------------------------------------------------------------------------
// File formats

/// `weight id id ...` per line, `#` comments. num_nodes defaults to 1 + max id.
HypergraphLayer parse_hyperedge_file(const std::string& path,
                                     std::optional<std::size_t> num_nodes = std::nullopt);
HypergraphLayer parse_hyperedges(const std::string& text,
                                 std::optional<std::size_t> num_nodes = std::nullopt);
void write_hyperedge_file(const std::string& path, const HypergraphLayer& layer);

/// `layer_a layer_b i j weight` per line; pairs normalized to layer_a < layer_b.
std::vector<InterEdgeSet> parse_inter_edge_file(const std::string& path);
std::vector<InterEdgeSet> parse_inter_edges(const std::string& text);
void write_inter_edge_file(const std::string& path, const std::vector<InterEdgeSet>& sets);

/// `node_id community_id` per line. Unlisted nodes get label -1.
std::vector<int> parse_ground_truth_file(const std::string& path, std::size_t num_nodes);
void write_ground_truth_file(const std::string& path, const std::vector<int>& labels);

/// CSV with 17 significant digits, one row per line.
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(const std::string& path);

/// Flat `key = value` manifest:
///   layer.<l>.edges = path, layer.<l>.truth = path, layer.<l>.k = K,
///   layer.<l>.num_nodes = N, inter_edges = path, plus free-form keys.
/// Relative paths resolve against the manifest's directory.
class Manifest {
 public:
  static Manifest parse_file(const std::string& path);
  static Manifest parse(const std::string& text, const std::string& base_dir = ".");

  std::optional<std::string> get(const std::string& key) const;
  std::string require(const std::string& key) const;
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::size_t num_layers() const;
  /// layer.<l>.k for every layer, empty if any is missing.
  std::vector<std::size_t> k_per_layer() const;
  MultiHypergraph load() const;
  std::string resolve(const std::string& path) const;

  std::string to_string() const;
  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> entries_;
  std::string base_dir_ = ".";
};

/// Writes every layer, inter-edge set and ground truth of `mh` into `dir`
/// and returns the manifest describing them.
Manifest write_multi_hypergraph(const std::string& dir, const MultiHypergraph& mh,
                                const std::vector<std::size_t>& k_per_layer = {});

}  // namespace mhsbm
