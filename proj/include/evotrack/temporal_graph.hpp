#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace evotrack {

using NodeId = std::uint32_t;

/// Maps external node tokens to dense ids. Interning order is first-seen
/// order, so reloading the same files yields identical ids.
class NodeInterner {
 public:
  NodeId intern(const std::string& token);
  std::optional<NodeId> find(const std::string& token) const;
  const std::string& token(NodeId id) const;
  std::size_t size() const { return tokens_.size(); }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> tokens_;
};

/// One static, undirected, unweighted graph of the series. Immutable once
/// finalized; safe for shared concurrent reads.
class Snapshot {
 public:
  enum class EdgeResult { added, self_loop, duplicate };

  explicit Snapshot(int timestamp_index) : t_(timestamp_index) {}

  int timestamp_index() const { return t_; }
  void add_node(NodeId n);
  EdgeResult add_edge(NodeId u, NodeId v);
  /// Sorts node and adjacency lists; call once after construction.
  void finalize();

  const std::vector<NodeId>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool has_node(NodeId n) const;
  bool has_edge(NodeId u, NodeId v) const;
  /// Sorted neighbor list; empty for unknown nodes.
  const std::vector<NodeId>& neighbors(NodeId n) const;

 private:
  int t_;
  std::vector<NodeId> nodes_;
  std::unordered_map<NodeId, std::vector<NodeId>> adj_;
  std::size_t edge_count_ = 0;
  bool finalized_ = false;
};

/// Ordered series of snapshots sharing one node universe.
/// timestamp_index runs contiguously from 1 to snapshot_count().
class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  TemporalNetwork(std::string name, std::vector<Snapshot> snapshots, NodeInterner interner);

  const std::string& name() const { return name_; }
  int snapshot_count() const { return static_cast<int>(snapshots_.size()); }
  const Snapshot& snapshot_at(int timestamp_index) const;
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const NodeInterner& interner() const { return interner_; }

 private:
  std::string name_;
  std::vector<Snapshot> snapshots_;
  NodeInterner interner_;
};

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_dropped = 0;
  std::vector<std::string> files;  // in timestamp order
};

/// Loads `<prefix><ordinal><suffix>` edge files from a directory; the pattern
/// marks the ordinal position with "{}", e.g. "t{}.edges". File ordinals must
/// be consecutive integers; snapshots are re-indexed 1..m in ordinal order.
///
/// File format: one whitespace-separated undirected edge per line; a single
/// token declares an isolated node; lines starting with '#' are ignored.
/// Self-loops and duplicate edges are dropped and counted in `stats`.
TemporalNetwork load_snapshots(const std::filesystem::path& directory, const std::string& pattern,
                               LoadStats* stats = nullptr);

/// Number of neighbors of `n` inside `subgraph_nodes` (sorted). Throws if
/// `n` is not a member of the subgraph.
int degree_within(const std::vector<NodeId>& subgraph_nodes, const Snapshot& snapshot, NodeId n);

/// Sidecar provenance manifest (JSON text): file names plus node/edge counts
/// per snapshot.
std::string network_manifest_json(const TemporalNetwork& net, const LoadStats& stats);

}  // namespace evotrack
