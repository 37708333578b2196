#include "evotrack/temporal_graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "evotrack/errors.hpp"
#include "json.hpp"

namespace evotrack {

NodeId NodeInterner::intern(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<NodeId>(tokens_.size());
  ids_.emplace(token, id);
  tokens_.push_back(token);
  return id;
}

std::optional<NodeId> NodeInterner::find(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& NodeInterner::token(NodeId id) const { return tokens_.at(id); }

void Snapshot::add_node(NodeId n) {
  if (adj_.emplace(n, std::vector<NodeId>{}).second) nodes_.push_back(n);
}

Snapshot::EdgeResult Snapshot::add_edge(NodeId u, NodeId v) {
  if (u == v) {
    add_node(u);
    return EdgeResult::self_loop;
  }
  add_node(u);
  add_node(v);
  auto& nu = adj_[u];
  if (std::find(nu.begin(), nu.end(), v) != nu.end()) return EdgeResult::duplicate;
  nu.push_back(v);
  adj_[v].push_back(u);
  ++edge_count_;
  return EdgeResult::added;
}

void Snapshot::finalize() {
  std::sort(nodes_.begin(), nodes_.end());
  for (auto& [n, nbrs] : adj_) std::sort(nbrs.begin(), nbrs.end());
  finalized_ = true;
}

bool Snapshot::has_node(NodeId n) const { return adj_.count(n) > 0; }

bool Snapshot::has_edge(NodeId u, NodeId v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), v);
}

const std::vector<NodeId>& Snapshot::neighbors(NodeId n) const {
  static const std::vector<NodeId> kEmpty;
  auto it = adj_.find(n);
  return it == adj_.end() ? kEmpty : it->second;
}

TemporalNetwork::TemporalNetwork(std::string name, std::vector<Snapshot> snapshots,
                                 NodeInterner interner)
    : name_(std::move(name)), snapshots_(std::move(snapshots)), interner_(std::move(interner)) {
  for (std::size_t i = 0; i < snapshots_.size(); ++i) {
    if (snapshots_[i].timestamp_index() != static_cast<int>(i) + 1)
      throw DataError("snapshot timestamp indices must run contiguously from 1");
  }
}

const Snapshot& TemporalNetwork::snapshot_at(int timestamp_index) const {
  if (timestamp_index < 1 || timestamp_index > snapshot_count())
    throw DataError("unknown timestamp " + std::to_string(timestamp_index));
  return snapshots_[static_cast<std::size_t>(timestamp_index) - 1];
}

namespace {

// Splits "t{}.edges" into prefix "t" and suffix ".edges".
std::pair<std::string, std::string> split_pattern(const std::string& pattern) {
  const auto pos = pattern.find("{}");
  if (pos == std::string::npos)
    throw ConfigError("snapshot pattern must contain '{}' for the ordinal: " + pattern);
  return {pattern.substr(0, pos), pattern.substr(pos + 2)};
}

std::optional<long> match_ordinal(const std::string& name, const std::string& prefix,
                                  const std::string& suffix) {
  if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) return std::nullopt;
  const std::string mid = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  if (mid.empty() || !std::all_of(mid.begin(), mid.end(), [](char c) { return std::isdigit(c); }))
    return std::nullopt;
  return std::stol(mid);
}

}  // namespace

TemporalNetwork load_snapshots(const std::filesystem::path& directory, const std::string& pattern,
                               LoadStats* stats) {
  const auto [prefix, suffix] = split_pattern(pattern);
  if (!std::filesystem::is_directory(directory))
    throw DataError("not a directory: " + directory.string());

  std::map<long, std::filesystem::path> by_ordinal;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    if (auto ord = match_ordinal(entry.path().filename().string(), prefix, suffix))
      by_ordinal[*ord] = entry.path();
  }
  if (by_ordinal.size() < 2)
    throw DataError("need at least 2 snapshot files matching '" + pattern + "' in " +
                    directory.string());
  long expected = by_ordinal.begin()->first;
  for (const auto& [ord, path] : by_ordinal) {
    if (ord != expected)
      throw DataError("gap at ordinal " + std::to_string(expected) + " in snapshot series");
    ++expected;
  }

  NodeInterner interner;
  std::vector<Snapshot> snapshots;
  LoadStats local;
  int t = 1;
  for (const auto& [ord, path] : by_ordinal) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Snapshot snap(t);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string a, b, extra;
      if (!(ls >> a)) continue;  // whitespace-only line
      if (!(ls >> b)) {
        snap.add_node(interner.intern(a));  // declared isolate
        continue;
      }
      if (ls >> extra)
        throw DataError("malformed line " + std::to_string(lineno) + " in " + path.string() +
                        ": expected at most two tokens");
      const NodeId ua = interner.intern(a);  // fixed interning order: left token first
      const NodeId ub = interner.intern(b);
      switch (snap.add_edge(ua, ub)) {
        case Snapshot::EdgeResult::self_loop:
          ++local.self_loops_dropped;
          break;
        case Snapshot::EdgeResult::duplicate:
          ++local.duplicate_edges_dropped;
          break;
        case Snapshot::EdgeResult::added:
          break;
      }
    }
    snap.finalize();
    local.files.push_back(path.filename().string());
    snapshots.push_back(std::move(snap));
    ++t;
  }
  if (stats) *stats = local;
  return TemporalNetwork(directory.filename().string(), std::move(snapshots), std::move(interner));
}

int degree_within(const std::vector<NodeId>& subgraph_nodes, const Snapshot& snapshot, NodeId n) {
  if (!std::binary_search(subgraph_nodes.begin(), subgraph_nodes.end(), n))
    throw std::invalid_argument("degree_within: node is not in the subgraph");
  int deg = 0;
  for (NodeId nbr : snapshot.neighbors(n))
    if (std::binary_search(subgraph_nodes.begin(), subgraph_nodes.end(), nbr)) ++deg;
  return deg;
}

std::string network_manifest_json(const TemporalNetwork& net, const LoadStats& stats) {
  nlohmann::ordered_json doc;
  doc["dataset"] = net.name();
  doc["snapshots"] = net.snapshot_count();
  doc["self-loops-dropped"] = stats.self_loops_dropped;
  doc["duplicate-edges-dropped"] = stats.duplicate_edges_dropped;
  auto& per = doc["per-snapshot"];
  per = nlohmann::ordered_json::array();
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    const auto& s = net.snapshot_at(t);
    nlohmann::ordered_json row;
    row["t"] = t;
    row["file"] = (static_cast<std::size_t>(t) <= stats.files.size())
                      ? stats.files[static_cast<std::size_t>(t) - 1]
                      : "";
    row["nodes"] = s.node_count();
    row["edges"] = s.edge_count();
    per.push_back(row);
  }
  return doc.dump(2) + "\n";
}

}  // namespace evotrack
