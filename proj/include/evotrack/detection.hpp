#pragma once

#include <filesystem>
#include <iosfwd>
#include <tuple>
#include <vector>

#include "evotrack/temporal_graph.hpp"

namespace evotrack {

/// Globally unique community identifier: timestamp plus per-layer ordinal,
/// both 1-based.
struct CommunityId {
  int t = 0;
  int q = 0;

  friend bool operator==(const CommunityId& a, const CommunityId& b) {
    return a.t == b.t && a.q == b.q;
  }
  friend bool operator!=(const CommunityId& a, const CommunityId& b) { return !(a == b); }
  friend bool operator<(const CommunityId& a, const CommunityId& b) {
    return std::tie(a.t, a.q) < std::tie(b.t, b.q);
  }
};

std::string to_string(const CommunityId& id);  // "t3:q2"

struct Community {
  CommunityId id;
  std::vector<NodeId> members;  // sorted, nonempty

  std::size_t size() const { return members.size(); }
};

/// All communities detected at one timestamp. Ordinals are 1..communities.size()
/// in storage order. `overlapping` is false only when member sets are pairwise
/// disjoint.
struct CommunityLayer {
  int timestamp_index = 0;
  std::vector<Community> communities;
  bool overlapping = false;

  const Community& community(int q) const { return communities.at(static_cast<std::size_t>(q) - 1); }
};

/// k-clique percolation: communities are unions of k-cliques chained through
/// (k-1)-node overlaps. Overlapping output; nodes in no k-clique are left out.
/// Requires k >= 3. Deterministic: communities ordered by their sorted member
/// lists.
CommunityLayer detect_cpm(const Snapshot& snapshot, int k);

/// Greedy modularity optimization (local node moves plus coarsening until no
/// gain). Produces a disjoint partition of all snapshot nodes. Deterministic:
/// nodes are swept in ascending id order and equal-gain moves prefer the lower
/// community label.
CommunityLayer detect_modularity(const Snapshot& snapshot);

/// Modularity of a disjoint partition of the snapshot's nodes.
double modularity(const Snapshot& snapshot, const std::vector<std::vector<NodeId>>& partition);

/// Reads `t=<ordinal> <token> <token> ...` lines, one community per line.
/// Returns one layer per network timestamp (empty layers allowed). The
/// overlapping flag is inferred per layer. Unknown tokens or timestamps are
/// data errors.
std::vector<CommunityLayer> load_communities(const std::filesystem::path& path,
                                             const TemporalNetwork& net);

/// Inverse of load_communities; detection output round-trips through it.
void write_communities(const std::vector<CommunityLayer>& layers, const TemporalNetwork& net,
                       std::ostream& out);

/// Per-layer averages mirroring the usual #avg_com / #com_size dataset tables.
struct LayerStats {
  double avg_communities = 0.0;
  double avg_size = 0.0;
};
LayerStats layer_stats(const std::vector<CommunityLayer>& layers);

}  // namespace evotrack
