#include "evotrack/detection.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "evotrack/errors.hpp"

namespace evotrack {

std::string to_string(const CommunityId& id) {
  return "t" + std::to_string(id.t) + ":q" + std::to_string(id.q);
}

namespace {

// ---------------------------------------------------------------------------
// k-clique percolation
// ---------------------------------------------------------------------------

// Bitset adjacency over dense node indices.
class BitMatrix {
 public:
  BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), rows_(n * words_, 0) {}

  void set(std::size_t i, std::size_t j) {
    rows_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }
  bool get(std::size_t i, std::size_t j) const {
    return (rows_[i * words_ + j / 64] >> (j % 64)) & 1;
  }
  const std::uint64_t* row(std::size_t i) const { return rows_.data() + i * words_; }
  std::size_t words() const { return words_; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_, words_;
  std::vector<std::uint64_t> rows_;
};

using Bits = std::vector<std::uint64_t>;

int popcount_and(const Bits& a, const std::uint64_t* b, std::size_t words) {
  int c = 0;
  for (std::size_t w = 0; w < words; ++w) c += __builtin_popcountll(a[w] & b[w]);
  return c;
}

bool bits_empty(const Bits& a) {
  for (auto w : a)
    if (w) return false;
  return true;
}

// Bron-Kerbosch with pivoting; emits maximal cliques as sorted index lists
// in a deterministic order.
void bron_kerbosch(const BitMatrix& adj, Bits& r, Bits p, Bits x, std::vector<int>& r_list,
                   std::vector<std::vector<int>>& out) {
  if (bits_empty(p) && bits_empty(x)) {
    out.push_back(r_list);
    return;
  }
  const std::size_t words = adj.words();
  // Pivot: vertex of P union X with most neighbors in P.
  int pivot = -1, best = -1;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t both = p[w] | x[w];
    while (both) {
      const int v = static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(both)));
      both &= both - 1;
      const int cnt = popcount_and(p, adj.row(static_cast<std::size_t>(v)), words);
      if (cnt > best) {
        best = cnt;
        pivot = v;
      }
    }
  }
  Bits candidates = p;
  if (pivot >= 0) {
    const std::uint64_t* pr = adj.row(static_cast<std::size_t>(pivot));
    for (std::size_t w = 0; w < words; ++w) candidates[w] &= ~pr[w];
  }
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t cand = candidates[w];
    while (cand) {
      const int v = static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(cand)));
      cand &= cand - 1;
      const std::uint64_t* nv = adj.row(static_cast<std::size_t>(v));
      Bits p2(words), x2(words);
      for (std::size_t k = 0; k < words; ++k) {
        p2[k] = p[k] & nv[k];
        x2[k] = x[k] & nv[k];
      }
      r[w] |= std::uint64_t{1} << (v % 64);
      r_list.push_back(v);
      bron_kerbosch(adj, r, std::move(p2), std::move(x2), r_list, out);
      r_list.pop_back();
      r[w] &= ~(std::uint64_t{1} << (v % 64));
      p[w] &= ~(std::uint64_t{1} << (v % 64));
      x[w] |= std::uint64_t{1} << (v % 64);
    }
  }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

int sorted_intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  int c = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else {
      ++c;
      ++ia;
      ++ib;
    }
  }
  return c;
}

}  // namespace

CommunityLayer detect_cpm(const Snapshot& snapshot, int k) {
  if (k < 3) throw ConfigError("CPM requires clique size k >= 3");
  CommunityLayer layer;
  layer.timestamp_index = snapshot.timestamp_index();
  layer.overlapping = true;

  const auto& nodes = snapshot.nodes();  // sorted
  const std::size_t n = nodes.size();
  if (n == 0) return layer;

  BitMatrix adj(n);
  std::unordered_map<NodeId, int> dense;
  dense.reserve(n);
  for (std::size_t i = 0; i < n; ++i) dense[nodes[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < n; ++i)
    for (NodeId nbr : snapshot.neighbors(nodes[i])) adj.set(i, static_cast<std::size_t>(dense[nbr]));

  const std::size_t words = adj.words();
  Bits r(words, 0), p(words, 0), x(words, 0);
  for (std::size_t i = 0; i < n; ++i) p[i / 64] |= std::uint64_t{1} << (i % 64);
  std::vector<int> r_list;
  std::vector<std::vector<int>> maximal;
  bron_kerbosch(adj, r, std::move(p), std::move(x), r_list, maximal);

  // Two maximal cliques of size >= k whose overlap has >= k-1 nodes carry the
  // same percolation component as the k-cliques inside them.
  std::vector<std::vector<int>> cliques;
  for (auto& c : maximal)
    if (static_cast<int>(c.size()) >= k) {
      std::sort(c.begin(), c.end());
      cliques.push_back(std::move(c));
    }
  if (cliques.empty()) return layer;

  std::vector<std::vector<int>> node_cliques(n);
  for (std::size_t ci = 0; ci < cliques.size(); ++ci)
    for (int v : cliques[ci]) node_cliques[static_cast<std::size_t>(v)].push_back(static_cast<int>(ci));

  UnionFind uf(cliques.size());
  std::set<std::pair<int, int>> checked;
  for (const auto& list : node_cliques) {
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const auto key = std::make_pair(list[a], list[b]);
        if (!checked.insert(key).second) continue;
        if (sorted_intersection_size(cliques[static_cast<std::size_t>(key.first)],
                                     cliques[static_cast<std::size_t>(key.second)]) >= k - 1)
          uf.unite(key.first, key.second);
      }
  }

  std::map<int, std::set<int>> component_nodes;
  for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
    auto& dst = component_nodes[uf.find(static_cast<int>(ci))];
    dst.insert(cliques[ci].begin(), cliques[ci].end());
  }

  std::vector<std::vector<NodeId>> member_sets;
  for (const auto& [root, idxs] : component_nodes) {
    std::vector<NodeId> members;
    members.reserve(idxs.size());
    for (int i : idxs) members.push_back(nodes[static_cast<std::size_t>(i)]);
    member_sets.push_back(std::move(members));
  }
  std::sort(member_sets.begin(), member_sets.end());
  for (std::size_t q = 0; q < member_sets.size(); ++q)
    layer.communities.push_back(
        Community{CommunityId{layer.timestamp_index, static_cast<int>(q) + 1},
                  std::move(member_sets[q])});
  return layer;
}

// ---------------------------------------------------------------------------
// Greedy modularity (Louvain-style local moves + coarsening)
// ---------------------------------------------------------------------------

namespace {

struct LevelGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
  std::vector<double> self_loop;  // counts once in total weight, twice in strength
  std::vector<double> strength;
  double total_weight = 0.0;
};

// One sweep-until-stable pass of local moves. Returns true if any strictly
// improving move happened. `node_comm` holds community labels on entry/exit.
bool one_level(const LevelGraph& g, std::vector<int>& node_comm) {
  const double W = g.total_weight;
  std::vector<double> comm_tot(g.n, 0.0);
  for (std::size_t i = 0; i < g.n; ++i)
    comm_tot[static_cast<std::size_t>(node_comm[i])] += g.strength[i];

  bool improved_any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i < g.n; ++i) {
      const int old_comm = node_comm[i];
      // Weight from i to each neighboring community.
      std::map<int, double> links;
      links[old_comm] += 0.0;
      for (const auto& [j, w] : g.adj[i]) links[node_comm[static_cast<std::size_t>(j)]] += w;

      comm_tot[static_cast<std::size_t>(old_comm)] -= g.strength[i];
      int best_comm = old_comm;
      double best_gain = links[old_comm] / W -
                         comm_tot[static_cast<std::size_t>(old_comm)] * g.strength[i] / (2.0 * W * W);
      for (const auto& [c, w_ic] : links) {
        if (c == old_comm) continue;
        const double gain =
            w_ic / W - comm_tot[static_cast<std::size_t>(c)] * g.strength[i] / (2.0 * W * W);
        if (gain > best_gain + 1e-12 || (std::abs(gain - best_gain) <= 1e-12 && c < best_comm)) {
          // Equal-gain candidates keep the lower community label; only a
          // strict improvement counts as progress.
          if (gain > best_gain + 1e-12 || best_comm != old_comm) {
            best_comm = c;
            best_gain = std::max(best_gain, gain);
          }
        }
      }
      comm_tot[static_cast<std::size_t>(best_comm)] += g.strength[i];
      if (best_comm != old_comm) {
        node_comm[i] = best_comm;
        moved = true;
        improved_any = true;
      }
    }
  }
  return improved_any;
}

// Renumbers labels to 0..C-1 preserving ascending label order.
int compact_labels(std::vector<int>& labels) {
  std::map<int, int> remap;
  for (int l : labels) remap.emplace(l, 0);
  int next = 0;
  for (auto& [old_label, fresh] : remap) fresh = next++;
  for (int& l : labels) l = remap[l];
  return next;
}

LevelGraph coarsen(const LevelGraph& g, const std::vector<int>& node_comm, int n_comms) {
  LevelGraph out;
  out.n = static_cast<std::size_t>(n_comms);
  out.adj.resize(out.n);
  out.self_loop.assign(out.n, 0.0);
  out.strength.assign(out.n, 0.0);
  out.total_weight = g.total_weight;

  std::map<std::pair<int, int>, double> agg;
  for (std::size_t i = 0; i < g.n; ++i) {
    const int ci = node_comm[i];
    out.self_loop[static_cast<std::size_t>(ci)] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (static_cast<std::size_t>(j) < i) continue;  // each undirected edge once
      const int cj = node_comm[static_cast<std::size_t>(j)];
      if (ci == cj)
        out.self_loop[static_cast<std::size_t>(ci)] += w;
      else
        agg[{std::min(ci, cj), std::max(ci, cj)}] += w;
    }
  }
  for (const auto& [key, w] : agg) {
    out.adj[static_cast<std::size_t>(key.first)].push_back({key.second, w});
    out.adj[static_cast<std::size_t>(key.second)].push_back({key.first, w});
  }
  for (std::size_t i = 0; i < out.n; ++i) {
    double s = 2.0 * out.self_loop[i];
    for (const auto& [j, w] : out.adj[i]) s += w;
    out.strength[i] = s;
  }
  return out;
}

}  // namespace

CommunityLayer detect_modularity(const Snapshot& snapshot) {
  CommunityLayer layer;
  layer.timestamp_index = snapshot.timestamp_index();
  layer.overlapping = false;

  const auto& nodes = snapshot.nodes();
  const std::size_t n = nodes.size();
  if (n == 0) return layer;

  std::unordered_map<NodeId, int> dense;
  dense.reserve(n);
  for (std::size_t i = 0; i < n; ++i) dense[nodes[i]] = static_cast<int>(i);

  std::vector<std::vector<NodeId>> member_sets;
  if (snapshot.edge_count() == 0) {
    // No merge can gain anything without edges: all singletons.
    for (NodeId v : nodes) member_sets.push_back({v});
  } else {
    LevelGraph g;
    g.n = n;
    g.adj.resize(n);
    g.self_loop.assign(n, 0.0);
    g.strength.assign(n, 0.0);
    g.total_weight = static_cast<double>(snapshot.edge_count());
    for (std::size_t i = 0; i < n; ++i) {
      for (NodeId nbr : snapshot.neighbors(nodes[i]))
        g.adj[i].push_back({dense[nbr], 1.0});
      g.strength[i] = static_cast<double>(g.adj[i].size());
    }

    // flat_comm[v] = community of original node v at the current level
    std::vector<int> flat_comm(n);
    std::iota(flat_comm.begin(), flat_comm.end(), 0);
    while (true) {
      std::vector<int> node_comm(g.n);
      std::iota(node_comm.begin(), node_comm.end(), 0);
      const bool improved = one_level(g, node_comm);
      if (!improved) break;
      const int n_comms = compact_labels(node_comm);
      for (std::size_t v = 0; v < n; ++v)
        flat_comm[v] = node_comm[static_cast<std::size_t>(flat_comm[v])];
      if (static_cast<std::size_t>(n_comms) == g.n) break;
      g = coarsen(g, node_comm, n_comms);
    }

    std::map<int, std::vector<NodeId>> groups;
    for (std::size_t v = 0; v < n; ++v) groups[flat_comm[v]].push_back(nodes[v]);
    for (auto& [c, members] : groups) member_sets.push_back(std::move(members));
  }

  std::sort(member_sets.begin(), member_sets.end());
  for (std::size_t q = 0; q < member_sets.size(); ++q)
    layer.communities.push_back(
        Community{CommunityId{layer.timestamp_index, static_cast<int>(q) + 1},
                  std::move(member_sets[q])});
  return layer;
}

double modularity(const Snapshot& snapshot, const std::vector<std::vector<NodeId>>& partition) {
  const double m = static_cast<double>(snapshot.edge_count());
  if (m == 0.0) return 0.0;
  double q = 0.0;
  for (const auto& part : partition) {
    std::vector<NodeId> sorted = part;
    std::sort(sorted.begin(), sorted.end());
    double internal = 0.0;  // each intra edge counted twice below
    double degree_sum = 0.0;
    for (NodeId v : sorted) {
      degree_sum += static_cast<double>(snapshot.neighbors(v).size());
      for (NodeId nbr : snapshot.neighbors(v))
        if (std::binary_search(sorted.begin(), sorted.end(), nbr)) internal += 1.0;
    }
    q += internal / (2.0 * m) - (degree_sum / (2.0 * m)) * (degree_sum / (2.0 * m));
  }
  return q;
}

// ---------------------------------------------------------------------------
// External community files
// ---------------------------------------------------------------------------

std::vector<CommunityLayer> load_communities(const std::filesystem::path& path,
                                             const TemporalNetwork& net) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<CommunityLayer> layers;
  layers.reserve(static_cast<std::size_t>(net.snapshot_count()));
  for (int t = 1; t <= net.snapshot_count(); ++t)
    layers.push_back(CommunityLayer{t, {}, false});

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head.rfind("t=", 0) != 0)
      throw DataError("line " + std::to_string(lineno) + " in " + path.string() +
                      ": expected 't=<ordinal>'");
    int t = 0;
    try {
      t = std::stoi(head.substr(2));
    } catch (const std::exception&) {
      throw DataError("line " + std::to_string(lineno) + " in " + path.string() +
                      ": bad ordinal '" + head + "'");
    }
    if (t < 1 || t > net.snapshot_count())
      throw DataError("unknown timestamp " + std::to_string(t) + " at line " +
                      std::to_string(lineno) + " in " + path.string());
    const Snapshot& snap = net.snapshot_at(t);
    std::vector<NodeId> members;
    std::string tok;
    while (ls >> tok) {
      const auto id = net.interner().find(tok);
      if (!id || !snap.has_node(*id))
        throw DataError("node '" + tok + "' is not present at timestamp " + std::to_string(t));
      members.push_back(*id);
    }
    if (members.empty())
      throw DataError("empty community at line " + std::to_string(lineno) + " in " + path.string());
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    auto& layer = layers[static_cast<std::size_t>(t) - 1];
    layer.communities.push_back(
        Community{CommunityId{t, static_cast<int>(layer.communities.size()) + 1},
                  std::move(members)});
  }

  for (auto& layer : layers) {
    std::unordered_map<NodeId, int> seen;
    layer.overlapping = false;
    for (const auto& c : layer.communities)
      for (NodeId v : c.members)
        if (++seen[v] > 1) layer.overlapping = true;
  }
  return layers;
}

void write_communities(const std::vector<CommunityLayer>& layers, const TemporalNetwork& net,
                       std::ostream& out) {
  for (const auto& layer : layers)
    for (const auto& c : layer.communities) {
      out << "t=" << layer.timestamp_index;
      for (NodeId v : c.members) out << ' ' << net.interner().token(v);
      out << '\n';
    }
}

LayerStats layer_stats(const std::vector<CommunityLayer>& layers) {
  LayerStats stats;
  if (layers.empty()) return stats;
  std::size_t total_communities = 0, total_members = 0;
  for (const auto& layer : layers) {
    total_communities += layer.communities.size();
    for (const auto& c : layer.communities) total_members += c.size();
  }
  stats.avg_communities = static_cast<double>(total_communities) / static_cast<double>(layers.size());
  stats.avg_size = total_communities == 0
                       ? 0.0
                       : static_cast<double>(total_members) / static_cast<double>(total_communities);
  return stats;
}

}  // namespace evotrack
