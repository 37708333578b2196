#include "evotrack/planted.hpp"

#include <algorithm>
#include <map>

#include "evotrack/errors.hpp"
#include "evotrack/rng.hpp"

namespace evotrack {

std::string planted_event_kind_name(PlantedEventKind k) {
  switch (k) {
    case PlantedEventKind::merge: return "merge";
    case PlantedEventKind::split: return "split";
    case PlantedEventKind::dissolve: return "dissolve";
  }
  return "?";
}

namespace {

struct ChainState {
  int index;
  std::vector<NodeId> members;  // sorted
  bool alive = true;
  bool stable = true;
};

}  // namespace

PlantedScenario generate_planted(const PlantedParams& params, std::uint64_t seed) {
  if (params.snapshots < 2) throw ConfigError("planted scenario needs at least 2 snapshots");
  if (params.chains < 1) throw ConfigError("planted scenario needs at least 1 chain");
  if (params.chain_size < 1) throw ConfigError("chain size must be positive");
  if (params.churn < 0.0 || params.churn > 1.0) throw ConfigError("churn must lie in [0,1]");
  for (const auto& ev : params.events) {
    if (ev.at < 2 || ev.at > params.snapshots)
      throw ConfigError("event timestamp " + std::to_string(ev.at) + " outside 2.." +
                        std::to_string(params.snapshots));
    const std::size_t expected = ev.kind == PlantedEventKind::merge ? 2 : 1;
    if (ev.chains.size() != expected)
      throw ConfigError(planted_event_kind_name(ev.kind) + " event needs " +
                        std::to_string(expected) + " chain index(es)");
    for (int c : ev.chains)
      if (c < 0 || c >= params.chains)
        throw ConfigError("event references unknown chain " + std::to_string(c));
  }

  Rng rng(seed);
  NodeInterner interner;
  NodeId next_node = 0;
  const auto fresh_node = [&] {
    const NodeId id = interner.intern("n" + std::to_string(next_node));
    ++next_node;
    return id;
  };

  std::vector<NodeId> retired;
  const auto replacement_node = [&]() -> NodeId {
    if (!retired.empty() && rng.uniform01() < params.node_reuse) {
      const auto i = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(retired.size()) - 1));
      const NodeId id = retired[i];
      retired[i] = retired.back();
      retired.pop_back();
      return id;
    }
    return fresh_node();
  };

  std::vector<ChainState> chains;
  std::vector<PlantedChain> truth_chains;
  for (int c = 0; c < params.chains; ++c) {
    ChainState st;
    st.index = c;
    for (int i = 0; i < params.chain_size; ++i) st.members.push_back(fresh_node());
    chains.push_back(std::move(st));
    truth_chains.push_back(PlantedChain{c, {}, true});
  }

  PlantedScenario scenario;
  std::vector<Snapshot> snapshots;

  // Pending truth events whose community ids resolve after the layer is built.
  struct Pending {
    PlantedEventKind kind;
    int at;
    std::vector<CommunityId> resolved;  // predecessor ids, known immediately
    std::vector<int> successors;        // chain indices to resolve at layer build
  };
  std::vector<Pending> pending;

  for (int t = 1; t <= params.snapshots; ++t) {
    if (t > 1) {
      // Drift: replace each member with probability churn.
      for (auto& chain : chains) {
        if (!chain.alive) continue;
        for (auto& member : chain.members) {
          if (rng.uniform01() < params.churn) {
            retired.push_back(member);
            member = replacement_node();
          }
        }
        std::sort(chain.members.begin(), chain.members.end());
      }
      // Scheduled events.
      for (const auto& ev : params.events) {
        if (ev.at != t) continue;
        const auto last_id = [&](int c) {
          const auto& rec = truth_chains[static_cast<std::size_t>(c)].members;
          if (rec.empty())
            throw ConfigError("chain " + std::to_string(c) + " has no community before t=" +
                              std::to_string(t));
          return rec.back();
        };
        switch (ev.kind) {
          case PlantedEventKind::dissolve: {
            ChainState& x = chains[static_cast<std::size_t>(ev.chains[0])];
            if (!x.alive) throw ConfigError("dissolve of a dead chain");
            x.alive = false;
            x.stable = false;
            retired.insert(retired.end(), x.members.begin(), x.members.end());
            pending.push_back(Pending{PlantedEventKind::dissolve, t, {last_id(x.index)}, {}});
            break;
          }
          case PlantedEventKind::merge: {
            ChainState& a = chains[static_cast<std::size_t>(ev.chains[0])];
            ChainState& b = chains[static_cast<std::size_t>(ev.chains[1])];
            if (!a.alive || !b.alive || a.index == b.index)
              throw ConfigError("merge needs two distinct live chains");
            Pending p{PlantedEventKind::merge, t, {last_id(a.index), last_id(b.index)}, {a.index}};
            a.members.insert(a.members.end(), b.members.begin(), b.members.end());
            std::sort(a.members.begin(), a.members.end());
            a.stable = false;
            b.alive = false;
            b.stable = false;
            b.members.clear();
            pending.push_back(std::move(p));
            break;
          }
          case PlantedEventKind::split: {
            ChainState& x = chains[static_cast<std::size_t>(ev.chains[0])];
            if (!x.alive) throw ConfigError("split of a dead chain");
            if (x.members.size() < 2) throw ConfigError("split of a singleton community");
            const std::size_t half = x.members.size() / 2;
            ChainState born;
            born.index = static_cast<int>(chains.size());
            born.stable = false;
            born.members.assign(x.members.begin() + static_cast<std::ptrdiff_t>(half),
                                x.members.end());
            x.members.resize(half);
            x.stable = false;
            Pending p{PlantedEventKind::split, t, {last_id(x.index)}, {x.index, born.index}};
            truth_chains.push_back(PlantedChain{born.index, {}, false});
            chains.push_back(std::move(born));
            pending.push_back(std::move(p));
            break;
          }
        }
      }
    }

    // Build the layer: live chains in index order, then noise.
    Snapshot snap(t);
    CommunityLayer layer;
    layer.timestamp_index = t;
    layer.overlapping = false;
    std::map<int, CommunityId> chain_community;  // chain index -> id at t
    int q = 0;
    const auto emit = [&](const std::vector<NodeId>& members, int chain_index) {
      const CommunityId id{t, ++q};
      layer.communities.push_back(Community{id, members});
      for (NodeId v : members) snap.add_node(v);
      for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) snap.add_edge(members[i], members[j]);
      if (chain_index >= 0) chain_community[chain_index] = id;
    };
    for (const auto& chain : chains)
      if (chain.alive) emit(chain.members, chain.index);
    for (int nidx = 0; nidx < params.noise_per_step; ++nidx) {
      std::vector<NodeId> members;
      for (int i = 0; i < params.noise_size; ++i) members.push_back(fresh_node());
      emit(members, -1);
    }
    snap.finalize();
    snapshots.push_back(std::move(snap));
    scenario.layers.push_back(std::move(layer));

    for (const auto& [chain_index, id] : chain_community)
      truth_chains[static_cast<std::size_t>(chain_index)].members.push_back(id);
    for (auto& p : pending) {
      if (p.at != t) continue;
      for (int c : p.successors) p.resolved.push_back(chain_community.at(c));
      scenario.events.push_back(GroundTruthEvent{p.kind, p.at, p.resolved});
    }
  }

  for (std::size_t c = 0; c < chains.size(); ++c)
    truth_chains[c].stable =
        chains[c].stable && chains[c].alive &&
        truth_chains[c].members.size() == static_cast<std::size_t>(params.snapshots);
  scenario.chains = std::move(truth_chains);
  scenario.network = TemporalNetwork("planted", std::move(snapshots), std::move(interner));
  return scenario;
}

}  // namespace evotrack
