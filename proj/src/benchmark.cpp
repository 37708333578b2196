#include "evotrack/benchmark.hpp"

#include <algorithm>
#include <set>

namespace evotrack {

std::vector<ChainRecovery> chain_recovery(const PlantedScenario& scenario,
                                          const std::vector<EvolvingSequence>& sequences,
                                          double recovered_fraction) {
  std::vector<ChainRecovery> out;
  for (const auto& chain : scenario.chains) {
    ChainRecovery rec;
    rec.chain_index = chain.chain_index;
    rec.stable = chain.stable;
    rec.length = static_cast<int>(chain.members.size());
    const std::set<CommunityId> truth(chain.members.begin(), chain.members.end());
    for (const auto& seq : sequences) {
      std::size_t hits = 0;
      for (const auto& m : seq.members)
        if (truth.count(m)) ++hits;
      rec.best_overlap = std::max(
          rec.best_overlap, static_cast<double>(hits) / static_cast<double>(truth.size()));
    }
    rec.recovered = rec.best_overlap >= recovered_fraction;
    out.push_back(rec);
  }
  return out;
}

namespace {

EventKind to_event_kind(PlantedEventKind k) {
  switch (k) {
    case PlantedEventKind::merge: return EventKind::merge;
    case PlantedEventKind::split: return EventKind::split;
    case PlantedEventKind::dissolve: return EventKind::dissolve;
  }
  return EventKind::dissolve;
}

}  // namespace

std::vector<EventRecovery> event_recovery(const PlantedScenario& scenario,
                                          const std::vector<Event>& events) {
  std::vector<EventRecovery> out;
  for (const auto& truth : scenario.events) {
    EventRecovery rec;
    rec.truth = truth;
    const EventKind want = to_event_kind(truth.kind);
    for (const auto& ev : events) {
      if (ev.kind != want) continue;
      const std::set<CommunityId> have(ev.participants.begin(), ev.participants.end());
      bool all = true;
      for (const auto& p : truth.participants)
        if (!have.count(p)) {
          all = false;
          break;
        }
      if (all) {
        rec.recovered = true;
        break;
      }
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace evotrack
