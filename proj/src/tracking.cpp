#include "evotrack/tracking.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "evotrack/errors.hpp"
#include "json.hpp"

namespace evotrack {

std::string method_name(TrackMethod m) {
  switch (m) {
    case TrackMethod::greene: return "greene";
    case TrackMethod::takaffoli: return "takaffoli";
    case TrackMethod::ged: return "ged";
    case TrackMethod::tajeuna: return "tajeuna";
  }
  return "?";
}

TrackMethod method_from_name(const std::string& name) {
  if (name == "greene") return TrackMethod::greene;
  if (name == "takaffoli") return TrackMethod::takaffoli;
  if (name == "ged") return TrackMethod::ged;
  if (name == "tajeuna") return TrackMethod::tajeuna;
  throw ConfigError("unknown tracking method '" + name + "'");
}

Measure method_measure(TrackMethod m) {
  switch (m) {
    case TrackMethod::greene: return Measure::jaccard;
    case TrackMethod::takaffoli: return Measure::modec;
    case TrackMethod::ged: return Measure::inclusion;
    case TrackMethod::tajeuna: return Measure::mutual;
  }
  return Measure::jaccard;
}

namespace {

struct Candidate {
  double score;
  CommunityId id;
};

// Best candidate = highest score; ties go to the lower ordinal. Candidates
// arrive in ascending ordinal order, so a strict comparison suffices.
const Candidate* best_candidate(const std::vector<Candidate>& candidates) {
  const Candidate* best = nullptr;
  for (const auto& c : candidates)
    if (!best || c.score > best->score) best = &c;
  return best;
}

struct ActiveState {
  std::size_t seq_index;
  int misses = 0;
  bool open = true;
};

// Shared stepwise engine for the three front-matching methods. `patience` is
// the number of consecutive unmatched timestamps a front survives
// (1 = consecutive-only, INT_MAX = unbounded horizon).
template <typename MatchFn>
std::vector<EvolvingSequence> track_fronts(const std::vector<CommunityLayer>& layers,
                                           TrackMethod method, int patience, MatchFn&& match) {
  std::vector<EvolvingSequence> seqs;
  std::vector<ActiveState> active;

  auto start_sequence = [&](const CommunityId& origin) {
    EvolvingSequence s;
    s.method = method;
    s.members.push_back(origin);
    active.push_back(ActiveState{seqs.size()});
    seqs.push_back(std::move(s));
  };

  if (layers.empty()) return seqs;
  for (const auto& c : layers.front().communities) start_sequence(c.id);

  for (std::size_t li = 1; li < layers.size(); ++li) {
    const CommunityLayer& layer = layers[li];
    const int t = layer.timestamp_index;
    std::set<CommunityId> appended;
    for (auto& st : active) {
      if (!st.open) continue;
      EvolvingSequence& seq = seqs[st.seq_index];
      const CommunityId front = seq.members.back();
      std::vector<Candidate> candidates;
      for (const auto& x : layer.communities) {
        if (auto score = match(front, x.id)) candidates.push_back({*score, x.id});
      }
      if (candidates.empty()) {
        if (++st.misses >= patience) {
          st.open = false;
          seq.status = SequenceStatus::dissolved;
          seq.dissolved_at = t;
        }
        continue;
      }
      const Candidate* best = best_candidate(candidates);
      MatchRecord rec;
      rec.t = t;
      rec.chosen = best->id;
      for (const auto& c : candidates) rec.over_threshold.push_back(c.id);
      seq.members.push_back(best->id);
      seq.matches.push_back(std::move(rec));
      st.misses = 0;
      appended.insert(best->id);
    }
    for (const auto& c : layer.communities)
      if (!appended.count(c.id)) start_sequence(c.id);
  }
  return seqs;
}

}  // namespace

std::vector<EvolvingSequence> track_greene(const std::vector<CommunityLayer>& layers,
                                           const SimilarityMatrix& jaccard_matrix,
                                           const TrackerConfig& config) {
  if (config.dissolve_patience < 3)
    throw ConfigError("dissolve patience d must be greater than 2");
  const double theta = config.jaccard_threshold;
  return track_fronts(layers, TrackMethod::greene, config.dissolve_patience,
                      [&](const CommunityId& front, const CommunityId& cand) -> std::optional<double> {
                        const double s = jaccard_matrix.at(front, cand);
                        if (s >= theta) return s;
                        return std::nullopt;
                      });
}

std::vector<EvolvingSequence> track_takaffoli(const std::vector<CommunityLayer>& layers,
                                              const SimilarityMatrix& modec_matrix,
                                              const TrackerConfig& config) {
  const double k = config.modec_threshold;
  auto seqs = track_fronts(layers, TrackMethod::takaffoli, std::numeric_limits<int>::max(),
                           [&](const CommunityId& front, const CommunityId& cand) -> std::optional<double> {
                             const double s = modec_matrix.at(front, cand);
                             if (s >= k) return s;
                             return std::nullopt;
                           });
  // Unbounded horizon: a chain only counts as dissolved once the series ends
  // without any further observation.
  const int last_t = layers.empty() ? 0 : layers.back().timestamp_index;
  for (auto& s : seqs) {
    if (s.members.back().t < last_t) {
      s.status = SequenceStatus::dissolved;
      s.dissolved_at = last_t;
    }
  }
  return seqs;
}

std::vector<EvolvingSequence> track_ged(const std::vector<CommunityLayer>& layers,
                                        const SimilarityMatrix& inclusion_matrix,
                                        const TrackerConfig& config) {
  const double fwd = config.inclusion_forward;
  const double bwd = config.inclusion_backward;
  return track_fronts(layers, TrackMethod::ged, 1,
                      [&](const CommunityId& front, const CommunityId& cand) -> std::optional<double> {
                        const double fi = inclusion_matrix.at(front, cand);
                        const double bi = inclusion_matrix.at(cand, front);
                        if (fi >= fwd && bi >= bwd) return 0.5 * (fi + bi);
                        return std::nullopt;
                      });
}

std::vector<EvolvingSequence> track_tajeuna(const std::vector<CommunityLayer>& layers,
                                            const TransitionVectorSet& vectors,
                                            const TrackerConfig& config) {
  const double lambda = config.mutual_threshold;
  std::vector<EvolvingSequence> seqs;
  std::set<CommunityId> claimed;
  const int last_t = layers.empty() ? 0 : layers.back().timestamp_index;

  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (const auto& origin : layers[li].communities) {
      if (claimed.count(origin.id)) continue;
      EvolvingSequence seq;
      seq.method = TrackMethod::tajeuna;
      seq.members.push_back(origin.id);
      const TransitionProbabilityVector& v_origin = vectors.for_community(origin.id);

      for (std::size_t lj = li + 1; lj < layers.size(); ++lj) {
        const CommunityLayer& layer = layers[lj];
        std::vector<Candidate> candidates;
        for (const auto& x : layer.communities) {
          const double s = mutual_raw(v_origin, vectors.for_community(x.id));
          if (s > lambda) candidates.push_back({s, x.id});
        }
        if (candidates.empty()) continue;
        const Candidate* best = best_candidate(candidates);
        MatchRecord rec;
        rec.t = layer.timestamp_index;
        rec.chosen = best->id;
        for (const auto& c : candidates) rec.over_threshold.push_back(c.id);
        seq.members.push_back(best->id);
        seq.matches.push_back(std::move(rec));
        claimed.insert(best->id);
      }
      if (seq.members.back().t < last_t) {
        seq.status = SequenceStatus::dissolved;
        seq.dissolved_at = last_t;
      }
      claimed.insert(origin.id);
      seqs.push_back(std::move(seq));
    }
  }
  return seqs;
}

// ---------------------------------------------------------------------------
// Critical events
// ---------------------------------------------------------------------------

std::string event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::form: return "form";
    case EventKind::dissolve: return "dissolve";
    case EventKind::grow: return "grow";
    case EventKind::shrink: return "shrink";
    case EventKind::merge: return "merge";
    case EventKind::split: return "split";
    case EventKind::continuation: return "continue";
  }
  return "?";
}

std::vector<Event> classify_events(const std::vector<EvolvingSequence>& sequences,
                                   const std::vector<CommunityLayer>& layers,
                                   double growth_ratio) {
  std::map<CommunityId, std::size_t> sizes;
  for (const auto& layer : layers)
    for (const auto& c : layer.communities) sizes[c.id] = c.size();
  const auto size_of = [&](const CommunityId& id) {
    auto it = sizes.find(id);
    if (it == sizes.end())
      throw std::invalid_argument("sequence references unknown community " + to_string(id));
    return static_cast<double>(it->second);
  };

  const TrackMethod method = sequences.empty() ? TrackMethod::greene : sequences.front().method;
  std::vector<Event> events;
  // merged-into: community -> distinct predecessor fronts that appended it
  std::map<CommunityId, std::set<CommunityId>> merged_into;

  for (const auto& seq : sequences) {
    events.push_back(Event{method, EventKind::form, seq.origin().t, {seq.origin()}});
    if (seq.status == SequenceStatus::dissolved)
      events.push_back(Event{method, EventKind::dissolve, seq.dissolved_at, {seq.members.back()}});
    for (std::size_t i = 0; i + 1 < seq.members.size(); ++i) {
      const CommunityId& pred = seq.members[i];
      const CommunityId& succ = seq.members[i + 1];
      const double ratio = size_of(succ) / size_of(pred);
      EventKind kind = EventKind::continuation;
      if (ratio > growth_ratio)
        kind = EventKind::grow;
      else if (ratio < 1.0 / growth_ratio)
        kind = EventKind::shrink;
      events.push_back(Event{method, kind, succ.t, {pred, succ}});
      merged_into[succ].insert(pred);
    }
    for (std::size_t i = 0; i < seq.matches.size(); ++i) {
      const MatchRecord& rec = seq.matches[i];
      if (rec.over_threshold.size() < 2) continue;
      std::vector<CommunityId> participants;
      participants.push_back(seq.members[i]);  // the front at match time
      participants.insert(participants.end(), rec.over_threshold.begin(),
                          rec.over_threshold.end());
      events.push_back(Event{method, EventKind::split, rec.t, std::move(participants)});
    }
  }

  for (const auto& [succ, preds] : merged_into) {
    if (preds.size() < 2) continue;
    std::vector<CommunityId> participants(preds.begin(), preds.end());
    participants.push_back(succ);
    events.push_back(Event{method, EventKind::merge, succ.t, std::move(participants)});
  }

  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.at, a.kind, a.participants) < std::tie(b.at, b.kind, b.participants);
  });
  return events;
}

void write_sequences_jsonl(const std::vector<EvolvingSequence>& sequences, std::ostream& out) {
  for (const auto& seq : sequences) {
    nlohmann::ordered_json row;
    row["method"] = method_name(seq.method);
    row["origin"] = {seq.origin().t, seq.origin().q};
    auto members = nlohmann::ordered_json::array();
    for (const auto& m : seq.members) members.push_back({m.t, m.q});
    row["members"] = std::move(members);
    row["status"] = seq.status == SequenceStatus::active ? "active" : "dissolved";
    out << row.dump() << '\n';
  }
}

void write_events_csv(const std::vector<Event>& events, std::ostream& out) {
  out << "method,kind,t,participants\n";
  for (const auto& e : events) {
    out << method_name(e.method) << ',' << event_kind_name(e.kind) << ',' << e.at << ',';
    for (std::size_t i = 0; i < e.participants.size(); ++i) {
      if (i) out << '|';
      out << to_string(e.participants[i]);
    }
    out << '\n';
  }
}

}  // namespace evotrack
