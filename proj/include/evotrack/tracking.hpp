#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evotrack/similarity.hpp"

namespace evotrack {

enum class TrackMethod { greene, takaffoli, ged, tajeuna };

std::string method_name(TrackMethod m);
TrackMethod method_from_name(const std::string& name);
Measure method_measure(TrackMethod m);

enum class SequenceStatus { active, dissolved };

/// One successful match while building a sequence: the community appended at
/// timestamp t plus every candidate that cleared the threshold there (used
/// later for split detection).
struct MatchRecord {
  int t = 0;
  CommunityId chosen;
  std::vector<CommunityId> over_threshold;
};

/// A tracked chain of communities at strictly increasing timestamps.
struct EvolvingSequence {
  TrackMethod method = TrackMethod::greene;
  std::vector<CommunityId> members;
  SequenceStatus status = SequenceStatus::active;
  int dissolved_at = 0;  // meaningful when status == dissolved
  std::vector<MatchRecord> matches;  // one per member after the origin

  const CommunityId& origin() const { return members.front(); }
  int length() const { return static_cast<int>(members.size()); }
};

struct TrackerConfig {
  double jaccard_threshold = 0.3;
  double modec_threshold = 0.3;
  double inclusion_forward = 0.3;
  double inclusion_backward = 0.3;
  double mutual_threshold = 0.3;
  int dissolve_patience = 3;  // d, must stay > 2
  double growth_ratio = 1.5;
};

/// Chains fronts along the best Jaccard match at least `jaccard_threshold`.
/// A front may stay unmatched for up to d-1 successive timestamps and still
/// be extended by a later reappearance; after d consecutive unmatched
/// timestamps the sequence dissolves.
std::vector<EvolvingSequence> track_greene(const std::vector<CommunityLayer>& layers,
                                           const SimilarityMatrix& jaccard_matrix,
                                           const TrackerConfig& config);

/// Front matching with the max-size-normalized overlap at least
/// `modec_threshold`; the horizon is unbounded, so a sequence stays live
/// until the final timestamp.
std::vector<EvolvingSequence> track_takaffoli(const std::vector<CommunityLayer>& layers,
                                              const SimilarityMatrix& modec_matrix,
                                              const TrackerConfig& config);

/// Consecutive-only matching requiring both directed inclusions:
/// I(front, candidate) >= inclusion_forward and I(candidate, front) >=
/// inclusion_backward. An unmatched front dissolves at the very next step.
std::vector<EvolvingSequence> track_ged(const std::vector<CommunityLayer>& layers,
                                        const SimilarityMatrix& inclusion_matrix,
                                        const TrackerConfig& config);

/// Origin-anchored matching: the sequence collects, in timestamp order, the
/// best later community whose mutual transition similarity to the ORIGIN's
/// vector exceeds `mutual_threshold` (at most one per timestamp); unbounded
/// horizon.
std::vector<EvolvingSequence> track_tajeuna(const std::vector<CommunityLayer>& layers,
                                            const TransitionVectorSet& vectors,
                                            const TrackerConfig& config);

enum class EventKind { form, dissolve, grow, shrink, merge, split, continuation };

std::string event_kind_name(EventKind k);

struct Event {
  TrackMethod method = TrackMethod::greene;
  EventKind kind = EventKind::form;
  int at = 0;
  std::vector<CommunityId> participants;
};

/// Derives the critical events implied by one method's sequences:
///   form      - a community starts a sequence with no predecessor
///   dissolve  - a sequence dissolved, per the method's rule
///   grow      - matched pair with size ratio above growth_ratio
///   shrink    - matched pair with size ratio below 1/growth_ratio
///   continue  - matched pair within [1/growth_ratio, growth_ratio]
///   merge     - two or more sequences append the same community
///   split     - one front cleared the threshold for two or more candidates
std::vector<Event> classify_events(const std::vector<EvolvingSequence>& sequences,
                                   const std::vector<CommunityLayer>& layers,
                                   double growth_ratio);

/// JSON lines, one sequence per line:
/// {"method":...,"origin":[t,q],"members":[[t,q],...],"status":...}
void write_sequences_jsonl(const std::vector<EvolvingSequence>& sequences, std::ostream& out);

/// CSV columns: method,kind,t,participants  (participants joined with '|')
void write_events_csv(const std::vector<Event>& events, std::ostream& out);

}  // namespace evotrack
