#pragma once

#include <vector>

#include "evotrack/planted.hpp"
#include "evotrack/tracking.hpp"

namespace evotrack {

/// How well one method's output covers a planted chain: best_overlap is the
/// largest fraction of the chain's communities found inside a single output
/// sequence.
struct ChainRecovery {
  int chain_index = 0;
  bool stable = true;
  int length = 0;
  double best_overlap = 0.0;
  bool recovered = false;
};

std::vector<ChainRecovery> chain_recovery(const PlantedScenario& scenario,
                                          const std::vector<EvolvingSequence>& sequences,
                                          double recovered_fraction = 0.8);

struct EventRecovery {
  GroundTruthEvent truth;
  bool recovered = false;
};

/// A scheduled event counts as recovered when the classifier produced an
/// event of the same kind whose participants include all of the truth
/// participants (timestamps may differ across methods' dissolve semantics).
std::vector<EventRecovery> event_recovery(const PlantedScenario& scenario,
                                          const std::vector<Event>& events);

}  // namespace evotrack
