#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evotrack/detection.hpp"
#include "evotrack/temporal_graph.hpp"

namespace evotrack {

enum class PlantedEventKind { merge, split, dissolve };

std::string planted_event_kind_name(PlantedEventKind k);

/// A scheduled structural change. `chains` holds the 0-based indices of the
/// affected chains: {a, b} for merge (b folds into a), {x} for split and
/// dissolve.
struct PlantedEvent {
  PlantedEventKind kind = PlantedEventKind::dissolve;
  int at = 2;
  std::vector<int> chains;
};

struct PlantedParams {
  int snapshots = 10;     // m
  int chains = 20;
  int chain_size = 10;
  double churn = 0.1;     // per-node replacement probability per step
  int noise_per_step = 5;
  int noise_size = 6;
  double node_reuse = 0.0;  // chance a replacement comes from retired nodes
  std::vector<PlantedEvent> events;
};

/// Ground-truth chain: the communities one planted group occupies over time.
/// `stable` means the chain spans all snapshots untouched by any event.
struct PlantedChain {
  int chain_index = 0;
  std::vector<CommunityId> members;
  bool stable = true;
};

struct GroundTruthEvent {
  PlantedEventKind kind = PlantedEventKind::dissolve;
  int at = 0;
  std::vector<CommunityId> participants;
};

/// A synthetic benchmark with known evolution: snapshot series, community
/// layers, and the chains/events that generated them. Every planted chain's
/// communities exist verbatim in the emitted layers.
struct PlantedScenario {
  TemporalNetwork network;
  std::vector<CommunityLayer> layers;
  std::vector<PlantedChain> chains;
  std::vector<GroundTruthEvent> events;
};

/// Deterministic per seed. Each community is a clique in its snapshot; chains
/// drift by node churn; noise communities get fresh nodes every step. Throws
/// ConfigError on an infeasible schedule (bad timestamps, dead or unknown
/// chains, splitting a singleton).
PlantedScenario generate_planted(const PlantedParams& params, std::uint64_t seed);

}  // namespace evotrack
