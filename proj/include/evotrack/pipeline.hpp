#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evotrack/evaluation.hpp"
#include "evotrack/thresholding.hpp"

namespace evotrack {

/// How far through the step sequence a run goes: detect -> score ->
/// threshold -> track -> evaluate -> render.
enum class PipelineStage { detect, score, threshold, track, evaluate, render };

struct PipelineConfig {
  std::string input_dir;
  std::string pattern = "t{}.edges";
  std::string name;  // dataset label; defaults to the input directory name
  std::string detector = "cpm";  // cpm | modularity | external
  int cpm_k = 4;
  std::string communities_file;  // required when detector == external
  std::vector<std::string> measures = {"jaccard", "modec", "inclusion", "mutual"};
  std::string family = "gaussian";
  /// Keys: jaccard, modec, mutual, inclusion-forward, inclusion-backward
  /// (or inclusion for both directions).
  std::map<std::string, double> threshold_overrides;
  int dissolve_patience = 3;
  double growth_ratio = 1.5;
  std::optional<double> filter_cutoff;
  std::uint64_t seed = 1;
  int snapshot_from = 0;  // 1-based inclusive range; 0 = no restriction
  int snapshot_to = 0;
  std::string out_dir;

  void validate() const;  // throws ConfigError
};

/// Reads a flat JSON config with kebab-case keys; missing keys keep defaults.
PipelineConfig config_from_json_file(const std::filesystem::path& path);

/// FNV-1a hash of the canonical config serialization, hex-encoded.
std::string config_hash(const PipelineConfig& config);

struct PipelineOutcome {
  std::vector<CommunityLayer> layers;
  TransitionVectorSet vectors;
  std::vector<Threshold> thresholds;
  TrackerConfig tracker_config;
  std::map<TrackMethod, std::vector<EvolvingSequence>> sequences;
  std::map<TrackMethod, std::vector<Event>> events;
  EvaluationReport report;
  std::vector<std::string> artifacts;  // file names written under out_dir
};

/// Runs the step sequence on an already-loaded network. `preset_layers`
/// skips detection (used by the planted benchmark). Artifacts are written
/// into config.out_dir as each step completes; the manifest is written last.
PipelineOutcome run_pipeline_on(const TemporalNetwork& net,
                                const std::vector<CommunityLayer>* preset_layers,
                                const PipelineConfig& config, PipelineStage stage,
                                const LoadStats* load_stats = nullptr);

/// Loads snapshots per the config, applies the snapshot range, then runs the
/// step sequence through `stage`.
PipelineOutcome run_pipeline(const PipelineConfig& config,
                             PipelineStage stage = PipelineStage::render);

/// Copy of a network restricted to original timestamps [from, to], re-indexed
/// from 1.
TemporalNetwork slice_network(const TemporalNetwork& net, int from, int to);

}  // namespace evotrack
