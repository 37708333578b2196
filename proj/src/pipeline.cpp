#include "evotrack/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"
#include "evotrack/report_render.hpp"
#include "json.hpp"

namespace evotrack {

void PipelineConfig::validate() const {
  if (measures.empty()) throw ConfigError("select at least one measure/tracker");
  for (const auto& m : measures) measure_from_name(m);  // throws on unknown
  if (detector != "cpm" && detector != "modularity" && detector != "external")
    throw ConfigError("detector must be cpm, modularity or external");
  if (detector == "external" && communities_file.empty())
    throw ConfigError("external detector needs --communities <file>");
  if (detector == "cpm" && cpm_k < 3) throw ConfigError("CPM clique size k must be >= 3");
  family_from_name(family);
  if (dissolve_patience < 3) throw ConfigError("dissolve patience d must be greater than 2");
  if (growth_ratio <= 1.0) throw ConfigError("growth ratio must exceed 1");
  for (const auto& [key, value] : threshold_overrides) {
    if (key != "jaccard" && key != "modec" && key != "mutual" && key != "modified_jaccard" &&
        key != "inclusion" && key != "inclusion-forward" && key != "inclusion-backward")
      throw ConfigError("unknown threshold override key '" + key + "'");
    if (value <= 0.0 || value >= 1.0)
      throw ConfigError("threshold override for '" + key + "' must lie in (0,1)");
  }
  if ((snapshot_from == 0) != (snapshot_to == 0) ||
      (snapshot_from != 0 && snapshot_from > snapshot_to))
    throw ConfigError("snapshot range must be two ordinals with from <= to");
  if (out_dir.empty()) throw ConfigError("output directory is required");
}

namespace {

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["input-dir"] = c.input_dir;
  j["pattern"] = c.pattern;
  j["name"] = c.name;
  j["detector"] = c.detector;
  j["cpm-k"] = c.cpm_k;
  j["communities"] = c.communities_file;
  j["measures"] = c.measures;
  j["family"] = c.family;
  j["threshold-overrides"] = c.threshold_overrides;
  j["d"] = c.dissolve_patience;
  j["growth-ratio"] = c.growth_ratio;
  if (c.filter_cutoff)
    j["filter-cutoff"] = *c.filter_cutoff;
  else
    j["filter-cutoff"] = nullptr;
  j["seed"] = c.seed;
  j["snapshot-range"] = {c.snapshot_from, c.snapshot_to};
  j["out"] = c.out_dir;
  return j;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string config_hash(const PipelineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(config).dump())));
  return buf;
}

PipelineConfig config_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("bad JSON in " + path.string() + ": " + e.what());
  }
  PipelineConfig c;
  const auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) j.at(key).get_to(dst);
  };
  get("input-dir", c.input_dir);
  get("pattern", c.pattern);
  get("name", c.name);
  get("detector", c.detector);
  get("cpm-k", c.cpm_k);
  get("communities", c.communities_file);
  get("measures", c.measures);
  get("family", c.family);
  if (j.contains("threshold-overrides"))
    c.threshold_overrides =
        j.at("threshold-overrides").get<std::map<std::string, double>>();
  get("d", c.dissolve_patience);
  get("growth-ratio", c.growth_ratio);
  if (j.contains("filter-cutoff") && !j.at("filter-cutoff").is_null())
    c.filter_cutoff = j.at("filter-cutoff").get<double>();
  get("seed", c.seed);
  if (j.contains("snapshot-range")) {
    const auto range = j.at("snapshot-range").get<std::vector<int>>();
    if (range.size() != 2) throw ConfigError("snapshot-range must be [from, to]");
    c.snapshot_from = range[0];
    c.snapshot_to = range[1];
  }
  get("out", c.out_dir);
  return c;
}

TemporalNetwork slice_network(const TemporalNetwork& net, int from, int to) {
  if (from < 1 || to > net.snapshot_count() || from > to)
    throw ConfigError("snapshot range " + std::to_string(from) + ".." + std::to_string(to) +
                      " outside 1.." + std::to_string(net.snapshot_count()));
  std::vector<Snapshot> out;
  for (int t = from; t <= to; ++t) {
    const Snapshot& src = net.snapshot_at(t);
    Snapshot copy(t - from + 1);
    for (NodeId v : src.nodes()) {
      copy.add_node(v);
      for (NodeId u : src.neighbors(v))
        if (v < u) copy.add_edge(v, u);
    }
    copy.finalize();
    out.push_back(std::move(copy));
  }
  return TemporalNetwork(net.name(), std::move(out), net.interner());
}

namespace {

// Runs `fn` as one numbered pipeline step; failures abort with the step name
// attached, keeping already-written artifacts in place.
template <typename Fn>
void run_step(int number, const std::string& label, Fn&& fn) {
  const auto prefix = [&](const std::string& what) {
    return "step " + std::to_string(number) + " (" + label + "): " + what;
  };
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix(e.what()));
  } catch (const DegenerateFitError& e) {
    throw DegenerateFitError(prefix(e.what()));
  } catch (const DataError& e) {
    throw DataError(prefix(e.what()));
  } catch (const std::exception& e) {
    throw DataError(prefix(e.what()));
  }
}

struct ArtifactWriter {
  std::filesystem::path dir;
  std::vector<std::string>* names;

  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    out << content;
    names->push_back(name);
  }
};

TrackerConfig tracker_config_from(const std::vector<Threshold>& thresholds,
                                  const PipelineConfig& config) {
  TrackerConfig tc;
  tc.dissolve_patience = config.dissolve_patience;
  tc.growth_ratio = config.growth_ratio;
  for (const auto& th : thresholds) {
    switch (th.measure) {
      case Measure::jaccard: tc.jaccard_threshold = th.value; break;
      case Measure::modec: tc.modec_threshold = th.value; break;
      case Measure::mutual: tc.mutual_threshold = th.value; break;
      case Measure::inclusion:
        if (th.direction == Direction::backward)
          tc.inclusion_backward = th.value;
        else
          tc.inclusion_forward = th.value;
        break;
      case Measure::modified_jaccard: break;  // no tracker consumes it
    }
  }
  return tc;
}

}  // namespace

PipelineOutcome run_pipeline_on(const TemporalNetwork& net,
                                const std::vector<CommunityLayer>* preset_layers,
                                const PipelineConfig& config, PipelineStage stage,
                                const LoadStats* load_stats) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  PipelineOutcome outcome;
  ArtifactWriter artifacts{config.out_dir, &outcome.artifacts};
  const std::string dataset = config.name.empty() ? net.name() : config.name;

  std::vector<Measure> measures;
  for (const auto& m : config.measures) measures.push_back(measure_from_name(m));

  // Step 1: identify communities at each timestamp.
  run_step(1, "detect", [&] {
    artifacts.write("network_manifest.json",
                    network_manifest_json(net, load_stats ? *load_stats : LoadStats{}));
    if (preset_layers) {
      outcome.layers = *preset_layers;
    } else if (config.detector == "external") {
      outcome.layers = load_communities(config.communities_file, net);
    } else {
      const bool cpm = config.detector == "cpm";
      const int m = net.snapshot_count();
      std::vector<std::future<CommunityLayer>> futures;
      for (int t = 1; t <= m; ++t)
        futures.push_back(std::async(std::launch::async, [&, t] {
          return cpm ? detect_cpm(net.snapshot_at(t), config.cpm_k)
                     : detect_modularity(net.snapshot_at(t));
        }));
      for (auto& f : futures) outcome.layers.push_back(f.get());
    }
    std::ostringstream communities;
    write_communities(outcome.layers, net, communities);
    artifacts.write("communities.txt", communities.str());

    const LayerStats stats = layer_stats(outcome.layers);
    std::ostringstream stats_csv;
    stats_csv << "dataset,avg_communities,avg_size\n"
              << dataset << ',' << fmt_double(stats.avg_communities) << ','
              << fmt_double(stats.avg_size) << '\n';
    artifacts.write("layer_stats.csv", stats_csv.str());
  });
  if (stage == PipelineStage::detect) return outcome;

  // Step 2: pairwise scores at distinct timestamps, one matrix per measure.
  std::map<Measure, SimilarityMatrix> matrices;
  run_step(2, "score", [&] {
    outcome.vectors = transition_vectors(outcome.layers);
    ScoreContext ctx;
    ctx.network = &net;
    ctx.vectors = &outcome.vectors;
    for (Measure m : measures) {
      matrices[m] = score_all_pairs(outcome.layers, m, ctx);
      std::ostringstream csv;
      write_similarity_csv(matrices[m], csv);
      artifacts.write("similarity_" + measure_name(m) + ".csv", csv.str());
    }
  });
  if (stage == PipelineStage::score) return outcome;

  // Step 3: similarity thresholds, fitted or overridden.
  run_step(3, "threshold", [&] {
    const MixtureFamily family = family_from_name(config.family);
    const auto overridden = [&](const std::string& key) -> std::optional<double> {
      auto it = config.threshold_overrides.find(key);
      if (it != config.threshold_overrides.end()) return it->second;
      return std::nullopt;
    };
    const auto resolve = [&](Measure m, Direction dir, const std::string& key) {
      Threshold th;
      if (auto value = overridden(key)) {
        th.value = *value;
        th.provenance = ThresholdProvenance::user_override;
        th.family = family;
        th.n = 0;
      } else {
        const int direction_filter =
            dir == Direction::forward ? 1 : (dir == Direction::backward ? -1 : 0);
        const MixtureFit fit = fit_mixture(nonzero_scores(matrices[m], direction_filter), family);
        th = junction_point(fit);
      }
      th.measure = m;
      th.direction = dir;
      outcome.thresholds.push_back(th);
    };
    for (Measure m : measures) {
      if (m == Measure::inclusion) {
        const auto both = overridden("inclusion");
        if (both) {
          resolve(m, Direction::forward, "inclusion");
          resolve(m, Direction::backward, "inclusion");
        } else {
          resolve(m, Direction::forward, "inclusion-forward");
          resolve(m, Direction::backward, "inclusion-backward");
        }
      } else {
        resolve(m, Direction::none, measure_name(m));
      }
    }
    std::ostringstream csv;
    write_threshold_csv(outcome.thresholds, csv);
    artifacts.write("thresholds.csv", csv.str());
  });
  outcome.tracker_config = tracker_config_from(outcome.thresholds, config);
  if (stage == PipelineStage::threshold) return outcome;

  // Step 4: run each selected tracking method.
  run_step(4, "track", [&] {
    for (Measure m : measures) {
      std::vector<EvolvingSequence> seqs;
      TrackMethod method = TrackMethod::greene;
      switch (m) {
        case Measure::jaccard:
          method = TrackMethod::greene;
          seqs = track_greene(outcome.layers, matrices[m], outcome.tracker_config);
          break;
        case Measure::modec:
          method = TrackMethod::takaffoli;
          seqs = track_takaffoli(outcome.layers, matrices[m], outcome.tracker_config);
          break;
        case Measure::inclusion:
          method = TrackMethod::ged;
          seqs = track_ged(outcome.layers, matrices[m], outcome.tracker_config);
          break;
        case Measure::mutual:
          method = TrackMethod::tajeuna;
          seqs = track_tajeuna(outcome.layers, outcome.vectors, outcome.tracker_config);
          break;
        case Measure::modified_jaccard:
          continue;  // scored and exported, but no tracker consumes it
      }
      outcome.events[method] =
          classify_events(seqs, outcome.layers, config.growth_ratio);
      outcome.sequences[method] = std::move(seqs);
    }
    for (const auto& [method, seqs] : outcome.sequences) {
      std::ostringstream jsonl;
      write_sequences_jsonl(seqs, jsonl);
      artifacts.write("sequences_" + method_name(method) + ".jsonl", jsonl.str());
      std::ostringstream csv;
      write_events_csv(outcome.events[method], csv);
      artifacts.write("events_" + method_name(method) + ".csv", csv.str());
    }
  });
  if (stage == PipelineStage::track) return outcome;

  // Step 5: score sequence quality, align origins, report.
  run_step(5, "evaluate", [&] {
    outcome.report = evaluate(dataset, outcome.sequences, outcome.vectors, outcome.layers,
                              config.filter_cutoff);
    std::ostringstream quantity;
    write_quantity_csv(outcome.report, quantity);
    artifacts.write("quantity.csv", quantity.str());
    std::ostringstream scores;
    write_sequence_scores_csv(outcome.report, scores);
    artifacts.write("sequence_scores.csv", scores.str());
    if (outcome.sequences.size() >= 2) {
      std::ostringstream apcc_csv, apnp_csv;
      write_aligned_matrix_csv(outcome.report.aligned, false, apcc_csv);
      write_aligned_matrix_csv(outcome.report.aligned, true, apnp_csv);
      artifacts.write("apcc_matrix.csv", apcc_csv.str());
      artifacts.write("apnp_matrix.csv", apnp_csv.str());
      if (outcome.report.aligned.empty())
        std::cerr << "warning: no origin is tracked by every method; aligned matrices are empty\n";
    }
  });

  if (stage == PipelineStage::render) {
    run_step(5, "render", [&] {
      if (!outcome.report.aligned.empty()) {
        artifacts.write("heatmap_apcc.svg", heatmap_svg(outcome.report.aligned, false, "APCC"));
        artifacts.write("heatmap_apnp.svg", heatmap_svg(outcome.report.aligned, true, "APNP"));
      } else {
        std::cerr << "warning: skipping heatmaps, empty aligned matrix\n";
      }
      std::vector<QuantityBar> bars;
      for (const auto& [method, count] : outcome.report.quantity)
        bars.push_back(QuantityBar{dataset, method_name(method), count});
      artifacts.write("quantity_chart.svg", quantity_chart_svg(bars));
    });
  }

  nlohmann::ordered_json manifest;
  manifest["dataset"] = dataset;
  manifest["config-hash"] = config_hash(config);
  manifest["config"] = config_to_json(config);
  manifest["artifacts"] = outcome.artifacts;
  {
    std::ofstream out(std::filesystem::path(config.out_dir) / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write manifest.json");
    out << manifest.dump(2) << "\n";
  }
  return outcome;
}

PipelineOutcome run_pipeline(const PipelineConfig& config, PipelineStage stage) {
  config.validate();
  if (config.input_dir.empty()) throw ConfigError("input directory is required");
  LoadStats stats;
  TemporalNetwork net = load_snapshots(config.input_dir, config.pattern, &stats);
  if (config.snapshot_from != 0) {
    net = slice_network(net, config.snapshot_from, config.snapshot_to);
    if (net.snapshot_count() < 2)
      throw ConfigError("snapshot range keeps fewer than 2 snapshots");
    if (static_cast<int>(stats.files.size()) >= config.snapshot_to)
      stats.files = std::vector<std::string>(
          stats.files.begin() + config.snapshot_from - 1,
          stats.files.begin() + config.snapshot_to);
  }
  PipelineConfig cfg = config;
  if (cfg.name.empty()) cfg.name = net.name();
  return run_pipeline_on(net, nullptr, cfg, stage, &stats);
}

}  // namespace evotrack
