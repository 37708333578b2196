#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "evotrack/benchmark.hpp"
#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"
#include "evotrack/pipeline.hpp"
#include "evotrack/planted.hpp"
#include "json.hpp"

namespace {

using namespace evotrack;

struct PipelineCli {
  std::string config_file;
  std::string input_dir, pattern = "t{}.edges", name, detector = "cpm", communities,
              family = "gaussian", out;
  int cpm_k = 4, patience = 3;
  double growth_ratio = 1.5, filter_cutoff = 0.0;
  std::uint64_t seed = 1;
  std::string measures = "jaccard,modec,inclusion,mutual";
  std::vector<int> snapshot_range;
  std::vector<std::string> overrides;

  CLI::Option *o_input = nullptr, *o_pattern = nullptr, *o_name = nullptr, *o_detector = nullptr,
              *o_cpm_k = nullptr, *o_communities = nullptr, *o_measures = nullptr,
              *o_family = nullptr, *o_patience = nullptr, *o_growth = nullptr, *o_filter = nullptr,
              *o_seed = nullptr, *o_range = nullptr, *o_out = nullptr;
};

void add_pipeline_options(CLI::App* cmd, PipelineCli& o) {
  cmd->add_option("--config", o.config_file, "JSON config file; flags override its keys");
  o.o_input = cmd->add_option("--input-dir", o.input_dir, "directory of snapshot edge files");
  o.o_pattern = cmd->add_option("--pattern", o.pattern, "snapshot filename template, e.g. t{}.edges");
  o.o_name = cmd->add_option("--name", o.name, "dataset label used in reports");
  o.o_detector = cmd->add_option("--detector", o.detector, "cpm | modularity | external");
  o.o_cpm_k = cmd->add_option("--cpm-k", o.cpm_k, "clique size for CPM");
  o.o_communities = cmd->add_option("--communities", o.communities,
                                    "externally computed community file (implies --detector external)");
  o.o_measures = cmd->add_option("--measures", o.measures,
                                 "comma list of jaccard,modec,inclusion,mutual,modified_jaccard");
  o.o_family = cmd->add_option("--family", o.family, "mixture family: gaussian | gamma");
  o.o_patience = cmd->add_option("--d", o.patience, "dissolve patience for Greene tracking (> 2)");
  o.o_growth = cmd->add_option("--growth-ratio", o.growth_ratio, "grow/shrink classification ratio");
  o.o_filter = cmd->add_option("--filter-cutoff", o.filter_cutoff,
                               "drop aligned origins whose every cell exceeds this value");
  o.o_seed = cmd->add_option("--seed", o.seed, "run seed, recorded in the manifest");
  o.o_range = cmd->add_option("--snapshot-range", o.snapshot_range, "restrict to ordinals FROM TO")
                  ->expected(2);
  o.o_out = cmd->add_option("--out", o.out, "output directory for artifacts");
  cmd->add_option("--threshold-override", o.overrides,
                  "KEY=VALUE similarity threshold override (jaccard, modec, mutual, inclusion, "
                  "inclusion-forward, inclusion-backward); repeatable");
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

PipelineConfig resolve_config(const PipelineCli& o) {
  PipelineConfig cfg;
  if (!o.config_file.empty()) cfg = config_from_json_file(o.config_file);
  if (o.o_input->count()) cfg.input_dir = o.input_dir;
  if (o.o_pattern->count()) cfg.pattern = o.pattern;
  if (o.o_name->count()) cfg.name = o.name;
  if (o.o_detector->count()) cfg.detector = o.detector;
  if (o.o_cpm_k->count()) cfg.cpm_k = o.cpm_k;
  if (o.o_communities->count()) {
    cfg.communities_file = o.communities;
    if (!o.o_detector->count()) cfg.detector = "external";
  }
  if (o.o_measures->count()) cfg.measures = split_csv(o.measures);
  if (o.o_family->count()) cfg.family = o.family;
  if (o.o_patience->count()) cfg.dissolve_patience = o.patience;
  if (o.o_growth->count()) cfg.growth_ratio = o.growth_ratio;
  if (o.o_filter->count()) cfg.filter_cutoff = o.filter_cutoff;
  if (o.o_seed->count()) cfg.seed = o.seed;
  if (o.o_range->count()) {
    cfg.snapshot_from = o.snapshot_range.at(0);
    cfg.snapshot_to = o.snapshot_range.at(1);
  }
  if (o.o_out->count()) cfg.out_dir = o.out;
  for (const auto& spec : o.overrides) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw ConfigError("threshold override must be KEY=VALUE, got '" + spec + "'");
    try {
      cfg.threshold_overrides[spec.substr(0, eq)] = std::stod(spec.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad threshold override value in '" + spec + "'");
    }
  }
  return cfg;
}

void report_outcome(const PipelineConfig& cfg, const PipelineOutcome& outcome) {
  std::cout << "wrote " << outcome.artifacts.size() + 1 << " artifacts to " << cfg.out_dir
            << " (config hash " << config_hash(cfg) << ")\n";
  for (const auto& [method, count] : outcome.report.quantity)
    std::cout << "  " << method_name(method) << ": " << count << " evolving sequences\n";
}

struct BenchCli {
  PipelineCli pipeline;
  PlantedParams params;
  std::vector<std::string> event_specs;
  bool fit_thresholds = false;
};

PlantedEvent parse_event_spec(const std::string& spec) {
  // kind@t:chain[,chain]  e.g. merge@5:0,1
  const auto at = spec.find('@');
  const auto colon = spec.find(':', at == std::string::npos ? 0 : at);
  if (at == std::string::npos || colon == std::string::npos)
    throw ConfigError("event spec must be kind@t:chains, got '" + spec + "'");
  PlantedEvent ev;
  const std::string kind = spec.substr(0, at);
  if (kind == "merge")
    ev.kind = PlantedEventKind::merge;
  else if (kind == "split")
    ev.kind = PlantedEventKind::split;
  else if (kind == "dissolve")
    ev.kind = PlantedEventKind::dissolve;
  else
    throw ConfigError("unknown planted event kind '" + kind + "'");
  try {
    ev.at = std::stoi(spec.substr(at + 1, colon - at - 1));
    for (const auto& c : split_csv(spec.substr(colon + 1))) ev.chains.push_back(std::stoi(c));
  } catch (const std::exception&) {
    throw ConfigError("bad numbers in event spec '" + spec + "'");
  }
  return ev;
}

void append_to_manifest(const std::filesystem::path& out_dir,
                        const std::vector<std::string>& names) {
  const auto path = out_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw DataError("cannot reopen " + path.string());
  nlohmann::ordered_json manifest;
  in >> manifest;
  in.close();
  for (const auto& n : names) manifest["artifacts"].push_back(n);
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << "\n";
}

std::vector<std::string> write_scenario_inputs(const PlantedScenario& scenario,
                                               const std::filesystem::path& dir) {
  std::vector<std::string> written;
  std::filesystem::create_directories(dir);
  for (const auto& snap : scenario.network.snapshots()) {
    const std::string fname = "t" + std::to_string(snap.timestamp_index()) + ".edges";
    written.push_back("scenario/" + fname);
    std::ofstream out(dir / fname, std::ios::binary);
    for (NodeId v : snap.nodes()) {
      if (snap.neighbors(v).empty()) out << scenario.network.interner().token(v) << '\n';
      for (NodeId u : snap.neighbors(v))
        if (v < u)
          out << scenario.network.interner().token(v) << ' '
              << scenario.network.interner().token(u) << '\n';
    }
  }
  std::ofstream comm(dir / "communities.txt", std::ios::binary);
  write_communities(scenario.layers, scenario.network, comm);

  nlohmann::ordered_json truth;
  auto chains = nlohmann::ordered_json::array();
  for (const auto& c : scenario.chains) {
    nlohmann::ordered_json row;
    row["chain"] = c.chain_index;
    row["stable"] = c.stable;
    auto members = nlohmann::ordered_json::array();
    for (const auto& id : c.members) members.push_back({id.t, id.q});
    row["members"] = std::move(members);
    chains.push_back(row);
  }
  truth["chains"] = std::move(chains);
  auto events = nlohmann::ordered_json::array();
  for (const auto& e : scenario.events) {
    nlohmann::ordered_json row;
    row["kind"] = planted_event_kind_name(e.kind);
    row["at"] = e.at;
    auto parts = nlohmann::ordered_json::array();
    for (const auto& id : e.participants) parts.push_back({id.t, id.q});
    row["participants"] = std::move(parts);
    events.push_back(row);
  }
  truth["events"] = std::move(events);
  std::ofstream tf(dir / "ground_truth.json", std::ios::binary);
  tf << truth.dump(2) << "\n";
  written.push_back("scenario/communities.txt");
  written.push_back("scenario/ground_truth.json");
  return written;
}

int run_bench(const BenchCli& b) {
  PipelineConfig cfg = resolve_config(b.pipeline);
  if (cfg.name.empty()) cfg.name = "planted";
  if (!b.fit_thresholds && cfg.threshold_overrides.empty()) {
    // Planted chains are node-disjoint, so cross-chain scores are almost all
    // zero and a mixture fit would be degenerate; default to fixed thresholds.
    cfg.threshold_overrides = {{"jaccard", 0.3}, {"modec", 0.3}, {"mutual", 0.3},
                               {"inclusion", 0.15}};
  }
  PlantedParams params = b.params;
  for (const auto& spec : b.event_specs) params.events.push_back(parse_event_spec(spec));

  const PlantedScenario scenario = generate_planted(params, cfg.seed);
  std::vector<std::string> extra_artifacts =
      write_scenario_inputs(scenario, std::filesystem::path(cfg.out_dir) / "scenario");

  const PipelineOutcome outcome =
      run_pipeline_on(scenario.network, &scenario.layers, cfg, PipelineStage::render);

  {
    std::ofstream rec(std::filesystem::path(cfg.out_dir) / "recovery_report.csv",
                      std::ios::binary);
    rec << "method,chain,stable,length,best_overlap,recovered\n";
    for (const auto& [method, seqs] : outcome.sequences) {
      for (const auto& row : chain_recovery(scenario, seqs))
        rec << method_name(method) << ',' << row.chain_index << ',' << (row.stable ? 1 : 0) << ','
            << row.length << ',' << fmt_double(row.best_overlap) << ',' << (row.recovered ? 1 : 0)
            << '\n';
    }
    extra_artifacts.push_back("recovery_report.csv");
    std::ofstream evr(std::filesystem::path(cfg.out_dir) / "event_recovery.csv", std::ios::binary);
    evr << "method,kind,at,recovered\n";
    for (const auto& [method, events] : outcome.events) {
      for (const auto& row : event_recovery(scenario, events))
        evr << method_name(method) << ',' << planted_event_kind_name(row.truth.kind) << ','
            << row.truth.at << ',' << (row.recovered ? 1 : 0) << '\n';
    }
    extra_artifacts.push_back("event_recovery.csv");
  }
  append_to_manifest(cfg.out_dir, extra_artifacts);
  report_outcome(cfg, outcome);
  std::cout << "scenario inputs and ground truth under " << cfg.out_dir << "/scenario\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community evolution tracking toolkit"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    PipelineStage stage;
    PipelineCli opts;
  };
  // Built in full before binding options: CLI11 keeps references into opts.
  std::vector<Sub> subs;
  subs.reserve(6);
  subs.push_back({app.add_subcommand("detect", "identify communities per snapshot"),
                  PipelineStage::detect, {}});
  subs.push_back({app.add_subcommand("score", "pairwise similarity scores per measure"),
                  PipelineStage::score, {}});
  subs.push_back({app.add_subcommand("threshold", "fit similarity thresholds"),
                  PipelineStage::threshold, {}});
  subs.push_back({app.add_subcommand("track", "build evolving sequences per method"),
                  PipelineStage::track, {}});
  subs.push_back({app.add_subcommand("evaluate", "score sequences (APCC/APNP) and report"),
                  PipelineStage::evaluate, {}});
  subs.push_back({app.add_subcommand("run", "all steps plus SVG reports"),
                  PipelineStage::render, {}});
  for (auto& sub : subs) add_pipeline_options(sub.cmd, sub.opts);

  BenchCli bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "generate a planted scenario and run the full pipeline on it");
  add_pipeline_options(bench_cmd, bench.pipeline);
  bench_cmd->add_option("--m", bench.params.snapshots, "number of snapshots");
  bench_cmd->add_option("--chains", bench.params.chains, "number of planted chains");
  bench_cmd->add_option("--chain-size", bench.params.chain_size, "nodes per chain community");
  bench_cmd->add_option("--churn", bench.params.churn, "per-step node replacement probability");
  bench_cmd->add_option("--noise", bench.params.noise_per_step, "noise communities per step");
  bench_cmd->add_option("--noise-size", bench.params.noise_size, "nodes per noise community");
  bench_cmd->add_option("--node-reuse", bench.params.node_reuse,
                        "chance a replacement node comes from the retired pool");
  bench_cmd->add_option("--event", bench.event_specs,
                        "scheduled event kind@t:chains (merge@5:0,1 split@4:2 dissolve@7:3); "
                        "repeatable");
  bench_cmd->add_flag("--fit-thresholds", bench.fit_thresholds,
                      "fit mixture thresholds instead of the fixed bench defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bench_cmd->parsed()) return run_bench(bench);
    for (const auto& sub : subs) {
      if (!sub.cmd->parsed()) continue;
      const PipelineConfig cfg = resolve_config(sub.opts);
      const PipelineOutcome outcome = run_pipeline(cfg, sub.stage);
      report_outcome(cfg, outcome);
      return 0;
    }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateFitError& e) {
    std::cerr << "degenerate fit: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
