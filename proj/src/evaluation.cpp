#include "evotrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"

namespace evotrack {

double pearson_normalized(const TransitionProbabilityVector& vi,
                          const TransitionProbabilityVector& vj) {
  if (vi.length() != vj.length())
    throw std::invalid_argument("pearson: transition vectors have different lengths");
  const double n = static_cast<double>(vi.length());

  // Sparse-aware moments: sums over nonzeros equal sums over all components.
  const double mean_i = vi.sum() / n;
  const double mean_j = vj.sum() / n;
  double sq_i = 0.0, sq_j = 0.0;
  for (const auto& [idx, v] : vi.nonzeros()) sq_i += v * v;
  for (const auto& [idx, v] : vj.nonzeros()) sq_j += v * v;
  double dot = 0.0;
  {
    const auto& a = vi.nonzeros();
    const auto& b = vj.nonzeros();
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (ia->first < ib->first)
        ++ia;
      else if (ib->first < ia->first)
        ++ib;
      else {
        dot += ia->second * ib->second;
        ++ia;
        ++ib;
      }
    }
  }
  const double var_i = sq_i - n * mean_i * mean_i;
  const double var_j = sq_j - n * mean_j * mean_j;
  if (var_i <= 1e-15 || var_j <= 1e-15)
    throw DegenerateFitError("pearson: constant transition vector (zero variance)");
  const double cov = dot - n * mean_i * mean_j;
  const double rho = std::clamp(cov / std::sqrt(var_i * var_j), -1.0, 1.0);
  return (rho + 1.0) / 2.0;
}

double apcc(const EvolvingSequence& sequence, const TransitionVectorSet& vectors) {
  const std::size_t len = sequence.members.size();
  if (len < 2) throw std::invalid_argument("apcc requires a sequence of length >= 2");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = i + 1; j < len; ++j) {
      total += pearson_normalized(vectors.for_community(sequence.members[i]),
                                  vectors.for_community(sequence.members[j]));
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

double apnp(const EvolvingSequence& sequence, const std::vector<CommunityLayer>& layers) {
  const std::size_t len = sequence.members.size();
  if (len < 2) throw std::invalid_argument("apnp requires a sequence of length >= 2");

  const auto members_of = [&](const CommunityId& id) -> const std::vector<NodeId>& {
    for (const auto& layer : layers)
      if (layer.timestamp_index == id.t) return layer.community(id.q).members;
    throw std::invalid_argument("sequence references unknown timestamp " + std::to_string(id.t));
  };

  const std::vector<NodeId>& origin = members_of(sequence.members.front());
  double total = 0.0;
  for (std::size_t i = 1; i < len; ++i) {
    const std::vector<NodeId>& later = members_of(sequence.members[i]);
    std::size_t shared = 0;
    for (NodeId v : origin)
      if (std::binary_search(later.begin(), later.end(), v)) ++shared;
    total += static_cast<double>(shared) / static_cast<double>(origin.size());
  }
  return total / static_cast<double>(len - 1);
}

AlignedScores align_origins(const std::map<TrackMethod, std::vector<EvolvingSequence>>& by_method,
                            const TransitionVectorSet& vectors,
                            const std::vector<CommunityLayer>& layers,
                            std::optional<double> filter_cutoff) {
  AlignedScores out;
  if (by_method.size() < 2)
    throw std::invalid_argument("align_origins needs sequences from at least two methods");

  // Each method's origin -> sequence (length >= 2 only).
  std::map<TrackMethod, std::map<CommunityId, const EvolvingSequence*>> origin_maps;
  for (const auto& [method, seqs] : by_method) {
    out.methods.push_back(method);
    auto& omap = origin_maps[method];
    for (const auto& s : seqs)
      if (s.length() >= 2) omap.emplace(s.origin(), &s);
  }

  std::set<CommunityId> aligned;
  bool first = true;
  for (const auto& [method, omap] : origin_maps) {
    std::set<CommunityId> mine;
    for (const auto& [origin, seq] : omap) mine.insert(origin);
    if (first) {
      aligned = std::move(mine);
      first = false;
    } else {
      std::set<CommunityId> kept;
      std::set_intersection(aligned.begin(), aligned.end(), mine.begin(), mine.end(),
                            std::inserter(kept, kept.begin()));
      aligned = std::move(kept);
    }
  }

  out.origins.assign(aligned.begin(), aligned.end());
  out.apcc_cells.assign(out.methods.size(), {});
  out.apnp_cells.assign(out.methods.size(), {});
  for (std::size_t mi = 0; mi < out.methods.size(); ++mi) {
    const auto& omap = origin_maps[out.methods[mi]];
    for (const auto& origin : out.origins) {
      const EvolvingSequence* seq = omap.at(origin);
      out.apcc_cells[mi].push_back(apcc(*seq, vectors));
      out.apnp_cells[mi].push_back(apnp(*seq, layers));
    }
  }

  if (filter_cutoff) {
    // Drop origins every method already tracks well: all cells above cutoff.
    std::vector<std::size_t> keep;
    for (std::size_t oi = 0; oi < out.origins.size(); ++oi) {
      bool all_above = true;
      for (std::size_t mi = 0; mi < out.methods.size(); ++mi)
        if (out.apcc_cells[mi][oi] <= *filter_cutoff || out.apnp_cells[mi][oi] <= *filter_cutoff)
          all_above = false;
      if (!all_above) keep.push_back(oi);
    }
    AlignedScores filtered;
    filtered.methods = out.methods;
    filtered.apcc_cells.assign(out.methods.size(), {});
    filtered.apnp_cells.assign(out.methods.size(), {});
    for (std::size_t oi : keep) {
      filtered.origins.push_back(out.origins[oi]);
      for (std::size_t mi = 0; mi < out.methods.size(); ++mi) {
        filtered.apcc_cells[mi].push_back(out.apcc_cells[mi][oi]);
        filtered.apnp_cells[mi].push_back(out.apnp_cells[mi][oi]);
      }
    }
    return filtered;
  }
  return out;
}

EvaluationReport evaluate(const std::string& dataset,
                          const std::map<TrackMethod, std::vector<EvolvingSequence>>& by_method,
                          const TransitionVectorSet& vectors,
                          const std::vector<CommunityLayer>& layers,
                          std::optional<double> filter_cutoff) {
  EvaluationReport report;
  report.dataset = dataset;
  for (const auto& [method, seqs] : by_method) {
    report.total_sequences[method] = seqs.size();
    std::size_t evolving = 0;
    for (const auto& s : seqs) {
      if (s.length() < 2) continue;
      ++evolving;
      report.per_sequence.push_back(
          SequenceScore{method, s.origin(), s.length(), apcc(s, vectors), apnp(s, layers)});
    }
    report.quantity[method] = evolving;
  }
  if (by_method.size() >= 2)
    report.aligned = align_origins(by_method, vectors, layers, filter_cutoff);
  return report;
}

void write_quantity_csv(const EvaluationReport& report, std::ostream& out) {
  out << "dataset,method,count\n";
  for (const auto& [method, count] : report.quantity)
    out << report.dataset << ',' << method_name(method) << ',' << count << '\n';
}

void write_aligned_matrix_csv(const AlignedScores& aligned, bool apnp_metric, std::ostream& out) {
  out << "method";
  for (const auto& origin : aligned.origins) out << ',' << to_string(origin);
  out << '\n';
  for (std::size_t mi = 0; mi < aligned.methods.size(); ++mi) {
    out << method_name(aligned.methods[mi]);
    const auto& row = apnp_metric ? aligned.apnp_cells[mi] : aligned.apcc_cells[mi];
    for (double v : row) out << ',' << fmt_double(v);
    out << '\n';
  }
}

void write_sequence_scores_csv(const EvaluationReport& report, std::ostream& out) {
  out << "method,origin,length,apcc,apnp\n";
  for (const auto& row : report.per_sequence)
    out << method_name(row.method) << ',' << to_string(row.origin) << ',' << row.length << ','
        << fmt_double(row.apcc) << ',' << fmt_double(row.apnp) << '\n';
}

}  // namespace evotrack
