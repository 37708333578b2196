#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evotrack/tracking.hpp"

namespace evotrack {

/// Pearson correlation of two transition vectors over their full length,
/// mapped affinely from [-1,1] to [0,1]. Throws DegenerateFitError when a
/// vector is constant (zero variance).
double pearson_normalized(const TransitionProbabilityVector& vi,
                          const TransitionProbabilityVector& vj);

/// Average normalized Pearson correlation over all unordered member pairs of
/// a sequence (length >= 2): chain coherence.
double apcc(const EvolvingSequence& sequence, const TransitionVectorSet& vectors);

/// Average fraction of the origin community's nodes still present in each
/// later member (length >= 2): membership persistence.
double apnp(const EvolvingSequence& sequence, const std::vector<CommunityLayer>& layers);

/// APCC/APNP cells for the origins every method tracked into a sequence of
/// length >= 2. Rows follow `methods`, columns follow `origins`.
struct AlignedScores {
  std::vector<TrackMethod> methods;
  std::vector<CommunityId> origins;  // ascending
  std::vector<std::vector<double>> apcc_cells;  // [method][origin]
  std::vector<std::vector<double>> apnp_cells;

  bool empty() const { return origins.empty(); }
};

/// Keeps only origins tracked (length >= 2) by every method, scores each
/// (method, origin) cell, and optionally removes origins whose every cell
/// exceeds `filter_cutoff` (communities all methods already track well).
AlignedScores align_origins(const std::map<TrackMethod, std::vector<EvolvingSequence>>& by_method,
                            const TransitionVectorSet& vectors,
                            const std::vector<CommunityLayer>& layers,
                            std::optional<double> filter_cutoff = std::nullopt);

struct SequenceScore {
  TrackMethod method;
  CommunityId origin;
  int length = 0;
  double apcc = 0.0;
  double apnp = 0.0;
};

struct EvaluationReport {
  std::string dataset;
  /// Number of evolving sequences (length >= 2) per method.
  std::map<TrackMethod, std::size_t> quantity;
  std::map<TrackMethod, std::size_t> total_sequences;
  std::vector<SequenceScore> per_sequence;  // length >= 2 only
  AlignedScores aligned;
};

EvaluationReport evaluate(const std::string& dataset,
                          const std::map<TrackMethod, std::vector<EvolvingSequence>>& by_method,
                          const TransitionVectorSet& vectors,
                          const std::vector<CommunityLayer>& layers,
                          std::optional<double> filter_cutoff = std::nullopt);

/// CSV `dataset,method,count`.
void write_quantity_csv(const EvaluationReport& report, std::ostream& out);
/// CSV matrix, rows = methods, columns = aligned origins.
void write_aligned_matrix_csv(const AlignedScores& aligned, bool apnp_metric, std::ostream& out);
/// CSV `method,origin,length,apcc,apnp`, one row per scored sequence.
void write_sequence_scores_csv(const EvaluationReport& report, std::ostream& out);

}  // namespace evotrack
