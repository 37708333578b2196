#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evotrack/detection.hpp"

namespace evotrack {

enum class Measure { jaccard, modec, inclusion, modified_jaccard, mutual };

std::string measure_name(Measure m);
Measure measure_from_name(const std::string& name);

/// |A n B| / |A u B|
double jaccard(const Community& a, const Community& b);

/// |A n B| / max(|A|, |B|), floored to 0 below the threshold k.
double modec(const Community& a, const Community& b, double k);
double modec_raw(const Community& a, const Community& b);

/// Directed inclusion of a in b: the shared-node fraction of a weighted by
/// how important the shared nodes are inside a. Node importance is the
/// within-community degree in a's snapshot, floored at 1.
double inclusion(const Community& a, const Community& b, const Snapshot& snapshot_a);

/// max(|A n B| / |A|, |A n B| / |B|)
double modified_jaccard(const Community& a, const Community& b);

/// Per-community vector of node-sharing with every community at every
/// timestamp (self included), normalized to sum 1. Stored sparse over the
/// global community index.
class TransitionProbabilityVector {
 public:
  TransitionProbabilityVector() = default;
  /// Sparse constructor: entries sorted by index, length = total community count.
  TransitionProbabilityVector(std::size_t length, std::vector<std::pair<std::size_t, double>> nz);
  static TransitionProbabilityVector from_dense(const std::vector<double>& values);

  std::size_t length() const { return length_; }
  double component(std::size_t alpha) const;
  const std::vector<std::pair<std::size_t, double>>& nonzeros() const { return nz_; }
  double sum() const;

 private:
  std::size_t length_ = 0;
  std::vector<std::pair<std::size_t, double>> nz_;
};

/// Global index over all communities of a detection run, in (t, q) order.
class CommunityIndex {
 public:
  CommunityIndex() = default;
  explicit CommunityIndex(const std::vector<CommunityLayer>& layers);

  std::size_t total() const { return ids_.size(); }
  std::size_t index_of(const CommunityId& id) const;
  const CommunityId& id_of(std::size_t index) const { return ids_.at(index); }

 private:
  std::vector<CommunityId> ids_;
  std::map<CommunityId, std::size_t> lookup_;
};

struct TransitionVectorSet {
  CommunityIndex index;
  std::vector<TransitionProbabilityVector> vectors;  // by global index

  const TransitionProbabilityVector& for_community(const CommunityId& id) const {
    return vectors.at(index.index_of(id));
  }
};

/// Builds the transition probability vectors for every community across the
/// given layers (at least 2).
TransitionVectorSet transition_vectors(const std::vector<CommunityLayer>& layers);

/// Harmonic-mean overlap of two transition vectors, floored to 0 at or below
/// the threshold lambda. Zero-denominator terms contribute 0.
double mutual(const TransitionProbabilityVector& vi, const TransitionProbabilityVector& vj,
              double lambda);
double mutual_raw(const TransitionProbabilityVector& vi, const TransitionProbabilityVector& vj);

/// Raw pairwise scores for all community pairs at distinct timestamps.
/// Symmetric measures store one entry per unordered pair, keyed with the
/// earlier timestamp first; inclusion stores both directions, keyed
/// (from, to). Thresholds are applied later, at tracking time.
struct SimilarityMatrix {
  Measure measure = Measure::jaccard;
  std::vector<std::pair<std::pair<CommunityId, CommunityId>, double>> entries;  // sorted by key

  /// Raw score for the (a, b) pair; 0 when no entry exists. For symmetric
  /// measures the key order is normalized internally.
  double at(const CommunityId& a, const CommunityId& b) const;
  std::size_t size() const { return entries.size(); }
};

/// Extra inputs some measures need when scoring all pairs.
struct ScoreContext {
  const TemporalNetwork* network = nullptr;        // inclusion
  const TransitionVectorSet* vectors = nullptr;    // mutual
};

SimilarityMatrix score_all_pairs(const std::vector<CommunityLayer>& layers, Measure measure,
                                 const ScoreContext& ctx = {});

/// CSV columns: t_i,q_i,t_j,q_j,measure,score
void write_similarity_csv(const SimilarityMatrix& matrix, std::ostream& out);

/// Nonzero scores from a matrix, for threshold fitting. direction: 0 = all
/// entries, +1 = forward (t_i < t_j), -1 = backward (t_i > t_j).
std::vector<double> nonzero_scores(const SimilarityMatrix& matrix, int direction = 0);

}  // namespace evotrack
