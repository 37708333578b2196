#include "evotrack/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <thread>

#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"

namespace evotrack {

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::jaccard: return "jaccard";
    case Measure::modec: return "modec";
    case Measure::inclusion: return "inclusion";
    case Measure::modified_jaccard: return "modified_jaccard";
    case Measure::mutual: return "mutual";
  }
  return "?";
}

Measure measure_from_name(const std::string& name) {
  if (name == "jaccard") return Measure::jaccard;
  if (name == "modec") return Measure::modec;
  if (name == "inclusion") return Measure::inclusion;
  if (name == "modified_jaccard" || name == "mj") return Measure::modified_jaccard;
  if (name == "mutual") return Measure::mutual;
  throw ConfigError("unknown measure '" + name + "'");
}

namespace {

std::size_t intersection_size(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  std::size_t c = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else {
      ++c;
      ++ia;
      ++ib;
    }
  }
  return c;
}

}  // namespace

double jaccard(const Community& a, const Community& b) {
  const auto shared = intersection_size(a.members, b.members);
  const auto uni = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

double modec_raw(const Community& a, const Community& b) {
  const auto shared = intersection_size(a.members, b.members);
  return static_cast<double>(shared) / static_cast<double>(std::max(a.size(), b.size()));
}

double modec(const Community& a, const Community& b, double k) {
  const double r = modec_raw(a, b);
  return r >= k ? r : 0.0;
}

double inclusion(const Community& a, const Community& b, const Snapshot& snapshot_a) {
  for (NodeId n : a.members)
    if (!snapshot_a.has_node(n))
      throw DataError("inclusion: community member missing from its snapshot");
  double importance_total = 0.0, importance_shared = 0.0;
  std::size_t shared = 0;
  for (NodeId n : a.members) {
    // Importance = within-community degree, floored at 1 so edgeless
    // communities keep a nonzero denominator.
    const double ni = std::max(1, degree_within(a.members, snapshot_a, n));
    importance_total += ni;
    if (std::binary_search(b.members.begin(), b.members.end(), n)) {
      importance_shared += ni;
      ++shared;
    }
  }
  const double node_fraction = static_cast<double>(shared) / static_cast<double>(a.size());
  return node_fraction * (importance_shared / importance_total);
}

double modified_jaccard(const Community& a, const Community& b) {
  const auto shared = static_cast<double>(intersection_size(a.members, b.members));
  return std::max(shared / static_cast<double>(a.size()), shared / static_cast<double>(b.size()));
}

// ---------------------------------------------------------------------------
// Transition probability vectors
// ---------------------------------------------------------------------------

TransitionProbabilityVector::TransitionProbabilityVector(
    std::size_t length, std::vector<std::pair<std::size_t, double>> nz)
    : length_(length), nz_(std::move(nz)) {}

TransitionProbabilityVector TransitionProbabilityVector::from_dense(
    const std::vector<double>& values) {
  std::vector<std::pair<std::size_t, double>> nz;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) nz.push_back({i, values[i]});
  return TransitionProbabilityVector(values.size(), std::move(nz));
}

double TransitionProbabilityVector::component(std::size_t alpha) const {
  auto it = std::lower_bound(nz_.begin(), nz_.end(), alpha,
                             [](const auto& e, std::size_t a) { return e.first < a; });
  return (it != nz_.end() && it->first == alpha) ? it->second : 0.0;
}

double TransitionProbabilityVector::sum() const {
  double s = 0.0;
  for (const auto& [i, v] : nz_) s += v;
  return s;
}

CommunityIndex::CommunityIndex(const std::vector<CommunityLayer>& layers) {
  for (const auto& layer : layers)
    for (const auto& c : layer.communities) {
      lookup_.emplace(c.id, ids_.size());
      ids_.push_back(c.id);
    }
}

std::size_t CommunityIndex::index_of(const CommunityId& id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end())
    throw std::invalid_argument("community " + to_string(id) + " is not in the index");
  return it->second;
}

TransitionVectorSet transition_vectors(const std::vector<CommunityLayer>& layers) {
  if (layers.size() < 2)
    throw std::invalid_argument("transition_vectors needs at least two layers");
  TransitionVectorSet set;
  set.index = CommunityIndex(layers);
  const std::size_t total = set.index.total();

  // node -> global indices of the communities containing it
  std::unordered_map<NodeId, std::vector<std::size_t>> containing;
  {
    std::size_t g = 0;
    for (const auto& layer : layers)
      for (const auto& c : layer.communities) {
        for (NodeId v : c.members) containing[v].push_back(g);
        ++g;
      }
  }

  set.vectors.resize(total);
  std::size_t g = 0;
  std::vector<double> raw(total, 0.0);
  for (const auto& layer : layers)
    for (const auto& c : layer.communities) {
      std::fill(raw.begin(), raw.end(), 0.0);
      for (NodeId v : c.members)
        for (std::size_t other : containing[v]) raw[other] += 1.0;
      double sum = 0.0;
      for (double r : raw) sum += r;
      std::vector<std::pair<std::size_t, double>> nz;
      for (std::size_t i = 0; i < total; ++i)
        if (raw[i] != 0.0) nz.push_back({i, raw[i] / sum});
      set.vectors[g] = TransitionProbabilityVector(total, std::move(nz));
      ++g;
    }
  return set;
}

double mutual_raw(const TransitionProbabilityVector& vi, const TransitionProbabilityVector& vj) {
  if (vi.length() != vj.length())
    throw std::invalid_argument("mutual: transition vectors have different lengths");
  // Terms with a zero component vanish, so only shared support contributes.
  double s = 0.0;
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
      s += 2.0 * ia->second * ib->second / (ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return s;
}

double mutual(const TransitionProbabilityVector& vi, const TransitionProbabilityVector& vj,
              double lambda) {
  const double s = mutual_raw(vi, vj);
  return s > lambda ? s : 0.0;
}

// ---------------------------------------------------------------------------
// All-pairs scoring
// ---------------------------------------------------------------------------

namespace {

using Entry = std::pair<std::pair<CommunityId, CommunityId>, double>;

void score_layer_pair(const CommunityLayer& la, const CommunityLayer& lb, Measure measure,
                      const ScoreContext& ctx, std::vector<Entry>& out) {
  for (const auto& a : la.communities) {
    for (const auto& b : lb.communities) {
      switch (measure) {
        case Measure::jaccard:
          out.push_back({{a.id, b.id}, jaccard(a, b)});
          break;
        case Measure::modec:
          out.push_back({{a.id, b.id}, modec_raw(a, b)});
          break;
        case Measure::modified_jaccard:
          out.push_back({{a.id, b.id}, modified_jaccard(a, b)});
          break;
        case Measure::inclusion: {
          const Snapshot& sa = ctx.network->snapshot_at(la.timestamp_index);
          const Snapshot& sb = ctx.network->snapshot_at(lb.timestamp_index);
          out.push_back({{a.id, b.id}, inclusion(a, b, sa)});
          out.push_back({{b.id, a.id}, inclusion(b, a, sb)});
          break;
        }
        case Measure::mutual:
          out.push_back(
              {{a.id, b.id}, mutual_raw(ctx.vectors->for_community(a.id),
                                        ctx.vectors->for_community(b.id))});
          break;
      }
    }
  }
}

}  // namespace

SimilarityMatrix score_all_pairs(const std::vector<CommunityLayer>& layers, Measure measure,
                                 const ScoreContext& ctx) {
  if (measure == Measure::inclusion && ctx.network == nullptr)
    throw ConfigError("inclusion scoring needs the temporal network for node importance");
  if (measure == Measure::mutual && ctx.vectors == nullptr)
    throw ConfigError("mutual scoring needs precomputed transition vectors");

  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < layers.size(); ++i)
    for (std::size_t j = i + 1; j < layers.size(); ++j) blocks.push_back({i, j});

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), blocks.size());
  std::vector<std::future<std::vector<Entry>>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::vector<Entry> local;
      for (std::size_t bi = w; bi < blocks.size(); bi += workers)
        score_layer_pair(layers[blocks[bi].first], layers[blocks[bi].second], measure, ctx, local);
      return local;
    }));
  }

  SimilarityMatrix matrix;
  matrix.measure = measure;
  for (auto& f : futures) {
    auto part = f.get();
    matrix.entries.insert(matrix.entries.end(), part.begin(), part.end());
  }
  std::sort(matrix.entries.begin(), matrix.entries.end(),
            [](const Entry& x, const Entry& y) { return x.first < y.first; });
  return matrix;
}

double SimilarityMatrix::at(const CommunityId& a, const CommunityId& b) const {
  std::pair<CommunityId, CommunityId> key{a, b};
  if (measure != Measure::inclusion && b < a) key = {b, a};
  auto it = std::lower_bound(entries.begin(), entries.end(), key,
                             [](const Entry& e, const auto& k) { return e.first < k; });
  return (it != entries.end() && it->first == key) ? it->second : 0.0;
}

void write_similarity_csv(const SimilarityMatrix& matrix, std::ostream& out) {
  out << "t_i,q_i,t_j,q_j,measure,score\n";
  const std::string name = measure_name(matrix.measure);
  for (const auto& [key, score] : matrix.entries)
    out << key.first.t << ',' << key.first.q << ',' << key.second.t << ',' << key.second.q << ','
        << name << ',' << fmt_double(score) << '\n';
}

std::vector<double> nonzero_scores(const SimilarityMatrix& matrix, int direction) {
  std::vector<double> scores;
  for (const auto& [key, score] : matrix.entries) {
    if (score == 0.0) continue;
    if (direction > 0 && key.first.t >= key.second.t) continue;
    if (direction < 0 && key.first.t <= key.second.t) continue;
    scores.push_back(score);
  }
  return scores;
}

}  // namespace evotrack
