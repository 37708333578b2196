#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "evotrack/similarity.hpp"

namespace evotrack {

enum class MixtureFamily { gaussian, gamma };

std::string family_name(MixtureFamily f);
MixtureFamily family_from_name(const std::string& name);

/// One fitted mixture component. Gaussian components use mean/sd; gamma
/// components use shape/rate (mean = shape/rate, kept in sync).
struct MixtureComponent {
  double weight = 0.5;
  double mean = 0.0;
  double sd = 1.0;
  double shape = 1.0;
  double rate = 1.0;
};

/// Two-component mixture fitted by EM. Components are ordered by ascending
/// mean. `loglik_trace` holds the log-likelihood after each iteration.
struct MixtureFit {
  MixtureFamily family = MixtureFamily::gaussian;
  MixtureComponent low;   // smaller mean
  MixtureComponent high;  // larger mean
  double loglik = 0.0;
  std::size_t n = 0;
  int iterations = 0;
  std::vector<double> loglik_trace;

  /// Unweighted component density at x (0 = low, 1 = high).
  double component_pdf(int component, double x) const;
  /// Full mixture density at x.
  double pdf(double x) const;
};

/// Fits a two-component mixture to the nonzero similarity scores.
/// Deterministic initialization: component means at the 25th/75th sample
/// percentiles with equal weights. Converges when the log-likelihood change
/// drops below 1e-8 or after 500 iterations. The gamma variant uses a
/// method-of-moments M-step and stops early if the log-likelihood would
/// decrease.
///
/// Throws DegenerateFitError for fewer than 20 scores or zero sample
/// variance.
MixtureFit fit_mixture(std::vector<double> scores, MixtureFamily family);

enum class ThresholdProvenance { junction, fallback_midpoint, user_override };
enum class Direction { none, forward, backward };

std::string provenance_name(ThresholdProvenance p);
std::string direction_name(Direction d);

struct Threshold {
  double value = 0.0;
  Measure measure = Measure::jaccard;
  Direction direction = Direction::none;
  ThresholdProvenance provenance = ThresholdProvenance::junction;
  MixtureFamily family = MixtureFamily::gaussian;
  std::size_t n = 0;
};

/// The point between the two component means where the weighted component
/// densities cross, located by bisection on the log-density difference to
/// 1e-6. When the weighted densities do not cross between the means, falls
/// back to the weighted midpoint w_high*mean_low + w_low*mean_high.
///
/// Caller fills in measure/direction on the result.
Threshold junction_point(const MixtureFit& fit);

/// CSV columns: measure,direction,family,threshold,provenance,n
void write_threshold_csv(const std::vector<Threshold>& thresholds, std::ostream& out);

}  // namespace evotrack
