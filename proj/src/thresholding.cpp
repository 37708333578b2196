#include "evotrack/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "evotrack/errors.hpp"
#include "evotrack/format.hpp"

namespace evotrack {

namespace {

constexpr std::size_t kMinSamples = 20;
constexpr int kMaxIterations = 500;
constexpr double kLoglikTol = 1e-8;
constexpr double kSdFloor = 1e-6;
constexpr double kVarFloor = 1e-12;

double gaussian_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * 2.5066282746310002);
}

double gamma_pdf(double x, double shape, double rate) {
  if (x <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                  std::lgamma(shape));
}

double percentile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

void sync_gamma_params(MixtureComponent& c) {
  // Method of moments from (mean, sd).
  const double var = std::max(c.sd * c.sd, kVarFloor);
  c.shape = c.mean * c.mean / var;
  c.rate = c.mean / var;
}

}  // namespace

std::string family_name(MixtureFamily f) {
  return f == MixtureFamily::gaussian ? "gaussian" : "gamma";
}

MixtureFamily family_from_name(const std::string& name) {
  if (name == "gaussian") return MixtureFamily::gaussian;
  if (name == "gamma") return MixtureFamily::gamma;
  throw ConfigError("unknown mixture family '" + name + "'");
}

double MixtureFit::component_pdf(int component, double x) const {
  const MixtureComponent& c = component == 0 ? low : high;
  return family == MixtureFamily::gaussian ? gaussian_pdf(x, c.mean, c.sd)
                                           : gamma_pdf(x, c.shape, c.rate);
}

double MixtureFit::pdf(double x) const {
  return low.weight * component_pdf(0, x) + high.weight * component_pdf(1, x);
}

MixtureFit fit_mixture(std::vector<double> scores, MixtureFamily family) {
  if (scores.size() < kMinSamples)
    throw DegenerateFitError("mixture fit needs at least " + std::to_string(kMinSamples) +
                             " nonzero scores, got " + std::to_string(scores.size()) +
                             "; supply a threshold override instead");
  std::sort(scores.begin(), scores.end());
  const auto n = scores.size();
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(n);
  if (var <= kVarFloor)
    throw DegenerateFitError("similarity scores have zero variance; supply a threshold override");

  MixtureFit fit;
  fit.family = family;
  fit.n = n;
  fit.low.weight = fit.high.weight = 0.5;
  fit.low.mean = percentile(scores, 0.25);
  fit.high.mean = percentile(scores, 0.75);
  fit.low.sd = fit.high.sd = std::max(std::sqrt(var) / 2.0, kSdFloor);
  if (fit.high.mean - fit.low.mean < kSdFloor) {
    // Identical quartiles (heavily tied sample): nudge the starts apart.
    fit.low.mean = mean - std::sqrt(var) / 2.0;
    fit.high.mean = mean + std::sqrt(var) / 2.0;
  }
  if (family == MixtureFamily::gamma) {
    if (scores.front() <= 0.0)
      throw DegenerateFitError("gamma mixture requires strictly positive scores");
    sync_gamma_params(fit.low);
    sync_gamma_params(fit.high);
  }

  std::vector<double> resp(n);  // responsibility of the low component
  double prev_loglik = -HUGE_VAL;
  MixtureFit prev = fit;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    // E step
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = fit.low.weight * fit.component_pdf(0, scores[i]);
      const double b = fit.high.weight * fit.component_pdf(1, scores[i]);
      const double total = a + b;
      resp[i] = total > 0.0 ? a / total : 0.5;
      loglik += std::log(std::max(total, 1e-300));
    }
    fit.loglik = loglik;
    fit.loglik_trace.push_back(loglik);
    fit.iterations = iter + 1;
    if (family == MixtureFamily::gamma && loglik < prev_loglik - 1e-12) {
      // Method-of-moments M-step is not an exact ascent step; keep the best.
      prev.loglik_trace = fit.loglik_trace;
      prev.iterations = fit.iterations;
      fit = prev;
      break;
    }
    if (std::abs(loglik - prev_loglik) < kLoglikTol) break;
    prev_loglik = loglik;
    prev = fit;

    // M step
    double r0 = 0.0, sum0 = 0.0, sum1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r0 += resp[i];
      sum0 += resp[i] * scores[i];
      sum1 += (1.0 - resp[i]) * scores[i];
    }
    const double r1 = static_cast<double>(n) - r0;
    if (r0 < 1e-9 || r1 < 1e-9) break;  // one component vanished
    fit.low.weight = r0 / static_cast<double>(n);
    fit.high.weight = r1 / static_cast<double>(n);
    fit.low.mean = sum0 / r0;
    fit.high.mean = sum1 / r1;
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d0 = scores[i] - fit.low.mean;
      const double d1 = scores[i] - fit.high.mean;
      v0 += resp[i] * d0 * d0;
      v1 += (1.0 - resp[i]) * d1 * d1;
    }
    fit.low.sd = std::max(std::sqrt(v0 / r0), kSdFloor);
    fit.high.sd = std::max(std::sqrt(v1 / r1), kSdFloor);
    if (family == MixtureFamily::gamma) {
      sync_gamma_params(fit.low);
      sync_gamma_params(fit.high);
    }
  }

  if (fit.low.mean > fit.high.mean) std::swap(fit.low, fit.high);
  return fit;
}

Threshold junction_point(const MixtureFit& fit) {
  Threshold th;
  th.family = fit.family;
  th.n = fit.n;

  const double lo = fit.low.mean;
  const double hi = fit.high.mean;
  // log(w_low pdf_low) - log(w_high pdf_high); positive near the low mean.
  const auto diff = [&](double x) {
    return std::log(std::max(fit.low.weight * fit.component_pdf(0, x), 1e-300)) -
           std::log(std::max(fit.high.weight * fit.component_pdf(1, x), 1e-300));
  };

  const double eps = std::max((hi - lo) * 1e-9, 1e-12);
  double a = lo + eps, b = hi - eps;
  if (a < b && diff(a) > 0.0 && diff(b) < 0.0) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      if (diff(mid) > 0.0)
        a = mid;
      else
        b = mid;
      if (b - a < 1e-6) break;
    }
    th.value = 0.5 * (a + b);
    th.provenance = ThresholdProvenance::junction;
  } else {
    th.value = fit.high.weight * lo + fit.low.weight * hi;
    th.provenance = ThresholdProvenance::fallback_midpoint;
  }
  return th;
}

std::string provenance_name(ThresholdProvenance p) {
  switch (p) {
    case ThresholdProvenance::junction: return "junction";
    case ThresholdProvenance::fallback_midpoint: return "fallback-midpoint";
    case ThresholdProvenance::user_override: return "user-override";
  }
  return "?";
}

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::none: return "none";
    case Direction::forward: return "forward";
    case Direction::backward: return "backward";
  }
  return "?";
}

void write_threshold_csv(const std::vector<Threshold>& thresholds, std::ostream& out) {
  out << "measure,direction,family,threshold,provenance,n\n";
  for (const auto& th : thresholds)
    out << measure_name(th.measure) << ',' << direction_name(th.direction) << ','
        << family_name(th.family) << ',' << fmt_double(th.value) << ','
        << provenance_name(th.provenance) << ',' << th.n << '\n';
}

}  // namespace evotrack
