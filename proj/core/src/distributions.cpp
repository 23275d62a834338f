#include "pedsafe/distributions.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "pedsafe/error.hpp"

namespace pedsafe::stochastic {

ExponentialModel ExponentialModel::make(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("exponential rate must be positive");
  }
  return {lambda};
}

LogNormalModel LogNormalModel::make(double mu, double sigma) {
  if (!std::isfinite(mu)) throw DomainError("log-normal mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("log-normal sigma must be positive");
  }
  return {mu, sigma};
}

double exp_pdf(const ExponentialModel& m, double h) {
  if (h < 0.0) throw DomainError("headway must be non-negative");
  return m.lambda * std::exp(-m.lambda * h);
}

double exp_cdf(const ExponentialModel& m, double h) {
  if (h < 0.0) return 0.0;
  return -std::expm1(-m.lambda * h);
}

double lognormal_pdf(const LogNormalModel& m, double v) {
  if (!(v > 0.0)) throw DomainError("speed must be positive");
  const double z = (std::log(v) - m.mu) / m.sigma;
  return std::exp(-0.5 * z * z) / (m.sigma * v * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(const LogNormalModel& m, double v) {
  if (!(v > 0.0)) return 0.0;
  return normal_cdf((std::log(v) - m.mu) / m.sigma);
}

double normal_cdf(double x) {
  return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("normal quantile needs u in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

ExponentialModel fit_exponential(std::span<const double> samples) {
  if (samples.empty()) throw FitError("no headway samples");
  double sum = 0.0;
  for (double h : samples) {
    if (!(h >= 0.0) || !std::isfinite(h)) throw FitError("headway samples must be finite and >= 0");
    sum += h;
  }
  if (!(sum > 0.0)) throw FitError("headway samples are all zero");
  return {static_cast<double>(samples.size()) / sum};
}

LogNormalModel fit_lognormal(std::span<const double> samples) {
  if (samples.empty()) throw FitError("no speed samples");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) {
    if (!(v > 0.0) || !std::isfinite(v)) throw FitError("speed samples must be finite and > 0");
    sum += std::log(v);
  }
  const double mu = sum / n;
  double ss = 0.0;
  for (double v : samples) {
    const double d = std::log(v) - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw FitError("degenerate fit: log-speed variance is zero");
  return {mu, sigma};
}

double headway_from_uniform(const ExponentialModel& m, double u) {
  return -std::log1p(-u) / m.lambda;
}

double speed_from_uniform(const LogNormalModel& m, double u) {
  return std::exp(m.mu + m.sigma * normal_quantile(u));
}

double sample_headway(const ExponentialModel& m, RandomStream& rng) {
  return headway_from_uniform(m, rng.uniform_open());
}

double sample_speed(const LogNormalModel& m, RandomStream& rng) {
  return speed_from_uniform(m, rng.uniform_open());
}

double sample_truncated_normal(double mean, double sd, double lower, RandomStream& rng) {
  const double a = normal_cdf((lower - mean) / sd);
  const double u = a + rng.uniform_open() * (1.0 - a);
  if (!(u < 1.0)) return lower;
  return std::max(lower, mean + sd * normal_quantile(u));
}

}  // namespace pedsafe::stochastic
