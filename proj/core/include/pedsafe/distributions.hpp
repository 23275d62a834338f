#pragma once

#include <span>

#include "pedsafe/random.hpp"

namespace pedsafe::stochastic {

/// Negative-exponential headway model, rate in 1/s.
struct ExponentialModel {
  double lambda = 0.0;
  static ExponentialModel make(double lambda);
  bool operator==(const ExponentialModel&) const = default;
};

/// Log-normal speed model over m/s; mu and sigma are in log space.
struct LogNormalModel {
  double mu = 0.0;
  double sigma = 0.0;
  static LogNormalModel make(double mu, double sigma);
  bool operator==(const LogNormalModel&) const = default;
};

// Fitted traffic parameters from ~30k field observations.
inline constexpr ExponentialModel kHeadway{0.1742};
inline constexpr LogNormalModel kSpeedNonIntersection{1.8304, 0.4857};
inline constexpr LogNormalModel kSpeedIntersection{1.5853, 0.3827};

double exp_pdf(const ExponentialModel& m, double h);
double exp_cdf(const ExponentialModel& m, double h);
double lognormal_pdf(const LogNormalModel& m, double v);
double lognormal_cdf(const LogNormalModel& m, double v);

/// Standard normal CDF and quantile.
double normal_cdf(double x);
double normal_quantile(double u);

/// MLE: lambda = 1 / mean.
ExponentialModel fit_exponential(std::span<const double> samples);
/// MLE: mu = mean(ln v), sigma = population std(ln v).
LogNormalModel fit_lognormal(std::span<const double> samples);

// Inverse-CDF transforms of a single uniform in (0, 1).
double headway_from_uniform(const ExponentialModel& m, double u);
double speed_from_uniform(const LogNormalModel& m, double u);

double sample_headway(const ExponentialModel& m, RandomStream& rng);
double sample_speed(const LogNormalModel& m, RandomStream& rng);

/// Normal(mean, sd) truncated to (lower, inf), by inverse CDF.
double sample_truncated_normal(double mean, double sd, double lower, RandomStream& rng);

}  // namespace pedsafe::stochastic
