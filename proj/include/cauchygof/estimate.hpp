#pragma once

// Equivariant location-scale estimators for the Cauchy family and the scaled
// residuals Y_j = (X_j - alpha) / beta on which every statistic is computed.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cauchygof {

struct LocationScale {
  double alpha = 0.0;
  double beta = 1.0;
};

// Median and half-interquartile range.
struct Miq {};
// Maximum likelihood.
struct Ml {};
// Minimum weighted L2 distance between the ECF and exp(-|t|), weight
// exp(-nu |t|).
struct Eise {
  double nu = 1.0;
};

using EstimatorKind = std::variant<Miq, Ml, Eise>;

std::string to_string(const EstimatorKind& kind);
// "miq", "ml", "eise:<nu>" ("eise" alone means nu = 1).
EstimatorKind parse_estimator(std::string_view text);

struct ScaledResiduals {
  std::vector<double> values;
  LocationScale fit;
  EstimatorKind estimator;
};

// Order statistic X_(ceil(n p)) of the sample, 0 < p <= 1.
double sample_quantile(std::span<const double> sorted, double p);

// Median (mean of the central pair for even n) and
// (xi_{3/4} - xi_{1/4}) / 2. Needs n >= 3.
LocationScale fit_miq(std::span<const double> sample);

// Root of the Cauchy likelihood equations by damped Newton from the MIQ
// start, falling back to Nelder-Mead on the negative log-likelihood.
LocationScale fit_ml(std::span<const double> sample);

LocationScale fit_eise(std::span<const double> sample, double nu);

LocationScale fit(std::span<const double> sample, const EstimatorKind& kind);

ScaledResiduals residuals(std::span<const double> sample,
                          const EstimatorKind& kind);
ScaledResiduals residuals(std::span<const double> sample,
                          const LocationScale& fit, const EstimatorKind& kind);

// Likelihood equations divided by n:
// ( (1/n) sum 2z/(1+z^2), (1/n) sum (z^2-1)/(z^2+1) ), z = (x - alpha)/beta.
std::array<double, 2> ml_score(std::span<const double> sample,
                               const LocationScale& at);

double cauchy_log_likelihood(std::span<const double> sample,
                             const LocationScale& at);

// I(alpha, beta), the objective minimized by fit_eise.
double eise_objective(std::span<const double> sample, const LocationScale& at,
                      double nu);

}  // namespace cauchygof
