#pragma once

// The weighted L2 statistic T_{n,a} built on the characterization
// E[(it - 2X/(1+X^2)) e^{itX}] = 0 of the standard Cauchy law, its weight
// limits, and the population functional Delta_F.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "cauchygof/dist.hpp"
#include "cauchygof/estimate.hpp"

namespace cauchygof {

struct StatisticValue {
  double value = 0.0;
  // Set when a slightly negative rounding result was reported as 0.
  bool clamped = false;
};

// n * int |n^{-1} sum_j (it - 2Y_j/(1+Y_j^2)) e^{itY_j}|^2 e^{-a|t|} dt, in
// closed form as a double sum.
StatisticValue tna(std::span<const double> y, double a);
StatisticValue compute_tna(const ScaledResiduals& res, double a);

// sqrt(2n) ((8/n) sum Y^2/(1+Y^2)^2 - 1); asymptotically N(0,1) under the null.
double tn0(std::span<const double> y);
double compute_tn0(const ScaledResiduals& res);

// (a (T_{n,a} - 4/a^3), (8/n) sum Y^2/(1+Y^2)^2); equal in the limit a -> 0.
std::pair<double, double> limit_small_a_check(std::span<const double> y,
                                              double a);
// (a T_{n,a}, (8/n) (sum Y/(1+Y^2))^2); equal in the limit a -> infinity.
std::pair<double, double> limit_large_a_check(std::span<const double> y,
                                              double a);

// Real form of the empirical process,
// n^{-1/2} sum_j (u_j + t) cos(t Y_j) + (t - u_j) sin(t Y_j), u = 2Y/(1+Y^2).
// T_{n,a} = int Z_n(t)^2 e^{-a|t|} dt.
double empirical_process(std::span<const double> y, double t);

struct DeltaSettings {
  double tolerance = 1e-10;
  // Monte Carlo fallback for laws without a usable density.
  std::size_t mc_draws = 10'000'000;
  std::uint64_t seed = 20240101;
  bool force_monte_carlo = false;
};

struct DeltaResult {
  double value = 0.0;
  // Quadrature error estimate, or standard error for Monte Carlo.
  double error = 0.0;
  bool monte_carlo = false;
};

// Delta_F = int |E[(it - 2X/(1+X^2)) e^{itX}]|^2 e^{-a|t|} dt, the limit of
// T_{n,a}/n under X ~ F. With `standardize`, X is replaced by
// (X - alpha) / beta. Zero exactly for the standard Cauchy law.
DeltaResult delta_f(const DistributionSpec& spec, double a,
                    const DeltaSettings& settings = {},
                    std::optional<LocationScale> standardize = std::nullopt);

}  // namespace cauchygof
