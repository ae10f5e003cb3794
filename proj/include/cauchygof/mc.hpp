#pragma once

// Monte Carlo calibration under the Cauchy null: critical values, p-values
// and power tables. Replication r of a study always draws from
// RngStream(seed, r), so results do not depend on the number of workers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cauchygof/dist.hpp"
#include "cauchygof/estimate.hpp"

namespace cauchygof {

struct StatisticId {
  enum class Kind { Tna, Tn0, Ks, Cm, Ad, Watson, Dnl, Kl };
  Kind kind = Kind::Tna;
  // a for Tna, lambda for Dnl, window m for Kl (0 = default for n).
  double param = 1.0;

  friend bool operator==(const StatisticId&, const StatisticId&) = default;
};

// "T:a=1", "T0", "ks", "cm", "ad", "w", "d:lambda=3", "kl:m=4", "kl".
StatisticId parse_statistic(std::string_view text);
std::string to_string(const StatisticId& id);

// A statistic of the scaled residuals. Large scores reject; for two-sided
// statistics the score is |value|.
struct NamedStatistic {
  std::string id;
  std::function<double(std::span<const double>)> eval;
  bool two_sided = false;

  double score(double value) const { return two_sided ? std::abs(value) : value; }
};

NamedStatistic make_statistic(const StatisticId& id);
std::vector<NamedStatistic> make_statistics(std::span<const StatisticId> ids);

// Runs fn(0) ... fn(count-1) on `workers` threads (0 = hardware concurrency).
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

// Stream seed for the i-th sub-study of a study seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct McOptions {
  std::size_t workers = 0;
  // Abort when more than this fraction of replications fail to fit.
  double max_failure_fraction = 1e-3;
};

// Statistic values of `reps` replications of `spec` samples of size n, all
// statistics on the same replications. values[s][r] is statistic s in
// replication r (raw value, not score).
struct Replications {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> values;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  // Replications whose fit failed and were redrawn from stream reps + k.
  std::size_t failures = 0;
};

Replications simulate(const DistributionSpec& spec,
                      std::span<const NamedStatistic> stats,
                      const EstimatorKind& estimator, std::size_t n,
                      std::size_t reps, std::uint64_t seed,
                      const McOptions& options = {});

// Null replications (C(0,1) samples), shared by critical values and p-values.
Replications simulate_null(std::span<const NamedStatistic> stats,
                           const EstimatorKind& estimator, std::size_t n,
                           std::size_t reps, std::uint64_t seed,
                           const McOptions& options = {});

struct CriticalValue {
  std::string id;
  std::string estimator;
  std::size_t n = 0;
  double level = 0.05;
  // Reject when the score exceeds this value.
  double value = 0.0;
  bool two_sided = false;
};

struct CriticalValueTable {
  std::vector<CriticalValue> entries;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;

  const CriticalValue& find(std::string_view id, double level) const;
};

// Empirical upper-level quantile of the null scores:
// sorted[ceil((1 - level) reps) - 1].
double critical_value_from(std::vector<double> scores, double level);

CriticalValueTable critical_values(std::span<const NamedStatistic> stats,
                                   const EstimatorKind& estimator,
                                   std::size_t n,
                                   std::span<const double> levels,
                                   std::size_t reps, std::uint64_t seed,
                                   const McOptions& options = {});

CriticalValueTable critical_values_from(const Replications& null,
                                        std::span<const NamedStatistic> stats,
                                        const EstimatorKind& estimator,
                                        std::span<const double> levels);

struct PowerTable {
  std::vector<std::string> rows;     // alternative display names
  std::vector<std::string> columns;  // statistic ids
  // cells[row][column], rejection fraction in [0, 1].
  std::vector<std::vector<double>> cells;
  std::string estimator;
  std::size_t n = 0;
  double level = 0.05;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
};

PowerTable power(std::span<const DistributionSpec> alternatives,
                 std::span<const NamedStatistic> stats,
                 const EstimatorKind& estimator, std::size_t n, double level,
                 const CriticalValueTable& cv, std::size_t reps,
                 std::uint64_t seed, const McOptions& options = {});

struct TestOutcome {
  std::string id;
  double value = 0.0;
  double p_value = 1.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::size_t n = 0;
};

// (1 + #{null scores >= observed score}) / (reps + 1).
double p_value_from(std::span<const double> null_values, double observed,
                    bool two_sided);

std::vector<TestOutcome> p_values(std::span<const double> sample,
                                  std::span<const NamedStatistic> stats,
                                  const EstimatorKind& estimator,
                                  std::size_t reps, std::uint64_t seed,
                                  const McOptions& options = {});
std::vector<TestOutcome> p_values(std::span<const double> sample,
                                  std::span<const NamedStatistic> stats,
                                  const EstimatorKind& estimator,
                                  const Replications& null);
TestOutcome p_value(std::span<const double> sample, const NamedStatistic& stat,
                    const EstimatorKind& estimator, std::size_t reps,
                    std::uint64_t seed, const McOptions& options = {});

struct CltCheck {
  double delta = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  // Standard error of the mean.
  double mean_se = 0.0;
  // Anderson-Darling normality test, mean and variance estimated.
  double normality_p = 1.0;
  // Mean of T_n / n over the replications.
  double mean_ratio = 0.0;
};

// Replicates sqrt(n) (T_{n,a}/n - Delta_F) under `spec`.
CltCheck fixed_alternative_clt_check(const DistributionSpec& spec,
                                     const EstimatorKind& estimator,
                                     std::size_t n, std::size_t reps,
                                     std::uint64_t seed, double a = 1.0,
                                     const McOptions& options = {});

// p-value of the Anderson-Darling test for normality with estimated
// parameters.
double normality_test_p(std::span<const double> values);

std::string to_csv(const PowerTable& table);
std::string to_json(const PowerTable& table);
std::string to_csv(const CriticalValueTable& table);
std::string to_json(const CriticalValueTable& table);

}  // namespace cauchygof
