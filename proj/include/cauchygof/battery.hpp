#pragma once

// Log-return ingestion and the full test battery run on one sample.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cauchygof/estimate.hpp"
#include "cauchygof/mc.hpp"

namespace cauchygof {

struct DroppedRow {
  std::size_t line = 0;  // 1-based line number in the file, header is line 1
  std::string reason;
};

struct ReturnSeries {
  std::vector<std::string> dates;  // date of the later close of each return
  std::vector<double> returns;
  std::string source;
  std::size_t input_rows = 0;
  std::size_t retained_rows = 0;
  std::vector<DroppedRow> dropped;
};

struct IngestOptions {
  std::string price_column = "close";
  // Rows with zero volume are dropped when this is set.
  std::optional<std::string> volume_column;
  std::optional<std::string> date_column = std::string("date");
};

// Reads a CSV with a header row and takes log differences of consecutive
// retained closes. Every input row is either retained or logged as dropped.
ReturnSeries ingest_returns(std::istream& in, const IngestOptions& options,
                            const std::string& source = "<stream>");
ReturnSeries ingest_returns(const std::string& path,
                            const IngestOptions& options);

// T:a=1,3,5, T0, KL, KS, CM, AD, W, D:lambda=1,3,5 with the KL window for n.
std::vector<StatisticId> default_battery(std::size_t n);
// 100 from n = 400 on, 50 below, kept below n/2.
std::size_t battery_kl_window(std::size_t n);

struct BatteryConfig {
  std::vector<StatisticId> statistics;  // empty = default_battery(n)
  EstimatorKind estimator = Ml{};
  std::size_t reps = 10'000;
  std::uint64_t seed = 1;
  McOptions mc;
  std::size_t histogram_bins = 40;
  std::size_t curve_points = 200;
};

struct Histogram {
  // Bins cover the 1% to 99% empirical quantile range.
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  // counts / (n * width), comparable with the fitted density.
  std::vector<double> density;
  std::vector<double> curve_x;
  std::vector<double> curve_density;  // fitted Cauchy density
  std::size_t outside = 0;            // observations outside the range
};

struct BatteryReport {
  std::size_t n = 0;
  std::string estimator;
  LocationScale fit;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<TestOutcome> outcomes;
  // Statistics that could not be evaluated, with the reason.
  std::vector<std::pair<std::string, std::string>> errors;
  std::vector<std::string> warnings;
  Histogram histogram;
};

Histogram make_histogram(std::span<const double> sample,
                         const LocationScale& fit, std::size_t bins,
                         std::size_t curve_points);

BatteryReport run_battery(std::span<const double> sample,
                          const BatteryConfig& config);
// Reuses null replications drawn for the same n, statistics and estimator.
BatteryReport run_battery(std::span<const double> sample,
                          const BatteryConfig& config,
                          const Replications& null);

std::string to_json(const BatteryReport& report);
BatteryReport battery_report_from_json(const std::string& text);
std::string to_csv(const BatteryReport& report);
std::string histogram_csv(const Histogram& histogram);

}  // namespace cauchygof
