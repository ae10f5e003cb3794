#include "cauchygof/battery.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "json.hpp"

namespace cauchygof {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> to_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::size_t column_index(const std::vector<std::string>& header,
                         const std::string& name) {
  const std::string want = lower(name);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])) == want) return i;
  }
  throw DataError("column '" + name + "' not found in header");
}

}  // namespace

ReturnSeries ingest_returns(std::istream& in, const IngestOptions& options,
                            const std::string& source) {
  ReturnSeries series;
  series.source = source;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: no header row");
  const auto header = split_csv_line(line);
  const std::size_t price_col = column_index(header, options.price_column);
  std::optional<std::size_t> volume_col, date_col;
  if (options.volume_column) {
    volume_col = column_index(header, *options.volume_column);
  }
  if (options.date_column) {
    const std::string want = lower(*options.date_column);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (lower(trim(header[i])) == want) date_col = i;
    }
  }

  std::vector<double> closes;
  std::vector<std::string> dates;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++series.input_rows;
    const auto fields = split_csv_line(line);
    const auto drop = [&](const std::string& why) {
      series.dropped.push_back({line_no, why});
    };
    if (price_col >= fields.size()) {
      drop("missing price field");
      continue;
    }
    const auto price = to_double(fields[price_col]);
    if (!price || !std::isfinite(*price)) {
      drop("unparseable price '" + fields[price_col] + "'");
      continue;
    }
    if (!(*price > 0.0)) {
      drop("non-positive price");
      continue;
    }
    if (volume_col) {
      const auto volume =
          *volume_col < fields.size() ? to_double(fields[*volume_col]) : std::nullopt;
      if (!volume || !std::isfinite(*volume)) {
        drop("unparseable volume");
        continue;
      }
      if (*volume == 0.0) {
        drop("zero trading volume");
        continue;
      }
    }
    closes.push_back(*price);
    dates.push_back(date_col && *date_col < fields.size() ? trim(fields[*date_col])
                                                          : std::string());
  }
  series.retained_rows = closes.size();
  for (std::size_t i = 1; i < closes.size(); ++i) {
    series.returns.push_back(std::log(closes[i]) - std::log(closes[i - 1]));
    series.dates.push_back(dates[i]);
  }
  if (series.returns.empty()) {
    throw DataError("no returns: fewer than two usable rows in " + source);
  }
  return series;
}

ReturnSeries ingest_returns(const std::string& path,
                            const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return ingest_returns(in, options, path);
}

std::size_t battery_kl_window(std::size_t n) {
  const std::size_t m = n >= 400 ? 100 : 50;
  const std::size_t cap = n >= 3 ? (n - 1) / 2 : 1;
  return std::max<std::size_t>(1, std::min(m, cap));
}

std::vector<StatisticId> default_battery(std::size_t n) {
  using K = StatisticId::Kind;
  return {{K::Tna, 1.0},
          {K::Tna, 3.0},
          {K::Tna, 5.0},
          {K::Tn0, 0.0},
          {K::Kl, static_cast<double>(battery_kl_window(n))},
          {K::Ks, 0.0},
          {K::Cm, 0.0},
          {K::Ad, 0.0},
          {K::Watson, 0.0},
          {K::Dnl, 1.0},
          {K::Dnl, 3.0},
          {K::Dnl, 5.0}};
}

Histogram make_histogram(std::span<const double> sample,
                         const LocationScale& fit, std::size_t bins,
                         std::size_t curve_points) {
  if (sample.size() < 2) throw DataError("histogram needs n >= 2");
  if (bins == 0 || curve_points < 2) throw ParameterError("bad histogram size");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sample_quantile(sorted, 0.01);
  double hi = sample_quantile(sorted, 0.99);
  if (!(hi > lo)) hi = lo + 1.0;

  Histogram h;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + width * i);
  for (double x : sample) {
    if (x < lo || x > hi) {
      ++h.outside;
      continue;
    }
    auto b = static_cast<std::size_t>((x - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
  }
  const double n = static_cast<double>(sample.size());
  for (std::size_t c : h.counts) h.density.push_back(c / (n * width));
  for (std::size_t i = 0; i < curve_points; ++i) {
    const double x = lo + (hi - lo) * i / static_cast<double>(curve_points - 1);
    h.curve_x.push_back(x);
    h.curve_density.push_back(cauchy_pdf(x, fit.alpha, fit.beta));
  }
  return h;
}

BatteryReport run_battery(std::span<const double> sample,
                          const BatteryConfig& config,
                          const Replications& null) {
  if (sample.size() < 20) {
    throw DataError("the battery needs at least 20 observations");
  }
  if (null.n != sample.size() && null.reps > 0) {
    throw ParameterError("null replications were drawn for a different n");
  }
  const std::vector<StatisticId> ids = config.statistics.empty()
                                           ? default_battery(sample.size())
                                           : config.statistics;
  BatteryReport report;
  report.n = sample.size();
  report.estimator = to_string(config.estimator);
  report.reps = null.reps;
  report.seed = null.seed;
  if (sample.size() < 50) {
    report.warnings.push_back("fewer than 50 observations; power is low");
  }
  const ScaledResiduals res = residuals(sample, config.estimator);
  report.fit = res.fit;
  report.histogram = make_histogram(sample, res.fit, config.histogram_bins,
                                    config.curve_points);

  for (const auto& id : ids) {
    const NamedStatistic stat = make_statistic(id);
    const auto it = std::find(null.ids.begin(), null.ids.end(), stat.id);
    if (it == null.ids.end()) {
      report.errors.emplace_back(stat.id, "no null replications");
      continue;
    }
    try {
      TestOutcome o;
      o.id = stat.id;
      o.value = stat.eval(res.values);
      o.p_value = p_value_from(null.values[it - null.ids.begin()], o.value,
                               stat.two_sided);
      o.reps = null.reps;
      o.seed = null.seed;
      o.estimator = report.estimator;
      o.n = report.n;
      report.outcomes.push_back(o);
    } catch (const Error& e) {
      report.errors.emplace_back(stat.id, e.what());
    }
  }
  return report;
}

BatteryReport run_battery(std::span<const double> sample,
                          const BatteryConfig& config) {
  if (sample.size() < 20) {
    throw DataError("the battery needs at least 20 observations");
  }
  const std::vector<StatisticId> ids = config.statistics.empty()
                                           ? default_battery(sample.size())
                                           : config.statistics;
  // The observed fit must succeed before any simulation is spent.
  const ScaledResiduals res = residuals(sample, config.estimator);

  // Statistics that cannot be evaluated at this n are reported, not run.
  BatteryConfig runnable = config;
  runnable.statistics.clear();
  std::vector<NamedStatistic> usable;
  std::vector<std::pair<std::string, std::string>> errors;
  for (const auto& id : ids) {
    NamedStatistic stat = make_statistic(id);
    try {
      (void)stat.eval(res.values);
      usable.push_back(std::move(stat));
      runnable.statistics.push_back(id);
    } catch (const Error& e) {
      errors.emplace_back(stat.id, e.what());
    }
  }
  BatteryReport report;
  if (!usable.empty()) {
    const Replications null =
        simulate_null(usable, config.estimator, sample.size(), config.reps,
                      config.seed, config.mc);
    report = run_battery(sample, runnable, null);
  } else {
    report = run_battery(sample, config,
                         Replications{{}, {}, sample.size(), 0, config.seed, 0});
    report.errors.clear();
  }
  report.errors.insert(report.errors.begin(), errors.begin(), errors.end());
  return report;
}

std::string to_json(const BatteryReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["estimator"] = r.estimator;
  j["fit"] = {{"alpha", r.fit.alpha}, {"beta", r.fit.beta}};
  j["reps"] = r.reps;
  j["seed"] = r.seed;
  j["outcomes"] = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    j["outcomes"].push_back({{"statistic", o.id},
                             {"value", o.value},
                             {"p_value", o.p_value},
                             {"reps", o.reps},
                             {"seed", o.seed},
                             {"estimator", o.estimator},
                             {"n", o.n}});
  }
  j["errors"] = nlohmann::json::array();
  for (const auto& [id, why] : r.errors) {
    j["errors"].push_back({{"statistic", id}, {"reason", why}});
  }
  j["warnings"] = r.warnings;
  const auto& h = r.histogram;
  j["histogram"] = {{"edges", h.edges},         {"counts", h.counts},
                    {"density", h.density},     {"curve_x", h.curve_x},
                    {"curve_density", h.curve_density},
                    {"outside", h.outside}};
  return j.dump(2);
}

BatteryReport battery_report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BatteryReport r;
  r.n = j.at("n").get<std::size_t>();
  r.estimator = j.at("estimator").get<std::string>();
  r.fit = {j.at("fit").at("alpha").get<double>(),
           j.at("fit").at("beta").get<double>()};
  r.reps = j.at("reps").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& o : j.at("outcomes")) {
    r.outcomes.push_back({o.at("statistic").get<std::string>(),
                          o.at("value").get<double>(),
                          o.at("p_value").get<double>(),
                          o.at("reps").get<std::size_t>(),
                          o.at("seed").get<std::uint64_t>(),
                          o.at("estimator").get<std::string>(),
                          o.at("n").get<std::size_t>()});
  }
  for (const auto& e : j.at("errors")) {
    r.errors.emplace_back(e.at("statistic").get<std::string>(),
                          e.at("reason").get<std::string>());
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const auto& h = j.at("histogram");
  r.histogram.edges = h.at("edges").get<std::vector<double>>();
  r.histogram.counts = h.at("counts").get<std::vector<std::size_t>>();
  r.histogram.density = h.at("density").get<std::vector<double>>();
  r.histogram.curve_x = h.at("curve_x").get<std::vector<double>>();
  r.histogram.curve_density = h.at("curve_density").get<std::vector<double>>();
  r.histogram.outside = h.at("outside").get<std::size_t>();
  return r;
}

std::string to_csv(const BatteryReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "statistic,value,p_value,reps,seed,estimator,n\n";
  for (const auto& o : r.outcomes) {
    os << o.id << ',' << o.value << ',' << o.p_value << ',' << o.reps << ','
       << o.seed << ',' << o.estimator << ',' << o.n << '\n';
  }
  return os.str();
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "kind,x_left,x_right,count,density\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << "bin," << h.edges[i] << ',' << h.edges[i + 1] << ',' << h.counts[i]
       << ',' << h.density[i] << '\n';
  }
  for (std::size_t i = 0; i < h.curve_x.size(); ++i) {
    os << "curve," << h.curve_x[i] << ',' << h.curve_x[i] << ",,"
       << h.curve_density[i] << '\n';
  }
  return os.str();
}

}  // namespace cauchygof
