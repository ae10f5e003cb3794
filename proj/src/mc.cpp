#include "cauchygof/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "cauchygof/competitors.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/statistic.hpp"
#include "json.hpp"
#include "numeric.hpp"

namespace cauchygof {

namespace {

std::string format_param(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double parse_param(std::string_view text, std::string_view key,
                   std::string_view whole) {
  if (!text.starts_with(key)) {
    throw ParameterError("expected '" + std::string(key) + "' in statistic '" +
                         std::string(whole) + "'");
  }
  const std::string rest(text.substr(key.size()));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(rest, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != rest.size() || !std::isfinite(v)) {
    throw ParameterError("bad parameter in statistic '" + std::string(whole) +
                         "'");
  }
  return v;
}

std::size_t failure_limit(std::size_t reps, double fraction) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(reps))));
}

bool evaluate(const DistributionSpec& spec, std::span<const NamedStatistic> stats,
              const EstimatorKind& estimator, std::size_t n, RngStream& rng,
              std::vector<double>& out) {
  // A replication is invalid when the fit, or a statistic, cannot be
  // computed on its sample; a non-finite draw counts the same way.
  const Sample x = sample(spec, n, rng);
  try {
    const ScaledResiduals res = residuals(x, estimator);
    out.resize(stats.size());
    for (std::size_t s = 0; s < stats.size(); ++s) {
      out[s] = stats[s].eval(res.values);
    }
  } catch (const OptimizationError&) {
    return false;
  } catch (const DegenerateSampleError&) {
    return false;
  } catch (const DataError&) {
    return false;
  }
  return true;
}

}  // namespace

StatisticId parse_statistic(std::string_view text) {
  using K = StatisticId::Kind;
  if (text == "T0" || text == "t0") return {K::Tn0, 0.0};
  if (text == "ks") return {K::Ks, 0.0};
  if (text == "cm") return {K::Cm, 0.0};
  if (text == "ad") return {K::Ad, 0.0};
  if (text == "w") return {K::Watson, 0.0};
  if (text == "kl") return {K::Kl, 0.0};
  if (text.starts_with("T:") || text.starts_with("t:")) {
    const double a = parse_param(text.substr(2), "a=", text);
    if (!(a > 0.0)) throw ParameterError("T needs a > 0");
    return {K::Tna, a};
  }
  if (text.starts_with("d:")) {
    const double l = parse_param(text.substr(2), "lambda=", text);
    if (!(l > 0.0)) throw ParameterError("d needs lambda > 0");
    return {K::Dnl, l};
  }
  if (text.starts_with("kl:")) {
    const double m = parse_param(text.substr(3), "m=", text);
    if (!(m >= 1.0) || m != std::floor(m)) {
      throw ParameterError("kl needs an integer window m >= 1");
    }
    return {K::Kl, m};
  }
  throw ParameterError("unknown statistic '" + std::string(text) + "'");
}

std::string to_string(const StatisticId& id) {
  using K = StatisticId::Kind;
  switch (id.kind) {
    case K::Tna: return "T:a=" + format_param(id.param);
    case K::Tn0: return "T0";
    case K::Ks: return "ks";
    case K::Cm: return "cm";
    case K::Ad: return "ad";
    case K::Watson: return "w";
    case K::Dnl: return "d:lambda=" + format_param(id.param);
    case K::Kl:
      return id.param > 0.0 ? "kl:m=" + format_param(id.param) : "kl";
  }
  return "?";
}

NamedStatistic make_statistic(const StatisticId& id) {
  using K = StatisticId::Kind;
  NamedStatistic s;
  s.id = to_string(id);
  const double p = id.param;
  switch (id.kind) {
    case K::Tna:
      s.eval = [p](std::span<const double> y) { return tna(y, p).value; };
      break;
    case K::Tn0:
      s.eval = [](std::span<const double> y) { return tn0(y); };
      s.two_sided = true;
      break;
    case K::Ks:
      s.eval = [](std::span<const double> y) { return edf_statistics(y).ks; };
      break;
    case K::Cm:
      s.eval = [](std::span<const double> y) { return edf_statistics(y).cm; };
      break;
    case K::Ad:
      s.eval = [](std::span<const double> y) { return edf_statistics(y).ad; };
      break;
    case K::Watson:
      s.eval = [](std::span<const double> y) {
        return edf_statistics(y).watson;
      };
      break;
    case K::Dnl:
      s.eval = [p](std::span<const double> y) { return compute_dnl(y, p); };
      break;
    case K::Kl:
      s.eval = [p](std::span<const double> y) {
        const std::size_t m = p > 0.0 ? static_cast<std::size_t>(p)
                                      : default_kl_window(y.size());
        return compute_kl(y, m).value;
      };
      break;
  }
  return s;
}

std::vector<NamedStatistic> make_statistics(std::span<const StatisticId> ids) {
  std::vector<NamedStatistic> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(make_statistic(id));
  return out;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Replications simulate(const DistributionSpec& spec,
                      std::span<const NamedStatistic> stats,
                      const EstimatorKind& estimator, std::size_t n,
                      std::size_t reps, std::uint64_t seed,
                      const McOptions& options) {
  validate(spec);
  if (stats.empty()) throw ParameterError("no statistics requested");
  if (reps == 0) throw ParameterError("reps must be positive");
  Replications out;
  out.n = n;
  out.reps = reps;
  out.seed = seed;
  for (const auto& s : stats) out.ids.push_back(s.id);
  out.values.assign(stats.size(), std::vector<double>(reps));

  std::vector<char> failed(reps, 0);
  parallel_for(reps, options.workers, [&](std::size_t r) {
    RngStream rng(seed, r);
    std::vector<double> v;
    if (!evaluate(spec, stats, estimator, n, rng, v)) {
      failed[r] = 1;
      return;
    }
    for (std::size_t s = 0; s < stats.size(); ++s) out.values[s][r] = v[s];
  });

  // Redraw failed replications sequentially so the result stays independent
  // of scheduling.
  const std::size_t limit = failure_limit(reps, options.max_failure_fraction);
  std::uint64_t extra = reps;
  for (std::size_t r = 0; r < reps; ++r) {
    while (failed[r]) {
      ++out.failures;
      if (out.failures > limit) {
        throw OptimizationError("too many replications failed to fit", 0.0,
                                0.0);
      }
      RngStream rng(seed, extra++);
      std::vector<double> v;
      if (evaluate(spec, stats, estimator, n, rng, v)) {
        for (std::size_t s = 0; s < stats.size(); ++s) out.values[s][r] = v[s];
        failed[r] = 0;
      }
    }
  }
  return out;
}

Replications simulate_null(std::span<const NamedStatistic> stats,
                           const EstimatorKind& estimator, std::size_t n,
                           std::size_t reps, std::uint64_t seed,
                           const McOptions& options) {
  return simulate(Cauchy{}, stats, estimator, n, reps, seed, options);
}

const CriticalValue& CriticalValueTable::find(std::string_view id,
                                              double level) const {
  for (const auto& e : entries) {
    if (e.id == id && std::abs(e.level - level) < 1e-12) return e;
  }
  throw ParameterError("no critical value for '" + std::string(id) +
                       "' at level " + format_param(level));
}

double critical_value_from(std::vector<double> scores, double level) {
  if (scores.empty()) throw ParameterError("no null replications");
  if (!(level > 0.0 && level < 1.0)) throw ParameterError("level in (0,1)");
  std::sort(scores.begin(), scores.end());
  const double reps = static_cast<double>(scores.size());
  auto k = static_cast<std::size_t>(std::ceil((1.0 - level) * reps - 1e-9));
  k = std::clamp<std::size_t>(k, 1, scores.size());
  return scores[k - 1];
}

CriticalValueTable critical_values_from(const Replications& null,
                                        std::span<const NamedStatistic> stats,
                                        const EstimatorKind& estimator,
                                        std::span<const double> levels) {
  CriticalValueTable table;
  table.reps = null.reps;
  table.seed = null.seed;
  table.failures = null.failures;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    std::vector<double> scores(null.values[s]);
    for (double& v : scores) v = stats[s].score(v);
    for (double level : levels) {
      table.entries.push_back({stats[s].id, to_string(estimator), null.n, level,
                               critical_value_from(scores, level),
                               stats[s].two_sided});
    }
  }
  return table;
}

CriticalValueTable critical_values(std::span<const NamedStatistic> stats,
                                   const EstimatorKind& estimator,
                                   std::size_t n,
                                   std::span<const double> levels,
                                   std::size_t reps, std::uint64_t seed,
                                   const McOptions& options) {
  if (reps < 100) throw ParameterError("critical values need reps >= 100");
  const Replications null =
      simulate_null(stats, estimator, n, reps, seed, options);
  return critical_values_from(null, stats, estimator, levels);
}

PowerTable power(std::span<const DistributionSpec> alternatives,
                 std::span<const NamedStatistic> stats,
                 const EstimatorKind& estimator, std::size_t n, double level,
                 const CriticalValueTable& cv, std::size_t reps,
                 std::uint64_t seed, const McOptions& options) {
  PowerTable table;
  table.estimator = to_string(estimator);
  table.n = n;
  table.level = level;
  table.reps = reps;
  table.seed = seed;
  std::vector<double> crit;
  for (const auto& s : stats) {
    table.columns.push_back(s.id);
    crit.push_back(cv.find(s.id, level).value);
  }
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    const Replications reps_i = simulate(alternatives[i], stats, estimator, n,
                                         reps, derive_seed(seed, i), options);
    table.failures += reps_i.failures;
    table.rows.push_back(display_name(alternatives[i]));
    std::vector<double> row;
    for (std::size_t s = 0; s < stats.size(); ++s) {
      std::size_t rejected = 0;
      for (double v : reps_i.values[s]) {
        if (stats[s].score(v) > crit[s]) ++rejected;
      }
      row.push_back(static_cast<double>(rejected) / static_cast<double>(reps));
    }
    table.cells.push_back(std::move(row));
  }
  return table;
}

double p_value_from(std::span<const double> null_values, double observed,
                    bool two_sided) {
  const double obs = two_sided ? std::abs(observed) : observed;
  std::size_t at_least = 0;
  for (double v : null_values) {
    if ((two_sided ? std::abs(v) : v) >= obs) ++at_least;
  }
  return (1.0 + static_cast<double>(at_least)) /
         (static_cast<double>(null_values.size()) + 1.0);
}

std::vector<TestOutcome> p_values(std::span<const double> sample,
                                  std::span<const NamedStatistic> stats,
                                  const EstimatorKind& estimator,
                                  const Replications& null) {
  if (null.n != sample.size()) {
    throw ParameterError("null replications were drawn for a different n");
  }
  const ScaledResiduals res = residuals(sample, estimator);
  std::vector<TestOutcome> out;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    if (null.ids.at(s) != stats[s].id) {
      throw ParameterError("null replications do not match the statistics");
    }
    TestOutcome o;
    o.id = stats[s].id;
    o.value = stats[s].eval(res.values);
    o.p_value = p_value_from(null.values[s], o.value, stats[s].two_sided);
    o.reps = null.reps;
    o.seed = null.seed;
    o.estimator = to_string(estimator);
    o.n = sample.size();
    out.push_back(o);
  }
  return out;
}

std::vector<TestOutcome> p_values(std::span<const double> sample,
                                  std::span<const NamedStatistic> stats,
                                  const EstimatorKind& estimator,
                                  std::size_t reps, std::uint64_t seed,
                                  const McOptions& options) {
  // Fit the observed sample first so a fit failure surfaces as its own error.
  (void)residuals(sample, estimator);
  const Replications null =
      simulate_null(stats, estimator, sample.size(), reps, seed, options);
  return p_values(sample, stats, estimator, null);
}

TestOutcome p_value(std::span<const double> sample, const NamedStatistic& stat,
                    const EstimatorKind& estimator, std::size_t reps,
                    std::uint64_t seed, const McOptions& options) {
  const NamedStatistic one[] = {stat};
  return p_values(sample, one, estimator, reps, seed, options).front();
}

double normality_test_p(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 8) throw DataError("normality test needs n >= 8");
  detail::CompensatedSum s;
  for (double v : values) s += v;
  const double dn = static_cast<double>(n);
  const double mean = s.value() / dn;
  detail::CompensatedSum ss;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss.value() / (dn - 1.0));
  if (!(sd > 0.0)) throw DegenerateSampleError("constant values");

  std::vector<double> z(values.begin(), values.end());
  std::sort(z.begin(), z.end());
  const boost::math::normal standard;
  detail::CompensatedSum a;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = (z[i] - mean) / sd;
    const double hi = (z[n - 1 - i] - mean) / sd;
    const double log_cdf = std::log(boost::math::cdf(standard, lo));
    const double log_sf =
        std::log(boost::math::cdf(boost::math::complement(standard, hi)));
    a += (2.0 * static_cast<double>(i) + 1.0) * (log_cdf + log_sf);
  }
  const double a2 = -dn - a.value() / dn;
  // Small-sample modification and p-value approximation for the case of
  // estimated mean and variance.
  const double m = a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
  double p;
  if (m >= 0.6) {
    p = std::exp(1.2937 - 5.709 * m + 0.0186 * m * m);
  } else if (m >= 0.34) {
    p = std::exp(0.9177 - 4.279 * m - 1.38 * m * m);
  } else if (m >= 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * m - 59.938 * m * m);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * m - 223.73 * m * m);
  }
  return std::clamp(p, 0.0, 1.0);
}

CltCheck fixed_alternative_clt_check(const DistributionSpec& spec,
                                     const EstimatorKind& estimator,
                                     std::size_t n, std::size_t reps,
                                     std::uint64_t seed, double a,
                                     const McOptions& options) {
  validate(spec);
  if (reps < 8) throw ParameterError("need at least 8 replications");

  // Population limit of the fitted (alpha, beta).
  LocationScale limit;
  const auto q = [&](double p) { return quantile(spec, p); };
  if (std::holds_alternative<Miq>(estimator) && q(0.5) && q(0.25) && q(0.75)) {
    limit = {*q(0.5), 0.5 * (*q(0.75) - *q(0.25))};
  } else {
    const std::size_t big = std::holds_alternative<Ml>(estimator) ? 1'000'000 : 20'000;
    RngStream rng(derive_seed(seed, 0xC17), 0);
    limit = fit(sample(spec, big, rng), estimator);
  }

  CltCheck out;
  out.delta = delta_f(spec, a, {}, limit).value;

  const NamedStatistic stat = make_statistic({StatisticId::Kind::Tna, a});
  const NamedStatistic stats[] = {stat};
  const Replications r = simulate(spec, stats, estimator, n, reps, seed, options);
  const double dn = static_cast<double>(n);
  std::vector<double> z(reps);
  detail::CompensatedSum sum, ratio;
  for (std::size_t i = 0; i < reps; ++i) {
    const double t = r.values[0][i] / dn;
    z[i] = std::sqrt(dn) * (t - out.delta);
    sum += z[i];
    ratio += t;
  }
  const double dr = static_cast<double>(reps);
  out.mean = sum.value() / dr;
  out.mean_ratio = ratio.value() / dr;
  detail::CompensatedSum ss;
  for (double v : z) ss += (v - out.mean) * (v - out.mean);
  out.variance = ss.value() / (dr - 1.0);
  out.mean_se = std::sqrt(out.variance / dr);
  out.normality_p = normality_test_p(z);
  return out;
}

std::string to_csv(const PowerTable& table) {
  std::ostringstream os;
  os << "alternative";
  for (const auto& c : table.columns) os << ',' << c;
  os << '\n' << std::fixed << std::setprecision(1);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    os << '"' << table.rows[i] << '"';
    for (double v : table.cells[i]) os << ',' << 100.0 * v;
    os << '\n';
  }
  return os.str();
}

std::string to_json(const PowerTable& table) {
  nlohmann::json j;
  j["estimator"] = table.estimator;
  j["n"] = table.n;
  j["level"] = table.level;
  j["reps"] = table.reps;
  j["seed"] = table.seed;
  j["failures"] = table.failures;
  j["failure_policy"] = "redraw from stream reps+k";
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  j["cells"] = table.cells;
  return j.dump(2);
}

std::string to_csv(const CriticalValueTable& table) {
  std::ostringstream os;
  os << "statistic,estimator,n,level,critical_value,two_sided\n";
  for (const auto& e : table.entries) {
    os << e.id << ',' << e.estimator << ',' << e.n << ',' << e.level << ','
       << std::setprecision(17) << e.value << std::setprecision(6) << ',' << (e.two_sided ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string to_json(const CriticalValueTable& table) {
  nlohmann::json j;
  j["reps"] = table.reps;
  j["seed"] = table.seed;
  j["failures"] = table.failures;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : table.entries) {
    j["entries"].push_back({{"statistic", e.id},
                            {"estimator", e.estimator},
                            {"n", e.n},
                            {"level", e.level},
                            {"critical_value", e.value},
                            {"two_sided", e.two_sided}});
  }
  return j.dump(2);
}

}  // namespace cauchygof
