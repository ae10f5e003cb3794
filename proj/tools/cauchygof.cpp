// cauchygof command-line tool.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cauchygof/asymptotic.hpp"
#include "cauchygof/battery.hpp"
#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/estimate.hpp"
#include "cauchygof/mc.hpp"
#include "cauchygof/statistic.hpp"
#include "json.hpp"

namespace cg = cauchygof;

namespace {

constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

const std::vector<std::string> kTableStatistics = {
    "T:a=1", "T:a=2", "T:a=3", "T:a=4", "T:a=5", "T:a=6",
    "T0",    "kl",    "ks",    "cm",    "ad",    "w",
    "d:lambda=1", "d:lambda=2", "d:lambda=3", "d:lambda=4", "d:lambda=5",
    "d:lambda=6"};

const std::vector<std::string> kTableAlternatives = {
    "cauchy:0:1", "normal:0:1",  "cn:0.5",       "cn:0.8",       "t:2",
    "t:3",        "t:5",         "t:10",         "stable:0.4:0", "stable:0.7:0",
    "stable:1.2:0", "stable:1.5:0", "stable:1.8:0", "stable:0.5:1", "stable:1.5:1",
    "stable:2:1", "tukey:0.2",   "tukey:0.1",    "tukey:0.05",   "tukeyl:-3",
    "tukeyl:-2",  "tukeyl:-0.5", "tukeyl:0.5",   "uniform",      "logistic",
    "laplace",    "gumbel",      "ml:0.25",      "ml:0.5",       "ml:0.75",
    "exp"};

struct Common {
  std::string estimator = "ml";
  std::vector<std::string> stats;
  std::size_t reps = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::size_t workers = 0;
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("CAUCHYGOF_SEED")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const auto v = std::stoull(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw cg::ParameterError("CAUCHYGOF_SEED is not an unsigned integer");
  }
  return 1;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw cg::DataError("cannot write '" + c.out + "'");
  os << text;
}

std::vector<cg::NamedStatistic> statistics(const std::vector<std::string>& ids) {
  std::vector<cg::StatisticId> parsed;
  for (const auto& s : ids) parsed.push_back(cg::parse_statistic(s));
  return cg::make_statistics(parsed);
}

void add_common(CLI::App* cmd, Common& c, std::size_t default_reps) {
  c.reps = default_reps;
  cmd->add_option("--estimator", c.estimator, "miq, ml or eise:<nu>")
      ->capture_default_str();
  cmd->add_option("--stat", c.stats,
                  "statistic id (repeatable): T:a=<a>, T0, ks, cm, ad, w, "
                  "d:lambda=<l>, kl, kl:m=<m>");
  cmd->add_option("--reps", c.reps, "Monte Carlo replications")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed (default: $CAUCHYGOF_SEED or 1)");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)")
      ->capture_default_str();
}

std::string fmt(double v, int digits = 10) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

int kernel_check(std::size_t draws, std::uint64_t seed, const Common& c) {
  nlohmann::json j;
  std::ostringstream text;
  bool ok = true;
  text << "check,argument,value,reference,deviation,tolerance,status\n";
  const auto row = [&](const std::string& name, const std::string& arg,
                       double value, double ref, double tol) {
    const double dev = std::abs(value - ref);
    const bool pass = dev <= tol;
    ok = ok && pass;
    text << name << ',' << arg << ',' << fmt(value) << ',' << fmt(ref) << ','
         << fmt(dev, 3) << ',' << fmt(tol, 3) << ',' << (pass ? "ok" : "FAIL")
         << '\n';
    j["checks"].push_back({{"check", name}, {"argument", arg}, {"value", value},
                           {"reference", ref}, {"deviation", dev},
                           {"tolerance", tol}, {"pass", pass}});
  };

  for (double a : {0.5, 1.0, 2.0, 5.0}) {
    row("E|Z|^2 ML closed vs quadrature", "a=" + fmt(a),
        cg::expected_norm_sq_ml_closed(a), cg::expected_norm_sq(cg::Ml{}, a),
        1e-8);
    row("E|Z|^2 MIQ closed vs quadrature", "a=" + fmt(a),
        cg::expected_norm_sq_miq_closed(a), cg::expected_norm_sq(cg::Miq{}, a),
        1e-6);
  }
  for (double a : {1.0, 2.0}) {
    row("Var|Z|^2 ML closed vs quadrature", "a=" + fmt(a),
        cg::variance_norm_sq_ml_closed(a), cg::variance_norm_sq_ml(a), 1e-6);
  }
  const std::vector<double> grid = {0.3, 1.0, 2.5};
  const std::vector<std::pair<cg::EstimatorKind, double>> kinds = {
      {cg::Ml{}, 0.03}, {cg::Miq{}, 0.03}, {cg::Eise{1.0}, 0.05}};
  for (const auto& [kind, tol] : kinds) {
    for (double s : grid) {
      for (double t : grid) {
        row("kernel closed vs expectation " + cg::to_string(kind),
            "s=" + fmt(s) + " t=" + fmt(t), cg::kernel_eval(kind, s, t),
            cg::kernel_by_expectation(kind, s, t), 1e-7);
      }
    }
    const auto mc = cg::mc_kernel_consistency(kind, draws, grid, seed);
    row("kernel vs simulated covariance " + cg::to_string(kind),
        "draws=" + std::to_string(draws), mc.max_abs_deviation, 0.0, tol);
  }

  // The published EISE kernel disagrees with the covariance of the summands.
  double display_dev = 0.0;
  for (double s : grid) {
    for (double t : grid) {
      display_dev = std::max(display_dev,
                             std::abs(cg::kernel_eise_display(s, t, 1.0) -
                                      cg::kernel_eise(s, t, 1.0)));
    }
  }
  text << "# published K_EISE formula deviates from the covariance kernel by up "
          "to "
       << fmt(display_dev, 4) << "; kernel_eise is used throughout\n";
  j["eise_display_max_deviation"] = display_dev;
  j["pass"] = ok;
  emit(c, c.format == "json" ? j.dump(2) : text.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic-function goodness-of-fit tests for the Cauchy family"};
  app.require_subcommand(1);

  // test
  Common test_c;
  std::string file, price_col = "close", date_col = "date", hist_out;
  std::optional<std::string> volume_col;
  auto* test = app.add_subcommand("test", "run the test battery on a price file");
  add_common(test, test_c, 10'000);
  test->add_option("file", file, "CSV file with a header row")->required();
  test->add_option("--price-col", price_col, "closing price column")
      ->capture_default_str();
  test->add_option("--volume-col", volume_col,
                   "volume column; zero-volume rows are dropped");
  test->add_option("--date-col", date_col, "date column")->capture_default_str();
  test->add_option("--histogram-out", hist_out,
                   "write histogram and fitted density points (CSV)");

  // simulate-critical
  Common crit_c;
  std::size_t crit_n = 20;
  std::vector<double> crit_levels;
  auto* crit = app.add_subcommand("simulate-critical",
                                  "Monte Carlo critical values under C(0,1)");
  add_common(crit, crit_c, 10'000);
  crit->add_option("--n", crit_n, "sample size")->capture_default_str();
  crit->add_option("--level,--alpha", crit_levels,
                   "significance level (repeatable, default 0.05)");

  // power
  Common pow_c;
  std::size_t pow_n = 20, cv_reps = 10'000;
  double pow_level = 0.05;
  std::vector<std::string> alternatives;
  auto* pw = app.add_subcommand("power", "power table against alternatives");
  add_common(pw, pow_c, 2'000);
  pw->add_option("--n", pow_n, "sample size")->capture_default_str();
  pw->add_option("--level,--alpha", pow_level, "significance level")
      ->capture_default_str();
  pw->add_option("--alt", alternatives,
                 "alternative (repeatable), e.g. normal:0:1, stable:0.5:1");
  pw->add_option("--cv-reps", cv_reps, "replications for critical values")
      ->capture_default_str();

  // kernel-check
  Common kc_c;
  std::size_t kc_draws = 100'000;
  auto* kc = app.add_subcommand("kernel-check",
                                "validate covariance kernels and moment formulas");
  add_common(kc, kc_c, 0);
  kc->add_option("--draws", kc_draws, "simulated summands")->capture_default_str();

  // delta
  Common d_c;
  std::string d_spec;
  double d_a = 1.0;
  bool d_mc = false;
  auto* delta = app.add_subcommand("delta", "population value Delta_F");
  add_common(delta, d_c, 0);
  delta->add_option("distribution", d_spec, "e.g. normal:0:1, uniform, ml:0.5")
      ->required();
  delta->add_option("--a", d_a, "weight parameter")->capture_default_str();
  delta->add_flag("--monte-carlo", d_mc, "force the Monte Carlo fallback");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*test) {
      const auto& c = test_c;
      cg::IngestOptions io;
      io.price_column = price_col;
      io.volume_column = volume_col;
      io.date_column = date_col;
      const cg::ReturnSeries series = cg::ingest_returns(file, io);
      for (const auto& d : series.dropped) {
        std::cerr << "dropped line " << d.line << ": " << d.reason << '\n';
      }
      std::cerr << series.input_rows << " rows, " << series.retained_rows
                << " retained, " << series.dropped.size() << " dropped, "
                << series.returns.size() << " returns\n";
      cg::BatteryConfig cfg;
      for (const auto& s : c.stats) cfg.statistics.push_back(cg::parse_statistic(s));
      cfg.estimator = cg::parse_estimator(c.estimator);
      cfg.reps = c.reps;
      cfg.seed = resolve_seed(c);
      cfg.mc.workers = c.workers;
      const cg::BatteryReport report = cg::run_battery(series.returns, cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& [id, why] : report.errors) {
        std::cerr << "error in " << id << ": " << why << '\n';
      }
      std::cerr << "fit " << report.estimator << ": alpha = " << report.fit.alpha
                << ", beta = " << report.fit.beta << '\n';
      emit(c, c.format == "json" ? cg::to_json(report) : cg::to_csv(report));
      if (!hist_out.empty()) {
        std::ofstream os(hist_out);
        if (!os) throw cg::DataError("cannot write '" + hist_out + "'");
        os << cg::histogram_csv(report.histogram);
      }
      return 0;
    }
    if (*crit) {
      const auto& c = crit_c;
      if (crit_levels.empty()) crit_levels = {0.05};
      const auto stats = statistics(c.stats.empty() ? kTableStatistics : c.stats);
      cg::McOptions mo;
      mo.workers = c.workers;
      const auto table =
          cg::critical_values(stats, cg::parse_estimator(c.estimator), crit_n,
                              crit_levels, c.reps, resolve_seed(c), mo);
      emit(c, c.format == "json" ? cg::to_json(table) : cg::to_csv(table));
      return 0;
    }
    if (*pw) {
      const auto& c = pow_c;
      const auto stats = statistics(c.stats.empty() ? kTableStatistics : c.stats);
      std::vector<cg::DistributionSpec> alts;
      for (const auto& a : alternatives.empty() ? kTableAlternatives : alternatives) {
        alts.push_back(cg::parse_distribution(a));
      }
      const auto est = cg::parse_estimator(c.estimator);
      const std::uint64_t seed = resolve_seed(c);
      cg::McOptions mo;
      mo.workers = c.workers;
      const std::vector<double> levels = {pow_level};
      const auto cv = cg::critical_values(stats, est, pow_n, levels, cv_reps,
                                          cg::derive_seed(seed, 0), mo);
      const auto table = cg::power(alts, stats, est, pow_n, pow_level, cv,
                                   c.reps, cg::derive_seed(seed, 1), mo);
      emit(c, c.format == "json" ? cg::to_json(table) : cg::to_csv(table));
      return 0;
    }
    if (*kc) {
      return kernel_check(kc_draws, resolve_seed(kc_c), kc_c);
    }
    if (*delta) {
      const auto& c = d_c;
      cg::DeltaSettings ds;
      ds.force_monte_carlo = d_mc;
      if (c.seed || std::getenv("CAUCHYGOF_SEED")) ds.seed = resolve_seed(c);
      const auto spec = cg::parse_distribution(d_spec);
      const auto r = cg::delta_f(spec, d_a, ds);
      if (c.format == "json") {
        nlohmann::json j = {{"distribution", cg::to_string(spec)},
                            {"a", d_a},
                            {"delta", r.value},
                            {"error", r.error},
                            {"monte_carlo", r.monte_carlo}};
        emit(c, j.dump(2));
      } else {
        emit(c, "distribution,a,delta,error,monte_carlo\n" + cg::to_string(spec) +
                    ',' + fmt(d_a) + ',' + fmt(r.value, 12) + ',' +
                    fmt(r.error, 3) + ',' + (r.monte_carlo ? "true" : "false") +
                    '\n');
      }
      return 0;
    }
  } catch (const cg::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const cg::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitData;
  } catch (const cg::DegenerateSampleError& e) {
    std::cerr << "degenerate sample: " << e.what() << '\n';
    return kExitData;
  } catch (const cg::OptimizationError& e) {
    std::cerr << "optimization failed: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const cg::AccuracyError& e) {
    std::cerr << "numerical accuracy not reached: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const cg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
