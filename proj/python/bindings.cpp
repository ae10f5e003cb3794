#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cauchygof/asymptotic.hpp"
#include "cauchygof/battery.hpp"
#include "cauchygof/competitors.hpp"
#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/estimate.hpp"
#include "cauchygof/mc.hpp"
#include "cauchygof/statistic.hpp"

namespace py = pybind11;
namespace cg = cauchygof;

namespace {

std::vector<cg::NamedStatistic> stats_of(const std::vector<std::string>& ids) {
  std::vector<cg::StatisticId> parsed;
  for (const auto& s : ids) parsed.push_back(cg::parse_statistic(s));
  return cg::make_statistics(parsed);
}

py::dict outcome_dict(const cg::TestOutcome& o) {
  py::dict d;
  d["statistic"] = o.id;
  d["value"] = o.value;
  d["p_value"] = o.p_value;
  d["reps"] = o.reps;
  d["seed"] = o.seed;
  d["estimator"] = o.estimator;
  d["n"] = o.n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Characteristic-function goodness-of-fit tests for the Cauchy family";

  static py::exception<cg::Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<cg::ParameterError> parameter_error(m, "ParameterError",
                                                           PyExc_ValueError);
  static py::exception<cg::DataError> data_error(m, "DataError", PyExc_ValueError);
  static py::exception<cg::DegenerateSampleError> degenerate(
      m, "DegenerateSampleError", PyExc_ValueError);
  static py::exception<cg::OptimizationError> optimization(m, "OptimizationError",
                                                           error.ptr());
  static py::exception<cg::AccuracyError> accuracy(m, "AccuracyError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cg::ParameterError& e) {
      py::set_error(parameter_error, e.what());
    } catch (const cg::DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const cg::DegenerateSampleError& e) {
      py::set_error(degenerate, e.what());
    } catch (const cg::OptimizationError& e) {
      py::set_error(optimization, e.what());
    } catch (const cg::AccuracyError& e) {
      py::set_error(accuracy, e.what());
    } catch (const cg::Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "sample",
      [](const std::string& spec, std::size_t n, std::uint64_t seed,
         std::uint64_t stream) {
        cg::RngStream rng(seed, stream);
        return cg::sample(cg::parse_distribution(spec), n, rng);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed") = 1, py::arg("stream") = 0,
      "Draw n values from a distribution given in text form, e.g. 'stable:0.5:1'.");

  m.def(
      "fit",
      [](const std::vector<double>& x, const std::string& estimator) {
        const auto f = cg::fit(x, cg::parse_estimator(estimator));
        return py::make_tuple(f.alpha, f.beta);
      },
      py::arg("x"), py::arg("estimator") = "ml",
      "Location and scale estimate (alpha, beta): 'miq', 'ml' or 'eise:<nu>'.");

  m.def(
      "residuals",
      [](const std::vector<double>& x, const std::string& estimator) {
        return cg::residuals(x, cg::parse_estimator(estimator)).values;
      },
      py::arg("x"), py::arg("estimator") = "ml");

  m.def(
      "tna", [](const std::vector<double>& y, double a) { return cg::tna(y, a).value; },
      py::arg("y"), py::arg("a") = 1.0, "T_{n,a} of scaled residuals y.");
  m.def("tn0", [](const std::vector<double>& y) { return cg::tn0(y); }, py::arg("y"));
  m.def(
      "edf_statistics",
      [](const std::vector<double>& y) {
        const auto e = cg::edf_statistics(y);
        py::dict d;
        d["ks"] = e.ks;
        d["cm"] = e.cm;
        d["ad"] = e.ad;
        d["w"] = e.watson;
        return d;
      },
      py::arg("y"));
  m.def("dnl", [](const std::vector<double>& y, double l) { return cg::compute_dnl(y, l); },
        py::arg("y"), py::arg("lam") = 1.0);
  m.def(
      "kl",
      [](const std::vector<double>& y, std::size_t window) {
        return cg::compute_kl(y, window).value;
      },
      py::arg("y"), py::arg("m"));
  m.def(
      "statistic",
      [](const std::string& id, const std::vector<double>& y) {
        return cg::make_statistic(cg::parse_statistic(id)).eval(y);
      },
      py::arg("id"), py::arg("y"),
      "Evaluate a statistic by id ('T:a=1', 'T0', 'ks', 'd:lambda=3', ...).");

  m.def(
      "delta",
      [](const std::string& spec, double a, bool monte_carlo) {
        cg::DeltaSettings s;
        s.force_monte_carlo = monte_carlo;
        const auto r = cg::delta_f(cg::parse_distribution(spec), a, s);
        return py::make_tuple(r.value, r.error);
      },
      py::arg("spec"), py::arg("a") = 1.0, py::arg("monte_carlo") = false,
      "Delta_F and its error estimate.");

  m.def(
      "kernel",
      [](const std::string& estimator, double s, double t) {
        return cg::kernel_eval(cg::parse_estimator(estimator), s, t);
      },
      py::arg("estimator"), py::arg("s"), py::arg("t"));
  m.def(
      "expected_norm_sq",
      [](const std::string& estimator, double a) {
        return cg::expected_norm_sq(cg::parse_estimator(estimator), a);
      },
      py::arg("estimator"), py::arg("a"));

  m.def(
      "critical_values",
      [](const std::vector<std::string>& ids, const std::string& estimator,
         std::size_t n, const std::vector<double>& levels, std::size_t reps,
         std::uint64_t seed, std::size_t workers) {
        const auto stats = stats_of(ids);
        cg::McOptions o;
        o.workers = workers;
        cg::CriticalValueTable t;
        {
          py::gil_scoped_release release;
          t = cg::critical_values(stats, cg::parse_estimator(estimator), n, levels,
                                  reps, seed, o);
        }
        py::dict d;
        for (const auto& e : t.entries) {
          d[py::make_tuple(e.id, e.level)] = e.value;
        }
        return d;
      },
      py::arg("ids"), py::arg("estimator"), py::arg("n"),
      py::arg("levels") = std::vector<double>{0.05}, py::arg("reps") = 10'000,
      py::arg("seed") = 1, py::arg("workers") = 0,
      "Critical values keyed by (statistic id, level).");

  m.def(
      "power",
      [](const std::vector<std::string>& alternatives,
         const std::vector<std::string>& ids, const std::string& estimator,
         std::size_t n, double level, std::size_t reps, std::size_t cv_reps,
         std::uint64_t seed, std::size_t workers) {
        const auto stats = stats_of(ids);
        std::vector<cg::DistributionSpec> alts;
        for (const auto& a : alternatives) alts.push_back(cg::parse_distribution(a));
        const auto est = cg::parse_estimator(estimator);
        cg::McOptions o;
        o.workers = workers;
        cg::PowerTable t;
        {
          py::gil_scoped_release release;
          const std::vector<double> levels = {level};
          const auto cv = cg::critical_values(stats, est, n, levels, cv_reps,
                                              cg::derive_seed(seed, 0), o);
          t = cg::power(alts, stats, est, n, level, cv, reps,
                        cg::derive_seed(seed, 1), o);
        }
        py::dict d;
        d["rows"] = t.rows;
        d["columns"] = t.columns;
        d["cells"] = t.cells;
        d["reps"] = t.reps;
        d["seed"] = t.seed;
        return d;
      },
      py::arg("alternatives"), py::arg("ids"), py::arg("estimator"), py::arg("n"),
      py::arg("level") = 0.05, py::arg("reps") = 2'000, py::arg("cv_reps") = 10'000,
      py::arg("seed") = 1, py::arg("workers") = 0,
      "Rejection fractions, cells[row][column].");

  m.def(
      "p_value",
      [](const std::vector<double>& x, const std::string& id,
         const std::string& estimator, std::size_t reps, std::uint64_t seed,
         std::size_t workers) {
        const auto stat = cg::make_statistic(cg::parse_statistic(id));
        cg::McOptions o;
        o.workers = workers;
        cg::TestOutcome out;
        {
          py::gil_scoped_release release;
          out = cg::p_value(x, stat, cg::parse_estimator(estimator), reps, seed, o);
        }
        return outcome_dict(out);
      },
      py::arg("x"), py::arg("id"), py::arg("estimator") = "ml",
      py::arg("reps") = 10'000, py::arg("seed") = 1, py::arg("workers") = 0);

  m.def(
      "ingest_returns",
      [](const std::string& path, const std::string& price,
         std::optional<std::string> volume, std::optional<std::string> date) {
        cg::IngestOptions o;
        o.price_column = price;
        o.volume_column = std::move(volume);
        o.date_column = std::move(date);
        const auto s = cg::ingest_returns(path, o);
        py::dict d;
        d["dates"] = s.dates;
        d["returns"] = s.returns;
        d["input_rows"] = s.input_rows;
        d["retained_rows"] = s.retained_rows;
        py::list dropped;
        for (const auto& r : s.dropped) dropped.append(py::make_tuple(r.line, r.reason));
        d["dropped"] = dropped;
        return d;
      },
      py::arg("path"), py::arg("price") = "close", py::arg("volume") = py::none(),
      py::arg("date") = "date");

  m.def(
      "run_battery",
      [](const std::vector<double>& x, const std::optional<std::vector<std::string>>& ids,
         const std::string& estimator, std::size_t reps, std::uint64_t seed,
         std::size_t workers) {
        cg::BatteryConfig c;
        if (ids) {
          for (const auto& s : *ids) c.statistics.push_back(cg::parse_statistic(s));
        }
        c.estimator = cg::parse_estimator(estimator);
        c.reps = reps;
        c.seed = seed;
        c.mc.workers = workers;
        std::string json;
        {
          py::gil_scoped_release release;
          json = cg::to_json(cg::run_battery(x, c));
        }
        return json;
      },
      py::arg("x"), py::arg("ids") = py::none(), py::arg("estimator") = "ml",
      py::arg("reps") = 10'000, py::arg("seed") = 1, py::arg("workers") = 0,
      "Battery report as a JSON string.");
}
