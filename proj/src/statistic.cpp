#include "cauchygof/statistic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cauchygof/errors.hpp"
#include "numeric.hpp"

namespace cauchygof {

namespace {

constexpr double kPi = std::numbers::pi;

void check_finite(std::span<const double> y) {
  if (y.empty()) throw DataError("empty residual vector");
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("residuals contain non-finite values");
  }
}

void check_weight(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ParameterError("weight parameter a must be positive");
  }
}

// T_{n,a} split as 4/a^3 (the diagonal constant) plus the rest, so that the
// small-a limit can be taken without cancellation.
std::pair<double, double> tna_parts(std::span<const double> y, double a) {
  const std::size_t n = y.size();
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = y[j] / (1.0 + y[j] * y[j]);

  const double a2 = a * a;
  const double a3 = a2 * a;
  detail::CompensatedSum rest;
  for (std::size_t j = 0; j < n; ++j) {
    rest += 8.0 * p[j] * p[j] / a;
    double row = 0.0;
    const double yj = y[j], pj = p[j];
    for (std::size_t k = j + 1; k < n; ++k) {
      const double d = yj - y[k];
      const double d2 = d * d;
      const double r = 1.0 / (d2 + a2);
      // (j,k) and (k,j) together; the middle summand is not symmetric.
      row += 16.0 * a * pj * p[k] * r - 16.0 * a * d * (pj - p[k]) * r * r +
             2.0 * (4.0 * a3 - 12.0 * a * d2) * r * r * r;
    }
    rest += row;
  }
  const double dn = static_cast<double>(n);
  return {4.0 / a3, rest.value() / dn};
}

// ---- Delta_F ----------------------------------------------------------------

// Replace families by an equivalent one that has a density when possible.
DistributionSpec resolve(const DistributionSpec& spec) {
  if (const auto* s = std::get_if<Stable>(&spec)) {
    if (s->index == 1.0 && s->skew == 0.0) return Cauchy{};
    if (s->index == 2.0) return Normal{0.0, std::numbers::sqrt2};
  }
  if (const auto* t = std::get_if<TukeyGH>(&spec); t && t->h == 0.0) {
    return Normal{};
  }
  if (const auto* t = std::get_if<TukeyLambda>(&spec)) {
    if (t->lambda == 0.0) return Logistic{};
    if (t->lambda == 1.0) return Uniform{-1.0, 1.0};
  }
  if (const auto* m = std::get_if<MittagLeffler>(&spec); m && m->index == 1.0) {
    return Exponential{};
  }
  return spec;
}

enum class LawKind { Light, Heavy, Arcsine, None };

struct Law {
  LawKind kind = LawKind::None;
  // Support of X and points where the density has kinks or its bulk.
  std::vector<double> cuts;
};

Law law_of(const DistributionSpec& spec) {
  Law law;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Cauchy> || std::is_same_v<T, StudentT> ||
                      std::is_same_v<T, CauchyNormalMix>) {
          law.kind = LawKind::Heavy;
        } else if constexpr (std::is_same_v<T, Normal>) {
          law.kind = LawKind::Light;
          law.cuts = {d.mean - 14 * d.sd, d.mean - 3 * d.sd, d.mean,
                      d.mean + 3 * d.sd, d.mean + 14 * d.sd};
        } else if constexpr (std::is_same_v<T, Logistic> ||
                             std::is_same_v<T, Laplace>) {
          law.kind = LawKind::Light;
          law.cuts = {-45.0, -10.0, -3.0, 0.0, 3.0, 10.0, 45.0};
        } else if constexpr (std::is_same_v<T, Gumbel>) {
          law.kind = LawKind::Light;
          law.cuts = {-6.0, -2.0, 0.0, 3.0, 10.0, 45.0};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          law.kind = LawKind::Light;
          law.cuts = {0.0, 3.0, 10.0, 45.0};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          law.kind = LawKind::Light;
          law.cuts = {d.lower, 0.5 * (d.lower + d.upper), d.upper};
        } else if constexpr (std::is_same_v<T, Arcsine>) {
          law.kind = LawKind::Arcsine;
          law.cuts = {d.lower, d.upper};
        } else {
          law.kind = LawKind::None;
        }
      },
      spec);
  return law;
}

// The four moments C0 = E cos tY, S0 = E sin tY, C1 = E u cos tY,
// S1 = E u sin tY with u = 2Y/(1+Y^2).
using Moments = std::array<double, 4>;

double u_of(double y) { return 2.0 * y / (1.0 + y * y); }

struct MomentEngine {
  DistributionSpec spec;
  Law law;
  LocationScale std_by;
  double tol;

  // Density of Y = (X - alpha)/beta.
  double density(double y) const {
    return std_by.beta * *pdf(spec, std_by.alpha + std_by.beta * y);
  }
};

// |E[(it - u) e^{itY}]|^2 from the four moments.
double modulus_sq(double t, const Moments& m) {
  const double re = -t * m[1] - m[2];
  const double im = t * m[0] - m[3];
  return re * re + im * im;
}

// The t-integral of |E[(it - u) e^{itY}]|^2 e^{-a|t|} in closed form: the
// same pair kernel as in T_{n,a}, so Delta_F = E h(Y, Y') for independent
// copies. Used for laws with a bounded density, where the double integral
// is smooth.
double pair_kernel(double y, double z, double a) {
  const double p = y / (1.0 + y * y);
  const double q = z / (1.0 + z * z);
  const double d = y - z;
  const double d2 = d * d;
  const double r = 1.0 / (d2 + a * a);
  return 8.0 * a * p * q * r - 8.0 * a * d * (p - q) * r * r +
         (4.0 * a * a * a - 12.0 * a * d2) * r * r * r;
}

// E g(Y) = sum over pieces of int g(y(v)) w(v) dv.
struct Measure {
  std::vector<double> cuts;
  std::function<double(double)> y_of;
  std::function<double(double)> weight;
};

Measure measure_of(const MomentEngine& e) {
  Measure m;
  if (e.law.kind == LawKind::Heavy) {
    // y = tan(theta) turns Cauchy-type tails into a bounded weight.
    m.cuts = {-kPi / 2.0, -kPi / 4.0, 0.0, kPi / 4.0, kPi / 2.0};
    m.y_of = [](double th) { return std::tan(th); };
    m.weight = [&e](double th) {
      const double y = std::tan(th);
      return std::isfinite(y) ? e.density(y) * (1.0 + y * y) : 0.0;
    };
    return m;
  }
  if (e.law.kind == LawKind::Arcsine) {
    const double lo = e.law.cuts[0], hi = e.law.cuts[1];
    const LocationScale sb = e.std_by;
    m.cuts = {0.0, kPi / 4.0, kPi / 2.0};
    m.y_of = [=](double th) {
      const double s = std::sin(th);
      return (lo + (hi - lo) * s * s - sb.alpha) / sb.beta;
    };
    m.weight = [](double) { return 2.0 / kPi; };
    return m;
  }
  for (double c : e.law.cuts) m.cuts.push_back((c - e.std_by.alpha) / e.std_by.beta);
  m.y_of = [](double y) { return y; };
  m.weight = [&e](double y) { return e.density(y); };
  return m;
}

DeltaResult delta_pair_kernel(const MomentEngine& engine, double a) {
  const Measure m = measure_of(engine);
  const auto inner = [&](double v) {
    const double y = m.y_of(v);
    const double wv = m.weight(v);
    if (wv == 0.0) return 0.0;
    detail::CompensatedSum s;
    for (std::size_t i = 0; i + 1 < m.cuts.size(); ++i) {
      // Split at the diagonal, where the kernel peaks with width a.
      std::vector<double> pts = {m.cuts[i]};
      if (v > m.cuts[i] && v < m.cuts[i + 1]) pts.push_back(v);
      pts.push_back(m.cuts[i + 1]);
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        s += detail::integrate_gk_abs(
                 [&](double w) { return pair_kernel(y, m.y_of(w), a) * m.weight(w); },
                 pts[k], pts[k + 1], engine.tol * 1e-1, 20)
                 .value;
      }
    }
    return s.value() * wv;
  };
  detail::CompensatedSum value;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < m.cuts.size(); ++i) {
    const auto r = detail::integrate_gk_abs(inner, m.cuts[i], m.cuts[i + 1],
                                            engine.tol, 20);
    value += r.value;
    error += r.error;
  }
  DeltaResult out;
  out.value = value.value();
  out.error = error;
  detail::require_accuracy({out.value, out.error}, 1e-7, "delta_F");
  return out;
}

DeltaResult delta_monte_carlo(const DistributionSpec& spec, double a,
                              const DeltaSettings& settings,
                              const LocationScale& std_by) {
  // Fixed t-grid: 8-point Gauss-Legendre panels, refined near 0 where heavy
  // tails put a cusp into the characteristic function.
  const std::array<double, 14> edges = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 2.0,
                                        4.0, 7.0, 11.0, 16.0, 22.0, 30.0, 40.0};
  std::vector<double> nodes, weights;
  using GL = boost::math::quadrature::gauss<double, 8>;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i] / a, hi = edges[i + 1] / a;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
      const double x = GL::abscissa()[k];
      const double w = GL::weights()[k];
      for (double sign : {-1.0, 1.0}) {
        if (x == 0.0 && sign < 0.0) continue;
        const double t = mid + sign * half * x;
        nodes.push_back(t);
        weights.push_back(half * w * std::exp(-a * t));
      }
    }
  }
  const std::size_t m = nodes.size();
  const std::size_t batches = 20;
  const std::size_t per_batch = std::max<std::size_t>(settings.mc_draws / batches, 2);

  struct Acc {
    std::vector<double> c0, s0, c1, s1;
    double uu = 0.0;
    std::size_t count = 0;
  };
  const auto estimate = [&](const Acc& acc) {
    const double n = static_cast<double>(acc.count);
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < m; ++i) {
      const double t = nodes[i];
      const Moments mo = {acc.c0[i] / n, acc.s0[i] / n, acc.c1[i] / n,
                          acc.s1[i] / n};
      // E|v|^2 = t^2 + E u^2 for v = (it - u) e^{itY}.
      const double mean_sq = t * t + acc.uu / n;
      const double unbiased = n / (n - 1.0) * (modulus_sq(t, mo) - mean_sq / n);
      s += weights[i] * unbiased;
    }
    return 2.0 * s.value();
  };

  Acc total{std::vector<double>(m), std::vector<double>(m),
            std::vector<double>(m), std::vector<double>(m)};
  std::vector<double> batch_values;
  for (std::size_t b = 0; b < batches; ++b) {
    RngStream rng(settings.seed, b);
    Acc acc{std::vector<double>(m), std::vector<double>(m),
            std::vector<double>(m), std::vector<double>(m)};
    for (std::size_t j = 0; j < per_batch; ++j) {
      const double y = (draw(spec, rng) - std_by.alpha) / std_by.beta;
      const double u = u_of(y);
      acc.uu += u * u;
      for (std::size_t i = 0; i < m; ++i) {
        const double c = std::cos(nodes[i] * y);
        const double s = std::sin(nodes[i] * y);
        acc.c0[i] += c;
        acc.s0[i] += s;
        acc.c1[i] += u * c;
        acc.s1[i] += u * s;
      }
    }
    acc.count = per_batch;
    batch_values.push_back(estimate(acc));
    for (std::size_t i = 0; i < m; ++i) {
      total.c0[i] += acc.c0[i];
      total.s0[i] += acc.s0[i];
      total.c1[i] += acc.c1[i];
      total.s1[i] += acc.s1[i];
    }
    total.uu += acc.uu;
    total.count += acc.count;
  }

  double mean = 0.0;
  for (double v : batch_values) mean += v;
  mean /= static_cast<double>(batches);
  double var = 0.0;
  for (double v : batch_values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(batches - 1);

  DeltaResult out;
  out.value = estimate(total);
  out.error = std::sqrt(var / static_cast<double>(batches));
  out.monte_carlo = true;
  return out;
}

}  // namespace

StatisticValue tna(std::span<const double> y, double a) {
  check_finite(y);
  check_weight(a);
  const auto [constant, rest] = tna_parts(y, a);
  StatisticValue out{constant + rest, false};
  const double scale = std::max(1.0, constant);
  if (out.value < 0.0 && out.value >= -1e-10 * scale) {
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

StatisticValue compute_tna(const ScaledResiduals& res, double a) {
  return tna(res.values, a);
}

double tn0(std::span<const double> y) {
  check_finite(y);
  detail::CompensatedSum s;
  for (double v : y) {
    const double q = 1.0 + v * v;
    s += v * v / (q * q);
  }
  const double n = static_cast<double>(y.size());
  return std::sqrt(2.0 * n) * (8.0 / n * s.value() - 1.0);
}

double compute_tn0(const ScaledResiduals& res) { return tn0(res.values); }

std::pair<double, double> limit_small_a_check(std::span<const double> y,
                                              double a) {
  check_finite(y);
  check_weight(a);
  const auto rest = tna_parts(y, a).second;
  detail::CompensatedSum s;
  for (double v : y) {
    const double q = 1.0 + v * v;
    s += v * v / (q * q);
  }
  const double n = static_cast<double>(y.size());
  return {a * rest, 8.0 / n * s.value()};
}

std::pair<double, double> limit_large_a_check(std::span<const double> y,
                                              double a) {
  const double t = tna(y, a).value;
  detail::CompensatedSum s;
  for (double v : y) s += v / (1.0 + v * v);
  const double n = static_cast<double>(y.size());
  return {a * t, 8.0 / n * s.value() * s.value()};
}

double empirical_process(std::span<const double> y, double t) {
  check_finite(y);
  detail::CompensatedSum s;
  for (double v : y) {
    const double u = u_of(v);
    s += (u + t) * std::cos(t * v) + (t - u) * std::sin(t * v);
  }
  return s.value() / std::sqrt(static_cast<double>(y.size()));
}

DeltaResult delta_f(const DistributionSpec& spec, double a,
                    const DeltaSettings& settings,
                    std::optional<LocationScale> standardize) {
  validate(spec);
  check_weight(a);
  const LocationScale std_by = standardize.value_or(LocationScale{0.0, 1.0});
  if (!(std_by.beta > 0.0)) throw ParameterError("beta must be positive");

  const DistributionSpec resolved = resolve(spec);
  const Law law = law_of(resolved);
  if (law.kind == LawKind::None || settings.force_monte_carlo) {
    if (settings.mc_draws < 40) {
      throw ParameterError("Monte Carlo evaluation needs at least 40 draws");
    }
    return delta_monte_carlo(spec, a, settings, std_by);
  }
  const MomentEngine engine{resolved, law, std_by, settings.tolerance};
  return delta_pair_kernel(engine, a);
}

}  // namespace cauchygof
