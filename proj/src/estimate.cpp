#include "cauchygof/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cauchygof/errors.hpp"
#include "cauchygof/optimize.hpp"
#include "numeric.hpp"

namespace cauchygof {

namespace {

constexpr double kScoreTol = 1e-10;
constexpr std::size_t kMaxNewton = 200;
// Above this size Nelder-Mead on the O(n^2) EISE objective is too slow and
// the damped Newton iteration is used from the start.
constexpr std::size_t kEiseSimplexLimit = 2000;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_sample(std::span<const double> sample, std::size_t min_n) {
  if (sample.size() < min_n) {
    throw DataError("sample needs at least " + std::to_string(min_n) +
                    " observations");
  }
  for (double x : sample) {
    if (!std::isfinite(x)) throw DataError("sample contains non-finite values");
  }
}

// Move (alpha, beta) by (u, v) in coordinates relative to itself.
LocationScale shift(const LocationScale& at, double u, double v) {
  return {at.alpha + at.beta * u, at.beta * std::exp(v)};
}

// Gradient and Hessian of an objective in relative coordinates at (0, 0).
struct LocalModel {
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<double, 3> hess{};  // uu, uv, vv
};

// Minimizes a smooth objective by Newton steps in relative coordinates with
// Levenberg damping and backtracking. Stops when the gradient sup-norm is
// below tol. Returns false if no progress can be made.
template <class Model, class Value>
bool damped_newton(LocationScale& at, const Model& model, const Value& value,
                   double tol, std::size_t max_iterations,
                   double* final_grad_norm) {
  double mu = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const LocalModel m = model(at);
    const double gnorm = std::max(std::abs(m.grad[0]), std::abs(m.grad[1]));
    *final_grad_norm = gnorm;
    if (!std::isfinite(gnorm)) return false;
    if (gnorm < tol) return true;
    const double f_at = value(at);

    bool moved = false;
    for (int attempt = 0; attempt < 60 && !moved; ++attempt) {
      const double a = m.hess[0] + mu, b = m.hess[1], c = m.hess[2] + mu;
      const double det = a * c - b * b;
      if (!(a > 0.0 && det > 0.0)) {
        mu = std::max(2.0 * mu, 1e-3 + std::abs(m.hess[0]) + std::abs(m.hess[2]));
        continue;
      }
      double du = -(c * m.grad[0] - b * m.grad[1]) / det;
      double dv = -(a * m.grad[1] - b * m.grad[0]) / det;
      // Keep the scale step moderate; the objective is flat far away.
      const double len = std::max(std::abs(du), std::abs(dv));
      if (len > 1.0) {
        du /= len;
        dv /= len;
      }
      const LocationScale trial = shift(at, du, dv);
      const double fv = value(trial);
      // Near the optimum the decrease is below rounding; a short undamped
      // Newton step with a positive definite Hessian is taken as is.
      const bool local = mu == 0.0 && len < 1e-6;
      if (fv <= f_at + 4e-16 * std::abs(f_at) || local) {
        at = trial;
        moved = true;
        mu *= 0.25;
        if (mu < 1e-12) mu = 0.0;
      } else {
        mu = std::max(4.0 * mu, 1e-6 + 1e-3 * (std::abs(m.hess[0]) + std::abs(m.hess[2])));
      }
    }
    if (!moved) return false;
  }
  return false;
}

// ---- Likelihood -----------------------------------------------------------

double negative_mean_log_likelihood(std::span<const double> x,
                                    const LocationScale& at) {
  return -cauchy_log_likelihood(x, at) / static_cast<double>(x.size());
}

LocalModel ml_model(std::span<const double> x, const LocationScale& at) {
  detail::CompensatedSum nll, s1, s2, a, c, d;
  for (double xi : x) {
    const double z = (xi - at.alpha) / at.beta;
    const double q = 1.0 + z * z;
    nll += std::log1p(z * z);
    s1 += 2.0 * z / q;
    s2 += (z * z - 1.0) / q;
    a += 2.0 * (1.0 - z * z) / (q * q);
    c += 4.0 * z / (q * q);
    d += 4.0 * z * z / (q * q);
  }
  const double n = static_cast<double>(x.size());
  LocalModel m;
  m.value = nll.value() / n + std::log(std::numbers::pi * at.beta);
  // Minimizing the negative log-likelihood: gradient is minus the score.
  m.grad = {-s1.value() / n, -s2.value() / n};
  m.hess = {a.value() / n, c.value() / n, d.value() / n};
  return m;
}

// ---- EISE objective -------------------------------------------------------

struct EiseSums {
  double value = 0.0;
  LocalModel model;
};

EiseSums eise_sums(std::span<const double> x, const LocationScale& at,
                   double nu, bool with_derivatives) {
  const std::size_t n = x.size();
  const double dn = static_cast<double>(n);
  std::vector<double> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = (x[j] - at.alpha) / at.beta;

  const double nu2 = nu * nu;
  // Pair sums over j < k; the diagonal adds n * 2/nu to the first one only.
  detail::CompensatedSum p0, p1, p2;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double r0 = 0.0, r1 = 0.0, r2 = 0.0;
    const double zj = z[j];
    if (with_derivatives) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double w = zj - z[k];
        const double w2 = w * w;
        const double r = 1.0 / (nu2 + w2);
        r0 += r;
        r1 += w2 * r * r;
        r2 += w2 * (nu2 - 3.0 * w2) * r * r * r;
      }
    } else {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double w = zj - z[k];
        r0 += 1.0 / (nu2 + w * w);
      }
    }
    p0 += r0;
    p1 += r1;
    p2 += r2;
  }
  const double pair_value = (2.0 * nu * 2.0 * p0.value() + dn * 2.0 / nu) / (dn * dn);

  const double cc = nu + 1.0;
  const double c2 = cc * cc;
  detail::CompensatedSum q0, q1, q2, q3, q4, q5;
  for (double zj : z) {
    const double den = c2 + zj * zj;
    q0 += 2.0 * cc / den;
    if (with_derivatives) {
      const double qp = -4.0 * cc * zj / (den * den);
      const double qpp = -4.0 * cc * (c2 - 3.0 * zj * zj) / (den * den * den);
      q1 += qp;
      q2 += qpp;
      q3 += qp + zj * qpp;
      q4 += zj * qp + zj * zj * qpp;
      q5 += zj * qp;
    }
  }

  EiseSums out;
  out.value = pair_value - 2.0 / dn * q0.value() + 2.0 / (nu + 2.0);
  if (with_derivatives) {
    LocalModel& m = out.model;
    m.value = out.value;
    // Pair term L(w) = 2 nu / (nu^2 + w^2) only depends on the scale:
    // d/dv L = -w L', d2/dv2 L = w L' + w^2 L''.
    const double pair_v = 2.0 * (4.0 * nu * p1.value()) / (dn * dn);
    const double pair_vv =
        2.0 * (-4.0 * nu * p1.value() - 4.0 * nu * p2.value()) / (dn * dn);
    // Single term -(2/n) sum Q(z) with z = (z0 - u) e^{-v}.
    m.grad = {2.0 / dn * q1.value(), pair_v + 2.0 / dn * q5.value()};
    m.hess[0] = -2.0 / dn * q2.value();
    m.hess[1] = -2.0 / dn * q3.value();
    m.hess[2] = pair_vv - 2.0 / dn * q4.value();
  }
  return out;
}

}  // namespace

std::string to_string(const EstimatorKind& kind) {
  return std::visit(Overloaded{[](const Miq&) { return std::string("miq"); },
                               [](const Ml&) { return std::string("ml"); },
                               [](const Eise& e) {
                                 std::string s = std::to_string(e.nu);
                                 s.erase(s.find_last_not_of('0') + 1);
                                 if (s.back() == '.') s.pop_back();
                                 return "eise:" + s;
                               }},
                    kind);
}

EstimatorKind parse_estimator(std::string_view text) {
  if (text == "miq") return Miq{};
  if (text == "ml") return Ml{};
  if (text == "eise") return Eise{1.0};
  if (text.starts_with("eise:")) {
    const std::string rest(text.substr(5));
    std::size_t used = 0;
    double nu = 0.0;
    try {
      nu = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || !(nu > 0.0) || !std::isfinite(nu)) {
      throw ParameterError("eise needs a positive nu, got '" + rest + "'");
    }
    return Eise{nu};
  }
  throw ParameterError("unknown estimator '" + std::string(text) + "'");
}

double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("empty sample");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("quantile level in (0,1]");
  const double np = static_cast<double>(sorted.size()) * p;
  // Guard against n*p landing a rounding error above an integer.
  auto k = static_cast<std::size_t>(std::ceil(np - 1e-9 * np));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

LocationScale fit_miq(std::span<const double> sample) {
  check_sample(sample, 3);
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const std::size_t n = s.size();
  const double median =
      n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
  // X_(ceil(3n/4)) and X_(ceil(n/4)) in exact integer arithmetic.
  const double upper = s[(3 * n + 3) / 4 - 1];
  const double lower = s[(n + 3) / 4 - 1];
  const double beta = 0.5 * (upper - lower);
  if (!(beta > 0.0)) {
    throw DegenerateSampleError("half-interquartile range is zero");
  }
  return {median, beta};
}

std::array<double, 2> ml_score(std::span<const double> sample,
                               const LocationScale& at) {
  if (!(at.beta > 0.0)) throw ParameterError("beta must be positive");
  detail::CompensatedSum s1, s2;
  for (double x : sample) {
    const double z = (x - at.alpha) / at.beta;
    const double q = 1.0 + z * z;
    s1 += 2.0 * z / q;
    s2 += (z * z - 1.0) / q;
  }
  const double n = static_cast<double>(sample.size());
  return {s1.value() / n, s2.value() / n};
}

double cauchy_log_likelihood(std::span<const double> sample,
                             const LocationScale& at) {
  if (!(at.beta > 0.0)) throw ParameterError("beta must be positive");
  detail::CompensatedSum s;
  for (double x : sample) {
    const double z = (x - at.alpha) / at.beta;
    s += std::log1p(z * z);
  }
  const double n = static_cast<double>(sample.size());
  return -s.value() - n * std::log(std::numbers::pi * at.beta);
}

LocationScale fit_ml(std::span<const double> sample) {
  const LocationScale start = fit_miq(sample);
  const auto value = [&](const LocationScale& p) {
    return negative_mean_log_likelihood(sample, p);
  };
  const auto model = [&](const LocationScale& p) { return ml_model(sample, p); };

  LocationScale at = start;
  double gnorm = 0.0;
  if (damped_newton(at, model, value, kScoreTol, kMaxNewton, &gnorm)) {
    return at;
  }

  // Fallback: simplex on the negative log-likelihood, then polish.
  const auto nm = nelder_mead(
      [&](const std::array<double, 2>& p) {
        return value(shift(start, p[0], p[1]));
      },
      {0.0, 0.0}, 0.1, 1e-12, 5000);
  at = shift(start, nm.x[0], nm.x[1]);
  if (damped_newton(at, model, value, kScoreTol, kMaxNewton, &gnorm)) {
    return at;
  }
  throw OptimizationError("maximum likelihood iteration did not converge",
                          at.alpha, at.beta);
}

double eise_objective(std::span<const double> sample, const LocationScale& at,
                      double nu) {
  if (!(at.beta > 0.0)) throw ParameterError("beta must be positive");
  if (!(nu > 0.0)) throw ParameterError("nu must be positive");
  return eise_sums(sample, at, nu, false).value;
}

LocationScale fit_eise(std::span<const double> sample, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ParameterError("nu must be positive");
  }
  const LocationScale start = fit_miq(sample);
  const auto value = [&](const LocationScale& p) {
    return eise_sums(sample, p, nu, false).value;
  };
  const auto model = [&](const LocationScale& p) {
    return eise_sums(sample, p, nu, true).model;
  };
  const double start_value = value(start);
  const double tol = 1e-11;

  LocationScale at = start;
  double gnorm = 0.0;
  if (sample.size() <= kEiseSimplexLimit) {
    const auto nm = nelder_mead(
        [&](const std::array<double, 2>& p) {
          return value(shift(start, p[0], p[1]));
        },
        {0.0, 0.0}, 0.1, 1e-10, 5000);
    at = shift(start, nm.x[0], nm.x[1]);
    const LocalModel m0 = model(at);
    const double g0 = std::max(std::abs(m0.grad[0]), std::abs(m0.grad[1]));
    LocationScale polished = at;
    const bool ok = damped_newton(polished, model, value, tol, 50, &gnorm);
    // Keep the polish if it reduced the gradient without raising the value
    // beyond rounding.
    const double slack = 1e-14 * std::max(1.0, std::abs(m0.value));
    if (gnorm <= g0 && value(polished) <= m0.value + slack) at = polished;
    if (!ok && !nm.converged && gnorm > 1e-6) {
      throw OptimizationError("EISE minimization did not converge", at.alpha,
                              at.beta);
    }
  } else if (!damped_newton(at, model, value, tol, kMaxNewton, &gnorm) &&
             gnorm > 1e-8) {
    throw OptimizationError("EISE minimization did not converge", at.alpha,
                            at.beta);
  }
  if (value(at) > start_value) at = start;
  return at;
}

LocationScale fit(std::span<const double> sample, const EstimatorKind& kind) {
  return std::visit(
      Overloaded{[&](const Miq&) { return fit_miq(sample); },
                 [&](const Ml&) { return fit_ml(sample); },
                 [&](const Eise& e) { return fit_eise(sample, e.nu); }},
      kind);
}

ScaledResiduals residuals(std::span<const double> sample,
                          const LocationScale& at, const EstimatorKind& kind) {
  if (!(at.beta > 0.0)) throw ParameterError("beta must be positive");
  ScaledResiduals r;
  r.fit = at;
  r.estimator = kind;
  r.values.resize(sample.size());
  for (std::size_t j = 0; j < sample.size(); ++j) {
    r.values[j] = (sample[j] - at.alpha) / at.beta;
  }
  return r;
}

ScaledResiduals residuals(std::span<const double> sample,
                          const EstimatorKind& kind) {
  return residuals(sample, fit(sample, kind), kind);
}

}  // namespace cauchygof
