#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "cauchygof/errors.hpp"
#include "numeric.hpp"

namespace cauchygof::detail {

namespace {

// Construction precomputes node tables, so share one instance per kind.
// Boost guards the lazily extended tables with a mutex.
boost::math::quadrature::ooura_fourier_sin<double>& sin_rule() {
  static boost::math::quadrature::ooura_fourier_sin<double> rule(1e-11, 8);
  return rule;
}

boost::math::quadrature::ooura_fourier_cos<double>& cos_rule() {
  static boost::math::quadrature::ooura_fourier_cos<double> rule(1e-11, 8);
  return rule;
}

}  // namespace

QuadResult integrate_gk(const std::function<double(double)>& f, double a,
                        double b, double tol, unsigned max_depth) {
  QuadResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, tol, &r.error);
  // Boost sums |K - G| over leaves mapped to [-1, 1]; each leaf has half
  // width at most (b - a)/2, which bounds the absolute error. Infinite
  // ranges are mapped onto [-1, 1] or [0, 1] first.
  r.error *= std::isfinite(b - a) ? 0.5 * (b - a) : 2.0;
  return r;
}

QuadResult integrate_gk_abs(const std::function<double(double)>& f, double a,
                            double b, double abs_tol, unsigned max_depth) {
  QuadResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, a, b, 0, 0.0, &r.error);
  r.error *= 0.5 * (b - a);
  if (r.error <= abs_tol || max_depth == 0) return r;
  const double mid = 0.5 * (a + b);
  const QuadResult lo = integrate_gk_abs(f, a, mid, 0.5 * abs_tol, max_depth - 1);
  const QuadResult hi = integrate_gk_abs(f, mid, b, 0.5 * abs_tol, max_depth - 1);
  return {lo.value + hi.value, lo.error + hi.error};
}

QuadResult fourier_sin(const std::function<double(double)>& f, double omega) {
  if (omega == 0.0) return {};
  const auto [value, rel] = sin_rule().integrate(f, std::abs(omega));
  const double sign = omega < 0.0 ? -1.0 : 1.0;
  return {sign * value, std::abs(rel * value)};
}

QuadResult fourier_cos(const std::function<double(double)>& f, double omega) {
  if (omega == 0.0) {
    return integrate_gk(f, 0.0, std::numeric_limits<double>::infinity());
  }
  const auto [value, rel] = cos_rule().integrate(f, std::abs(omega));
  return {value, std::abs(rel * value)};
}

void require_accuracy(const QuadResult& r, double tol,
                      const std::string& what) {
  if (!std::isfinite(r.value) || !(r.error <= tol * std::max(1.0, std::abs(r.value)))) {
    throw AccuracyError(what + ": quadrature did not reach tolerance", r.value,
                        r.error);
  }
}

}  // namespace cauchygof::detail
