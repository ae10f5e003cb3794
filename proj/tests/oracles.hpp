#pragma once

// Test-side quadrature of the defining integrals, independent of the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

// int_0^end f(t) dt on panels of `width`, each by adaptive Gauss-Kronrod.
template <class F>
double integrate_panels(F f, double end, double width) {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0.0;
  for (double lo = 0.0; lo < end; lo += width) {
    s += gauss_kronrod<double, 61>::integrate(f, lo, std::min(lo + width, end), 12, 1e-13);
  }
  return s;
}

// n int |n^{-1} sum (it - u_j) e^{itY_j}|^2 e^{-a|t|} dt, complex arithmetic.
inline double tna(const std::vector<double>& y, double a) {
  const double n = static_cast<double>(y.size());
  const auto f = [&](double t) {
    std::complex<double> s = 0.0;
    for (double v : y) {
      const double u = 2.0 * v / (1.0 + v * v);
      s += std::complex<double>(-u, t) * std::exp(std::complex<double>(0.0, t * v));
    }
    return std::norm(s / n) * std::exp(-a * t);
  };
  return 2.0 * n * integrate_panels(f, 60.0 / a, 0.5);
}

// n int |phi_n(t) - e^{-|t|}|^2 e^{-lambda|t|} dt.
inline double dnl(const std::vector<double>& y, double lambda) {
  const double n = static_cast<double>(y.size());
  const auto f = [&](double t) {
    std::complex<double> s = 0.0;
    for (double v : y) s += std::exp(std::complex<double>(0.0, t * v));
    return std::norm(s / n - std::exp(-t)) * std::exp(-lambda * t);
  };
  return 2.0 * n * integrate_panels(f, 60.0 / lambda, 0.5);
}

}  // namespace oracle
