#pragma once

// Internal numerical helpers shared by the library sources.

#include <cmath>
#include <functional>
#include <string>

namespace cauchygof::detail {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (61 points) on [a, b]; b may be +infinity.
QuadResult integrate_gk(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12, unsigned max_depth = 18);

// Adaptive bisection with Gauss-Kronrod (21 points) on finite [a, b] until the
// absolute error estimate is below abs_tol. For integrals that may vanish.
QuadResult integrate_gk_abs(const std::function<double(double)>& f, double a,
                            double b, double abs_tol, unsigned max_depth = 30);

// int_0^inf f(x) sin(omega x) dx and int_0^inf f(x) cos(omega x) dx for a
// non-oscillatory f decaying at infinity. omega may be any sign; omega == 0
// falls back to Gauss-Kronrod (cosine) or returns 0 (sine).
QuadResult fourier_sin(const std::function<double(double)>& f, double omega);
QuadResult fourier_cos(const std::function<double(double)>& f, double omega);

// Throws AccuracyError when error > tol * max(1, |value|).
void require_accuracy(const QuadResult& r, double tol, const std::string& what);

}  // namespace cauchygof::detail
