#include "cauchygof/asymptotic.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "numeric.hpp"

namespace cauchygof {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double checked(const detail::QuadResult& r, double tol, const char* what) {
  detail::require_accuracy(r, tol, what);
  return r.value;
}

double base_kernel(double s, double t) {
  const double d = std::abs(s - t);
  return 0.5 * (s * s + t * t + d + 1.0) * std::exp(-d);
}

double polyval(const double* c, std::size_t count, double x) {
  double r = 0.0;
  for (std::size_t i = 0; i < count; ++i) r = r * x + c[i];
  return r;
}

// E[F(X) cos(wX)] or E[F(X) sin(wX)] for X ~ C(0,1) and F piecewise smooth
// with possible jumps at -1, 0, 1 only.
double cauchy_trig_expectation(const std::function<double(double)>& F,
                               double w, bool sine) {
  if (sine && w == 0.0) return 0.0;
  const double sign = (sine && w < 0.0) ? -1.0 : 1.0;
  w = std::abs(w);
  const auto trig = [sine, w](double x) {
    return sine ? std::sin(w * x) : std::cos(w * x);
  };
  detail::CompensatedSum total;
  for (auto [lo, hi] : {std::pair{-1.0, 0.0}, std::pair{0.0, 1.0}}) {
    total += checked(detail::integrate_gk(
                         [&](double x) { return F(x) * trig(x) / (1.0 + x * x); },
                         lo, hi, 1e-13, 20),
                     1e-9, "kernel expectation");
  }
  // Tails folded onto [1, inf): cos is even, sin is odd in x.
  const auto G = [&](double y) {
    const double fy = F(y), fm = F(-y);
    return (sine ? fy - fm : fy + fm) / (1.0 + y * y);
  };
  if (w == 0.0) {
    total += checked(detail::integrate_gk(G, 1.0, kInf, 1e-13, 20), 1e-9,
                     "kernel expectation");
  } else {
    const auto shifted = [&](double r) { return G(1.0 + r); };
    const double ic = detail::fourier_cos(shifted, w).value;
    const double is = detail::fourier_sin(shifted, w).value;
    total += sine ? std::sin(w) * ic + std::cos(w) * is
                  : std::cos(w) * ic - std::sin(w) * is;
  }
  return sign * total.value() / kPi;
}

// Cross-moments E[psi_1(X)(u cos sX + s sin sX)] and
// E[psi_2(X)(s cos sX - u sin sX)] for smooth psi.
std::array<double, 2> cross_moments(const EstimatorKind& kind, double s) {
  const auto p1 = [&](double x) { return psi(kind, x)[0] / (1.0 + x * x); };
  const auto p2 = [&](double x) { return psi(kind, x)[1] / (1.0 + x * x); };
  const auto u = [](double x) { return 2.0 * x / (1.0 + x * x); };
  const double as = std::abs(s);
  double m1, m2;
  if (as == 0.0) {
    m1 = checked(detail::integrate_gk([&](double x) { return p1(x) * u(x); },
                                      0.0, kInf, 1e-13, 20),
                 1e-9, "kernel cross-moment");
    m2 = 0.0;
  } else {
    m1 = detail::fourier_cos([&](double x) { return p1(x) * u(x); }, as).value +
         as * detail::fourier_sin(p1, as).value;
    m2 = as * detail::fourier_cos(p2, as).value -
         detail::fourier_sin([&](double x) { return p2(x) * u(x); }, as).value;
  }
  // Integrands are even in x; M1 is even and M2 odd in s.
  return {2.0 / kPi * m1, sgn(s) * 2.0 / kPi * m2};
}

}  // namespace

std::array<double, 2> psi(const EstimatorKind& kind, double x) {
  return std::visit(
      Overloaded{
          [x](const Miq&) -> std::array<double, 2> {
            return {kPi * (0.5 - (x <= 0.0 ? 1.0 : 0.0)),
                    kPi * (0.5 - (std::abs(x) <= 1.0 ? 1.0 : 0.0))};
          },
          [x](const Ml&) -> std::array<double, 2> {
            const double q = 1.0 + x * x;
            return {4.0 * x / q, 2.0 * (x * x - 1.0) / q};
          },
          [x](const Eise& e) -> std::array<double, 2> {
            const double n1 = e.nu + 1.0, n2 = e.nu + 2.0;
            const double den = (n1 * n1 + x * x) * (n1 * n1 + x * x);
            const double n23 = n2 * n2 * n2;
            return {n1 * n23 * x / den,
                    0.5 * n2 - 0.5 * n23 * (n1 * n1 - x * x) / den};
          }},
      kind);
}

double psi_second_moment(const EstimatorKind& kind) {
  return std::visit(
      Overloaded{[](const Miq&) { return kPi * kPi / 4.0; },
                 [](const Ml&) { return 2.0; },
                 [](const Eise& e) {
                   const double nu = e.nu;
                   return (nu + 2.0) * (nu + 2.0) *
                          (5.0 * nu * nu + 14.0 * nu + 10.0) /
                          (16.0 * std::pow(nu + 1.0, 3));
                 }},
      kind);
}

double kernel_c1(double t) {
  const double at = std::abs(t);
  return (t * t + at + 1.0) * std::exp(-at);
}

double kernel_c2(double t) {
  const double at = std::abs(t);
  return t * (at + 1.0) * std::exp(-at);
}

double linearization_g(double t, double x) {
  const double q = 1.0 + x * x;
  const double u = 2.0 * x / q;
  const double du = 2.0 * (1.0 - x * x) / (q * q);
  return (u * t - (t * t + du)) * std::cos(t * x) +
         (u * t + (t * t + du)) * std::sin(t * x);
}

double linearized_summand(const EstimatorKind& kind, double t, double x) {
  const double u = 2.0 * x / (1.0 + x * x);
  const auto p = psi(kind, x);
  return (u + t) * std::cos(t * x) + (t - u) * std::sin(t * x) -
         0.5 * kernel_c1(t) * p[0] + 0.5 * kernel_c2(t) * p[1];
}

double miq_j1(double t) {
  return checked(detail::integrate_gk(
                     [t](double x) {
                       const double q = 1.0 + x * x;
                       return x * std::sin(t * x) / (q * q);
                     },
                     0.0, 1.0, 1e-14, 15),
                 1e-10, "J1");
}

double miq_j2(double t) {
  return checked(detail::integrate_gk(
                     [t](double x) { return std::cos(t * x) / (1.0 + x * x); },
                     0.0, 1.0, 1e-14, 15),
                 1e-10, "J2");
}

double miq_j3(double t) {
  return detail::fourier_sin([](double x) { return 1.0 / (1.0 + x * x); }, t)
      .value;
}

double miq_j4(double t) {
  if (t == 0.0) return 0.5;
  return detail::fourier_cos(
             [](double x) {
               const double q = 1.0 + x * x;
               return x / (q * q);
             },
             t)
      .value;
}

double eise_j1(double t, double nu) {
  const double c2 = (nu + 1.0) * (nu + 1.0);
  return detail::fourier_cos(
             [c2](double x) {
               const double r = c2 + x * x;
               return x * x / ((1.0 + x * x) * r * r);
             },
             t)
      .value;
}

double eise_j2(double t, double nu) {
  const double c2 = (nu + 1.0) * (nu + 1.0);
  return detail::fourier_sin(
             [c2](double x) {
               const double q = 1.0 + x * x;
               const double r = c2 + x * x;
               return x * x * x / (q * q * r * r);
             },
             t)
      .value;
}

double kernel_ml(double s, double t) {
  const double e = std::exp(-std::abs(s) - std::abs(t));
  const double as = std::abs(s), at = std::abs(t);
  return base_kernel(s, t) -
         0.5 * (t * t + at + 1.0) * (s * s + as + 1.0) * e -
         0.5 * t * (at + 1.0) * s * (as + 1.0) * e;
}

double kernel_miq(double s, double t) {
  const double as = std::abs(s), at = std::abs(t);
  const auto half = [](double s, double t) {
    const double at = std::abs(t);
    return (t * (at + 1.0) * (2.0 * miq_j1(s) - s * miq_j2(s)) -
            (t * t + at + 1.0) * (0.5 * s * miq_j3(s) + miq_j4(s))) *
           std::exp(-at);
  };
  return base_kernel(s, t) + half(s, t) + half(t, s) +
         kPi * kPi / 16.0 *
             ((s * s + as + 1.0) * (t * t + at + 1.0) +
              s * t * (as + 1.0) * (at + 1.0)) *
             std::exp(-as - at);
}

double kernel_eise(double s, double t, double nu) {
  const EstimatorKind kind = Eise{nu};
  const auto ms = cross_moments(kind, s);
  const auto mt = cross_moments(kind, t);
  const double c1s = kernel_c1(s), c1t = kernel_c1(t);
  const double c2s = kernel_c2(s), c2t = kernel_c2(t);
  const double m2 = psi_second_moment(kind);
  return base_kernel(s, t) - 0.5 * c1t * ms[0] + 0.5 * c2t * ms[1] -
         0.5 * c1s * mt[0] + 0.5 * c2s * mt[1] +
         0.25 * m2 * (c1s * c1t + c2s * c2t);
}

double kernel_eise_display(double s, double t, double nu) {
  const double n1 = nu + 1.0, n2 = nu + 2.0;
  const double nu2 = nu * nu, nu3 = nu2 * nu;
  const double n23 = n2 * n2 * n2;
  const auto half = [&](double s, double t) {
    const double as = std::abs(s), at = std::abs(t);
    const double e = std::exp(-as - at);
    const double q1 = t * t + at + 1.0;
    const double q2 = t * (at + 1.0);
    double r = -0.5 * q1 * n1 *
               ((2.0 * as * n2 * nu3 + n1 * (1.0 - as) + as + 3.0) / nu3) * e;
    r += 0.5 * q1 *
         ((n1 * (as * n1 * n1 + 3.0 * n1 - as) - 1.0) / nu3 +
          n1 * (s * s * n2 * n1 + 2.0 * as * n2 + s * s)) *
         std::exp(-n1 * as - at);
    r += -0.5 * q2 * n1 *
         (s * n23 * n1 / (2.0 * nu2) + s * n1 * n1 + s - 4.0 * sgn(s)) * e;
    r += 0.5 * q2 *
         (s * n23 * (as * n1 * n1 * n1 - 3.0 * n1 * n1 + as * n1 + 1.0) /
              (4.0 * n1 * nu2) -
          s * n1 * n1 + s - 4.0 * sgn(s) * n1) *
         e;
    r += 1.0 / (2.0 * kPi) * q2 * n23 *
         (s * eise_j1(s, nu) - 2.0 * eise_j2(s, nu)) * std::exp(-at);
    return r;
  };
  const double as = std::abs(s), at = std::abs(t);
  return base_kernel(s, t) + half(s, t) + half(t, s) +
         ((s * s + as + 1.0) * (t * t + at + 1.0) +
          s * (as + 1.0) * t * (at + 1.0)) *
             n2 * n2 * (5.0 * nu2 + 14.0 * nu + 10.0) / (64.0 * n1 * n1 * n1) *
             std::exp(-as - at);
}

double kernel_eval(const EstimatorKind& kind, double s, double t) {
  if (!std::isfinite(s) || !std::isfinite(t)) {
    throw ParameterError("kernel arguments must be finite");
  }
  return std::visit(
      Overloaded{[&](const Miq&) { return kernel_miq(s, t); },
                 [&](const Ml&) { return kernel_ml(s, t); },
                 [&](const Eise& e) { return kernel_eise(s, t, e.nu); }},
      kind);
}

double kernel_by_expectation(const EstimatorKind& kind, double s, double t) {
  const auto u = [](double x) { return 2.0 * x / (1.0 + x * x); };
  const auto A = [&](double r) {
    return [&, r](double x) { return u(x) + r; };
  };
  const auto B = [&](double r) {
    return [&, r](double x) { return r - u(x); };
  };
  const auto R = [&](double r) {
    return [&kind, r](double x) {
      const auto p = psi(kind, x);
      return -0.5 * kernel_c1(r) * p[0] + 0.5 * kernel_c2(r) * p[1];
    };
  };
  const auto As = A(s), At = A(t);
  const auto Bs = B(s), Bt = B(t);
  const auto Rs = R(s), Rt = R(t);
  const auto E = [](const std::function<double(double)>& F, double w,
                    bool sine) { return cauchy_trig_expectation(F, w, sine); };

  detail::CompensatedSum k;
  k += E([&](double x) { return 0.5 * (As(x) * At(x) + Bs(x) * Bt(x)); },
         s - t, false);
  k += E([&](double x) { return 0.5 * (As(x) * At(x) - Bs(x) * Bt(x)); },
         s + t, false);
  k += E([&](double x) { return 0.5 * (As(x) * Bt(x) + Bs(x) * At(x)); },
         s + t, true);
  k += E([&](double x) { return 0.5 * (Bs(x) * At(x) - As(x) * Bt(x)); },
         s - t, true);
  k += E([&](double x) { return Rt(x) * As(x); }, s, false);
  k += E([&](double x) { return Rt(x) * Bs(x); }, s, true);
  k += E([&](double x) { return Rs(x) * At(x); }, t, false);
  k += E([&](double x) { return Rs(x) * Bt(x); }, t, true);
  k += E([&](double x) { return Rs(x) * Rt(x); }, 0.0, false);
  return k.value();
}

double expected_norm_sq(const EstimatorKind& kind, double a) {
  if (!(a > 0.0)) throw ParameterError("weight parameter a must be positive");
  const auto f = [&](double t) {
    return kernel_eval(kind, t, t) * std::exp(-a * t);
  };
  detail::CompensatedSum total;
  const double cuts[] = {0.0, 1.0, 3.0, 8.0, 20.0, 45.0 / a + 20.0};
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) {
    total += checked(detail::integrate_gk(f, cuts[i], cuts[i + 1], 1e-13, 15),
                     1e-9, "expected_norm_sq");
  }
  return 2.0 * total.value();
}

double expected_norm_sq_ml_closed(double a) {
  if (!(a > 0.0)) throw ParameterError("weight parameter a must be positive");
  const double num = (((8.0 * a + 80.0) * a + 352.0) * a + 320.0) * a + 128.0;
  return num / (a * a * a * std::pow(a + 2.0, 5));
}

double expected_norm_sq_miq_closed(double a) {
  if (!(a > 0.0)) throw ParameterError("weight parameter a must be positive");
  const double p2 = kPi * kPi;
  // Coefficients of a^16 down to a^0.
  const double c[] = {p2 - 8.0,
                      19.0 * p2 - 152.0,
                      173.0 * p2 - 1368.0,
                      1003.0 * p2 - 7720.0,
                      4126.0 * p2 - 30192.0,
                      12594.0 * p2 - 84304.0,
                      29128.0 * p2 - 163520.0,
                      51460.0 * p2 - 188832.0,
                      69320.0 * p2 - 8256.0,
                      70296.0 * p2 + 457664.0,
                      52176.0 * p2 + 1025920.0,
                      26848.0 * p2 + 1323264.0,
                      8576.0 * p2 + 1151488.0,
                      1280.0 * p2 + 693248.0,
                      280576.0,
                      69632.0,
                      8192.0};
  const double den = 8.0 * std::pow(a + 2.0, 5) * std::pow(1.0 + a, 3) *
                     a * a * a * std::pow(a * a + 2.0 * a + 2.0, 3);
  return polyval(c, std::size(c), a) / den;
}

double variance_norm_sq_ml(double a) {
  if (!(a > 0.0)) throw ParameterError("weight parameter a must be positive");
  const double top = 45.0 / a + 20.0;
  // K(-s,-t) = K(s,t): the plane is twice the quadrants s,t > 0 and s > 0 > t.
  const auto inner = [&](double s) {
    const auto same = [&](double t) {
      const double k = kernel_ml(s, t);
      return k * k * std::exp(-a * t);
    };
    const auto opposite = [&](double t) {
      const double k = kernel_ml(s, -t);
      return k * k * std::exp(-a * t);
    };
    detail::CompensatedSum v;
    // Split where |s - t| has its kink.
    v += detail::integrate_gk(same, 0.0, s, 1e-13, 12).value;
    v += detail::integrate_gk(same, s, s + 10.0, 1e-13, 12).value;
    v += detail::integrate_gk(same, s + 10.0, top + s, 1e-13, 12).value;
    v += detail::integrate_gk(opposite, 0.0, 10.0, 1e-13, 12).value;
    v += detail::integrate_gk(opposite, 10.0, top, 1e-13, 12).value;
    return v.value() * std::exp(-a * s);
  };
  detail::CompensatedSum total;
  const double cuts[] = {0.0, 1.0, 3.0, 8.0, 20.0, top};
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) {
    total += checked(detail::integrate_gk(inner, cuts[i], cuts[i + 1], 1e-12, 12),
                     1e-8, "variance_norm_sq_ml");
  }
  return 2.0 * 2.0 * total.value();
}

double variance_norm_sq_ml_closed(double a) {
  if (!(a > 0.0)) throw ParameterError("weight parameter a must be positive");
  // Coefficients of a^14 down to a^0.
  const double c[] = {10,      270,     3521,    27987,   146819,
                      510582,  1194078, 1914216, 2134432, 1671456,
                      928192,  369792,  104192,  18432,   1536};
  const double den = 0.5 * std::pow(a, 5) * std::pow(a + 1.0, 7) *
                     std::pow(a + 2.0, 10);
  return polyval(c, std::size(c), a) / den;
}

KernelConsistency mc_kernel_consistency(const EstimatorKind& kind,
                                        std::size_t draws,
                                        const std::vector<double>& grid,
                                        std::uint64_t seed) {
  if (draws < 2) throw ParameterError("need at least two draws");
  if (grid.empty()) throw ParameterError("empty grid");
  const std::size_t m = grid.size();
  std::vector<double> mean(m, 0.0), cross(m * m, 0.0), z(m);
  RngStream rng(seed, 0);
  const Cauchy standard;
  for (std::size_t r = 0; r < draws; ++r) {
    const double x = draw(standard, rng);
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = linearized_summand(kind, grid[i], x);
      mean[i] += z[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) cross[i * m + j] += z[i] * z[j];
    }
  }
  const double n = static_cast<double>(draws);
  KernelConsistency out;
  out.grid = grid;
  out.empirical.resize(m * m);
  out.theoretical.resize(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double cov =
          (cross[i * m + j] - mean[i] * mean[j] / n) / (n - 1.0);
      const double k = kernel_eval(kind, grid[i], grid[j]);
      out.empirical[i * m + j] = cov;
      out.theoretical[i * m + j] = k;
      out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(cov - k));
    }
  }
  return out;
}

}  // namespace cauchygof
