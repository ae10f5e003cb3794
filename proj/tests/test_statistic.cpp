#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cauchygof/competitors.hpp"
#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/estimate.hpp"
#include "cauchygof/statistic.hpp"
#include "oracles.hpp"

using namespace cauchygof;

namespace {

using oracle::integrate_panels;

std::vector<double> random_residuals(std::mt19937_64& g, std::size_t n) {
  std::cauchy_distribution<double> c(0.0, 1.0);
  std::vector<double> y(n);
  for (auto& v : y) v = std::clamp(c(g), -30.0, 30.0);
  return y;
}

}  // namespace

TEST(Tna, ClosedFormMatchesQuadratureOfDefiningIntegral) {
  std::mt19937_64 g(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rep % 9;
    const auto y = random_residuals(g, n);
    const double a = std::array<double, 4>{0.5, 1.0, 2.5, 5.0}[rep % 4];
    const double closed = tna(y, a).value;
    const double quad = oracle::tna(y, a);
    EXPECT_NEAR(closed, quad, 1e-6 * std::abs(quad)) << "rep " << rep;
  }
}

TEST(Tna, RealEmpiricalProcessSquaredIntegratesToStatistic) {
  const std::vector<double> y = {-2.1, -0.4, 0.05, 0.7, 1.9, 6.0};
  const double a = 1.5;
  const auto f = [&](double t) {
    const double zp = empirical_process(y, t), zm = empirical_process(y, -t);
    return (zp * zp + zm * zm) * std::exp(-a * t);
  };
  EXPECT_NEAR(integrate_panels(f, 60.0 / a, 0.5), tna(y, a).value, 1e-9);
}

TEST(Tna, SingleResidualAtZeroLeavesDiagonalConstant) {
  const std::vector<double> y = {0.0};
  for (double a : {0.5, 1.0, 3.0}) EXPECT_NEAR(tna(y, a).value, 4.0 / (a * a * a), 1e-14);
}

TEST(Tna, NonNegativeAndPermutationInvariant) {
  std::mt19937_64 g(9);
  for (int rep = 0; rep < 200; ++rep) {
    auto y = random_residuals(g, 3 + rep % 30);
    const double a = 0.2 + 0.05 * (rep % 40);
    const double t = tna(y, a).value;
    EXPECT_GE(t, 0.0);
    std::shuffle(y.begin(), y.end(), g);
    EXPECT_NEAR(tna(y, a).value, t, 1e-12 * std::max(1.0, t));
  }
}

TEST(Tna, RejectsBadInput) {
  EXPECT_THROW(tna(std::vector<double>{}, 1.0), DataError);
  EXPECT_THROW(tna(std::vector<double>{0.1, INFINITY}, 1.0), DataError);
  EXPECT_THROW(tna(std::vector<double>{0.1, 0.2}, 0.0), ParameterError);
  EXPECT_THROW(tna(std::vector<double>{0.1, 0.2}, -1.0), ParameterError);
}

TEST(Tna, SmallWeightLimitConvergesQuadratically) {
  // Off-diagonal pairs leave a remainder of about 24 a^2 / (n d^4) for a pair
  // at distance d, so the gap falls 100-fold per decade of a.
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RngStream rng(seed, 0);
    const auto y = residuals(sample(Cauchy{}, 20, rng), Ml{}).values;
    const auto gap = [&](double a) {
      const auto [l, r] = limit_small_a_check(y, a);
      return std::abs(l - r);
    };
    const double ratio = gap(1e-5) / gap(1e-6);
    EXPECT_GT(ratio, 80.0);
    EXPECT_LT(ratio, 120.0);
  }
}

TEST(Tna, SmallWeightLimitForSpreadResiduals) {
  // Cauchy quantiles at j/(n+1): smallest spacing about 0.16 for n = 20.
  std::vector<double> y;
  for (int j = 1; j <= 20; ++j) y.push_back(std::tan(std::numbers::pi * (j / 21.0 - 0.5)));
  const auto [l, r] = limit_small_a_check(y, 1e-4);
  EXPECT_LT(std::abs(l - r), 1e-3);
  const auto [l3, r3] = limit_small_a_check(y, 1e-3);
  EXPECT_LT(std::abs(l - r), std::abs(l3 - r3));
}

TEST(Tna, SingleResidualSmallWeightLimitIsExact) {
  const std::vector<double> y = {0.0};
  const auto [l, r] = limit_small_a_check(y, 0.3);
  EXPECT_EQ(l, 0.0);
  EXPECT_EQ(r, 0.0);
}

TEST(Tna, LargeWeightLimit) {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto y = random_residuals(g, 10 + rep);
    const auto [l3, r3] = limit_large_a_check(y, 1e3);
    const auto [l4, r4] = limit_large_a_check(y, 1e4);
    EXPECT_LT(std::abs(l4 - r4), std::abs(l3 - r3));
    EXPECT_LT(std::abs(l4 - r4), 1e-2 * std::abs(r4));
  }
  // Symmetric residuals cancel; ML residuals solve the location score equation.
  EXPECT_EQ(limit_large_a_check(std::vector<double>{1.5, -1.5}, 1e3).second, 0.0);
  RngStream rng(3, 0);
  const auto y = residuals(sample(Cauchy{}, 40, rng), Ml{}).values;
  EXPECT_LT(limit_large_a_check(y, 1e4).second, 1e-18);
}

TEST(Tn0, DirectFormula) {
  const std::vector<double> y = {-1.0, 0.0, 1.0, 2.0};
  // sum Y^2/(1+Y^2)^2 = 1/4 + 0 + 1/4 + 4/25.
  const double s = 0.25 + 0.25 + 4.0 / 25.0;
  EXPECT_NEAR(tn0(y), std::sqrt(8.0) * (2.0 * s - 1.0), 1e-14);
}

TEST(Dnl, ClosedFormMatchesQuadrature) {
  std::mt19937_64 g(4);
  for (int rep = 0; rep < 50; ++rep) {
    const auto y = random_residuals(g, 2 + rep % 9);
    const double lambda = 0.5 + 0.5 * (rep % 6);
    const double quad = oracle::dnl(y, lambda);
    EXPECT_NEAR(compute_dnl(y, lambda), quad, 1e-6 * std::abs(quad)) << rep;
  }
}

TEST(Delta, PublishedValues) {
  EXPECT_NEAR(delta_f(Normal{}, 1.0).value, 0.021839, 1e-4);
  EXPECT_NEAR(delta_f(Logistic{}, 1.0).value, 0.041495, 1e-4);
  EXPECT_LT(std::abs(delta_f(Cauchy{}, 1.0).value), 1e-6);
}

TEST(Delta, ZeroForStandardizedCauchyAndScaleInvariant) {
  EXPECT_LT(std::abs(delta_f(Cauchy{3.0, 2.0}, 1.0, {}, LocationScale{3.0, 2.0}).value),
            1e-6);
  const double base = delta_f(Normal{}, 1.0).value;
  EXPECT_NEAR(delta_f(Normal{5.0, 2.0}, 1.0, {}, LocationScale{5.0, 2.0}).value, base,
              1e-9);
  // Stable(1,0) and Stable(2,.) resolve to Cauchy and N(0, sqrt 2).
  EXPECT_LT(std::abs(delta_f(Stable{1.0, 0.0}, 1.0).value), 1e-6);
  EXPECT_NEAR(delta_f(Stable{2.0, 0.0}, 1.0).value,
              delta_f(Normal{0.0, std::numbers::sqrt2}, 1.0).value, 1e-12);
}

TEST(Delta, UniformMatchesIndependentCharacteristicFunctionQuadrature) {
  // Y ~ U(-sqrt3, sqrt3): the four moments by Gauss-Legendre in y, then the
  // t-integral of |E[(it - u) e^{itY}]|^2 e^{-t}.
  const double h = std::sqrt(3.0);
  using GL = boost::math::quadrature::gauss<double, 30>;
  const auto moments = [&](double t) {
    double c0 = 0, s0 = 0, c1 = 0, s1 = 0;
    const int panels = 16;
    for (int p = 0; p < panels; ++p) {
      const double lo = -h + 2.0 * h * p / panels, hi = lo + 2.0 * h / panels;
      const auto g = [&](auto fn) { return GL::integrate(fn, lo, hi) / (2.0 * h); };
      c0 += g([&](double y) { return std::cos(t * y); });
      s0 += g([&](double y) { return std::sin(t * y); });
      c1 += g([&](double y) { return 2.0 * y / (1.0 + y * y) * std::cos(t * y); });
      s1 += g([&](double y) { return 2.0 * y / (1.0 + y * y) * std::sin(t * y); });
    }
    const double re = -t * s0 - c1, im = t * c0 - s1;
    return (re * re + im * im) * std::exp(-t);
  };
  const double oracle = 2.0 * integrate_panels(moments, 60.0, 1.0);
  EXPECT_NEAR(delta_f(Uniform{}, 1.0).value, oracle, 1e-8);
}

TEST(Delta, MonteCarloFallbackAgreesWithQuadrature) {
  DeltaSettings s;
  s.force_monte_carlo = true;
  s.mc_draws = 1'000'000;
  for (const DistributionSpec spec : {DistributionSpec{Normal{}}, DistributionSpec{Laplace{}}}) {
    const auto mc = delta_f(spec, 1.0, s);
    const auto q = delta_f(spec, 1.0);
    EXPECT_TRUE(mc.monte_carlo);
    EXPECT_NEAR(mc.value, q.value, 4.0 * mc.error + 2e-4) << to_string(spec);
  }
}

TEST(Delta, PositiveForAlternatives) {
  for (const char* text : {"t:3", "cn:0.5", "uniform", "gumbel", "exp", "laplace",
                           "arcsine:0:1"}) {
    EXPECT_GT(delta_f(parse_distribution(text), 1.0).value, 1e-4) << text;
  }
  DeltaSettings s;
  s.mc_draws = 200'000;
  EXPECT_GT(delta_f(MittagLeffler{0.5}, 1.0, s).value, 0.1);
}
