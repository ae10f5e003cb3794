#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/estimate.hpp"
#include "cauchygof/optimize.hpp"

using namespace cauchygof;

namespace {

std::vector<double> cauchy_sample(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample(Cauchy{}, n, rng);
}

const std::vector<EstimatorKind> kAll = {Miq{}, Ml{}, Eise{1.0}, Eise{5.0}};

}  // namespace

TEST(Miq, HandComputedSmallSample) {
  // n = 8: median = (x4 + x5)/2; quartiles X_(6) and X_(2).
  const std::vector<double> x = {7.0, -3.0, 1.0, 0.0, 2.0, 10.0, -1.0, 4.0};
  const auto f = fit_miq(x);
  EXPECT_DOUBLE_EQ(f.alpha, 1.5);
  EXPECT_DOUBLE_EQ(f.beta, (4.0 - -1.0) / 2.0);
}

TEST(Miq, QuartileIndicesUseCeiling) {
  // n = 9: ceil(27/4) = 7, ceil(9/4) = 3.
  const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto f = fit_miq(x);
  EXPECT_DOUBLE_EQ(f.alpha, 5.0);
  EXPECT_DOUBLE_EQ(f.beta, (7.0 - 3.0) / 2.0);
}

TEST(Miq, DegenerateAndShortSamples) {
  EXPECT_THROW(fit_miq(std::vector<double>{2.0, 2.0, 2.0, 2.0, 5.0}),
               DegenerateSampleError);
  EXPECT_THROW(fit_miq(std::vector<double>{1.0, 2.0}), DataError);
  EXPECT_THROW(fit_ml(std::vector<double>{1.0, NAN, 3.0, 4.0}), DataError);
}

TEST(Estimators, AffineEquivariance) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = cauchy_sample(40, seed);
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v + 7.0);
    for (const auto& kind : kAll) {
      const auto fx = fit(x, kind);
      const auto fy = fit(y, kind);
      EXPECT_NEAR(fy.alpha, 3.0 * fx.alpha + 7.0, 1e-7 * (1.0 + std::abs(fy.alpha)))
          << to_string(kind);
      EXPECT_NEAR(fy.beta, 3.0 * fx.beta, 1e-7 * fy.beta) << to_string(kind);
    }
  }
}

TEST(Estimators, ConsistentForLargeSamples) {
  RngStream rng(5, 0);
  const auto x = sample(Cauchy{2.0, 3.0}, 20'000, rng);
  for (const auto& kind : {EstimatorKind{Miq{}}, EstimatorKind{Ml{}}}) {
    const auto f = fit(x, kind);
    EXPECT_NEAR(f.alpha, 2.0, 0.1) << to_string(kind);
    EXPECT_NEAR(f.beta, 3.0, 0.1) << to_string(kind);
  }
}

TEST(Ml, ScoreVanishesAtTheEstimate) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = cauchy_sample(25, seed);
    const auto f = fit_ml(x);
    const auto s = ml_score(x, f);
    EXPECT_LT(std::abs(s[0]), 1e-9);
    EXPECT_LT(std::abs(s[1]), 1e-9);
  }
}

TEST(Ml, IsALocalMaximum) {
  const auto x = cauchy_sample(30, 77);
  const auto f = fit_ml(x);
  const double best = cauchy_log_likelihood(x, f);
  for (double da : {-1e-3, 1e-3}) {
    for (double db : {-1e-3, 1e-3}) {
      EXPECT_LT(cauchy_log_likelihood(x, {f.alpha + da, f.beta * (1.0 + db)}), best);
    }
  }
}

TEST(Eise, IsAStationaryPointOfTheObjective) {
  // Central differences of the objective in (alpha, log beta).
  for (double nu : {1.0, 3.0}) {
    const auto x = cauchy_sample(30, 31);
    const auto f = fit_eise(x, nu);
    const double h = 1e-5;
    const auto obj = [&](double da, double dv) {
      return eise_objective(x, {f.alpha + f.beta * da, f.beta * std::exp(dv)}, nu);
    };
    const double gu = (obj(h, 0) - obj(-h, 0)) / (2 * h);
    const double gv = (obj(0, h) - obj(0, -h)) / (2 * h);
    EXPECT_LT(std::abs(gu), 1e-7);
    EXPECT_LT(std::abs(gv), 1e-7);
    EXPECT_LE(f.beta > 0, true);
    // Lower than the MIQ start.
    EXPECT_LE(eise_objective(x, f, nu), eise_objective(x, fit_miq(x), nu) + 1e-15);
  }
}

TEST(Eise, ObjectiveMatchesDirectIntegral) {
  // int |phi_n(t) - e^{-|t|}|^2 e^{-nu|t|} dt by brute-force Riemann sum.
  const std::vector<double> x = {-1.3, 0.2, 0.4, 2.5, -0.7, 5.0};
  const LocationScale at{0.3, 1.7};
  const double nu = 2.0;
  double s = 0.0;
  const double h = 1e-4;
  for (double t = 0.5 * h; t < 40.0; t += h) {
    double re = 0.0, im = 0.0;
    for (double v : x) {
      const double z = (v - at.alpha) / at.beta;
      re += std::cos(t * z);
      im += std::sin(t * z);
    }
    re = re / x.size() - std::exp(-t);
    im /= x.size();
    s += 2.0 * h * (re * re + im * im) * std::exp(-nu * t);
  }
  EXPECT_NEAR(eise_objective(x, at, nu), s, 1e-7);
}

TEST(Estimators, ResidualsAreStandardized) {
  const auto x = cauchy_sample(50, 3);
  for (const auto& kind : kAll) {
    const auto res = residuals(x, kind);
    ASSERT_EQ(res.values.size(), x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      EXPECT_NEAR(res.values[j], (x[j] - res.fit.alpha) / res.fit.beta, 1e-12);
    }
  }
}

TEST(Estimators, TextForms) {
  EXPECT_EQ(to_string(parse_estimator("miq")), "miq");
  EXPECT_EQ(to_string(parse_estimator("ml")), "ml");
  EXPECT_EQ(to_string(parse_estimator("eise:2.5")), "eise:2.5");
  EXPECT_EQ(to_string(parse_estimator("eise")), "eise:1");
  EXPECT_THROW(parse_estimator("eise:0"), ParameterError);
  EXPECT_THROW(parse_estimator("mle"), ParameterError);
}

TEST(SampleQuantile, CeilingConvention) {
  const std::vector<double> s = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(sample_quantile(s, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(sample_quantile(s, 0.26), 2.0);
  EXPECT_DOUBLE_EQ(sample_quantile(s, 1.0), 4.0);
  EXPECT_THROW(sample_quantile(s, 0.0), ParameterError);
}

TEST(NelderMead, MinimizesRosenbrock) {
  const auto r = nelder_mead(
      [](const std::array<double, 2>& p) {
        return 100.0 * std::pow(p[1] - p[0] * p[0], 2) + std::pow(1.0 - p[0], 2);
      },
      {-1.2, 1.0}, 0.1, 1e-12, 5000);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}
