#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cauchygof/battery.hpp"
#include "cauchygof/competitors.hpp"
#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"

using namespace cauchygof;

namespace {

double cdf0(double x) { return 0.5 + std::atan(x) / std::numbers::pi; }

struct Naive {
  double ks, cm, ad, w;
};

// Textbook formulas on the sorted probability integral transforms.
Naive naive_edf(std::vector<double> y) {
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(y.size());
  std::vector<double> z;
  for (double v : y) z.push_back(cdf0(v));
  Naive out{0, 1.0 / (12.0 * n), 0, 0};
  double zbar = 0.0, ad = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double i = static_cast<double>(j + 1);
    out.ks = std::max({out.ks, i / n - z[j], z[j] - (i - 1.0) / n});
    out.cm += std::pow(z[j] - (2.0 * i - 1.0) / (2.0 * n), 2);
    ad += (2.0 * i - 1.0) * (std::log(z[j]) + std::log(1.0 - z[z.size() - 1 - j]));
    zbar += z[j];
  }
  zbar /= n;
  out.ad = -n - ad / n;
  out.w = out.cm - n * (zbar - 0.5) * (zbar - 0.5);
  return out;
}

// Vasicek estimator with explicit endpoint replication.
double naive_kl(std::vector<double> y, std::size_t m) {
  std::sort(y.begin(), y.end());
  const long n = static_cast<long>(y.size());
  const auto at = [&](long i) { return y[std::clamp(i, 0L, n - 1)]; };
  double h = 0.0, ll = 0.0;
  for (long i = 0; i < n; ++i) {
    h += std::log(static_cast<double>(n) / (2.0 * m) *
                  (at(i + static_cast<long>(m)) - at(i - static_cast<long>(m))));
    ll += std::log(1.0 / (std::numbers::pi * (1.0 + y[i] * y[i])));
  }
  return -h / n - ll / n;
}

std::vector<double> cauchy(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample(Cauchy{}, n, rng);
}

}  // namespace

TEST(Edf, MatchesTextbookFormulas) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto y = cauchy(5 + seed, seed);
    const auto e = edf_statistics(y);
    const auto o = naive_edf(y);
    EXPECT_NEAR(e.ks, o.ks, 1e-12);
    EXPECT_NEAR(e.cm, o.cm, 1e-12);
    EXPECT_NEAR(e.ad, o.ad, 1e-9);
    EXPECT_NEAR(e.watson, o.w, 1e-12);
  }
}

TEST(Edf, KsIsTheSupremumDistance) {
  const auto y = cauchy(25, 99);
  EXPECT_NEAR(edf_statistics(y).ks, ks_distance(y, cdf0), 1e-14);
}

TEST(Edf, WatsonNeverExceedsCramerVonMises) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto e = edf_statistics(cauchy(20, seed));
    EXPECT_LE(e.watson, e.cm + 1e-15);
    EXPECT_GE(e.cm, 1.0 / 240.0 - 1e-15);
  }
}

TEST(Edf, ExtremeResidualsAreClampedNotInfinite) {
  const std::vector<double> y = {-1e308, -1.0, 0.0, 1.0, 1e308};
  const auto e = edf_statistics(y);
  EXPECT_TRUE(std::isfinite(e.ad));
  EXPECT_EQ(e.clamped, 2u);
  EXPECT_THROW(edf_statistics(std::vector<double>{1.0}), DataError);
}

TEST(Dnl, NonNegativeAndNullSmall) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto y = cauchy(30, seed);
    for (double l : {1.0, 3.0, 5.0}) EXPECT_GE(compute_dnl(y, l), 0.0);
  }
  EXPECT_THROW(compute_dnl(std::vector<double>{0.0, 1.0}, 0.0), ParameterError);
}

TEST(Kl, MatchesNaiveVasicek) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto y = cauchy(30, seed);
    for (std::size_t m : {1u, 4u, 14u}) {
      EXPECT_NEAR(compute_kl(y, m).value, naive_kl(y, m), 1e-12);
    }
  }
}

TEST(Kl, TiesAreCountedAndFinite) {
  const std::vector<double> y = {0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  const auto r = compute_kl(y, 1);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.ties, 0u);
  EXPECT_THROW(compute_kl(y, 4), ParameterError);
  EXPECT_THROW(compute_kl(y, 0), ParameterError);
}

TEST(Kl, WindowDefaults) {
  EXPECT_EQ(default_kl_window(20), 4u);
  EXPECT_EQ(default_kl_window(50), 20u);
  EXPECT_EQ(default_kl_window(161), 50u);
  EXPECT_EQ(default_kl_window(527), 100u);
  EXPECT_EQ(default_kl_window(5), 2u);
  // Data-analysis windows: 100 for the long series, 50 for the short one.
  EXPECT_EQ(battery_kl_window(400), 100u);
  EXPECT_EQ(battery_kl_window(527), 100u);
  EXPECT_EQ(battery_kl_window(399), 50u);
  EXPECT_EQ(battery_kl_window(161), 50u);
  EXPECT_EQ(battery_kl_window(60), 29u);
}

TEST(Competitors, AffineInvariantThroughResiduals) {
  std::mt19937_64 g(5);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(30), y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = nd(g);
      y[i] = 3.0 * x[i] + 7.0;
    }
    const auto rx = residuals(x, Ml{}).values;
    const auto ry = residuals(y, Ml{}).values;
    const auto ex = edf_statistics(rx), ey = edf_statistics(ry);
    EXPECT_NEAR(ex.ad, ey.ad, 1e-8);
    EXPECT_NEAR(compute_dnl(rx, 2.0), compute_dnl(ry, 2.0), 1e-8);
    EXPECT_NEAR(compute_kl(rx, 4).value, compute_kl(ry, 4).value, 1e-8);
  }
}
