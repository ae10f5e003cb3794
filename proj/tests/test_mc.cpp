#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <vector>

#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"
#include "cauchygof/mc.hpp"
#include "cauchygof/statistic.hpp"

using namespace cauchygof;

namespace {

NamedStatistic constant(double c) {
  return {"const", [c](std::span<const double>) { return c; }, false};
}

// First residual; throws on large values to exercise redraws.
NamedStatistic first_residual(double threshold) {
  return {"first",
          [threshold](std::span<const double> y) {
            if (std::abs(y[0]) > threshold) throw DegenerateSampleError("fixture");
            return y[0];
          },
          false};
}

std::vector<NamedStatistic> stats_of(std::initializer_list<const char*> ids) {
  std::vector<NamedStatistic> out;
  for (const char* id : ids) out.push_back(make_statistic(parse_statistic(id)));
  return out;
}

double stddev(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

TEST(Statistics, IdsRoundTrip) {
  for (const char* id : {"T:a=1", "T:a=2.5", "T0", "ks", "cm", "ad", "w", "d:lambda=3",
                         "kl:m=4", "kl"}) {
    EXPECT_EQ(to_string(parse_statistic(id)), id);
  }
  EXPECT_THROW(parse_statistic("T:a=0"), ParameterError);
  EXPECT_THROW(parse_statistic("kl:m=1.5"), ParameterError);
  EXPECT_THROW(parse_statistic("xyz"), ParameterError);
  EXPECT_TRUE(make_statistic(parse_statistic("T0")).two_sided);
  EXPECT_FALSE(make_statistic(parse_statistic("T:a=1")).two_sided);
}

TEST(CriticalValues, ConstantStatistic) {
  const NamedStatistic s[] = {constant(2.5)};
  const double levels[] = {0.01, 0.05, 0.1};
  const auto t = critical_values(s, Miq{}, 20, levels, 200, 1, {.workers = 1});
  for (double l : levels) EXPECT_EQ(t.find("const", l).value, 2.5);
}

TEST(CriticalValues, OrderStatisticConvention) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(critical_value_from(v, 0.05), 95.0);
  EXPECT_EQ(critical_value_from(v, 0.01), 99.0);
  EXPECT_THROW(critical_value_from(v, 0.0), ParameterError);
}

TEST(CriticalValues, MonotoneInLevel) {
  const auto s = stats_of({"T:a=1", "ad", "T0"});
  const double levels[] = {0.01, 0.05, 0.1, 0.2};
  const auto t = critical_values(s, Ml{}, 20, levels, 2000, 7);
  for (const auto& st : s) {
    for (std::size_t i = 1; i < 4; ++i) {
      EXPECT_LE(t.find(st.id, levels[i]).value, t.find(st.id, levels[i - 1]).value);
    }
  }
}

TEST(PValues, Edges) {
  const std::vector<double> null = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(p_value_from(null, 0.5, false), 1.0);
  EXPECT_DOUBLE_EQ(p_value_from(null, 10.0, false), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(p_value_from(null, 3.0, false), 3.0 / 5.0);
  const std::vector<double> two = {-5.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(p_value_from(two, -3.0, true), 2.0 / 4.0);
}

TEST(Determinism, WorkerCountDoesNotChangeResults) {
  const auto s = stats_of({"T:a=1", "kl", "d:lambda=2"});
  const double levels[] = {0.05};
  const auto base = critical_values(s, Ml{}, 20, levels, 500, 3, {.workers = 1});
  for (std::size_t w : {2u, 4u}) {
    const auto t = critical_values(s, Ml{}, 20, levels, 500, 3, {.workers = w});
    EXPECT_EQ(to_json(t), to_json(base));
  }
}

TEST(Determinism, CommonRandomNumbersAcrossStatistics) {
  const auto both = stats_of({"T:a=1", "ad"});
  const auto one = stats_of({"ad"});
  const auto a = simulate_null(both, Miq{}, 30, 300, 9);
  const auto b = simulate_null(one, Miq{}, 30, 300, 9);
  EXPECT_EQ(a.values[1], b.values[0]);
}

TEST(Failures, RedrawnWithinLimit) {
  // |Y_1| > 8 has probability ~0.08 under MIQ residuals at n = 20.
  const NamedStatistic s[] = {first_residual(8.0)};
  McOptions o;
  o.max_failure_fraction = 0.5;
  const auto r = simulate_null(s, Miq{}, 20, 500, 4, o);
  EXPECT_GT(r.failures, 0u);
  for (double v : r.values[0]) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(std::abs(v), 8.0);
  }
  const auto again = simulate_null(s, Miq{}, 20, 500, 4, o);
  EXPECT_EQ(again.values, r.values);
}

TEST(Failures, AbortAboveLimit) {
  const NamedStatistic s[] = {first_residual(8.0)};
  EXPECT_THROW(simulate_null(s, Miq{}, 20, 500, 4), OptimizationError);
}

TEST(Null, RejectionRateNearNominal) {
  const auto s = stats_of({"T:a=1", "ks"});
  const double levels[] = {0.05};
  const auto cv = critical_values(s, Ml{}, 20, levels, 4000, 21);
  const auto fresh = simulate_null(s, Ml{}, 20, 4000, 22);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double c = cv.find(s[i].id, 0.05).value;
    double rej = 0.0;
    for (double v : fresh.values[i]) rej += s[i].score(v) > c;
    EXPECT_NEAR(rej / 4000.0, 0.05, 0.015) << s[i].id;
  }
}

TEST(Null, QuantileStandardErrorHalvesWhenRepsQuadruple) {
  // The MC standard error of the 95% quantile scales as reps^{-1/2}.
  const auto s = stats_of({"T:a=1"});
  std::vector<double> small, large;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto q = [&](std::size_t reps) {
      const auto r = simulate_null(s, Miq{}, 20, reps, seed * 100'000 + reps);
      return critical_value_from(r.values[0], 0.05);
    };
    small.push_back(q(500));
    large.push_back(q(2000));
  }
  const double ratio = stddev(large) / stddev(small);
  EXPECT_GT(ratio, 0.3);
  EXPECT_LT(ratio, 0.8);
}

TEST(PValues, UniformUnderTheNull) {
  const auto s = stats_of({"T:a=1"});
  const std::size_t n = 161;
  const auto null = simulate_null(s, Ml{}, n, 10'000, 100);
  std::vector<double> p;
  for (std::uint64_t r = 0; r < 500; ++r) {
    RngStream rng(101, r);
    const auto x = sample(Cauchy{}, n, rng);
    p.push_back(p_values(x, s, Ml{}, null)[0].p_value);
  }
  EXPECT_LT(ks_distance(p, [](double u) { return std::clamp(u, 0.0, 1.0); }),
            ks_critical_value(p.size(), 0.01));
}

TEST(PValues, NullFromOtherSizeRejected) {
  const auto s = stats_of({"ad"});
  const auto null = simulate_null(s, Ml{}, 20, 100, 1);
  RngStream rng(1, 0);
  const auto x = sample(Cauchy{}, 30, rng);
  EXPECT_THROW(p_values(x, s, Ml{}, null), ParameterError);
}

TEST(Clt, CauchyRatioVanishes) {
  const auto c = fixed_alternative_clt_check(Cauchy{}, Ml{}, 1000, 200, 5);
  EXPECT_LT(c.mean_ratio, 1e-2);
}

TEST(Clt, NormalCenteringBiasShrinksAtRootNRate) {
  // T_n/n is a V-statistic with an O(1/n) bias, so the mean of
  // sqrt(n)(T_n/n - Delta) is O(n^{-1/2}) and the variance settles.
  const auto m = fixed_alternative_clt_check(Normal{}, Miq{}, 500, 1000, 6);
  const auto g = fixed_alternative_clt_check(Normal{}, Miq{}, 2000, 1000, 7);
  EXPECT_GT(g.mean, 0.0);
  EXPECT_NEAR(m.mean / g.mean, 2.0, 0.5);
  EXPECT_NEAR(g.variance / m.variance, 1.0, 0.15);
  EXPECT_NEAR(std::sqrt(2000.0) * g.mean, std::sqrt(500.0) * m.mean,
              0.25 * std::sqrt(500.0) * m.mean);
}

TEST(Clt, RatioTracksPopulationFunctionalForUniform) {
  const auto u = fixed_alternative_clt_check(Uniform{}, Miq{}, 4000, 20, 8);
  EXPECT_NEAR(u.mean_ratio, u.delta, 0.05 * u.delta);
}

TEST(Power, SanityAgainstAlternatives) {
  const auto s = stats_of({"T:a=3", "ad"});
  const double levels[] = {0.05};
  const auto cv = critical_values(s, Ml{}, 50, levels, 2000, 31);
  const DistributionSpec alts[] = {Cauchy{}, Normal{}, Stable{0.4, 0.0}};
  const auto t = power(alts, s, Ml{}, 50, 0.05, cv, 500, 32);
  ASSERT_EQ(t.cells.size(), 3u);
  for (double v : t.cells[0]) EXPECT_NEAR(v, 0.05, 0.035);
  EXPECT_GT(t.cells[1][0], 0.75);
  EXPECT_GT(t.cells[2][1], 0.9);
  EXPECT_EQ(t.rows[0], "C(0,1)");
}

TEST(Serialization, CsvAndJson) {
  const auto s = stats_of({"T:a=1"});
  const double levels[] = {0.05, 0.1};
  const auto cv = critical_values(s, Ml{}, 20, levels, 200, 2);
  const auto j = nlohmann::json::parse(to_json(cv));
  EXPECT_EQ(j["reps"], 200);
  EXPECT_EQ(j["seed"], 2);
  const std::string csv = to_csv(cv);
  EXPECT_NE(csv.find("T:a=1"), std::string::npos);
  EXPECT_NE(csv.find(",0.05,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
