#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cauchygof/battery.hpp"
#include "cauchygof/dist.hpp"
#include "cauchygof/errors.hpp"

using namespace cauchygof;

namespace {

ReturnSeries ingest(const std::string& text, IngestOptions o = {}) {
  std::istringstream in(text);
  return ingest_returns(in, o);
}

std::vector<double> draws(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample(spec, n, rng);
}

}  // namespace

TEST(Ingest, ConstantPriceGivesZeroReturn) {
  const auto r = ingest("date,close\n2020-01-01,100\n2020-01-02,100\n");
  ASSERT_EQ(r.returns.size(), 1u);
  EXPECT_EQ(r.returns[0], 0.0);
  EXPECT_EQ(r.dates[0], "2020-01-02");
}

TEST(Ingest, LogDifferences) {
  const double e = std::exp(1.0);
  std::ostringstream s;
  s.precision(17);
  s << "date,close\nd1,1\nd2," << e << "\nd3," << e * e << "\n";
  const auto r = ingest(s.str());
  ASSERT_EQ(r.returns.size(), 2u);
  EXPECT_NEAR(r.returns[0], 1.0, 1e-15);
  EXPECT_NEAR(r.returns[1], 1.0, 1e-15);
}

TEST(Ingest, ZeroVolumeRowDroppedLeavesNoReturns) {
  IngestOptions o;
  o.volume_column = "volume";
  EXPECT_THROW(ingest("date,close,volume\nd1,100,5\nd2,110,0\n", o), DataError);
}

TEST(Ingest, EveryRowRetainedOrLogged) {
  IngestOptions o;
  o.volume_column = "Volume";
  const auto r = ingest(
      "Date,Close,Volume\n"
      "d1,100,10\n"
      "d2,,10\n"
      "d3,abc,10\n"
      "d4,-1,10\n"
      "d5,101,0\n"
      "\n"
      "d6,102,x\n"
      "d7,\"103\",7\n"
      "d8,104,9\n",
      o);
  EXPECT_EQ(r.input_rows, 8u);
  EXPECT_EQ(r.retained_rows + r.dropped.size(), r.input_rows);
  EXPECT_EQ(r.retained_rows, 3u);
  EXPECT_EQ(r.returns.size(), 2u);
  EXPECT_NEAR(r.returns[1], std::log(104.0 / 103.0), 1e-15);
  EXPECT_EQ(r.dropped.front().line, 3u);
}

TEST(Ingest, MissingColumnIsAnError) {
  EXPECT_THROW(ingest("date,price\nd1,1\nd2,2\n"), DataError);
}

TEST(Histogram, DensityNormalizationAndRange) {
  const auto x = draws(Cauchy{}, 1000, 3);
  const auto h = make_histogram(x, {0.0, 1.0}, 40, 200);
  ASSERT_EQ(h.edges.size(), 41u);
  ASSERT_EQ(h.curve_x.size(), 200u);
  std::size_t inside = 0;
  double mass = 0.0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    inside += h.counts[i];
    mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
  }
  EXPECT_EQ(inside + h.outside, x.size());
  EXPECT_NEAR(mass, static_cast<double>(inside) / x.size(), 1e-12);
  EXPECT_NEAR(h.curve_density[100], cauchy_pdf(h.curve_x[100], 0.0, 1.0), 1e-15);
}

TEST(Battery, DefaultListAndSizeChecks) {
  EXPECT_EQ(default_battery(527).size(), 12u);
  BatteryConfig c;
  c.reps = 100;
  EXPECT_THROW(run_battery(draws(Cauchy{}, 19, 1), c), DataError);
  const auto r = run_battery(draws(Cauchy{}, 30, 1), c);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.outcomes.size(), 12u);
}

TEST(Battery, JsonRoundTripIsExactAndRunsAreDeterministic) {
  BatteryConfig c;
  c.reps = 200;
  c.seed = 77;
  const auto x = draws(Cauchy{2.0, 0.5}, 80, 5);
  const auto a = run_battery(x, c);
  const auto b = run_battery(x, c);
  EXPECT_EQ(to_json(a), to_json(b));
  const auto back = battery_report_from_json(to_json(a));
  EXPECT_EQ(to_json(back), to_json(a));
  ASSERT_EQ(back.outcomes.size(), a.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(back.outcomes[i].value, a.outcomes[i].value);
    EXPECT_EQ(back.outcomes[i].p_value, a.outcomes[i].p_value);
  }
  EXPECT_EQ(back.fit.alpha, a.fit.alpha);
  EXPECT_NE(to_csv(a).find("T:a=1"), std::string::npos);
}

TEST(Battery, BadStatisticReportedWithoutAbort) {
  BatteryConfig c;
  c.reps = 100;
  c.statistics = {parse_statistic("ad"), parse_statistic("kl:m=40")};
  const auto r = run_battery(draws(Cauchy{}, 60, 2), c);
  ASSERT_EQ(r.outcomes.size(), 1u);
  EXPECT_EQ(r.outcomes[0].id, "ad");
  ASSERT_EQ(r.errors.size(), 1u);
  EXPECT_EQ(r.errors[0].first, "kl:m=40");
}

TEST(Battery, NormalSampleRejected) {
  BatteryConfig c;
  c.reps = 1000;
  c.statistics = {parse_statistic("T:a=5"), StatisticId{StatisticId::Kind::Kl, 100.0}};
  const auto r = run_battery(draws(Normal{}, 527, 8), c);
  ASSERT_EQ(r.outcomes.size(), 2u);
  for (const auto& o : r.outcomes) EXPECT_LT(o.p_value, 0.01) << o.id;
}

TEST(Battery, PValuesUniformUnderTheNull) {
  const std::size_t n = 60;
  BatteryConfig c;
  c.reps = 1000;
  c.seed = 500;
  c.statistics = default_battery(n);
  const auto stats = make_statistics(c.statistics);
  const auto null = simulate_null(stats, c.estimator, n, c.reps, c.seed);

  std::vector<std::vector<double>> p(stats.size());
  std::vector<std::size_t> small;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = run_battery(draws(Cauchy{}, n, 9000 + seed), c, null);
    ASSERT_EQ(r.outcomes.size(), stats.size());
    std::size_t k = 0;
    for (std::size_t s = 0; s < stats.size(); ++s) {
      p[s].push_back(r.outcomes[s].p_value);
      k += r.outcomes[s].p_value < 0.05;
    }
    small.push_back(k);
  }
  const double band = ks_critical_value(100, 0.01 / stats.size());
  for (std::size_t s = 0; s < stats.size(); ++s) {
    EXPECT_LT(ks_distance(p[s], [](double u) { return std::clamp(u, 0.0, 1.0); }), band)
        << stats[s].id;
  }
  std::nth_element(small.begin(), small.begin() + 50, small.end());
  EXPECT_LE(small[50], 2u);
}
