#include "climsev/attributes.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support/oracles.hpp"

namespace climsev {
namespace {

using testing::brute_force_drawdown;
using testing::constant_days;
using testing::random_series;

const TimeWindow kWindow = TimeWindow::from_label("1991-2020");

DailyNormalsSeries constant_series(double tmax, double tmin, double tavg, double prcp) {
  return make_series("C", kWindow, constant_days(tmax, tmin, tavg, prcp));
}

/// Series whose freeze-year degree-days are `pattern` followed by zeros.
DailyNormalsSeries series_from_freeze_year_pattern(const std::vector<double>& pattern) {
  auto days = constant_days(60, 10, 32, 0);
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    days[(kFreezeYearStart + k) % kDaysPerYear].tavg_f = 32.0 + pattern[k];
  }
  return make_series("P", kWindow, days);
}

TEST(DegreeDay, DifferenceFromFreezing) {
  EXPECT_EQ(degree_day(32), 0);
  EXPECT_EQ(degree_day(22), -10);
  EXPECT_EQ(degree_day(50), 18);
}

TEST(CumulativeCurve, ConstantSeries) {
  auto flat = cumulative_curve(constant_series(40, 20, 32, 0));
  for (double v : flat.values) EXPECT_EQ(v, 0.0);
  auto unit = cumulative_curve(constant_series(40, 20, 33, 0));
  for (int k = 0; k < kDaysPerYear; ++k) EXPECT_DOUBLE_EQ(unit.values[k], k + 1.0);
}

TEST(CumulativeCurve, StartsOnJulyFirst) {
  auto days = constant_days(60, 10, 32, 0);
  days[*day_index(7, 1)].tavg_f = 40;
  days[*day_index(6, 30)].tavg_f = 20;
  auto curve = cumulative_curve(make_series("R", kWindow, days));
  EXPECT_DOUBLE_EQ(curve.values.front(), 8.0);
  EXPECT_DOUBLE_EQ(curve.values.back(), -4.0);
}

TEST(CumulativeCurve, FinalValueMatchesSinglePassSum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_series(rng);
    double oracle = 0.0;
    for (const auto& d : s.days) oracle += d.tavg_f - 32.0;
    EXPECT_NEAR(cumulative_curve(s).values.back(), oracle, 1e-9);
  }
}

TEST(FreezeIndex, WarmClimateScoresZero) { EXPECT_EQ(freeze_index(constant_series(60, 40, 50, 0)), 0.0); }

TEST(FreezeIndex, SingleColdSpell) {
  std::vector<double> pattern(5, -10.0);
  pattern.resize(365, 18.0);
  ASSERT_DOUBLE_EQ(brute_force_drawdown(pattern), 50.0);
  EXPECT_DOUBLE_EQ(freeze_index(series_from_freeze_year_pattern(pattern)), 50.0);
}

TEST(FreezeIndex, LargestDrawdownAfterWarmSpell) {
  std::vector<double> pattern;
  pattern.insert(pattern.end(), 5, -10.0);
  pattern.insert(pattern.end(), 20, 5.0);
  pattern.insert(pattern.end(), 8, -10.0);
  ASSERT_DOUBLE_EQ(brute_force_drawdown(pattern), 80.0);
  EXPECT_DOUBLE_EQ(freeze_index(series_from_freeze_year_pattern(pattern)), 80.0);
  EXPECT_DOUBLE_EQ(max_drawdown(pattern), 80.0);
}

TEST(FreezeIndex, ConstantFreezingYear) {
  EXPECT_NEAR(freeze_index(constant_series(30, 14, 22, 0)), 3650.0, 1e-9);
}

TEST(FreezeIndex, MatchesBruteForceOnRandomSeries) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_series(rng);
    const double fi = freeze_index(s);
    EXPECT_NEAR(fi, brute_force_drawdown(testing::freeze_year_degree_days(s)), 1e-9);
    EXPECT_GE(fi, 0.0);
  }
}

TEST(FreezeIndex, ZeroExactlyWhenCurveNeverDescends) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_series(rng);
    auto curve = cumulative_curve(s);
    bool descends = curve.values[0] < 0.0;
    for (int k = 1; k < kDaysPerYear; ++k) descends = descends || curve.values[k] < curve.values[k - 1];
    EXPECT_EQ(freeze_index(s) == 0.0, !descends);
  }
}

TEST(FreezeIndex, UniformWarmShiftForcesZero) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_series(rng);
    double coldest = 1e9;
    for (const auto& d : s.days) coldest = std::min(coldest, d.tavg_f);
    const double k = 32.0 - coldest + 0.5;
    if (k <= 0) continue;
    auto days = s.days;
    bool sane = true;
    for (auto& d : days) {
      d.tavg_f += k;
      d.tmax_f += k;
      d.tmin_f += k;
      sane = sane && d.tmax_f <= kMaxSaneTempF;
    }
    if (!sane) continue;
    EXPECT_EQ(freeze_index(make_series("W", kWindow, days)), 0.0);
  }
}

// With a warm stretch of at least 30 days spanning Jul 1, the winter is never
// split by the year boundary, so any rotation start inside that stretch
// gives the same drawdown.
TEST(FreezeIndex, RotationInvariantWithWarmSummer) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> offset(-15, 14);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_series(rng);
    auto days = s.days;
    for (int k = kFreezeYearStart - 20; k < kFreezeYearStart + 20; ++k) {
      days[k].tavg_f = std::max(days[k].tavg_f, 40.0);
      days[k].tmax_f = std::max(days[k].tmax_f, days[k].tavg_f);
    }
    auto warm = make_series("S", kWindow, days);
    const int start = kFreezeYearStart + offset(rng);
    std::vector<double> rotated;
    for (int k = 0; k < kDaysPerYear; ++k) rotated.push_back(warm.days[(start + k) % kDaysPerYear].tavg_f - 32.0);
    EXPECT_NEAR(freeze_index(warm), brute_force_drawdown(rotated), 1e-9);
  }
}

TEST(FreezeThawCycles, SingleQualifyingDay) {
  auto days = constant_days(50, 40, 45, 0);
  days[20] = {1, 21, 40, 20, 30, 0};
  EXPECT_EQ(freeze_thaw_cycles(make_series("F", kWindow, days)), 1);
}

TEST(FreezeThawCycles, NoThawMeansNoCycles) { EXPECT_EQ(freeze_thaw_cycles(constant_series(30, 20, 25, 0)), 0); }

TEST(FreezeThawCycles, StrictInequalityAtFreezing) {
  auto days = constant_days(50, 40, 45, 0);
  days[0] = {1, 1, 32, 20, 26, 0};
  days[1] = {1, 2, 40, 32, 36, 0};
  EXPECT_EQ(freeze_thaw_cycles(make_series("F", kWindow, days)), 0);
}

TEST(FreezeThawCycles, MatchesDayByDayCountAndIgnoresOrder) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_series(rng);
    const int n = freeze_thaw_cycles(s);
    EXPECT_EQ(n, testing::brute_force_ftc(s));
    auto days = s.days;
    std::shuffle(days.begin(), days.end(), rng);
    EXPECT_EQ(freeze_thaw_cycles(make_series("X", kWindow, days)), n);
  }
}

TEST(MeanAnnualTemperature, ConstantAndSplit) {
  EXPECT_DOUBLE_EQ(mean_annual_temperature(constant_series(60, 40, 50, 0)), 50.0);
  auto days = constant_days(70, 30, 60, 0);
  for (int k = 0; k < 183; ++k) days[k].tavg_f = 40;
  EXPECT_NEAR(mean_annual_temperature(make_series("H", kWindow, days)), (183.0 * 40 + 182.0 * 60) / 365.0, 1e-12);
}

TEST(AnnualPrecipitation, ConstantAndZero) {
  EXPECT_NEAR(annual_precipitation(constant_series(60, 40, 50, 0.1)), 36.5, 1e-9);
  EXPECT_EQ(annual_precipitation(constant_series(60, 40, 50, 0.0)), 0.0);
}

TEST(MeanAndPrecipitation, IndependentOfSummationOrder) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = random_series(rng);
    std::vector<double> t, p;
    for (const auto& d : s.days) {
      t.push_back(d.tavg_f);
      p.push_back(d.prcp_in);
    }
    std::reverse(t.begin(), t.end());
    std::shuffle(p.begin(), p.end(), rng);
    EXPECT_NEAR(mean_annual_temperature(s), std::accumulate(t.begin(), t.end(), 0.0) / 365.0, 1e-9);
    EXPECT_NEAR(annual_precipitation(s), std::accumulate(p.begin(), p.end(), 0.0), 1e-9);
  }
}

TEST(ComputeAttributes, Compositions) {
  auto warm = compute_attributes(constant_series(60, 40, 50, 0.1));
  EXPECT_EQ(warm.freeze_index_fdays, 0.0);
  EXPECT_EQ(warm.ftc_count, 0);
  EXPECT_DOUBLE_EQ(warm.mean_temp_f, 50.0);
  EXPECT_NEAR(warm.annual_precip_in, 36.5, 1e-9);

  auto cold = compute_attributes(constant_series(30, 14, 22, 0));
  EXPECT_NEAR(cold.freeze_index_fdays, 3650.0, 1e-9);
  EXPECT_EQ(cold.ftc_count, 0);
  EXPECT_DOUBLE_EQ(cold.mean_temp_f, 22.0);
  EXPECT_EQ(cold.annual_precip_in, 0.0);

  auto straddle = compute_attributes(constant_series(40, 24, 32, 0));
  EXPECT_EQ(straddle.freeze_index_fdays, 0.0);
  EXPECT_EQ(straddle.ftc_count, 365);
}

TEST(ComputeAttributes, NoFreezingMinimumMeansNoFreezeMetrics) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = random_series(rng);
    auto days = s.days;
    for (auto& d : days) {
      d.tmin_f = std::max(d.tmin_f, 32.5);
      d.tavg_f = std::max(d.tavg_f, d.tmin_f);
      d.tmax_f = std::max(d.tmax_f, d.tavg_f);
    }
    auto a = compute_attributes(make_series("N", kWindow, days));
    EXPECT_EQ(a.freeze_index_fdays, 0.0);
    EXPECT_EQ(a.ftc_count, 0);
  }
}

TEST(AttributeTable, FourDecimalRenderingAndParse) {
  ClimateAttributes a{"S1", kWindow, 1234.56789, 101, 45.123456, 36.5};
  const std::string csv = serialize_attributes({a});
  EXPECT_EQ(csv, "station_id,window,freeze_index_fdays,ftc_count,mean_temp_f,annual_precip_in\n"
                 "S1,1991-2020,1234.5679,101,45.1235,36.5000\n");
  auto back = parse_attributes(csv);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].ftc_count, 101);
  EXPECT_DOUBLE_EQ(back[0].freeze_index_fdays, 1234.5679);
}

TEST(AttributeNames, RoundTrip) {
  for (Attribute a : kAllAttributes) EXPECT_EQ(parse_attribute(attribute_name(a)), a);
  EXPECT_THROW(parse_attribute("snowfall"), Error);
}

}  // namespace
}  // namespace climsev
