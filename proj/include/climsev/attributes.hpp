#pragma once

// Primary and secondary climate attributes of one station's daily normals.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "climsev/error.hpp"
#include "climsev/ingest.hpp"
#include "climsev/text.hpp"

namespace climsev {

inline constexpr double kFreezingF = 32.0;

/// Index of Jul 1 in the Jan-based calendar; the freeze year runs Jul 1 .. Jun 30.
inline constexpr int kFreezeYearStart = *day_index(7, 1);

enum class Attribute { FreezeIndex, FreezeThawCycles, Precipitation, Temperature };

/// Report order (freeze index, freeze-thaw cycles, precipitation, temperature).
inline constexpr std::array<Attribute, 4> kAllAttributes = {Attribute::FreezeIndex, Attribute::FreezeThawCycles,
                                                            Attribute::Precipitation, Attribute::Temperature};

constexpr std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::FreezeIndex: return "freeze_index";
    case Attribute::FreezeThawCycles: return "freeze_thaw_cycles";
    case Attribute::Precipitation: return "precipitation";
    case Attribute::Temperature: return "temperature";
  }
  return "";
}

inline Attribute parse_attribute(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (attribute_name(a) == name) return a;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown attribute '" + std::string(name) +
                  "' (expected freeze_index, freeze_thaw_cycles, precipitation or temperature)");
}

struct ClimateAttributes {
  std::string station_id;
  TimeWindow window;
  double freeze_index_fdays = 0.0;
  int ftc_count = 0;
  double mean_temp_f = 0.0;
  double annual_precip_in = 0.0;

  [[nodiscard]] double value(Attribute a) const {
    switch (a) {
      case Attribute::FreezeIndex: return freeze_index_fdays;
      case Attribute::FreezeThawCycles: return static_cast<double>(ftc_count);
      case Attribute::Precipitation: return annual_precip_in;
      case Attribute::Temperature: return mean_temp_f;
    }
    return 0.0;
  }
};

constexpr double degree_day(double tavg_f) { return tavg_f - kFreezingF; }

/// Running sum of degree-days over the freeze year (Jul 1 first).
struct DegreeDayCurve {
  std::array<double, kDaysPerYear> values{};
};

inline DegreeDayCurve cumulative_curve(const DailyNormalsSeries& series) {
  DegreeDayCurve curve;
  double sum = 0.0;
  for (int k = 0; k < kDaysPerYear; ++k) {
    sum += degree_day(series.days[(kFreezeYearStart + k) % kDaysPerYear].tavg_f);
    curve.values[k] = sum;
  }
  return curve;
}

/// Largest fall of a running sum from an earlier-or-equal high to a later low.
/// The sum starts at 0 before the first increment, so an immediate descent
/// counts. Never negative.
inline double max_drawdown(std::span<const double> increments) {
  double level = 0.0;
  double peak = 0.0;
  double worst = 0.0;
  for (double inc : increments) {
    level += inc;
    peak = std::max(peak, level);
    worst = std::max(worst, peak - level);
  }
  return worst;
}

/// Freeze index in F-days: the maximum drawdown of the freeze-year
/// cumulative degree-day curve.
inline double freeze_index(const DailyNormalsSeries& series) {
  std::array<double, kDaysPerYear> increments{};
  for (int k = 0; k < kDaysPerYear; ++k) {
    increments[k] = degree_day(series.days[(kFreezeYearStart + k) % kDaysPerYear].tavg_f);
  }
  return max_drawdown(increments);
}

/// Days whose maximum is strictly above freezing and minimum strictly below.
inline int freeze_thaw_cycles(const DailyNormalsSeries& series) {
  return static_cast<int>(std::count_if(series.days.begin(), series.days.end(), [](const DayNormal& d) {
    return d.tmax_f > kFreezingF && d.tmin_f < kFreezingF;
  }));
}

inline double mean_annual_temperature(const DailyNormalsSeries& series) {
  double sum = 0.0;
  for (const auto& d : series.days) sum += d.tavg_f;
  return sum / kDaysPerYear;
}

/// Annual total, not a daily mean.
inline double annual_precipitation(const DailyNormalsSeries& series) {
  double sum = 0.0;
  for (const auto& d : series.days) sum += d.prcp_in;
  return sum;
}

inline ClimateAttributes compute_attributes(const DailyNormalsSeries& series) {
  return {series.station_id,      series.window,           freeze_index(series), freeze_thaw_cycles(series),
          mean_annual_temperature(series), annual_precipitation(series)};
}

// Attribute table CSV.

inline constexpr std::string_view kAttributesHeader =
    "station_id,window,freeze_index_fdays,ftc_count,mean_temp_f,annual_precip_in";

inline std::string serialize_attributes(const std::vector<ClimateAttributes>& rows) {
  std::string out(kAttributesHeader);
  out.push_back('\n');
  for (const auto& a : rows) {
    out += text::csv_escape(a.station_id) + ',' + a.window.label + ',' + text::format_fixed(a.freeze_index_fdays, 4) +
           ',' + std::to_string(a.ftc_count) + ',' + text::format_fixed(a.mean_temp_f, 4) + ',' +
           text::format_fixed(a.annual_precip_in, 4) + '\n';
  }
  return out;
}

inline std::vector<ClimateAttributes> parse_attributes(std::string_view doc) {
  const auto lines = text::split_lines(doc);
  detail::expect_header(lines, kAttributesHeader);
  std::vector<ClimateAttributes> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    auto f = detail::record(lines[i], line_no, 6);
    ClimateAttributes a;
    a.station_id = std::string(text::trim(f[0]));
    if (a.station_id.empty()) detail::malformed(line_no, "station_id", "empty");
    a.window = TimeWindow::from_label(text::trim(f[1]));
    auto number = [&](std::size_t col, std::string_view name) {
      auto v = text::parse_double(f[col]);
      if (!v || !std::isfinite(*v)) detail::malformed(line_no, name, "not a number: '" + f[col] + "'");
      return *v;
    };
    a.freeze_index_fdays = number(2, "freeze_index_fdays");
    auto ftc = text::parse_int(f[3]);
    if (!ftc || *ftc < 0 || *ftc > kDaysPerYear) detail::malformed(line_no, "ftc_count", "expected 0..365");
    a.ftc_count = static_cast<int>(*ftc);
    a.mean_temp_f = number(4, "mean_temp_f");
    a.annual_precip_in = number(5, "annual_precip_in");
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace climsev
