#pragma once

// Station metadata and daily-normals ingestion.
//
// stations.csv : station_id,name,latitude,longitude,state,elevation_m
// normals.csv  : station_id,month,day,tmax_f,tmin_f,tavg_f,prcp_in
//
// A station's normals become a DailyNormalsSeries only when all 365 days
// (Feb 29 ignored) are present and valid; anything else is reported as an
// Exclusion rather than an error. Temperatures are degrees Fahrenheit,
// precipitation inches.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "climsev/error.hpp"
#include "climsev/text.hpp"

namespace climsev {

inline constexpr int kDaysPerYear = 365;
inline constexpr std::array<int, 12> kMonthLengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

/// Zero-based index of (month, day) in a 365-day calendar, or nullopt for
/// dates that do not exist (Feb 29 included).
constexpr std::optional<int> day_index(int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > kMonthLengths[month - 1]) return std::nullopt;
  int idx = 0;
  for (int m = 1; m < month; ++m) idx += kMonthLengths[m - 1];
  return idx + day - 1;
}

struct MonthDay {
  int month;
  int day;
};

constexpr MonthDay month_day(int index) {
  int month = 1;
  while (index >= kMonthLengths[month - 1]) {
    index -= kMonthLengths[month - 1];
    ++month;
  }
  return {month, index + 1};
}

struct TimeWindow {
  std::string label;
  int start_year = 0;
  int end_year = 0;

  static TimeWindow from_label(std::string_view label) {
    for (int start : {1971, 1981, 1991}) {
      TimeWindow w{std::to_string(start) + "-" + std::to_string(start + 29), start, start + 29};
      if (w.label == label) return w;
    }
    throw Error(ErrorCode::UnknownWindow,
                "unknown time window '" + std::string(label) + "' (expected 1971-2000, 1981-2010 or 1991-2020)");
  }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct StationRecord {
  std::string station_id;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  std::string state;
  std::optional<double> elevation_m;

  friend bool operator==(const StationRecord&, const StationRecord&) = default;
};

struct DayNormal {
  int month = 1;
  int day = 1;
  double tmax_f = 0.0;
  double tmin_f = 0.0;
  double tavg_f = 0.0;
  double prcp_in = 0.0;
};

inline constexpr double kMinSaneTempF = -80.0;
inline constexpr double kMaxSaneTempF = 140.0;

/// Reason a DayNormal fails its invariants, or nullopt when it is valid.
inline std::optional<std::string> day_normal_problem(const DayNormal& d) {
  for (double t : {d.tmax_f, d.tmin_f, d.tavg_f}) {
    if (!std::isfinite(t) || t < kMinSaneTempF || t > kMaxSaneTempF) return "temperature outside [-80, 140] F";
  }
  if (!std::isfinite(d.prcp_in) || d.prcp_in < 0.0) return "negative or non-finite precipitation";
  if (d.tmin_f > d.tavg_f) return "tmin_f > tavg_f";
  if (d.tavg_f > d.tmax_f) return "tavg_f > tmax_f";
  return std::nullopt;
}

/// One station's complete 365-day normals for one window, Jan 1 .. Dec 31.
/// Only parse_normals (or make_series) constructs these, so every instance
/// satisfies the completeness and per-day invariants.
struct DailyNormalsSeries {
  std::string station_id;
  TimeWindow window;
  std::array<DayNormal, kDaysPerYear> days{};
};

/// Builds a series from 365 calendar-ordered days, validating every day.
/// Month/day fields are overwritten from the position.
inline DailyNormalsSeries make_series(std::string station_id, TimeWindow window,
                                      const std::array<DayNormal, kDaysPerYear>& days) {
  DailyNormalsSeries s{std::move(station_id), std::move(window), days};
  for (int i = 0; i < kDaysPerYear; ++i) {
    auto md = month_day(i);
    s.days[i].month = md.month;
    s.days[i].day = md.day;
    if (auto problem = day_normal_problem(s.days[i])) {
      throw Error(ErrorCode::InvalidArgument, "station " + s.station_id + " day " + std::to_string(md.month) + "-" +
                                                  std::to_string(md.day) + ": " + *problem);
    }
  }
  return s;
}

struct Exclusion {
  std::string station_id;
  std::string reason;  // missing_day | invalid_day | duplicate_day
  std::string detail;
};

struct NormalsParseResult {
  std::vector<DailyNormalsSeries> series;
  std::vector<Exclusion> exclusions;
};

namespace detail {

[[noreturn]] inline void malformed(std::size_t line, std::string_view column, std::string_view what) {
  throw Error(ErrorCode::MalformedRow,
              "line " + std::to_string(line) + ", column " + std::string(column) + ": " + std::string(what));
}

inline std::vector<std::string> record(std::string_view line, std::size_t line_no, std::size_t ncols) {
  auto fields = text::split_csv(line);
  if (!fields) malformed(line_no, "*", "unterminated quoted field");
  if (fields->size() != ncols) {
    malformed(line_no, "*", "expected " + std::to_string(ncols) + " fields, got " + std::to_string(fields->size()));
  }
  return std::move(*fields);
}

inline void expect_header(const std::vector<std::string_view>& lines, std::string_view header) {
  if (lines.empty() || text::trim(lines.front()) != header) {
    malformed(1, "*", "expected header '" + std::string(header) + "'");
  }
}

inline std::string md_label(int month, int day) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d-%02d", month, day);
  return buf;
}

}  // namespace detail

inline constexpr std::string_view kStationsHeader = "station_id,name,latitude,longitude,state,elevation_m";
inline constexpr std::string_view kNormalsHeader = "station_id,month,day,tmax_f,tmin_f,tavg_f,prcp_in";

inline std::vector<StationRecord> parse_stations(std::string_view doc) {
  const auto lines = text::split_lines(doc);
  detail::expect_header(lines, kStationsHeader);

  std::vector<StationRecord> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    auto f = detail::record(lines[i], line_no, 6);

    StationRecord s;
    s.station_id = std::string(text::trim(f[0]));
    if (s.station_id.empty()) detail::malformed(line_no, "station_id", "empty");
    s.name = std::string(text::trim(f[1]));

    auto lat = text::parse_double(f[2]);
    if (!lat) detail::malformed(line_no, "latitude", "not a number: '" + f[2] + "'");
    auto lon = text::parse_double(f[3]);
    if (!lon) detail::malformed(line_no, "longitude", "not a number: '" + f[3] + "'");
    if (!(*lat >= -90.0 && *lat <= 90.0) || !(*lon >= -180.0 && *lon <= 180.0)) {
      throw Error(ErrorCode::CoordinateOutOfHardBounds, "line " + std::to_string(line_no) + ", station " +
                                                            s.station_id + ": (" + f[2] + ", " + f[3] + ")");
    }
    s.latitude = *lat;
    s.longitude = *lon;

    s.state = std::string(text::trim(f[4]));
    if (s.state.size() != 2 || !std::all_of(s.state.begin(), s.state.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
      detail::malformed(line_no, "state", "expected a two-letter USPS code, got '" + s.state + "'");
    }

    if (!text::trim(f[5]).empty()) {
      auto elev = text::parse_double(f[5]);
      if (!elev || !std::isfinite(*elev)) detail::malformed(line_no, "elevation_m", "not a number: '" + f[5] + "'");
      s.elevation_m = *elev;
    }

    if (!seen.insert(s.station_id).second) {
      throw Error(ErrorCode::DuplicateStationId,
                  "station id '" + s.station_id + "' repeated at line " + std::to_string(line_no));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string serialize_stations(const std::vector<StationRecord>& stations) {
  std::string out(kStationsHeader);
  out.push_back('\n');
  for (const auto& s : stations) {
    out += text::csv_escape(s.station_id) + ',' + text::csv_escape(s.name) + ',' + text::format_shortest(s.latitude) +
           ',' + text::format_shortest(s.longitude) + ',' + s.state + ',' +
           (s.elevation_m ? text::format_shortest(*s.elevation_m) : std::string()) + '\n';
  }
  return out;
}

/// Nominal contiguous-US box. Stations outside it are kept but warned about.
struct SoftBounds {
  double lat_min = 24.0, lat_max = 49.5;
  double lon_min = -125.0, lon_max = -66.5;
};

inline std::vector<std::string> soft_bound_warnings(const std::vector<StationRecord>& stations,
                                                    const SoftBounds& box = {}) {
  std::vector<std::string> out;
  for (const auto& s : stations) {
    if (s.latitude < box.lat_min || s.latitude > box.lat_max || s.longitude < box.lon_min ||
        s.longitude > box.lon_max) {
      out.push_back("station " + s.station_id + " at (" + text::format_shortest(s.latitude) + ", " +
                    text::format_shortest(s.longitude) + ") lies outside the contiguous-US box");
    }
  }
  return out;
}

inline constexpr std::array<std::string_view, 48> kContiguousStates = {
    "AL", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "ID", "IL", "IN", "IA", "KS", "KY", "LA",
    "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND",
    "OH", "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};

inline bool is_contiguous_state(std::string_view state) {
  return std::find(kContiguousStates.begin(), kContiguousStates.end(), state) != kContiguousStates.end();
}

inline std::vector<StationRecord> filter_contiguous(const std::vector<StationRecord>& stations) {
  std::vector<StationRecord> out;
  std::copy_if(stations.begin(), stations.end(), std::back_inserter(out),
               [](const StationRecord& s) { return is_contiguous_state(s.state); });
  return out;
}

inline NormalsParseResult parse_normals(std::string_view doc, const TimeWindow& window) {
  const auto lines = text::split_lines(doc);
  detail::expect_header(lines, kNormalsHeader);

  struct Pending {
    std::array<std::optional<DayNormal>, kDaysPerYear> days{};
    std::optional<std::string> invalid;    // first invalid day
    std::optional<std::string> duplicate;  // first duplicated day
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> by_station;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    auto f = detail::record(lines[i], line_no, 7);

    std::string id(text::trim(f[0]));
    if (id.empty()) detail::malformed(line_no, "station_id", "empty");
    auto month = text::parse_int(f[1]);
    if (!month) detail::malformed(line_no, "month", "not an integer: '" + f[1] + "'");
    auto day = text::parse_int(f[2]);
    if (!day) detail::malformed(line_no, "day", "not an integer: '" + f[2] + "'");

    auto [it, inserted] = by_station.try_emplace(id);
    if (inserted) order.push_back(id);
    Pending& p = it->second;

    if (*month == 2 && *day == 29) continue;
    auto idx = day_index(static_cast<int>(*month), static_cast<int>(*day));
    if (!idx) {
      throw Error(ErrorCode::UnknownMonthDay, "line " + std::to_string(line_no) + ": month " + f[1] + ", day " + f[2]);
    }

    // Empty value fields mean "missing"; anything else must be numeric.
    auto value = [&](std::size_t col, std::string_view name) -> std::optional<double> {
      if (text::trim(f[col]).empty()) return std::nullopt;
      auto v = text::parse_double(f[col]);
      if (!v) detail::malformed(line_no, name, "not a number: '" + f[col] + "'");
      return v;
    };
    auto tmax = value(3, "tmax_f");
    auto tmin = value(4, "tmin_f");
    auto tavg = value(5, "tavg_f");
    auto prcp = value(6, "prcp_in");

    const std::string label = detail::md_label(static_cast<int>(*month), static_cast<int>(*day));
    if (p.days[*idx]) {
      if (!p.duplicate) p.duplicate = label;
      continue;
    }
    if (!tmax || !tmin || !prcp) {
      if (!p.invalid) p.invalid = label + ": missing value";
      continue;
    }
    DayNormal d{static_cast<int>(*month), static_cast<int>(*day), *tmax, *tmin, tavg ? *tavg : 0.5 * (*tmax + *tmin),
                *prcp};
    if (auto problem = day_normal_problem(d)) {
      if (!p.invalid) p.invalid = label + ": " + *problem;
      continue;
    }
    p.days[*idx] = d;
  }

  NormalsParseResult result;
  for (const auto& id : order) {
    Pending& p = by_station.at(id);
    if (p.duplicate) {
      result.exclusions.push_back({id, "duplicate_day", *p.duplicate});
      continue;
    }
    if (p.invalid) {
      result.exclusions.push_back({id, "invalid_day", *p.invalid});
      continue;
    }
    std::vector<std::string> missing;
    for (int d = 0; d < kDaysPerYear; ++d) {
      if (!p.days[d]) {
        auto md = month_day(d);
        missing.push_back(detail::md_label(md.month, md.day));
      }
    }
    if (!missing.empty()) {
      std::string detail = std::to_string(missing.size()) + " missing:";
      for (std::size_t k = 0; k < missing.size() && k < 10; ++k) detail += " " + missing[k];
      if (missing.size() > 10) detail += " ...";
      result.exclusions.push_back({id, "missing_day", detail});
      continue;
    }
    DailyNormalsSeries s{id, window, {}};
    for (int d = 0; d < kDaysPerYear; ++d) s.days[d] = *p.days[d];
    result.series.push_back(std::move(s));
  }
  return result;
}

inline std::string serialize_exclusions(const std::vector<Exclusion>& exclusions) {
  std::string out = "station_id,reason,detail\n";
  for (const auto& e : exclusions) {
    out += text::csv_escape(e.station_id) + ',' + e.reason + ',' + text::csv_escape(e.detail) + '\n';
  }
  return out;
}

}  // namespace climsev
