#pragma once

// NOAA climate regions, regional summaries, one-factor ANOVA across time
// windows, and attribute histograms.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "climsev/attributes.hpp"
#include "climsev/error.hpp"
#include "climsev/ingest.hpp"
#include "climsev/text.hpp"

namespace climsev {

enum class Region {
  Northwest,
  West,
  NorthernRockiesAndPlains,
  Southwest,
  UpperMidwest,
  OhioValley,
  South,
  Southeast,
  Northeast,
};

inline constexpr std::array<Region, 9> kAllRegions = {
    Region::Northwest,  Region::West,       Region::NorthernRockiesAndPlains,
    Region::Southwest,  Region::UpperMidwest, Region::OhioValley,
    Region::South,      Region::Southeast,  Region::Northeast};

constexpr std::string_view region_name(Region r) {
  switch (r) {
    case Region::Northwest: return "Northwest";
    case Region::West: return "West";
    case Region::NorthernRockiesAndPlains: return "Northern Rockies and Plains";
    case Region::Southwest: return "Southwest";
    case Region::UpperMidwest: return "Upper Midwest";
    case Region::OhioValley: return "Ohio Valley";
    case Region::South: return "South";
    case Region::Southeast: return "Southeast";
    case Region::Northeast: return "Northeast";
  }
  return "";
}

struct RegionMembership {
  std::string_view state;
  Region region;
};

inline constexpr std::array<RegionMembership, 48> kRegionTable = {{
    {"ID", Region::Northwest}, {"OR", Region::Northwest}, {"WA", Region::Northwest},
    {"CA", Region::West}, {"NV", Region::West},
    {"MT", Region::NorthernRockiesAndPlains}, {"NE", Region::NorthernRockiesAndPlains},
    {"ND", Region::NorthernRockiesAndPlains}, {"SD", Region::NorthernRockiesAndPlains},
    {"WY", Region::NorthernRockiesAndPlains},
    {"AZ", Region::Southwest}, {"CO", Region::Southwest}, {"NM", Region::Southwest}, {"UT", Region::Southwest},
    {"IA", Region::UpperMidwest}, {"MI", Region::UpperMidwest}, {"MN", Region::UpperMidwest},
    {"WI", Region::UpperMidwest},
    {"IL", Region::OhioValley}, {"IN", Region::OhioValley}, {"KY", Region::OhioValley}, {"MO", Region::OhioValley},
    {"OH", Region::OhioValley}, {"TN", Region::OhioValley}, {"WV", Region::OhioValley},
    {"AR", Region::South}, {"KS", Region::South}, {"LA", Region::South}, {"MS", Region::South},
    {"OK", Region::South}, {"TX", Region::South},
    {"AL", Region::Southeast}, {"FL", Region::Southeast}, {"GA", Region::Southeast}, {"NC", Region::Southeast},
    {"SC", Region::Southeast}, {"VA", Region::Southeast},
    {"CT", Region::Northeast}, {"DE", Region::Northeast}, {"ME", Region::Northeast}, {"MD", Region::Northeast},
    {"MA", Region::Northeast}, {"NH", Region::Northeast}, {"NJ", Region::Northeast}, {"NY", Region::Northeast},
    {"PA", Region::Northeast}, {"RI", Region::Northeast}, {"VT", Region::Northeast},
}};

/// Region of a contiguous-state code. DC, AK, HI and territories are not in
/// any region and raise NonContiguousState.
inline Region assign_region(std::string_view state) {
  for (const auto& m : kRegionTable) {
    if (m.state == state) return m.region;
  }
  throw Error(ErrorCode::NonContiguousState, "state '" + std::string(state) + "' is not in any NOAA climate region");
}

// ---------------------------------------------------------------------------
// F distribution

inline constexpr double kBetaRelTol = 1e-12;

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 10000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kBetaRelTol) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(F > f) for F ~ F(df1, df2).
inline double f_upper_tail(double f, double df1, double df2) {
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = df2 / (df2 + df1 * f);
  return std::clamp(regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x), 0.0, 1.0);
}

/// Critical value f with P(F > f) = alpha, by bisection.
inline double f_critical_value(double alpha, double df1, double df2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  double lo = 0.0, hi = 1.0;
  while (f_upper_tail(hi, df1, df2) > alpha) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f_upper_tail(mid, df1, df2) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// One-factor ANOVA

struct AnovaCore {
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
};

/// One-factor ANOVA over k >= 2 groups of at least two values each.
/// Zero within-group variance is only accepted when all group means agree
/// (F = 0, p = 1).
inline AnovaCore one_way_anova(std::span<const std::span<const double>> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::DegenerateGroup, "ANOVA needs at least two groups");
  std::size_t n_total = 0;
  double grand_sum = 0.0;
  std::vector<double> means;
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw Error(ErrorCode::DegenerateGroup, "ANOVA group has " + std::to_string(g.size()) + " value(s), need >= 2");
    }
    double s = 0.0;
    for (double v : g) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value in ANOVA group");
      s += v;
    }
    means.push_back(s / static_cast<double>(g.size()));
    grand_sum += s;
    n_total += g.size();
  }
  const bool means_equal = std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); });
  const double grand_mean = grand_sum / static_cast<double>(n_total);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double dm = means[i] - grand_mean;
    ss_between += static_cast<double>(groups[i].size()) * dm * dm;
    for (double v : groups[i]) ss_within += (v - means[i]) * (v - means[i]);
  }
  if (means_equal) ss_between = 0.0;

  AnovaCore out;
  out.df_between = static_cast<int>(groups.size()) - 1;
  out.df_within = static_cast<int>(n_total - groups.size());
  if (ss_within == 0.0) {
    if (means_equal) return out;
    throw Error(ErrorCode::ZeroWithinVariance, "groups have no internal spread but different means");
  }
  const double msb = ss_between / out.df_between;
  const double msw = ss_within / out.df_within;
  out.f_stat = msb / msw;
  out.p_value = f_upper_tail(out.f_stat, out.df_between, out.df_within);
  return out;
}

inline AnovaCore one_way_anova(std::span<const double> group_a, std::span<const double> group_b) {
  const std::array<std::span<const double>, 2> groups{group_a, group_b};
  return one_way_anova(groups);
}

// ---------------------------------------------------------------------------
// Regional comparison

inline constexpr double kDefaultAlpha = 0.05;

struct AnovaResult {
  Region region{};
  Attribute attribute{};
  bool insufficient_data = false;
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  bool significant = false;
  std::size_t n_pairs = 0;
};

namespace detail {

inline std::unordered_map<std::string_view, const StationRecord*> index_stations(
    const std::vector<StationRecord>& stations) {
  std::unordered_map<std::string_view, const StationRecord*> out;
  for (const auto& s : stations) out.emplace(s.station_id, &s);
  return out;
}

inline Region region_of(const std::unordered_map<std::string_view, const StationRecord*>& index,
                        const std::string& station_id) {
  auto it = index.find(station_id);
  if (it == index.end()) {
    throw Error(ErrorCode::UnjoinableStation, "attribute row for station '" + station_id + "' has no station record");
  }
  return assign_region(it->second->state);
}

}  // namespace detail

/// Region x attribute ANOVA between two windows. `old_attrs[k]` and
/// `new_attrs[k]` are a nearest-neighbour pair; the pair's region is that of
/// the old station. Always 36 rows; regions with fewer than two pairs are
/// flagged insufficient_data.
inline std::vector<AnovaResult> significance_table(const std::vector<ClimateAttributes>& old_attrs,
                                                   const std::vector<ClimateAttributes>& new_attrs,
                                                   const std::vector<StationRecord>& stations,
                                                   double alpha = kDefaultAlpha) {
  if (old_attrs.size() != new_attrs.size()) {
    throw Error(ErrorCode::InvalidArgument, "paired attribute lists differ in length");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
  const auto index = detail::index_stations(stations);
  std::array<std::vector<std::size_t>, kAllRegions.size()> members;
  for (std::size_t k = 0; k < old_attrs.size(); ++k) {
    members[static_cast<std::size_t>(detail::region_of(index, old_attrs[k].station_id))].push_back(k);
  }

  std::vector<AnovaResult> out;
  for (Region region : kAllRegions) {
    const auto& idx = members[static_cast<std::size_t>(region)];
    for (Attribute attr : kAllAttributes) {
      AnovaResult row{region, attr};
      row.n_pairs = idx.size();
      if (idx.size() < 2) {
        row.insufficient_data = true;
        row.f_stat = std::numeric_limits<double>::quiet_NaN();
        row.p_value = std::numeric_limits<double>::quiet_NaN();
        out.push_back(row);
        continue;
      }
      std::vector<double> a, b;
      for (std::size_t k : idx) {
        a.push_back(old_attrs[k].value(attr));
        b.push_back(new_attrs[k].value(attr));
      }
      AnovaCore core;
      try {
        core = one_way_anova(a, b);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(region_name(region)) + " / " + std::string(attribute_name(attr)) + ": " +
                                  e.what());
      }
      row.f_stat = core.f_stat;
      row.df_between = core.df_between;
      row.df_within = core.df_within;
      row.p_value = core.p_value;
      row.significant = core.p_value < alpha;
      out.push_back(row);
    }
  }
  return out;
}

/// p rendered with 4 decimals; anything that would round to zero prints
/// as "<0.0001".
inline std::string format_p_value(double p) {
  if (p < 0.00005) return "<0.0001";
  return text::format_fixed(p, 4);
}

inline std::string serialize_significance(const std::vector<AnovaResult>& rows) {
  std::string out = "region,attribute,f_stat,df_between,df_within,p_value,significant\n";
  for (const auto& r : rows) {
    out += std::string(region_name(r.region)) + ',' + std::string(attribute_name(r.attribute)) + ',';
    if (r.insufficient_data) {
      out += "NA,NA,NA,NA,insufficient_data\n";
      continue;
    }
    out += text::format_fixed(r.f_stat, 4) + ',' + std::to_string(r.df_between) + ',' + std::to_string(r.df_within) +
           ',' + format_p_value(r.p_value) + ',' + (r.significant ? "true" : "false") + '\n';
  }
  return out;
}

struct RegionSummary {
  Region region{};
  TimeWindow window;
  Attribute attribute{};
  double mean = 0.0;
  std::size_t count = 0;
  double std_dev = 0.0;  // sample (n - 1); 0 for a single station
};

inline std::vector<RegionSummary> region_summary(const std::vector<ClimateAttributes>& attrs,
                                                 const std::vector<StationRecord>& stations,
                                                 const TimeWindow& window, Attribute attribute) {
  const auto index = detail::index_stations(stations);
  std::array<std::vector<double>, kAllRegions.size()> values;
  for (const auto& a : attrs) {
    if (a.window != window) continue;
    values[static_cast<std::size_t>(detail::region_of(index, a.station_id))].push_back(a.value(attribute));
  }
  std::vector<RegionSummary> out;
  for (Region region : kAllRegions) {
    const auto& v = values[static_cast<std::size_t>(region)];
    if (v.empty()) continue;
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    out.push_back({region, window, attribute, mean, v.size(), sd});
  }
  return out;
}

inline std::string serialize_region_summaries(const std::vector<RegionSummary>& rows) {
  std::string out = "region,window,attribute,mean,count,std_dev\n";
  for (const auto& r : rows) {
    out += std::string(region_name(r.region)) + ',' + r.window.label + ',' + std::string(attribute_name(r.attribute)) +
           ',' + text::format_fixed(r.mean, 4) + ',' + std::to_string(r.count) + ',' +
           text::format_fixed(r.std_dev, 4) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::string attribute;
  TimeWindow window;
  std::vector<double> bin_edges;   // ascending
  std::vector<std::size_t> counts;  // bin_edges.size() - 1
  std::vector<double> shares;      // counts / total
};

/// Half-open bins [origin + k*width, origin + (k+1)*width) spanning the
/// smallest to the largest value.
inline Histogram histogram(std::span<const double> values, double bin_width, double origin = 0.0) {
  if (values.empty()) throw Error(ErrorCode::EmptyValues, "histogram of no values");
  if (!(bin_width > 0.0) || !std::isfinite(bin_width) || !std::isfinite(origin)) {
    throw Error(ErrorCode::InvalidArgument, "histogram bin width must be finite and > 0");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite histogram value");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  auto edge = [&](long long k) { return origin + static_cast<double>(k) * bin_width; };
  auto bin_of = [&](double v) {
    auto k = static_cast<long long>(std::floor((v - origin) / bin_width));
    while (edge(k) > v) --k;
    while (edge(k + 1) <= v) ++k;
    return k;
  };
  const long long first = bin_of(*lo_it);
  const long long last = bin_of(*hi_it);

  Histogram h;
  for (long long k = first; k <= last + 1; ++k) h.bin_edges.push_back(edge(k));
  h.counts.assign(static_cast<std::size_t>(last - first + 1), 0);
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_of(v) - first)];
  for (std::size_t c : h.counts) h.shares.push_back(static_cast<double>(c) / static_cast<double>(values.size()));
  return h;
}

inline std::string serialize_histograms(const std::vector<Histogram>& hists) {
  std::string out = "attribute,window,bin_lo,bin_hi,count,share\n";
  for (const auto& h : hists) {
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out += h.attribute + ',' + h.window.label + ',' + text::format_shortest(h.bin_edges[k]) + ',' +
             text::format_shortest(h.bin_edges[k + 1]) + ',' + std::to_string(h.counts[k]) + ',' +
             text::format_fixed(h.shares[k], 6) + '\n';
    }
  }
  return out;
}

}  // namespace climsev
