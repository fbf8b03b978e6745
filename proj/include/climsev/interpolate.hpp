#pragma once

// Great-circle distance, inverse-distance-weighted prediction, raster fill
// and cross-window nearest-station matching.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "climsev/error.hpp"
#include "climsev/ingest.hpp"
#include "climsev/mask.hpp"
#include "climsev/text.hpp"

namespace climsev {

inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kCoincidentKm = 1e-9;
inline constexpr double kDefaultIdwPower = 2.0;
inline constexpr double kNodata = -9999.0;

struct SamplePoint {
  double longitude = 0.0;
  double latitude = 0.0;
  double value = 0.0;
};

inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  double h = s * s + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * t * t;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

/// Weighted mean with weights 1/d^power. Any distance below the coincident
/// threshold returns that sample's value. The result is clamped to the
/// sample range so rounding cannot push it outside.
inline double idw_from_distances(std::span<const double> distances_km, std::span<const double> values,
                                 double power = kDefaultIdwPower) {
  if (values.empty() || distances_km.size() != values.size()) {
    throw Error(ErrorCode::EmptySamples, "IDW needs at least one sample with a matching distance");
  }
  if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "IDW power must be > 0");
  double num = 0.0;
  double den = 0.0;
  double lo = values[0];
  double hi = values[0];
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (distances_km[j] < kCoincidentKm) return values[j];
    const double w = 1.0 / std::pow(distances_km[j], power);
    num += w * values[j];
    den += w;
    lo = std::min(lo, values[j]);
    hi = std::max(hi, values[j]);
  }
  return std::clamp(num / den, lo, hi);
}

inline double idw_predict(const GeoPoint& target, std::span<const SamplePoint> samples,
                          double power = kDefaultIdwPower) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "IDW prediction with no samples");
  if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "IDW power must be > 0");
  double num = 0.0;
  double den = 0.0;
  double lo = samples[0].value;
  double hi = samples[0].value;
  for (const auto& s : samples) {
    const double d = haversine_km(target, {s.longitude, s.latitude});
    if (d < kCoincidentKm) return s.value;
    const double w = 1.0 / std::pow(d, power);
    num += w * s.value;
    den += w;
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  return std::clamp(num / den, lo, hi);
}

struct GridSpec {
  double lon_min = -125.0;
  double lon_max = -66.5;
  double lat_min = 24.0;
  double lat_max = 49.5;
  double cell_deg = 0.1;

  /// Cells needed to cover a span; an exact multiple (up to rounding noise)
  /// does not gain an extra column.
  static std::size_t cells_for(double span, double cell) {
    const double n = span / cell;
    const double r = std::round(n);
    return static_cast<std::size_t>(std::abs(n - r) < 1e-9 * std::max(1.0, r) ? r : std::ceil(n));
  }
  [[nodiscard]] std::size_t ncols() const { return cells_for(lon_max - lon_min, cell_deg); }
  [[nodiscard]] std::size_t nrows() const { return cells_for(lat_max - lat_min, cell_deg); }

  void validate() const {
    if (!(cell_deg > 0.0) || !std::isfinite(cell_deg)) throw Error(ErrorCode::InvalidGrid, "cell size must be > 0");
    if (!(lon_min < lon_max) || !(lat_min < lat_max)) throw Error(ErrorCode::InvalidGrid, "empty grid extent");
    if ((lon_max - lon_min) / cell_deg < 1.0 - 1e-9 || (lat_max - lat_min) / cell_deg < 1.0 - 1e-9) {
      throw Error(ErrorCode::InvalidGrid, "grid extent smaller than one cell");
    }
  }
};

/// Row-major raster; row 0 is the northernmost row. The lower-left corner
/// sits at (lon_min, lat_min).
struct RasterGrid {
  GridSpec spec;
  std::size_t nrows = 0;
  std::size_t ncols = 0;
  std::vector<double> values;

  static RasterGrid filled(const GridSpec& spec, double value) {
    spec.validate();
    RasterGrid g{spec, spec.nrows(), spec.ncols(), {}};
    g.values.assign(g.nrows * g.ncols, value);
    return g;
  }

  [[nodiscard]] double at(std::size_t row, std::size_t col) const { return values[row * ncols + col]; }
  double& at(std::size_t row, std::size_t col) { return values[row * ncols + col]; }
  [[nodiscard]] static bool is_nodata(double v) { return v == kNodata; }

  [[nodiscard]] GeoPoint cell_center(std::size_t row, std::size_t col) const {
    return {spec.lon_min + (static_cast<double>(col) + 0.5) * spec.cell_deg,
            spec.lat_min + (static_cast<double>(nrows - row) - 0.5) * spec.cell_deg};
  }
};

inline std::vector<SamplePoint> finite_samples(std::span<const SamplePoint> samples) {
  std::vector<SamplePoint> out(samples.begin(), samples.end());
  for (const auto& s : out) {
    if (!std::isfinite(s.value) || !std::isfinite(s.longitude) || !std::isfinite(s.latitude)) {
      throw Error(ErrorCode::InvalidArgument, "sample with non-finite value or coordinate");
    }
  }
  return out;
}

/// IDW at every cell center. Cells outside `mask` (when given) hold nodata.
/// Each cell is computed independently with a fixed summation order, so the
/// result is bit-identical for any `threads` value (0 = hardware concurrency).
inline RasterGrid idw_grid(std::span<const SamplePoint> samples, const GridSpec& spec,
                           double power = kDefaultIdwPower, const MultiPolygon* mask = nullptr,
                           unsigned threads = 1) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "grid interpolation with no samples");
  if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "IDW power must be > 0");
  const auto pts = finite_samples(samples);
  RasterGrid grid = RasterGrid::filled(spec, kNodata);

  auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t r = row_begin; r < row_end; ++r) {
      for (std::size_t c = 0; c < grid.ncols; ++c) {
        const GeoPoint center = grid.cell_center(r, c);
        if (mask && !mask->contains(center)) continue;
        grid.at(r, c) = idw_predict(center, pts, power);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.nrows));
  if (threads <= 1) {
    fill_rows(0, grid.nrows);
    return grid;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (grid.nrows + threads - 1) / threads;
  for (std::size_t begin = 0; begin < grid.nrows; begin += chunk) {
    workers.emplace_back(fill_rows, begin, std::min(grid.nrows, begin + chunk));
  }
  workers.clear();  // joins
  return grid;
}

struct StationPairing {
  std::string new_station_id;
  std::string old_station_id;
  double separation_km = 0.0;
};

/// Pairs every old station with its nearest new station (ties go to the
/// lexicographically smallest new id). Output follows the old-station order.
inline std::vector<StationPairing> nearest_neighbor_match(const std::vector<StationRecord>& new_stations,
                                                          const std::vector<StationRecord>& old_stations) {
  if (new_stations.empty() || old_stations.empty()) {
    throw Error(ErrorCode::EmptyStationList, "nearest-neighbour matching needs non-empty station lists");
  }
  std::vector<StationPairing> out;
  out.reserve(old_stations.size());
  for (const auto& old : old_stations) {
    const StationRecord* best = nullptr;
    double best_d = 0.0;
    for (const auto& cand : new_stations) {
      const double d = haversine_km({old.longitude, old.latitude}, {cand.longitude, cand.latitude});
      if (!best || d < best_d || (d == best_d && cand.station_id < best->station_id)) {
        best = &cand;
        best_d = d;
      }
    }
    out.push_back({best->station_id, old.station_id, best_d});
  }
  return out;
}

inline std::string serialize_pairings(const std::vector<StationPairing>& pairs) {
  std::string out = "new_station_id,old_station_id,separation_km\n";
  for (const auto& p : pairs) {
    out += text::csv_escape(p.new_station_id) + ',' + text::csv_escape(p.old_station_id) + ',' +
           text::format_fixed(p.separation_km, 4) + '\n';
  }
  return out;
}

}  // namespace climsev
