#pragma once

// Isopleth extraction from a RasterGrid by marching squares.
//
// The contouring lattice has its corners at raster cell centers. A corner is
// "above" a level when its value is >= the level. Crossing points are placed
// by linear interpolation along lattice edges, always measured from the
// edge's first corner (west or north) so that neighbouring lattice cells
// produce the same vertex. Saddles are split by comparing the mean of the
// four corners with the level.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "climsev/attributes.hpp"
#include "climsev/error.hpp"
#include "climsev/interpolate.hpp"
#include "climsev/text.hpp"

namespace climsev {

using Polyline = std::vector<GeoPoint>;

struct ContourSet {
  std::string attribute;
  double level = 0.0;
  std::vector<Polyline> lines;  // closed loops repeat their first vertex
};

namespace detail {

struct LatticeEdge {
  std::uint64_t id;
  GeoPoint at;
};

class LevelTracer {
 public:
  LevelTracer(const RasterGrid& grid, double level) : g_(grid), level_(level) {}

  std::vector<Polyline> trace() {
    for (std::size_t r = 0; r + 1 < g_.nrows; ++r) {
      for (std::size_t c = 0; c + 1 < g_.ncols; ++c) march_cell(r, c);
    }
    return stitch();
  }

 private:
  // Edge ids: horizontal edge from (r,c) east to (r,c+1) is even, vertical
  // edge from (r,c) south to (r+1,c) is odd.
  [[nodiscard]] std::uint64_t h_id(std::size_t r, std::size_t c) const { return 2 * (r * g_.ncols + c); }
  [[nodiscard]] std::uint64_t v_id(std::size_t r, std::size_t c) const { return 2 * (r * g_.ncols + c) + 1; }

  std::uint64_t crossing(std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1, bool horizontal) {
    const std::uint64_t id = horizontal ? h_id(r0, c0) : v_id(r0, c0);
    if (vertices_.count(id)) return id;
    const double v0 = g_.at(r0, c0);
    const double v1 = g_.at(r1, c1);
    const double t = (level_ - v0) / (v1 - v0);
    const GeoPoint p0 = g_.cell_center(r0, c0);
    const GeoPoint p1 = g_.cell_center(r1, c1);
    vertices_.emplace(id, GeoPoint{p0.lon + t * (p1.lon - p0.lon), p0.lat + t * (p1.lat - p0.lat)});
    return id;
  }

  void add_segment(std::uint64_t a, std::uint64_t b) {
    const std::size_t idx = segments_.size();
    segments_.push_back({std::min(a, b), std::max(a, b)});
    incident_[a].push_back(idx);
    incident_[b].push_back(idx);
  }

  void march_cell(std::size_t r, std::size_t c) {
    const double tl = g_.at(r, c), tr = g_.at(r, c + 1);
    const double br = g_.at(r + 1, c + 1), bl = g_.at(r + 1, c);
    if (RasterGrid::is_nodata(tl) || RasterGrid::is_nodata(tr) || RasterGrid::is_nodata(br) ||
        RasterGrid::is_nodata(bl)) {
      return;
    }
    const int code = (tl >= level_ ? 8 : 0) | (tr >= level_ ? 4 : 0) | (br >= level_ ? 2 : 0) | (bl >= level_ ? 1 : 0);
    if (code == 0 || code == 15) return;

    auto top = [&] { return crossing(r, c, r, c + 1, true); };
    auto bottom = [&] { return crossing(r + 1, c, r + 1, c + 1, true); };
    auto left = [&] { return crossing(r, c, r + 1, c, false); };
    auto right = [&] { return crossing(r, c + 1, r + 1, c + 1, false); };

    if (code == 5 || code == 10) {
      const bool center_above = (tl + tr + br + bl) / 4.0 >= level_;
      // Which diagonal pair gets isolated: the pair on the side the center is not.
      const bool isolate_tr_bl = (code == 10) == center_above;
      if (isolate_tr_bl) {
        add_segment(top(), right());
        add_segment(bottom(), left());
      } else {
        add_segment(left(), top());
        add_segment(right(), bottom());
      }
      return;
    }

    // Exactly two crossed edges otherwise.
    std::array<std::uint64_t, 2> ends{};
    int n = 0;
    const bool a_tl = code & 8, a_tr = code & 4, a_br = code & 2, a_bl = code & 1;
    if (a_tl != a_tr) ends[n++] = top();
    if (a_tr != a_br) ends[n++] = right();
    if (a_bl != a_br) ends[n++] = bottom();
    if (a_tl != a_bl) ends[n++] = left();
    add_segment(ends[0], ends[1]);
  }

  std::vector<Polyline> stitch() {
    std::vector<bool> used(segments_.size(), false);
    std::vector<Polyline> lines;

    auto walk = [&](std::uint64_t start, std::size_t first_segment) {
      Polyline line{vertices_.at(start)};
      std::uint64_t cur = start;
      std::size_t seg = first_segment;
      while (true) {
        used[seg] = true;
        cur = segments_[seg].first == cur ? segments_[seg].second : segments_[seg].first;
        line.push_back(vertices_.at(cur));
        std::size_t next = segments_.size();
        for (std::size_t s : incident_.at(cur)) {
          if (!used[s]) {
            next = s;
            break;
          }
        }
        if (next == segments_.size()) break;
        seg = next;
      }
      lines.push_back(std::move(line));
    };

    // Open chains start at their smaller dangling end.
    std::vector<std::uint64_t> dangling;
    for (const auto& [id, segs] : incident_) {
      if (segs.size() == 1) dangling.push_back(id);
    }
    std::sort(dangling.begin(), dangling.end());
    for (std::uint64_t id : dangling) {
      const std::size_t seg = incident_.at(id).front();
      if (!used[seg]) walk(id, seg);
    }
    // Whatever is left forms closed loops.
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      if (!used[s]) walk(segments_[s].first, s);
    }
    return lines;
  }

  const RasterGrid& g_;
  double level_;
  std::unordered_map<std::uint64_t, GeoPoint> vertices_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> segments_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident_;
};

}  // namespace detail

inline std::vector<ContourSet> extract_contours(const RasterGrid& grid, std::span<const double> levels,
                                                const std::string& attribute = {}) {
  if (grid.nrows < 2 || grid.ncols < 2) {
    throw Error(ErrorCode::GridTooSmall, "contouring needs at least 2 rows and 2 columns, got " +
                                             std::to_string(grid.nrows) + "x" + std::to_string(grid.ncols));
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i]) || (i > 0 && !(levels[i] > levels[i - 1]))) {
      throw Error(ErrorCode::NonMonotoneLevels, "contour levels must be finite and strictly increasing");
    }
  }
  std::vector<ContourSet> out;
  out.reserve(levels.size());
  for (double level : levels) {
    out.push_back({attribute, level, detail::LevelTracer(grid, level).trace()});
  }
  return out;
}

/// Default levels. Freeze index and freeze-thaw cycles use fixed anchors;
/// temperature (every 5 F) and precipitation (every 10 in) are generated
/// over [lo, hi].
inline std::vector<double> default_levels(Attribute attribute, double lo, double hi) {
  switch (attribute) {
    case Attribute::FreezeIndex: return {100, 250, 500, 1000, 1500, 2000, 2500};
    case Attribute::FreezeThawCycles: return {50, 100, 118, 150, 200};
    case Attribute::Temperature:
    case Attribute::Precipitation: {
      const double step = attribute == Attribute::Temperature ? 5.0 : 10.0;
      std::vector<double> out;
      if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) return out;
      for (double v = std::ceil(lo / step) * step; v <= hi; v += step) out.push_back(v);
      return out;
    }
  }
  return {};
}

inline std::vector<double> default_levels(Attribute attribute, const RasterGrid& grid) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : grid.values) {
    if (RasterGrid::is_nodata(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return default_levels(attribute, lo, hi);
}

/// FeatureCollection with one LineString per polyline, 6-decimal coordinates.
inline std::string write_contours_geojson(const std::vector<ContourSet>& sets) {
  std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
  bool first = true;
  for (const auto& set : sets) {
    for (const auto& line : set.lines) {
      out += first ? "\n" : ",\n";
      first = false;
      out += "{\"type\":\"Feature\",\"properties\":{\"attribute\":\"" + set.attribute +
             "\",\"level\":" + text::format_shortest(set.level) +
             "},\"geometry\":{\"type\":\"LineString\",\"coordinates\":[";
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (i) out.push_back(',');
        out += '[' + text::format_fixed(line[i].lon, 6) + ',' + text::format_fixed(line[i].lat, 6) + ']';
      }
      out += "]}}";
    }
  }
  out += first ? "]}\n" : "\n]}\n";
  return out;
}

}  // namespace climsev
