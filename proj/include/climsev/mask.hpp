#pragma once

// Polygon masks read from GeoJSON, used to clip raster fill to land.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "climsev/error.hpp"

namespace climsev {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

using Ring = std::vector<GeoPoint>;

/// Even-odd crossing test against one ring. Closing vertex optional.
inline bool ring_crossings_odd(const Ring& ring, const GeoPoint& p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

struct Polygon {
  std::vector<Ring> rings;  // outer ring first, then holes

  [[nodiscard]] bool contains(const GeoPoint& p) const {
    bool inside = false;
    for (const auto& ring : rings) {
      if (ring.size() >= 3 && ring_crossings_odd(ring, p)) inside = !inside;
    }
    return inside;
  }
};

struct MultiPolygon {
  std::vector<Polygon> polygons;

  [[nodiscard]] bool contains(const GeoPoint& p) const {
    for (const auto& poly : polygons) {
      if (poly.contains(p)) return true;
    }
    return false;
  }
};

namespace detail {

inline Polygon polygon_from_json(const nlohmann::json& coords) {
  Polygon poly;
  for (const auto& ring_json : coords) {
    Ring ring;
    for (const auto& pt : ring_json) {
      if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw Error(ErrorCode::MalformedMask, "polygon vertex is not a [lon, lat] pair");
      }
      ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    poly.rings.push_back(std::move(ring));
  }
  return poly;
}

inline void collect_geometry(const nlohmann::json& g, MultiPolygon& out) {
  if (!g.is_object() || !g.contains("type")) throw Error(ErrorCode::MalformedMask, "GeoJSON object without a type");
  const std::string type = g.at("type").get<std::string>();
  if (type == "FeatureCollection") {
    for (const auto& f : g.at("features")) collect_geometry(f, out);
  } else if (type == "Feature") {
    if (!g.at("geometry").is_null()) collect_geometry(g.at("geometry"), out);
  } else if (type == "MultiPolygon") {
    for (const auto& poly : g.at("coordinates")) out.polygons.push_back(polygon_from_json(poly));
  } else if (type == "Polygon") {
    out.polygons.push_back(polygon_from_json(g.at("coordinates")));
  } else {
    throw Error(ErrorCode::MalformedMask, "unsupported geometry type '" + type + "'");
  }
}

}  // namespace detail

/// Accepts a MultiPolygon or Polygon geometry, a Feature, or a
/// FeatureCollection of those.
inline MultiPolygon parse_mask_geojson(std::string_view doc) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedMask, e.what());
  }
  MultiPolygon out;
  try {
    detail::collect_geometry(j, out);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedMask, e.what());
  }
  if (out.polygons.empty()) throw Error(ErrorCode::MalformedMask, "mask contains no polygons");
  return out;
}

}  // namespace climsev
