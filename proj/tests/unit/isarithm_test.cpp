#include "climsev/isarithm.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <map>
#include <random>
#include <set>

namespace climsev {
namespace {

RasterGrid make_grid(const std::vector<std::vector<double>>& rows, double cell = 1.0) {
  const double lon_min = -100.0, lat_min = 40.0;
  GridSpec spec{lon_min, lon_min + cell * rows[0].size(), lat_min, lat_min + cell * rows.size(), cell};
  RasterGrid g{spec, rows.size(), rows[0].size(), {}};
  for (const auto& r : rows) g.values.insert(g.values.end(), r.begin(), r.end());
  return g;
}

RasterGrid random_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 9);
  std::normal_distribution<double> val(0.0, 10.0);
  std::vector<std::vector<double>> rows(dim(rng));
  const int ncols = dim(rng);
  for (auto& r : rows) {
    for (int c = 0; c < ncols; ++c) r.push_back(val(rng));
  }
  return make_grid(rows, 0.25);
}

RasterGrid negated(RasterGrid g) {
  for (double& v : g.values) v = -v;
  return g;
}

struct EdgeCrossing {
  double v0, v1, t;
};

/// Locates the lattice edge a vertex lies on, if any.
std::optional<EdgeCrossing> locate(const RasterGrid& g, const GeoPoint& p) {
  const double cell = g.spec.cell_deg;
  const double fc = (p.lon - (g.spec.lon_min + 0.5 * cell)) / cell;
  const double fr = ((g.spec.lat_min + (g.nrows - 0.5) * cell) - p.lat) / cell;
  if (std::abs(fr - std::round(fr)) < 1e-9) {
    const auto r = static_cast<std::size_t>(std::round(fr));
    const auto c = std::min<std::size_t>(static_cast<std::size_t>(std::floor(fc + 1e-12)), g.ncols - 2);
    return EdgeCrossing{g.at(r, c), g.at(r, c + 1), fc - c};
  }
  if (std::abs(fc - std::round(fc)) < 1e-9) {
    const auto c = static_cast<std::size_t>(std::round(fc));
    const auto r = std::min<std::size_t>(static_cast<std::size_t>(std::floor(fr + 1e-12)), g.nrows - 2);
    return EdgeCrossing{g.at(r, c), g.at(r + 1, c), fr - r};
  }
  return std::nullopt;
}

TEST(ExtractContours, ConstantGridHasNoLines) {
  auto g = make_grid({{5, 5, 5}, {5, 5, 5}, {5, 5, 5}});
  const std::vector<double> levels = {10};
  auto sets = extract_contours(g, levels);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_TRUE(sets[0].lines.empty());
}

TEST(ExtractContours, GradientCellCrossesAtInterpolatedLatitude) {
  auto g = make_grid({{0, 0}, {10, 10}});
  const std::vector<double> levels = {5};
  auto sets = extract_contours(g, levels);
  ASSERT_EQ(sets[0].lines.size(), 1u);
  const auto& line = sets[0].lines[0];
  ASSERT_EQ(line.size(), 2u);
  // Row centers sit at 41.5 (north) and 40.5; t = (5 - 0) / (10 - 0).
  const double expected_lat = 41.5 + 0.5 * (40.5 - 41.5);
  for (const auto& v : line) EXPECT_NEAR(v.lat, expected_lat, 1e-9 * g.spec.cell_deg);
  EXPECT_DOUBLE_EQ(line[0].lon, -99.5);
  EXPECT_DOUBLE_EQ(line[1].lon, -98.5);
}

TEST(ExtractContours, RadialBumpGivesOneClosedLoop) {
  auto g = make_grid({{0, 0, 0}, {0, 10, 0}, {0, 0, 0}});
  const std::vector<double> levels = {5};
  auto sets = extract_contours(g, levels);
  ASSERT_EQ(sets[0].lines.size(), 1u);
  const auto& loop = sets[0].lines[0];
  ASSERT_EQ(loop.size(), 5u);
  EXPECT_DOUBLE_EQ(loop.front().lon, loop.back().lon);
  EXPECT_DOUBLE_EQ(loop.front().lat, loop.back().lat);

  // Every lattice edge whose end values bracket the level, enumerated directly.
  std::set<std::pair<double, double>> expected;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      auto p0 = g.cell_center(r, c);
      if (c + 1 < 3 && (g.at(r, c) >= 5) != (g.at(r, c + 1) >= 5)) {
        expected.insert({p0.lon + 0.5 * g.spec.cell_deg, p0.lat});
      }
      if (r + 1 < 3 && (g.at(r, c) >= 5) != (g.at(r + 1, c) >= 5)) {
        expected.insert({p0.lon, p0.lat - 0.5 * g.spec.cell_deg});
      }
    }
  }
  std::set<std::pair<double, double>> got;
  for (std::size_t i = 0; i + 1 < loop.size(); ++i) got.insert({loop[i].lon, loop[i].lat});
  EXPECT_EQ(got, expected);
}

TEST(ExtractContours, SaddleUsesCenterAverage) {
  // tl and br high. Mean 5.5 >= 5 joins the high corners, isolating tr and bl.
  auto hi_center = make_grid({{10, 0}, {2, 10}});
  const std::vector<double> levels = {5};
  auto sets = extract_contours(hi_center, levels);
  ASSERT_EQ(sets[0].lines.size(), 2u);
  for (const auto& line : sets[0].lines) {
    // Each segment stays next to one low corner: tr (-98.5, 41.5) or bl (-99.5, 40.5).
    const double mid_lon = 0.5 * (line[0].lon + line[1].lon);
    const double mid_lat = 0.5 * (line[0].lat + line[1].lat);
    const bool near_tr = mid_lon > -99.0 && mid_lat > 41.0;
    const bool near_bl = mid_lon < -99.0 && mid_lat < 41.0;
    EXPECT_TRUE(near_tr || near_bl);
  }
  // Mean 3.0 < 5 isolates the high corners instead.
  auto lo_center = make_grid({{10, 0}, {2, 0.0}});
  lo_center.at(1, 1) = 6.0;
  lo_center.at(0, 0) = 6.0;
  sets = extract_contours(lo_center, levels);
  ASSERT_EQ(sets[0].lines.size(), 2u);
  for (const auto& line : sets[0].lines) {
    const double mid_lon = 0.5 * (line[0].lon + line[1].lon);
    const double mid_lat = 0.5 * (line[0].lat + line[1].lat);
    const bool near_tl = mid_lon < -99.0 && mid_lat > 41.0;
    const bool near_br = mid_lon > -99.0 && mid_lat < 41.0;
    EXPECT_TRUE(near_tl || near_br);
  }
}

TEST(ExtractContours, NodataCellsEmitNothing) {
  auto g = make_grid({{0, 10, 0}, {0, 10, kNodata}});
  const std::vector<double> levels = {5};
  auto sets = extract_contours(g, levels);
  // Only the western cell is complete; it yields one open segment.
  ASSERT_EQ(sets[0].lines.size(), 1u);
  for (const auto& v : sets[0].lines[0]) EXPECT_LT(v.lon, -98.5 + 1e-12);
}

TEST(ExtractContours, Errors) {
  const std::vector<double> levels = {1};
  try {
    extract_contours(make_grid({{1, 2, 3}}), levels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooSmall);
  }
  const std::vector<double> bad = {2, 1};
  try {
    extract_contours(make_grid({{1, 2}, {3, 4}}), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotoneLevels);
  }
  const std::vector<double> repeated = {1, 1};
  EXPECT_THROW(extract_contours(make_grid({{1, 2}, {3, 4}}), repeated), Error);
}

TEST(ExtractContours, NegationSymmetry) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> lvl(0.0, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_grid(rng);
    const std::vector<double> levels = {lvl(rng)};
    const std::vector<double> neg_levels = {-levels[0]};
    const auto a = extract_contours(g, levels);
    const auto b = extract_contours(negated(g), neg_levels);
    ASSERT_EQ(a[0].lines.size(), b[0].lines.size());
    for (std::size_t i = 0; i < a[0].lines.size(); ++i) {
      ASSERT_EQ(a[0].lines[i].size(), b[0].lines[i].size());
      for (std::size_t k = 0; k < a[0].lines[i].size(); ++k) {
        EXPECT_EQ(a[0].lines[i][k].lon, b[0].lines[i][k].lon);
        EXPECT_EQ(a[0].lines[i][k].lat, b[0].lines[i][k].lat);
      }
    }
  }
}

TEST(ExtractContours, VerticesBracketAndInterpolate) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_grid(rng);
    const std::vector<double> levels = {-10, -2.5, 0, 4, 12};
    for (const auto& set : extract_contours(g, levels)) {
      std::map<std::pair<double, double>, int> uses;
      for (const auto& line : set.lines) {
        ASSERT_GE(line.size(), 2u);
        const bool closed = line.front().lon == line.back().lon && line.front().lat == line.back().lat;
        for (std::size_t k = 0; k < line.size(); ++k) {
          const auto& v = line[k];
          EXPECT_GE(v.lon, g.spec.lon_min);
          EXPECT_LE(v.lon, g.spec.lon_max);
          EXPECT_GE(v.lat, g.spec.lat_min);
          EXPECT_LE(v.lat, g.spec.lat_max);
          auto edge = locate(g, v);
          ASSERT_TRUE(edge);
          EXPECT_LE(std::min(edge->v0, edge->v1), set.level);
          EXPECT_GE(std::max(edge->v0, edge->v1), set.level);
          EXPECT_NEAR(edge->t, (set.level - edge->v0) / (edge->v1 - edge->v0), 1e-9);
          if (!(closed && k + 1 == line.size())) ++uses[{v.lon, v.lat}];
        }
      }
      // One crossing per edge: no vertex is shared between or within lines.
      for (const auto& [pt, n] : uses) EXPECT_EQ(n, 1);
    }
  }
}

TEST(DefaultLevels, AnchoredAndRangeBased) {
  EXPECT_EQ(default_levels(Attribute::FreezeIndex, 0, 1), (std::vector<double>{100, 250, 500, 1000, 1500, 2000, 2500}));
  EXPECT_EQ(default_levels(Attribute::FreezeThawCycles, 0, 1), (std::vector<double>{50, 100, 118, 150, 200}));
  EXPECT_EQ(default_levels(Attribute::Temperature, 41.2, 55.0), (std::vector<double>{45, 50, 55}));
  EXPECT_EQ(default_levels(Attribute::Precipitation, 7.0, 31.0), (std::vector<double>{10, 20, 30}));
}

TEST(ContourGeoJson, EmptyAndPopulated) {
  EXPECT_EQ(write_contours_geojson({}), "{\"type\":\"FeatureCollection\",\"features\":[]}\n");
  ContourSet set{"freeze_index", 2500, {{{-93.5, 47.25}, {-93.0, 47.123456789}}}};
  const std::string doc = write_contours_geojson({set});
  EXPECT_NE(doc.find("[-93.000000,47.123457]"), std::string::npos);
  auto j = nlohmann::json::parse(doc);
  ASSERT_EQ(j["features"].size(), 1u);
  EXPECT_EQ(j["features"][0]["properties"]["attribute"], "freeze_index");
  EXPECT_EQ(j["features"][0]["properties"]["level"], 2500);
  EXPECT_EQ(j["features"][0]["geometry"]["type"], "LineString");
}

}  // namespace
}  // namespace climsev
