#pragma once

// End-to-end commands behind the `climsev` CLI.
//
// Output layout under the run's output directory:
//   attributes/attributes_<window>.csv, attributes/exclusions_<window>.csv
//   rasters/<attribute>_<window>.asc
//   contours/<attribute>_<window>.geojson
//   reports/{pairing,significance,summary,histogram}_<old>_<new>.csv

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "climsev/attributes.hpp"
#include "climsev/error.hpp"
#include "climsev/ingest.hpp"
#include "climsev/interpolate.hpp"
#include "climsev/isarithm.hpp"
#include "climsev/mask.hpp"
#include "climsev/raster_io.hpp"
#include "climsev/regions_stats.hpp"
#include "climsev/text.hpp"

namespace climsev {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

/// Everything a run depends on. Loaded from a flat `key = value` file;
/// command-line flags override individual fields afterwards.
///
/// Keys: stations, normals.<window>, out, power, cell_deg, lon_min, lon_max,
/// lat_min, lat_max, mask, alpha, parallel, levels.<attribute>,
/// bin_width.<attribute>, compare.old, compare.new
struct RunConfig {
  std::optional<fs::path> stations;
  std::map<std::string, fs::path> normals;  // window label -> path
  fs::path out = "out";
  GridSpec grid;
  double power = kDefaultIdwPower;
  std::map<Attribute, std::vector<double>> levels;
  std::map<Attribute, double> bin_width = {{Attribute::FreezeIndex, 100.0},
                                           {Attribute::FreezeThawCycles, 10.0},
                                           {Attribute::Precipitation, 5.0},
                                           {Attribute::Temperature, 2.0}};
  std::optional<fs::path> mask;
  double alpha = kDefaultAlpha;
  unsigned parallel = 1;  // 0 = hardware concurrency
  std::optional<std::string> compare_old;
  std::optional<std::string> compare_new;

  [[nodiscard]] fs::path attributes_path(const std::string& window) const {
    return out / "attributes" / ("attributes_" + window + ".csv");
  }
  [[nodiscard]] fs::path exclusions_path(const std::string& window) const {
    return out / "attributes" / ("exclusions_" + window + ".csv");
  }
  [[nodiscard]] fs::path raster_path(Attribute a, const std::string& window) const {
    return out / "rasters" / (std::string(attribute_name(a)) + "_" + window + ".asc");
  }
  [[nodiscard]] fs::path report_path(std::string_view kind, const std::string& old_w,
                                     const std::string& new_w) const {
    return out / "reports" / (std::string(kind) + "_" + old_w + "_" + new_w + ".csv");
  }

  void validate() const {
    grid.validate();
    if (!(power > 0.0)) throw Error(ErrorCode::InvalidArgument, "power must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
    for (const auto& [attr, lv] : levels) {
      for (std::size_t i = 0; i < lv.size(); ++i) {
        if (!std::isfinite(lv[i]) || (i && !(lv[i] > lv[i - 1]))) {
          throw Error(ErrorCode::NonMonotoneLevels,
                      "levels for " + std::string(attribute_name(attr)) + " must be strictly increasing");
        }
      }
    }
    for (const auto& [attr, w] : bin_width) {
      if (!(w > 0.0)) throw Error(ErrorCode::InvalidArgument, "bin width must be > 0");
    }
    auto must_exist = [](const fs::path& p) {
      if (!fs::exists(p)) throw Error(ErrorCode::Io, "file not found: '" + p.string() + "'");
    };
    if (stations) must_exist(*stations);
    for (const auto& [w, p] : normals) must_exist(p);
    if (mask) must_exist(*mask);
  }
};

inline std::vector<double> parse_number_list(std::string_view s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    auto v = text::parse_double(s.substr(pos, comma - pos));
    if (!v) throw Error(ErrorCode::InvalidArgument, "not a number list: '" + std::string(s) + "'");
    out.push_back(*v);
    pos = comma + 1;
  }
  return out;
}

/// Relative paths in the file resolve against the file's directory.
inline RunConfig parse_config(std::string_view doc, const fs::path& base_dir = {}) {
  RunConfig cfg;
  auto resolve = [&](std::string_view v) {
    fs::path p{std::string(v)};
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  const auto lines = text::split_lines(doc);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(i + 1);
    if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidArgument, where + ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    auto number = [&] {
      auto v = text::parse_double(value);
      if (!v) throw Error(ErrorCode::InvalidArgument, where + ": '" + key + "' expects a number");
      return *v;
    };

    if (key == "stations") cfg.stations = resolve(value);
    else if (key.rfind("normals.", 0) == 0) cfg.normals[TimeWindow::from_label(key.substr(8)).label] = resolve(value);
    else if (key == "out") cfg.out = resolve(value);
    else if (key == "power") cfg.power = number();
    else if (key == "cell_deg") cfg.grid.cell_deg = number();
    else if (key == "lon_min") cfg.grid.lon_min = number();
    else if (key == "lon_max") cfg.grid.lon_max = number();
    else if (key == "lat_min") cfg.grid.lat_min = number();
    else if (key == "lat_max") cfg.grid.lat_max = number();
    else if (key == "mask") cfg.mask = resolve(value);
    else if (key == "alpha") cfg.alpha = number();
    else if (key == "parallel") cfg.parallel = static_cast<unsigned>(number());
    else if (key.rfind("levels.", 0) == 0) cfg.levels[parse_attribute(key.substr(7))] = parse_number_list(value);
    else if (key.rfind("bin_width.", 0) == 0) cfg.bin_width[parse_attribute(key.substr(10))] = number();
    else if (key == "compare.old") cfg.compare_old = TimeWindow::from_label(value).label;
    else if (key == "compare.new") cfg.compare_new = TimeWindow::from_label(value).label;
    else throw Error(ErrorCode::InvalidArgument, where + ": unknown key '" + key + "'");
  }
  return cfg;
}

inline RunConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

namespace detail {

inline std::vector<StationRecord> load_stations(const RunConfig& cfg) {
  if (!cfg.stations) throw Error(ErrorCode::InvalidArgument, "no stations file configured (key 'stations')");
  try {
    return filter_contiguous(parse_stations(read_file(*cfg.stations)));
  } catch (const Error& e) {
    throw Error(e.code(), cfg.stations->string() + ": " + e.what());
  }
}

inline std::vector<ClimateAttributes> load_attributes(const RunConfig& cfg, const std::string& window) {
  const fs::path path = cfg.attributes_path(window);
  if (!fs::exists(path)) {
    throw Error(ErrorCode::Io, "no attributes for window " + window + " ('" + path.string() + "'; run ingest first)");
  }
  try {
    return parse_attributes(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace detail

struct IngestSummary {
  std::string window;
  std::size_t retained = 0;
  std::size_t excluded = 0;
};

/// Parses stations and every configured normals file, writes the attribute
/// table and exclusion report per window.
inline std::vector<IngestSummary> cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  if (cfg.normals.empty()) throw Error(ErrorCode::InvalidArgument, "no normals files configured (keys 'normals.<window>')");
  if (!cfg.stations) throw Error(ErrorCode::InvalidArgument, "no stations file configured (key 'stations')");
  std::vector<StationRecord> all_stations;
  try {
    all_stations = parse_stations(read_file(*cfg.stations));
  } catch (const Error& e) {
    throw Error(e.code(), cfg.stations->string() + ": " + e.what());
  }
  for (const auto& w : soft_bound_warnings(all_stations)) log << "warning: " << w << '\n';
  const auto stations = filter_contiguous(all_stations);
  std::unordered_map<std::string_view, bool> known;  // id -> contiguous
  for (const auto& s : all_stations) known[s.station_id] = is_contiguous_state(s.state);

  std::vector<IngestSummary> out;
  for (const auto& [label, path] : cfg.normals) {
    const TimeWindow window = TimeWindow::from_label(label);
    NormalsParseResult parsed;
    try {
      parsed = parse_normals(read_file(path), window);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    std::vector<ClimateAttributes> rows;
    std::vector<Exclusion> excluded = parsed.exclusions;
    for (const auto& series : parsed.series) {
      auto it = known.find(series.station_id);
      if (it == known.end()) {
        excluded.push_back({series.station_id, "no_station_record", "not present in stations file"});
      } else if (!it->second) {
        excluded.push_back({series.station_id, "non_contiguous", "station outside the 48 contiguous states"});
      } else {
        rows.push_back(compute_attributes(series));
      }
    }
    write_file(cfg.attributes_path(label), serialize_attributes(rows));
    write_file(cfg.exclusions_path(label), serialize_exclusions(excluded));
    log << "window " << label << ": " << rows.size() << " stations retained, " << excluded.size() << " excluded\n";
    out.push_back({label, rows.size(), excluded.size()});
  }
  return out;
}

inline std::vector<SamplePoint> samples_for(const std::vector<ClimateAttributes>& attrs,
                                            const std::vector<StationRecord>& stations, Attribute attribute) {
  std::unordered_map<std::string_view, const StationRecord*> index;
  for (const auto& s : stations) index.emplace(s.station_id, &s);
  std::vector<SamplePoint> out;
  for (const auto& a : attrs) {
    auto it = index.find(a.station_id);
    if (it == index.end()) {
      throw Error(ErrorCode::UnjoinableStation, "attribute row for station '" + a.station_id + "' has no station record");
    }
    out.push_back({it->second->longitude, it->second->latitude, a.value(attribute)});
  }
  return out;
}

inline fs::path cmd_grid(const RunConfig& cfg, const std::string& window, Attribute attribute) {
  const auto attrs = detail::load_attributes(cfg, window);
  const auto stations = detail::load_stations(cfg);
  const auto samples = samples_for(attrs, stations, attribute);
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "window " + window + " has no stations to interpolate");
  std::optional<MultiPolygon> mask;
  if (cfg.mask) mask = parse_mask_geojson(read_file(*cfg.mask));
  const RasterGrid grid = idw_grid(samples, cfg.grid, cfg.power, mask ? &*mask : nullptr, cfg.parallel);
  const fs::path path = cfg.raster_path(attribute, window);
  write_file(path, write_esri_ascii(grid));
  return path;
}

inline fs::path cmd_contour(const RunConfig& cfg, const fs::path& raster, Attribute attribute) {
  RasterGrid grid;
  try {
    grid = read_esri_ascii(read_file(raster));
  } catch (const Error& e) {
    throw Error(e.code(), raster.string() + ": " + e.what());
  }
  auto it = cfg.levels.find(attribute);
  const std::vector<double> levels = it != cfg.levels.end() ? it->second : default_levels(attribute, grid);
  const auto sets = extract_contours(grid, levels, std::string(attribute_name(attribute)));
  const fs::path path = cfg.out / "contours" / (raster.stem().string() + ".geojson");
  write_file(path, write_contours_geojson(sets));
  return path;
}

struct CompareSummary {
  std::size_t pairs = 0;
  std::vector<AnovaResult> table;
};

/// Pairs every old-window station with its nearest new-window station, then
/// writes the pairing, significance table, regional summaries and
/// histograms of the paired values.
inline CompareSummary cmd_compare(const RunConfig& cfg, const std::string& old_w, const std::string& new_w,
                                  std::ostream& log) {
  const TimeWindow old_window = TimeWindow::from_label(old_w);
  const TimeWindow new_window = TimeWindow::from_label(new_w);
  const auto old_attrs = detail::load_attributes(cfg, old_w);
  const auto new_attrs = detail::load_attributes(cfg, new_w);
  const auto stations = detail::load_stations(cfg);

  std::unordered_map<std::string_view, const StationRecord*> index;
  for (const auto& s : stations) index.emplace(s.station_id, &s);
  auto stations_of = [&](const std::vector<ClimateAttributes>& attrs) {
    std::vector<StationRecord> out;
    for (const auto& a : attrs) {
      auto it = index.find(a.station_id);
      if (it == index.end()) {
        throw Error(ErrorCode::UnjoinableStation, "attribute row for station '" + a.station_id + "' has no station record");
      }
      out.push_back(*it->second);
    }
    return out;
  };
  const auto pairs = nearest_neighbor_match(stations_of(new_attrs), stations_of(old_attrs));

  std::unordered_map<std::string_view, const ClimateAttributes*> new_by_id;
  for (const auto& a : new_attrs) new_by_id.emplace(a.station_id, &a);
  std::vector<ClimateAttributes> paired_new;
  paired_new.reserve(pairs.size());
  for (const auto& p : pairs) paired_new.push_back(*new_by_id.at(p.new_station_id));

  CompareSummary result;
  result.pairs = pairs.size();
  result.table = significance_table(old_attrs, paired_new, stations, cfg.alpha);

  std::vector<RegionSummary> summaries;
  std::vector<Histogram> hists;
  for (Attribute attr : kAllAttributes) {
    const std::array<const std::vector<ClimateAttributes>*, 2> sets{&old_attrs, &paired_new};
    for (const auto* set : sets) {
      const TimeWindow& w = set == &old_attrs ? old_window : new_window;
      auto rows = region_summary(*set, stations, w, attr);
      summaries.insert(summaries.end(), rows.begin(), rows.end());
      std::vector<double> values;
      for (const auto& a : *set) values.push_back(a.value(attr));
      Histogram h = histogram(values, cfg.bin_width.at(attr), 0.0);
      h.attribute = std::string(attribute_name(attr));
      h.window = w;
      hists.push_back(std::move(h));
    }
  }

  write_file(cfg.report_path("pairing", old_w, new_w), serialize_pairings(pairs));
  write_file(cfg.report_path("significance", old_w, new_w), serialize_significance(result.table));
  write_file(cfg.report_path("summary", old_w, new_w), serialize_region_summaries(summaries));
  write_file(cfg.report_path("histogram", old_w, new_w), serialize_histograms(hists));

  const auto significant = std::count_if(result.table.begin(), result.table.end(),
                                         [](const AnovaResult& r) { return r.significant; });
  log << "compare " << old_w << " vs " << new_w << ": " << pairs.size() << " paired stations, " << significant
      << " of " << result.table.size() << " region/attribute cells significant at alpha " << cfg.alpha << '\n';
  return result;
}

/// ingest, then grid + contour every attribute of every window, then compare
/// (compare.old/compare.new, or the earliest against the latest window).
inline void cmd_all(const RunConfig& cfg, std::ostream& log) {
  cmd_ingest(cfg, log);
  for (const auto& [window, path] : cfg.normals) {
    for (Attribute attr : kAllAttributes) {
      const fs::path raster = cmd_grid(cfg, window, attr);
      cmd_contour(cfg, raster, attr);
    }
  }
  if (cfg.normals.size() >= 2 || (cfg.compare_old && cfg.compare_new)) {
    const std::string old_w = cfg.compare_old.value_or(cfg.normals.begin()->first);
    const std::string new_w = cfg.compare_new.value_or(cfg.normals.rbegin()->first);
    cmd_compare(cfg, old_w, new_w, log);
  }
}

}  // namespace climsev
