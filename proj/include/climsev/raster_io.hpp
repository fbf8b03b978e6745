#pragma once

// ESRI ASCII grid reader/writer.

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "climsev/error.hpp"
#include "climsev/interpolate.hpp"
#include "climsev/text.hpp"

namespace climsev {

/// Header, then one line per row (north first), values with 4 decimals.
inline std::string write_esri_ascii(const RasterGrid& grid) {
  std::string out;
  out.reserve(grid.values.size() * 10 + 128);
  out += "ncols " + std::to_string(grid.ncols) + '\n';
  out += "nrows " + std::to_string(grid.nrows) + '\n';
  out += "xllcorner " + text::format_shortest(grid.spec.lon_min) + '\n';
  out += "yllcorner " + text::format_shortest(grid.spec.lat_min) + '\n';
  out += "cellsize " + text::format_shortest(grid.spec.cell_deg) + '\n';
  out += "NODATA_value -9999\n";
  for (std::size_t r = 0; r < grid.nrows; ++r) {
    for (std::size_t c = 0; c < grid.ncols; ++c) {
      if (c) out.push_back(' ');
      const double v = grid.at(r, c);
      out += RasterGrid::is_nodata(v) ? std::string("-9999") : text::format_fixed(v, 4);
    }
    out.push_back('\n');
  }
  return out;
}

/// Reads an ESRI ASCII grid. Header keys are case-insensitive;
/// xllcenter/yllcenter are converted to corners. Cells equal to the file's
/// NODATA value become kNodata.
inline RasterGrid read_esri_ascii(std::string_view doc) {
  std::istringstream in{std::string(doc)};
  long long ncols = -1, nrows = -1;
  double xll = NAN, yll = NAN, cell = NAN, nodata = kNodata;
  bool x_center = false, y_center = false;

  std::string key;
  for (int i = 0; i < 6; ++i) {
    const auto pos = in.tellg();
    if (!(in >> key)) break;
    std::string lower;
    for (char ch : key) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower.empty() || !std::isalpha(static_cast<unsigned char>(lower[0]))) {
      in.seekg(pos);
      break;
    }
    std::string raw;
    if (!(in >> raw)) throw Error(ErrorCode::MalformedRaster, "header key '" + key + "' has no value");
    auto num = text::parse_double(raw);
    if (!num) throw Error(ErrorCode::MalformedRaster, "header '" + key + "' value is not numeric: " + raw);
    if (lower == "ncols") ncols = static_cast<long long>(*num);
    else if (lower == "nrows") nrows = static_cast<long long>(*num);
    else if (lower == "xllcorner") xll = *num;
    else if (lower == "yllcorner") yll = *num;
    else if (lower == "xllcenter") { xll = *num; x_center = true; }
    else if (lower == "yllcenter") { yll = *num; y_center = true; }
    else if (lower == "cellsize") cell = *num;
    else if (lower == "nodata_value") nodata = *num;
    else throw Error(ErrorCode::MalformedRaster, "unknown header key '" + key + "'");
  }
  if (ncols <= 0 || nrows <= 0 || std::isnan(xll) || std::isnan(yll) || !(cell > 0.0)) {
    throw Error(ErrorCode::MalformedRaster, "incomplete header (need ncols, nrows, xll*, yll*, cellsize)");
  }
  if (x_center) xll -= cell / 2.0;
  if (y_center) yll -= cell / 2.0;

  GridSpec spec{xll, xll + static_cast<double>(ncols) * cell, yll, yll + static_cast<double>(nrows) * cell, cell};
  RasterGrid grid{spec, static_cast<std::size_t>(nrows), static_cast<std::size_t>(ncols), {}};
  grid.values.reserve(grid.nrows * grid.ncols);
  std::string tok;
  while (in >> tok) {
    auto v = text::parse_double(tok);
    if (!v) throw Error(ErrorCode::MalformedRaster, "non-numeric cell value '" + tok + "'");
    grid.values.push_back(*v == nodata ? kNodata : *v);
  }
  if (grid.values.size() != grid.nrows * grid.ncols) {
    throw Error(ErrorCode::MalformedRaster, "expected " + std::to_string(grid.nrows * grid.ncols) +
                                                " cell values, found " + std::to_string(grid.values.size()));
  }
  return grid;
}

}  // namespace climsev
