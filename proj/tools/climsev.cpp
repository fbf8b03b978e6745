// climsev: climate-severity attributes, IDW rasters, contours and regional
// window comparisons from station climate normals.
//
//   climsev --config run.cfg ingest
//   climsev --config run.cfg grid --window 1991-2020 --attribute freeze_index
//   climsev --config run.cfg contour --raster out/rasters/freeze_index_1991-2020.asc --attribute freeze_index
//   climsev --config run.cfg compare --window 1981-2010 --window 1991-2020
//   climsev --config run.cfg all --parallel 4
//
// Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "climsev/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<unsigned> parallel;
  std::vector<std::string> windows;
  std::string attribute;
  std::string raster;
  std::string levels;
  std::optional<double> power;
  std::optional<double> cell_deg;
  std::string mask;
};

climsev::RunConfig build_config(const Flags& f) {
  climsev::RunConfig cfg = f.config.empty() ? climsev::RunConfig{} : climsev::load_config(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.parallel) cfg.parallel = *f.parallel;
  if (f.power) cfg.power = *f.power;
  if (f.cell_deg) cfg.grid.cell_deg = *f.cell_deg;
  if (!f.mask.empty()) cfg.mask = f.mask;
  if (!f.levels.empty()) cfg.levels[climsev::parse_attribute(f.attribute)] = climsev::parse_number_list(f.levels);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Climate-severity attributes from station climate normals"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "Run configuration file (key = value)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--parallel", f.parallel, "Worker threads for raster fill (0 = auto)");

  const std::vector<std::string> attribute_names = {"freeze_index", "freeze_thaw_cycles", "precipitation",
                                                    "temperature"};
  auto add_grid_flags = [&](CLI::App* cmd) {
    cmd->add_option("--power", f.power, "IDW power (default 2)")->check(CLI::PositiveNumber);
    cmd->add_option("--cell-deg", f.cell_deg, "Raster cell size in degrees")->check(CLI::PositiveNumber);
    cmd->add_option("--mask", f.mask, "GeoJSON (Multi)Polygon mask")->check(CLI::ExistingFile);
  };

  auto* ingest = app.add_subcommand("ingest", "Parse stations and normals, write attribute tables");

  auto* grid = app.add_subcommand("grid", "Interpolate one attribute of one window onto a raster");
  grid->add_option("--window", f.windows, "Time window, e.g. 1991-2020")->required()->expected(1);
  grid->add_option("--attribute", f.attribute, "Attribute name")->required()->check(CLI::IsMember(attribute_names));
  add_grid_flags(grid);

  auto* contour = app.add_subcommand("contour", "Extract contour lines from a raster");
  contour->add_option("--raster", f.raster, "ESRI ASCII raster")->required();
  contour->add_option("--attribute", f.attribute, "Attribute name")->required()->check(CLI::IsMember(attribute_names));
  contour->add_option("--levels", f.levels, "Comma-separated contour levels");

  auto* compare = app.add_subcommand("compare", "Compare two windows by NOAA climate region");
  compare->add_option("--window", f.windows, "Old and new window (repeat twice)")->expected(2);

  auto* all = app.add_subcommand("all", "ingest, grid, contour and compare in one run");
  add_grid_flags(all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const climsev::RunConfig cfg = build_config(f);
    if (ingest->parsed()) {
      climsev::cmd_ingest(cfg, std::cout);
    } else if (grid->parsed()) {
      const auto path = climsev::cmd_grid(cfg, climsev::TimeWindow::from_label(f.windows.at(0)).label,
                                          climsev::parse_attribute(f.attribute));
      std::cout << "wrote " << path.string() << '\n';
    } else if (contour->parsed()) {
      const auto path = climsev::cmd_contour(cfg, f.raster, climsev::parse_attribute(f.attribute));
      std::cout << "wrote " << path.string() << '\n';
    } else if (compare->parsed()) {
      std::string old_w, new_w;
      if (f.windows.size() == 2) {
        old_w = f.windows[0];
        new_w = f.windows[1];
      } else if (cfg.compare_old && cfg.compare_new) {
        old_w = *cfg.compare_old;
        new_w = *cfg.compare_new;
      } else {
        std::cerr << "compare: give --window <old> --window <new> or set compare.old/compare.new\n";
        return 2;
      }
      climsev::cmd_compare(cfg, climsev::TimeWindow::from_label(old_w).label,
                           climsev::TimeWindow::from_label(new_w).label, std::cout);
    } else if (all->parsed()) {
      climsev::cmd_all(cfg, std::cout);
    }
  } catch (const climsev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
