#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlfb/analysis.hpp"
#include "nlfb/grid.hpp"

namespace nlfb {

/// Shortest round-trip decimal form of v; deterministic across runs, used
/// for every CSV cell so identical inputs give byte-identical files.
std::string format_double(double v);

/// Columns x,value plus a JSON sidecar <path>.json describing the grid and
/// the exterior descriptors.
void write_gridfunction_csv(const GridFunction& u, const std::string& path);

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

/// Minimal hand-rolled SVG line plot of one or more series.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void write_svg_profile(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series);

/// Log-log scatter of (r, value) samples with the fitted power law overlaid.
void write_svg_loglog_fit(const std::string& path, const std::string& title,
                          const std::vector<std::pair<double, double>>& samples,
                          const ExponentFit& fit);

}  // namespace nlfb
