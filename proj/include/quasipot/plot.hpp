#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "quasipot/maxwell.hpp"

namespace quasipot {

struct Curve {
  std::string label;
  std::vector<double> y;  // sampled on the plot's shared x grid
};

struct PlotSpec {
  std::string title;
  std::vector<double> x;
  std::vector<Curve> curves;
  std::vector<FlatInterval> shaded;  // x-ranges drawn as background bands, wrapped mod 1
};

/// Self-contained SVG line chart. Output depends only on the input.
std::string render_svg(const PlotSpec& spec);

/// Throws ValidationError on an empty curve list, IoError if the path is unwritable.
void emit_plot(const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace quasipot
