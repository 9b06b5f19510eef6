#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "pllab/certify.hpp"
#include "pllab/errors.hpp"
#include "pllab/functions.hpp"
#include "pllab/io.hpp"

namespace pllab {

// Values of a planar function on a regular grid, row-major with the second
// axis outermost; values.size() == resolution^2.
struct FigureGrid {
  std::array<double, 2> x1_bounds{};
  std::array<double, 2> x2_bounds{};
  int resolution = 2;
  std::vector<double> values;
};

inline FigureGrid sample_figure_grid(const PowerDistanceFunction& f,
                                     std::array<double, 2> x1_bounds,
                                     std::array<double, 2> x2_bounds,
                                     int resolution) {
  if (f.set.dim() != 2) throw usage_error("figure: set must be planar");
  if (resolution < 2) throw usage_error("figure: resolution must be >= 2");
  detail::validate_bounds({x1_bounds, x2_bounds});
  FigureGrid grid{x1_bounds, x2_bounds, resolution, {}};
  grid.values.reserve(static_cast<std::size_t>(resolution) * resolution);
  Point x(2);
  for (int j = 0; j < resolution; ++j) {
    x[1] = detail::grid_coord(x2_bounds[0], x2_bounds[1], j, resolution);
    for (int i = 0; i < resolution; ++i) {
      x[0] = detail::grid_coord(x1_bounds[0], x1_bounds[1], i, resolution);
      grid.values.push_back(value(f, x));
    }
  }
  return grid;
}

// Header x1,x2,f then resolution^2 rows, x2 ascending outermost and x1
// ascending innermost; endpoint-exact coordinates.
inline void write_figure_csv(std::ostream& os, const FigureGrid& grid) {
  os << "x1,x2,f\n";
  const int n = grid.resolution;
  std::size_t at = 0;
  for (int j = 0; j < n; ++j) {
    const double x2 = detail::grid_coord(grid.x2_bounds[0], grid.x2_bounds[1], j, n);
    for (int i = 0; i < n; ++i) {
      const double x1 =
          detail::grid_coord(grid.x1_bounds[0], grid.x1_bounds[1], i, n);
      os << format_double(x1) << ',' << format_double(x2) << ','
         << format_double(grid.values[at++]) << '\n';
    }
  }
}

}  // namespace pllab
