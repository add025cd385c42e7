#include "irmap/ppm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace irmap {

std::array<std::uint8_t, 3> heatmap_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto channel = [](double v) {
    return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
  };
  if (t <= 0.5) {
    // blue (0,0,255) -> white (255,255,255)
    const double u = 2.0 * t;
    return {channel(u), channel(u), channel(1.0)};
  }
  // white -> red (255,0,0)
  const double u = 2.0 * (t - 0.5);
  return {channel(1.0), channel(1.0 - u), channel(1.0 - u)};
}

void write_heatmap_ppm(const SurfaceGrid& grid, std::ostream& out) {
  const Eigen::Index rows = grid.values.rows();
  const Eigen::Index cols = grid.values.cols();
  if (rows == 0 || cols == 0) throw DataError("heatmap grid is empty");

  const double lo = grid.values.minCoeff();
  const double hi = grid.values.maxCoeff();
  const double span = hi - lo;

  out << "P6\n" << cols << ' ' << rows << "\n255\n";
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double t =
          span > 0.0 ? (grid.values(i, j) - lo) / span : 0.5;
      const auto rgb = heatmap_color(t);
      out.write(reinterpret_cast<const char*>(rgb.data()),
                static_cast<std::streamsize>(rgb.size()));
    }
  }
  if (!out) throw DataError("failed writing heatmap stream");
}

void write_heatmap_ppm_file(const SurfaceGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open heatmap file for writing: " + path);
  write_heatmap_ppm(grid, out);
}

}  // namespace irmap
