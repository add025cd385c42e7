#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "irmap/forecast.hpp"

namespace irmap {

// Linear blue -> white -> red ramp over t in [0, 1].
std::array<std::uint8_t, 3> heatmap_color(double t);

// Binary P6 heatmap: blue at the grid minimum, white at the midpoint, red at
// the maximum; a constant grid renders all white. Row 0 is the smallest day
// index, columns follow the maturity axis left to right.
void write_heatmap_ppm(const SurfaceGrid& grid, std::ostream& out);
void write_heatmap_ppm_file(const SurfaceGrid& grid, const std::string& path);

}  // namespace irmap
