#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace irmap {

// Maturity axis unit is months: 1W = 12/52, nM = n, nY = 12n.
struct Tenor {
  std::string label;
  double months = 0.0;
};

// Parses "<count><unit>" with unit in {W, M, Y}; throws DataError otherwise.
double tenor_to_months(std::string_view label);

Tenor make_tenor(std::string_view label);

// The thirteen LIBOR/swap tenors used throughout: 1W .. 10Y.
const std::vector<Tenor>& default_tenors();

}  // namespace irmap
