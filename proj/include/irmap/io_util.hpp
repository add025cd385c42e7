#pragma once

#include <string>

namespace irmap {

// Shortest decimal representation that round-trips through double parsing.
std::string fmt_double(double value);

}  // namespace irmap
