#include "irmap/tenor.hpp"

#include <cctype>

#include "irmap/types.hpp"

namespace irmap {

double tenor_to_months(std::string_view label) {
  auto fail = [&] {
    throw DataError("bad tenor label: '" + std::string(label) + "'");
  };
  if (label.size() < 2) fail();

  long count = 0;
  std::size_t i = 0;
  while (i < label.size() &&
         std::isdigit(static_cast<unsigned char>(label[i]))) {
    count = count * 10 + (label[i] - '0');
    ++i;
  }
  if (i == 0 || i + 1 != label.size() || count <= 0) fail();

  switch (std::toupper(static_cast<unsigned char>(label[i]))) {
    case 'W':
      return static_cast<double>(count) * 12.0 / 52.0;
    case 'M':
      return static_cast<double>(count);
    case 'Y':
      return static_cast<double>(count) * 12.0;
    default:
      fail();
  }
  return 0.0;  // unreachable
}

Tenor make_tenor(std::string_view label) {
  return Tenor{std::string(label), tenor_to_months(label)};
}

const std::vector<Tenor>& default_tenors() {
  static const std::vector<Tenor> tenors = [] {
    std::vector<Tenor> out;
    for (const char* label : {"1W", "1M", "2M", "3M", "6M", "9M", "1Y", "2Y",
                              "3Y", "4Y", "5Y", "7Y", "10Y"}) {
      out.push_back(make_tenor(label));
    }
    return out;
  }();
  return tenors;
}

}  // namespace irmap
