#include "irmap/calendar.hpp"

#include <cctype>
#include <cstdio>

#include "irmap/types.hpp"

namespace irmap {

long days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long yr = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yr + (m <= 2));
}

long parse_iso_date(const std::string& iso) {
  auto fail = [&] { throw DataError("malformed ISO date: '" + iso + "'"); };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') fail();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
    if (!std::isdigit(static_cast<unsigned char>(iso[i]))) fail();
  }
  const int y = std::stoi(iso.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(iso.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(iso.substr(8, 2)));
  if (m < 1 || m > 12 || d < 1 || d > 31) fail();
  const long serial = days_from_civil(y, m, d);
  // Reject out-of-range days (e.g. Feb 30) via round-trip.
  int yy;
  unsigned mm, dd;
  civil_from_days(serial, yy, mm, dd);
  if (yy != y || mm != m || dd != d) fail();
  return serial;
}

std::string format_iso_date(long serial) {
  int y;
  unsigned m, d;
  civil_from_days(serial, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
  return buf;
}

std::string add_days(const std::string& iso, long days) {
  return format_iso_date(parse_iso_date(iso) + days);
}

}  // namespace irmap
