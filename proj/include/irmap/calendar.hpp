#pragma once

#include <string>

namespace irmap {

// Proleptic Gregorian day arithmetic (serial day = days since 1970-01-01).
long days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(long serial, int& year, unsigned& month, unsigned& day);

// Strict ISO-8601 (YYYY-MM-DD) parsing; throws DataError on malformed input.
long parse_iso_date(const std::string& iso);
std::string format_iso_date(long serial);
std::string add_days(const std::string& iso, long days);

}  // namespace irmap
