#pragma once

#include <iosfwd>
#include <string>

#include "irmap/dataset.hpp"

namespace irmap {

// Panel CSV: header `date,<tenor>,<tenor>,...`, ISO dates ascending, `.`
// decimal separator, empty cell = missing. One Observation per non-empty
// cell; day_index is the calendar-day offset from the first date.
Dataset load_panel(std::istream& in);
Dataset load_panel_file(const std::string& path);

// Inverse of load_panel: load -> save -> load is the identity on
// (date, tenor, rate).
void save_panel(const Dataset& data, std::ostream& out);
void save_panel_file(const Dataset& data, const std::string& path);

}  // namespace irmap
