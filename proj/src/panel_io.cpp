#include "irmap/panel_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "irmap/calendar.hpp"
#include "irmap/io_util.hpp"

namespace irmap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_rate(const std::string& cell, int line_no) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("malformed number '" + cell + "' on line " +
                    std::to_string(line_no));
  }
  return value;
}

}  // namespace

Dataset load_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty panel file");
  auto header = split_csv_line(line);
  if (header.size() < 2 || trim(header[0]) != "date") {
    throw DataError("panel header must start with 'date' and list tenors");
  }

  Dataset data;
  for (std::size_t i = 1; i < header.size(); ++i) {
    data.tenors.push_back(make_tenor(trim(header[i])));
  }

  long first_serial = 0;
  long prev_serial = std::numeric_limits<long>::min();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    const std::string date = trim(cells[0]);
    const long serial = parse_iso_date(date);
    if (serial <= prev_serial) {
      throw DataError("unsorted or duplicate date '" + date + "'");
    }
    if (data.dates.empty()) first_serial = serial;
    prev_serial = serial;

    const int day_index = static_cast<int>(serial - first_serial);
    data.dates.push_back(date);
    data.date_days.push_back(day_index);
    for (std::size_t t = 0; t + 1 < header.size(); ++t) {
      const std::string cell = trim(cells[t + 1]);
      if (cell.empty()) continue;
      data.observations.push_back(
          Observation{data.tenors[t].months, day_index, parse_rate(cell, line_no)});
    }
  }
  if (data.observations.empty()) throw DataError("panel has no valid cells");
  data.scaling = compute_scaling(data.observations, 1.0);
  return data;
}

Dataset load_panel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open panel file: " + path);
  return load_panel(in);
}

void save_panel(const Dataset& data, std::ostream& out) {
  out << "date";
  for (const auto& tenor : data.tenors) out << ',' << tenor.label;
  out << '\n';

  // Cell lookup by (day_index, tenor column).
  const std::size_t n_tenors = data.tenors.size();
  std::vector<std::vector<double>> grid(
      data.dates.size(),
      std::vector<double>(n_tenors, std::numeric_limits<double>::quiet_NaN()));
  std::vector<int> day_to_row(data.span_days(), -1);
  for (std::size_t r = 0; r < data.date_days.size(); ++r) {
    day_to_row[data.date_days[r]] = static_cast<int>(r);
  }
  for (const auto& obs : data.observations) {
    std::size_t col = n_tenors;
    for (std::size_t t = 0; t < n_tenors; ++t) {
      if (data.tenors[t].months == obs.maturity_months) {
        col = t;
        break;
      }
    }
    if (col == n_tenors || obs.day_index >= static_cast<int>(day_to_row.size()) ||
        day_to_row[obs.day_index] < 0) {
      throw DataError("observation does not match the panel axes");
    }
    grid[day_to_row[obs.day_index]][col] = obs.rate;
  }

  for (std::size_t r = 0; r < data.dates.size(); ++r) {
    out << data.dates[r];
    for (std::size_t t = 0; t < n_tenors; ++t) {
      out << ',';
      if (!std::isnan(grid[r][t])) out << fmt_double(grid[r][t]);
    }
    out << '\n';
  }
}

void save_panel_file(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write panel file: " + path);
  save_panel(data, out);
}

}  // namespace irmap
