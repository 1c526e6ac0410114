#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "secrelay/harness.hpp"

namespace secrelay {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "experiment",  "seed",           "trial",           "row_type",   "duplex",
      "kappa",       "sweep_name",     "sweep_value",     "k",          "phi",
      "surrogate",   "gm_norm",        "secrecy_rate_nats", "secrecy_rate_bits", "secrecy_rate_pos_nats",
      "relay_power", "harvested_power", "an_ratio",       "stationarity_residual", "rank_ratio",
      "status",      "resamples",      "count",           "metric",          "analytic",   "empirical",
      "std_error",   "wall_ms"};
  return cols;
}

int ResultTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

const std::string& ResultTable::at(std::size_t row, std::string_view col) const {
  const int c = column(col);
  if (c < 0) throw Error("no column '" + std::string(col) + "'");
  return rows.at(row).at(static_cast<std::size_t>(c));
}

double ResultTable::number(std::size_t row, std::string_view col) const {
  const std::string& s = at(row, col);
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  // Subnormals come back as result_out_of_range with the value still set.
  if (r.ptr != s.data() + s.size() || (r.ec != std::errc() && r.ec != std::errc::result_out_of_range))
    throw Error("not a number: '" + s + "'");
  return v;
}

namespace {

void write_field(std::ostream& os, const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) {
    os << f;
    return;
  }
  os << '"';
  for (char c : f) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

}  // namespace

void ResultTable::write_csv(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      write_field(os, fields[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

}  // namespace secrelay
