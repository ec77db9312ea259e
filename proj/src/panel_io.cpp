#include "largevar/panel_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "largevar/errors.hpp"

namespace largevar {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t row, std::size_t col, const std::string& what) {
  std::ostringstream msg;
  msg << "malformed CSV at row " << row;
  if (col > 0) msg << ", column " << col;
  msg << ": " << what;
  throw ParseError(msg.str());
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string text = trim(raw);
  if (text.empty()) fail(row, col, "empty cell");
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) fail(row, col, "'" + text + "' is not a real number");
  if (!std::isfinite(value)) fail(row, col, "non-finite value '" + text + "'");
  return value;
}

}  // namespace

NamedPanel read_panel_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (names.empty()) {
      for (const auto& c : cells) names.push_back(trim(c));
      continue;
    }
    if (cells.size() != names.size()) {
      std::ostringstream msg;
      msg << "expected " << names.size() << " cells, found " << cells.size();
      fail(row, 0, msg.str());
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) values[c] = parse_cell(cells[c], row, c + 1);
    rows.push_back(std::move(values));
  }
  if (names.empty()) throw ParseError("malformed CSV: missing header row");
  if (rows.size() < 3) {
    throw ParseError("malformed CSV: need X_0 plus at least two observations (>= 3 data rows)");
  }
  NamedPanel out;
  out.names = std::move(names);
  const Index n = static_cast<Index>(out.names.size());
  const Index t = static_cast<Index>(rows.size()) - 1;
  out.panel.x0.resize(n);
  out.panel.data.resize(n, t);
  for (Index i = 0; i < n; ++i) out.panel.x0(i) = rows[0][static_cast<std::size_t>(i)];
  for (Index tau = 0; tau < t; ++tau) {
    for (Index i = 0; i < n; ++i) out.panel.data(i, tau) = rows[static_cast<std::size_t>(tau + 1)][static_cast<std::size_t>(i)];
  }
  return out;
}

NamedPanel read_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open panel file " + path.string());
  return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const Panel& panel, const std::vector<std::string>& names) {
  panel.validate();
  const Index n = panel.n();
  if (!names.empty() && static_cast<Index>(names.size()) != n) {
    throw InvalidInput("write_panel_csv: one name per series expected");
  }
  for (Index i = 0; i < n; ++i) {
    if (i) out << ',';
    out << (names.empty() ? "x" + std::to_string(i + 1) : names[static_cast<std::size_t>(i)]);
  }
  out << '\n' << std::setprecision(17);
  auto write_row = [&](const auto& v) {
    for (Index i = 0; i < n; ++i) {
      if (i) out << ',';
      out << v(i);
    }
    out << '\n';
  };
  write_row(panel.x0);
  for (Index tau = 0; tau < panel.t(); ++tau) write_row(panel.data.col(tau));
}

void write_panel_csv(const std::filesystem::path& path, const Panel& panel, const std::vector<std::string>& names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_panel_csv(out, panel, names);
}

std::vector<double> read_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',' || ch == '\r' || ch == '\t') ch = ' ';
    }
    std::istringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    while (cells >> cell) values.push_back(parse_cell(cell, row, ++col));
  }
  if (values.empty()) throw ParseError("no values in " + path.string());
  return values;
}

}  // namespace largevar
