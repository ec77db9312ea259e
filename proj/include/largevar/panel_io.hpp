#pragma once

// CSV panels: a header row of series names, then one row per time point.
// The first data row is the initial condition X_0; the remaining T rows are
// X_1..X_T. Comma delimiter, decimal point, UTF-8 (a leading BOM is skipped).

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "largevar/varsim.hpp"

namespace largevar {

struct NamedPanel {
  std::vector<std::string> names;
  Panel panel;
};

/// Throws ParseError naming the 1-based row and column of the first bad cell.
NamedPanel read_panel_csv(std::istream& in);
NamedPanel read_panel_csv(const std::filesystem::path& path);

void write_panel_csv(std::ostream& out, const Panel& panel, const std::vector<std::string>& names = {});
void write_panel_csv(const std::filesystem::path& path, const Panel& panel,
                     const std::vector<std::string>& names = {});

/// Whitespace- or comma-separated reals; '#' starts a comment.
std::vector<double> read_values_file(const std::filesystem::path& path);

}  // namespace largevar
