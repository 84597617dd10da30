#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qb/errors.hpp"
#include "qb/lattice.hpp"

namespace qb {

/// Rendered/parsed CSV: '#'-prefixed comment lines, one header row of column
/// names, then comma-separated values at 17 significant digits.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // one vector per name

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  const std::vector<double>& column(const std::string& name) const;
};

std::string format_full(double value);  // shortest round-trip-exact decimal

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Trajectory as a CsvTable with a leading "t" column; extra comment lines
/// are prepended to the spec/engine header.
CsvTable trajectory_table(const Trajectory& traj,
                          const std::vector<std::string>& extra_comments = {});

}  // namespace qb
