#include "qb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qb {

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw validation_error("no such column '" + name + "'");
}

std::string format_full(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  if (table.names.size() != table.columns.size())
    throw validation_error("column name/value count mismatch");
  for (const auto& c : table.columns)
    if (c.size() != table.rows())
      throw validation_error("ragged CSV columns");

  for (const auto& line : table.comments) out << "# " << line << '\n';
  for (std::size_t i = 0; i < table.names.size(); ++i)
    out << (i ? "," : "") << table.names[i];
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      out << (c ? "," : "") << format_full(table.columns[c][r]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw engine_error("cannot open '" + path + "' for writing");
  write_csv(out, table);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::size_t start = 1;
      if (start < line.size() && line[start] == ' ') ++start;
      table.comments.push_back(line.substr(start));
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(row, cell, ',')) table.names.push_back(cell);
      if (table.names.empty()) throw validation_error("empty CSV header");
      table.columns.resize(table.names.size());
      have_header = true;
      continue;
    }
    std::size_t c = 0;
    while (std::getline(row, cell, ',')) {
      if (c >= table.columns.size())
        throw validation_error("row has more cells than the header");
      try {
        table.columns[c].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw validation_error("non-numeric CSV cell '" + cell + "'");
      }
      ++c;
    }
    if (c != table.columns.size())
      throw validation_error("row has fewer cells than the header");
  }
  if (!have_header) throw validation_error("CSV file has no header row");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open CSV file '" + path + "'");
  return read_csv(in);
}

CsvTable trajectory_table(const Trajectory& traj,
                          const std::vector<std::string>& extra_comments) {
  CsvTable table;
  table.comments = extra_comments;
  table.comments.push_back("engine = " + traj.engine());
  table.comments.push_back(traj.spec().summary());
  table.names.push_back("t");
  table.columns.push_back(traj.times());
  for (const auto& name : traj.column_names()) {
    table.names.push_back(name);
    table.columns.push_back(traj.column(name));
  }
  return table;
}

}  // namespace qb
