#include "sense/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sense::io {

long ResultTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<long>(i);
  return -1;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string csv_body(const ResultTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << fmt(row[i]);
    os << "\n";
  }
  return os.str();
}

void write_csv(const ResultTable& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& [k, v] : t.meta) f << "# " << k << " = " << v << "\n";
  f << csv_body(t);
}

ResultTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open input file: " + path);
  ResultTable t;
  std::string line;
  bool header_done = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto trim = [](std::string s) {
          const auto a = s.find_first_not_of(" \t#");
          const auto b = s.find_last_not_of(" \t\r");
          return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        t.meta.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      }
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
      header_done = true;
    } else {
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

DiffReport diff_tables(const ResultTable& a, const ResultTable& b, Tolerance def,
                       const std::map<std::string, Tolerance>& per_column) {
  if (a.columns != b.columns) throw SchemaMismatch("column schemas differ");
  if (a.rows.size() != b.rows.size()) throw SchemaMismatch("row counts differ");
  DiffReport rep;
  rep.columns.resize(a.columns.size());
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    auto& cd = rep.columns[c];
    cd.column = a.columns[c];
    const auto it = per_column.find(cd.column);
    const Tolerance tol = it == per_column.end() ? def : it->second;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      const double x = a.rows[r].at(c), y = b.rows[r].at(c);
      const double ad = std::abs(x - y);
      cd.max_abs = std::max(cd.max_abs, ad);
      if (y != 0.0) cd.max_rel = std::max(cd.max_rel, ad / std::abs(y));
      if (ad > tol.abs + tol.rel * std::abs(y)) cd.pass = false;
    }
    if (!cd.pass && rep.pass) {
      rep.pass = false;
      rep.failing_column = cd.column;
    }
  }
  return rep;
}

}  // namespace sense::io
