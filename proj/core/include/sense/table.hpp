#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sense::io {

/// Flat numeric table with '#'-prefixed metadata lines (config echo etc).
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  void add_row(std::initializer_list<double> vals) { rows.emplace_back(vals); }
  long col(const std::string& name) const;  // -1 if absent
};

/// Full round-trip precision ("%.17g") CSV body: header line plus data rows.
std::string csv_body(const ResultTable& t);
void write_csv(const ResultTable& t, const std::string& path);
ResultTable read_csv(const std::string& path);

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerance {
  double abs = 0.0;
  double rel = 0.0;
};

struct ColumnDiff {
  std::string column;
  double max_abs = 0.0;
  double max_rel = 0.0;
  bool pass = true;
};

struct DiffReport {
  bool pass = true;
  std::vector<ColumnDiff> columns;
  std::string failing_column;
};

/// Element-wise |a-b| <= abs + rel*|b| per column; per-column overrides fall
/// back to the default tolerance. Metadata is ignored; schemas must match.
DiffReport diff_tables(const ResultTable& a, const ResultTable& b, Tolerance def = {},
                       const std::map<std::string, Tolerance>& per_column = {});

}  // namespace sense::io
