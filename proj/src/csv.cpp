#include "cpreg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cpreg {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      for (const std::string& cell : split_line(line)) {
        table.header.push_back(trim(cell));
      }
      if (table.header.empty()) {
        throw std::invalid_argument("csv: empty header row");
      }
      continue;
    }
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw std::invalid_argument("csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(value)) {
        throw std::invalid_argument("csv: line " + std::to_string(line_no) + ", column " +
                                    std::to_string(c + 1) + ": cannot parse '" + cell +
                                    "' as a finite number");
      }
      row[c] = value;
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.size() < 2) {
    throw std::invalid_argument("csv: need at least 2 data rows, got " +
                                std::to_string(table.rows.size()));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("csv: cannot open " + path);
  }
  return read_csv(in);
}

NamedDataset dataset_from_csv(const CsvTable& table) {
  long y_col = -1;
  long w_col = -1;
  for (size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == "y") y_col = static_cast<long>(c);
    if (table.header[c] == "w") w_col = static_cast<long>(c);
  }
  if (y_col < 0 || w_col < 0) {
    throw std::invalid_argument("csv: header must contain 'y' and 'w' columns");
  }

  const Index n = static_cast<Index>(table.rows.size());
  const Index p = static_cast<Index>(table.header.size()) - 2;
  if (p < 1) {
    throw std::invalid_argument("csv: no predictor columns");
  }

  std::vector<std::string> names;
  for (size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<long>(c) == y_col || static_cast<long>(c) == w_col) continue;
    names.push_back(table.header[c]);
  }
  VectorXd y(n), w(n);
  MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    const std::vector<double>& row = table.rows[static_cast<size_t>(i)];
    y[i] = row[static_cast<size_t>(y_col)];
    w[i] = row[static_cast<size_t>(w_col)];
    Index j = 0;
    for (size_t c = 0; c < row.size(); ++c) {
      if (static_cast<long>(c) == y_col || static_cast<long>(c) == w_col) continue;
      X(i, j++) = row[c];
    }
  }
  return NamedDataset{Dataset(std::move(y), std::move(X), std::move(w)), std::move(names)};
}

void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& predictor_names) {
  const Index p = data.p();
  out << "y,w";
  for (Index j = 0; j < p; ++j) {
    if (predictor_names.size() == static_cast<size_t>(p)) {
      out << ',' << predictor_names[static_cast<size_t>(j)];
    } else {
      out << ",x" << (j + 1);
    }
  }
  out << '\n';
  char buffer[40];
  auto put = [&](double v) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    out << buffer;
  };
  for (Index i = 0; i < data.n(); ++i) {
    put(data.y[i]);
    out << ',';
    put(data.w[i]);
    for (Index j = 0; j < p; ++j) {
      out << ',';
      put(data.X(i, j));
    }
    out << '\n';
  }
}

}  // namespace cpreg
