#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cpreg/types.hpp"

namespace cpreg {

/// Parsed numeric CSV: header row required, every cell a finite decimal
/// number. Parse failures carry a line/column diagnostic.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Dataset plus predictor column names, in file order. The "y" column is
/// the response and "w" the change inducing covariate; every other column
/// is a predictor.
struct NamedDataset {
  Dataset data;
  std::vector<std::string> predictor_names;
};

NamedDataset dataset_from_csv(const CsvTable& table);

/// Writes y, w and the predictors with enough digits to round-trip exactly.
void write_dataset_csv(std::ostream& out, const Dataset& data,
                       const std::vector<std::string>& predictor_names = {});

}  // namespace cpreg
