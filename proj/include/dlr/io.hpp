// CSV ingestion and deterministic numeric output.

#pragma once

#include <string>
#include <vector>

namespace dlr {

struct Dataset {
  std::vector<long long> time_index;   // integer ticks after alignment
  std::vector<double> y;
  std::vector<std::vector<double>> X;  // m columns
  std::string y_name;
  std::vector<std::string> x_names;
  std::string transform_log;           // record of lags / alignment applied

  int T() const { return static_cast<int>(y.size()); }
  int m() const { return static_cast<int>(X.size()); }
};

// Parses a headered CSV.  `x_lags`, when non-empty, must match `x_columns`
// and applies per-regressor backshifts x_{t-lag} with aligned truncation of
// all columns.  Blank, non-numeric or NaN cells and ragged rows are rejected
// with the offending data-row numbers.
Dataset load_csv(const std::string& path, const std::string& y_column,
                 const std::vector<std::string>& x_columns, const std::vector<int>& x_lags = {});

// All values printed with 17 significant digits (lossless double round trip).
std::string format_double(double v);

// Writes a headered CSV of equal-length columns using format_double.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace dlr
