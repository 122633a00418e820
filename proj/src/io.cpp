#include "dlr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dlr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_number(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && !std::isnan(out);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& y_column,
                 const std::vector<std::string>& x_columns, const std::vector<int>& x_lags) {
  if (!x_lags.empty() && x_lags.size() != x_columns.size())
    throw std::invalid_argument("load_csv: x_lags length must match x_columns");
  for (int lag : x_lags)
    if (lag < 0) throw std::invalid_argument("load_csv: negative lag");

  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: '" + path + "' is empty");
  const auto header = split_fields(line);

  auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("load_csv: column '" + name + "' not found in '" + path + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t y_idx = column_of(y_column);
  std::vector<std::size_t> x_idx;
  for (const auto& name : x_columns) x_idx.push_back(column_of(name));

  std::vector<double> y_raw;
  std::vector<std::vector<double>> x_raw(x_columns.size());
  std::vector<std::string> problems;
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      problems.push_back("row " + std::to_string(row) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      continue;
    }
    auto take = [&](std::size_t col, const std::string& name, std::vector<double>& dest) {
      double v = 0.0;
      if (fields[col].empty()) {
        problems.push_back("row " + std::to_string(row) + ", column '" + name + "': blank cell");
      } else if (!parse_number(fields[col], v)) {
        problems.push_back("row " + std::to_string(row) + ", column '" + name +
                           "': non-numeric value '" + fields[col] + "'");
      } else {
        dest.push_back(v);
      }
    };
    take(y_idx, y_column, y_raw);
    for (std::size_t j = 0; j < x_idx.size(); ++j) take(x_idx[j], x_columns[j], x_raw[j]);
    if (problems.size() > 20) break;
  }
  if (!problems.empty()) {
    std::string msg = "load_csv: '" + path + "' has invalid cells:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::runtime_error(msg);
  }

  int max_lag = 0;
  for (int lag : x_lags) max_lag = std::max(max_lag, lag);
  const int T_raw = static_cast<int>(y_raw.size());
  const int T = T_raw - max_lag;
  if (T <= 0) throw std::runtime_error("load_csv: no rows left after lag alignment");

  Dataset out;
  out.y_name = y_column;
  out.x_names = x_columns;
  out.y.assign(y_raw.begin() + max_lag, y_raw.end());
  out.X.resize(x_columns.size());
  for (std::size_t j = 0; j < x_columns.size(); ++j) {
    const int lag = x_lags.empty() ? 0 : x_lags[j];
    out.X[j].assign(x_raw[j].begin() + (max_lag - lag), x_raw[j].begin() + (max_lag - lag) + T);
  }
  out.time_index.resize(T);
  for (int t = 0; t < T; ++t) out.time_index[t] = max_lag + t + 1;
  std::string log = "rows=" + std::to_string(T_raw) + " aligned_T=" + std::to_string(T);
  if (!x_lags.empty())
    for (std::size_t j = 0; j < x_columns.size(); ++j)
      log += " lag(" + x_columns[j] + ")=" + std::to_string(x_lags[j]);
  out.transform_log = log;
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_csv: header/column count mismatch");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != n) throw std::invalid_argument("write_csv: ragged columns");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out << ',';
      out << format_double(columns[j][i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: failed writing '" + path + "'");
}

}  // namespace dlr
