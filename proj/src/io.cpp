// Copyright 2026 The dfreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dfreg/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dfreg/error.hpp"

namespace dfreg {
namespace {

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(cell);
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  for (auto& c : cells) {
    const auto b = c.find_first_not_of(" \t\r");
    const auto e = c.find_last_not_of(" \t\r");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return cells;
}

bool parse_cell(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw DomainError("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

NumericTable parse_table(const std::string& text, char delimiter) {
  NumericTable table;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;
    const auto cells = split_row(line, delimiter);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size() && numeric; ++j) numeric = parse_cell(cells[j], row[j]);
    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        table.header = cells;
        width = cells.size();
        continue;
      }
      throw DomainError("line " + std::to_string(line_no) + ": non-numeric cell");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw DomainError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(width) + " columns, found " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

NumericTable read_table(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_table(ss.str(), delimiter);
  } catch (const DomainError& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
}

Sample read_sample(const std::filesystem::path& path, char delimiter) {
  const NumericTable t = read_table(path, delimiter);
  if (t.values.cols() < 2) {
    throw DimensionError(path.string() + ": need covariate column(s) and a response column");
  }
  const Index p = t.values.cols() - 1;
  return make_sample(t.values.leftCols(p), t.values.col(p));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DomainError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ecdf_to_text(const Ecdf& ecdf, char delimiter) {
  std::string out = std::string("statistic") + delimiter + "ecdf\n";
  const auto& v = ecdf.sorted_values();
  const double r = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += format_double(v[i]) + delimiter + format_double(static_cast<double>(i + 1) / r) + "\n";
  }
  return out;
}

std::string process_to_text(const StepProcess& process, char delimiter) {
  std::string out;
  const Matrix& pts = process.eval_points();
  for (Index j = 0; j < pts.cols(); ++j) out += "x" + std::to_string(j + 1) + delimiter;
  out += "value\n";
  for (Index e = 0; e < pts.rows(); ++e) {
    for (Index j = 0; j < pts.cols(); ++j) out += format_double(pts(e, j)) + delimiter;
    out += format_double(process.values()[e]) + "\n";
  }
  return out;
}

}  // namespace dfreg
