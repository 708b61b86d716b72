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

#ifndef DFREG_IO_HPP_
#define DFREG_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "dfreg/harness.hpp"
#include "dfreg/model.hpp"
#include "dfreg/process.hpp"

namespace dfreg {

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

// Delimiter-separated numeric table. A first row that does not parse as
// numbers is taken as a header. Ragged rows and non-numeric cells are
// DomainErrors naming the line.
struct NumericTable {
  std::vector<std::string> header;
  Matrix values;
};
NumericTable read_table(const std::filesystem::path& path, char delimiter = ',');
NumericTable parse_table(const std::string& text, char delimiter = ',');

// p covariate columns followed by the response column.
Sample read_sample(const std::filesystem::path& path, char delimiter = ',');

// Writes `content` to a temporary sibling and renames it over `path`, so a
// failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Rows "value<d>level" with level = i/r, header "statistic<d>ecdf".
std::string ecdf_to_text(const Ecdf& ecdf, char delimiter = ',');

// Rows "x_1<d>...<d>x_p<d>value" over the evaluation set.
std::string process_to_text(const StepProcess& process, char delimiter = ',');

}  // namespace dfreg

#endif  // DFREG_IO_HPP_
