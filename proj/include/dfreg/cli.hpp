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

#ifndef DFREG_CLI_HPP_
#define DFREG_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace dfreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // bad flags, config or input files
inline constexpr int kExitNumerical = 2;  // singular fits, failed simulations

// Entry point behind the `dfreg` executable. `args` excludes the program name.
//
//   dfreg fit      --data FILE [--model ID]
//   dfreg test     --data FILE --seed S [--model ID] [--null-reps R]
//   dfreg simulate --config FILE [--seed S] [--reps R] [--n N] [--plot-data] [--raw]
//   dfreg power    --config FILE [--seed S] [--reps R] [--null-reps R] [--raw]
//   dfreg assign   --data FILE [--anchors halton|random --seed S] [--no-rescale]
//   dfreg limits   [--p P] [--d D] [--grid M]
//
// Common flags: --output-dir (default $DFREG_OUTPUT_DIR, else ./dfreg_out),
// --workers, --delimiter, --set section.key=value.
// Every command writes manifest.ini and summary.txt next to its data files.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfreg::cli

#endif  // DFREG_CLI_HPP_
