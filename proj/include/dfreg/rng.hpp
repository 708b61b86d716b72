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

#ifndef DFREG_RNG_HPP_
#define DFREG_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace dfreg {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed splitting. Every random stream in the project is keyed
// by (master seed, purpose label, index):
//
//   h    = FNV-1a-64(purpose)
//   seed = splitmix64(splitmix64(master ^ h) + index * 0x9E3779B97F4A7C15)
//
// so streams never depend on execution order or on the number of workers.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                          std::uint64_t index = 0);

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace dfreg

#endif  // DFREG_RNG_HPP_
