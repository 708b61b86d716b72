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

#ifndef DFREG_ERROR_HPP_
#define DFREG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dfreg {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (non-unit vector, t outside
// [0,1], unknown identifier, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Singular or rank-deficient linear algebra.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Rank deficiency detected while orthonormalizing; `index()` is the
// zero-based position of the first dependent vector.
class RankDeficiencyError : public SingularityError {
 public:
  RankDeficiencyError(const std::string& what, int index)
      : SingularityError(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

// Monte Carlo run that could not be completed (too many failed fits).
class SimulationError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration file or override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfreg

#endif  // DFREG_ERROR_HPP_
