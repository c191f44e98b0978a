// Copyright 2026 The carpetlab Authors.
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

#ifndef CARPETLAB_ERRORS_HPP_
#define CARPETLAB_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace carpetlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotCongruent : public Error {
 public:
  using Error::Error;
};

class InvalidFactor : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidFactorDimension : public Error {
 public:
  using Error::Error;
};

class InvalidWord : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class DegenerateMass : public Error {
 public:
  using Error::Error;
};

// Raised by enumerations whose output would exceed the configured budget.
// `requested` saturates at UINT64_MAX.
class EnumerationBudget : public Error {
 public:
  EnumerationBudget(const std::string& what, std::uint64_t requested,
                    std::uint64_t budget)
      : Error(what + " (requested " + std::to_string(requested) +
              ", budget " + std::to_string(budget) + ")"),
        requested_(requested),
        budget_(budget) {}

  std::uint64_t requested() const { return requested_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t requested_;
  std::uint64_t budget_;
};

// Internal-consistency failure: two harvests that must be disjoint overlap.
class DisjointnessViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace carpetlab

#endif  // CARPETLAB_ERRORS_HPP_
