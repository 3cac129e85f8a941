// Copyright 2026 The cvdistill Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace cvdistill {

/// Raised when a pure state and a density operator are combined.
class KindMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested herald outcome has (numerically) zero probability.
class HeraldImpossibleError : public std::runtime_error {
 public:
  HeraldImpossibleError(const std::string& what, double probability)
      : std::runtime_error(what), probability_(probability) {}
  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

/// Truncation error of a circuit result exceeded the caller's threshold.
class CutoffTooSmallError : public std::runtime_error {
 public:
  CutoffTooSmallError(const std::string& what, double norm_deficit)
      : std::runtime_error(what), norm_deficit_(norm_deficit) {}
  double norm_deficit() const noexcept { return norm_deficit_; }

 private:
  double norm_deficit_;
};

}  // namespace cvdistill
