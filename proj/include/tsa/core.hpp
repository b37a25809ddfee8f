// Copyright 2026 The trunc-sa Authors. All Rights Reserved.
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

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tsa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Step indices start at 1; index 0 denotes the initial value.
using StepIndex = std::int64_t;

// Raised for ill-formed inputs: non-finite vectors, non-SPD matrices,
// dimension mismatches, parameters outside their admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when a quantity is requested that the chosen family cannot supply
// in closed form (e.g. the covariance of a custom noise field).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Floating-point blowup inside a recursion; carries the offending step.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(StepIndex step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  StepIndex step() const noexcept { return step_; }

 private:
  StepIndex step_;
};

inline bool all_finite(const Eigen::Ref<const Matrix>& x) {
  return x.allFinite();
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

inline void require_finite(const Eigen::Ref<const Matrix>& x,
                           const std::string& what) {
  if (!x.allFinite()) throw DomainError(what + ": non-finite entries");
}

inline void require_dim(Eigen::Index actual, Eigen::Index expected,
                        const std::string& what) {
  if (actual != expected) {
    throw DomainError(what + ": dimension " + std::to_string(actual) +
                      ", expected " + std::to_string(expected));
  }
}

// Cholesky-based SPD test on the symmetric part; asymmetry beyond a relative
// 1e-10 is rejected.
bool is_spd(const Matrix& m);
void require_spd(const Matrix& m, const std::string& what);

}  // namespace tsa
