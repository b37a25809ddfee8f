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
#include <random>

namespace tsa {

// SplitMix64 finalizer over (base, index). Replication r of a sweep seeded
// with base uses derive_seed(base, r), so its stream is fixed regardless of
// which worker runs it or in which order.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Random stream backed by std::mt19937_64. Variates (not raw engine words)
// are counted so callers can audit how many draws a recursion consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t base, std::uint64_t index) {
    return RandomStream(derive_seed(base, index));
  }

  double normal() {
    ++draws_;
    return normal_(engine_);
  }

  double student_t(double dof) {
    ++draws_;
    return student_(engine_, std::student_t_distribution<double>::param_type(dof));
  }

  double uniform() {
    ++draws_;
    return uniform_(engine_);
  }

  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> student_{3.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t draws_ = 0;
};

}  // namespace tsa
