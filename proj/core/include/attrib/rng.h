// Copyright 2026 The attrib-sanity Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATTRIB_RNG_H_
#define ATTRIB_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace attrib {

// Stateless seed derivation. Children of the same parent with different
// labels get unrelated streams; the same (parent, label) always maps to the
// same child.
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view label);
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index);

// Deterministic generator. All distributions are implemented here rather
// than taken from <random>, whose distribution algorithms are
// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double UniformPositive() { return 1.0 - Uniform(); }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t Below(std::uint64_t n);

  // Marsaglia polar method.
  double Normal();

  // N(mean, stddev^2) conditioned on |draw - mean| <= bound * stddev, by
  // rejection.
  double TruncatedNormal(double mean, double stddev, double bound);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// `count` distinct indices from [0, population) in sampled order.
std::vector<std::size_t> SampleWithoutReplacement(std::size_t population,
                                                  std::size_t count,
                                                  std::uint64_t seed);

}  // namespace attrib

#endif  // ATTRIB_RNG_H_
