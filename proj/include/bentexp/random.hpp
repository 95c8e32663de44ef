// Copyright 2026 The bentexp Authors
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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace bentexp {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key is the user seed; the upper half of the 128-bit counter
/// names a substream and the lower half counts blocks within it, so every
/// (seed, stream) pair is an independent sequence that can be created on any
/// thread without coordination. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Ten-round bijection applied to one counter block.
  static Block encrypt(Block counter, Key key);

 private:
  Key key_;
  Block counter_;
  Block buffer_{};
  unsigned next_ = 4;
};

/// What a substream is used for; keeps data draws and bootstrap multipliers
/// of the same replicate apart.
enum class StreamPurpose : std::uint64_t {
  kData = 1,
  kBootstrap = 2,
  kAuxiliary = 3,
};

/// Generator for (seed, purpose, index). Index must stay below 2^48.
Philox4x32 substream(std::uint64_t seed, StreamPurpose purpose,
                     std::uint64_t index);

/// SplitMix64-style mix of a seed with an index, for nested seeding (e.g. the
/// bootstrap seed of Monte Carlo replicate r).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Standard normal variate.
template <typename Engine>
double draw_standard_normal(Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(engine);
}

/// Student t with 4 degrees of freedom as Z / sqrt(chi2_4 / 4), the
/// chi-square built from four squared standard normals.
template <typename Engine>
double draw_student_t4(Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(engine);
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double u = normal(engine);
    chi2 += u * u;
  }
  return z / std::sqrt(chi2 / 4.0);
}

}  // namespace bentexp
