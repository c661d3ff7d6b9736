// Copyright 2026 The Authors.
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

#ifndef HORA_RANDOM_H_
#define HORA_RANDOM_H_

#include <array>
#include <cstdint>
#include <limits>

namespace hora {

// Philox4x32-10 counter-based block function (Salmon et al., SC'11).
// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter Generate(Counter counter, Key key);
};

// Purpose tag for a substream. Values are part of the reproducibility
// contract; do not renumber.
enum class StreamPhase : std::uint32_t {
  kPopulation = 1,
  kPreRollout = 2,
  kAdditionalRollout = 3,
  kMonteCarlo = 4,
  kInstance = 5,
};

struct StreamId {
  std::uint32_t replication = 0;
  std::uint32_t step = 0;
  StreamPhase phase = StreamPhase::kMonteCarlo;
  std::uint32_t prompt = 0;
};

// An independent random stream addressed by (root seed, StreamId). Two
// streams with the same address produce the same sequence on every
// platform; the draw sequence depends only on the address and on the number
// of values consumed.
//
// Satisfies UniformRandomBitGenerator, but the distribution helpers below
// should be preferred over <random> distributions, whose algorithms are
// implementation-defined.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1).
  double UniformOpen();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  bool Bernoulli(double p);
  double Normal();
  // Marsaglia-Tsang; shape > 0.
  double Gamma(double shape);
  // Gamma-ratio construction X/(X+Y); a, b > 0.
  double Beta(double a, double b);

 private:
  std::uint32_t NextWord();

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  int position_ = 4;
};

}  // namespace hora

#endif  // HORA_RANDOM_H_
