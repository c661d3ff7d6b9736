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

#include "hora/random.h"

#include <cmath>
#include <numbers>

namespace hora {
namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
constexpr int kRounds = 10;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline Philox4x32::Counter Round(const Philox4x32::Counter& c,
                                 const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  MulHiLo(kMultiplier0, c[0], hi0, lo0);
  MulHiLo(kMultiplier1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::Generate(Counter counter, Key key) {
  counter = Round(counter, key);
  for (int r = 1; r < kRounds; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = Round(counter, key);
  }
  return counter;
}

RandomStream::RandomStream(std::uint64_t seed, StreamId id)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      counter_{0, id.prompt,
               (static_cast<std::uint32_t>(id.phase) << 24) | id.step,
               id.replication} {}

std::uint32_t RandomStream::NextWord() {
  if (position_ == 4) {
    block_ = Philox4x32::Generate(counter_, key_);
    ++counter_[0];
    position_ = 0;
  }
  return block_[position_++];
}

RandomStream::result_type RandomStream::operator()() {
  const std::uint64_t hi = NextWord();
  const std::uint64_t lo = NextWord();
  return (hi << 32) | lo;
}

double RandomStream::Uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::UniformOpen() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RandomStream::Below(std::uint64_t n) {
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x;
  do {
    x = (*this)();
  } while (x >= limit);
  return x % n;
}

bool RandomStream::Bernoulli(double p) { return Uniform() < p; }

double RandomStream::Normal() {
  const double u1 = UniformOpen();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::Gamma(double shape) {
  if (shape < 1.0) {
    const double boosted = Gamma(shape + 1.0);
    return boosted * std::pow(UniformOpen(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = Normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = UniformOpen();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::Beta(double a, double b) {
  for (;;) {
    const double x = Gamma(a);
    const double y = Gamma(b);
    const double sum = x + y;
    // Both draws can underflow for tiny shapes; redraw.
    if (sum > 0.0) return x / sum;
  }
}

}  // namespace hora
