// include/g2p/rng.h
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

#ifndef G2P_RNG_H_
#define G2P_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace g2p {

// All randomness in the toolkit flows through this wrapper. mt19937_64 is
// fully specified by the standard and the mappings below avoid
// std::uniform_*_distribution (whose output is implementation-defined), so a
// seed produces bit-identical draws on every platform.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : gen_(seed) {}

  uint64_t NextU64() { return gen_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double NextUnit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-scale, +scale].
  double NextSymmetric(double scale) {
    return scale * (2.0 * NextUnit() - 1.0);
  }

  // Uniform integer in [0, n). n must be > 0. The modulo bias is irrelevant
  // here (n is tiny against 2^64); what matters is that the result is a pure
  // function of the generator state.
  uint64_t NextBelow(uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

// Fisher-Yates with SeededRng draws; std::shuffle is not seed-stable across
// standard library implementations.
template <typename T>
void DeterministicShuffle(std::vector<T>* v, SeededRng* rng) {
  for (size_t i = v->size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng->NextBelow(i));
    std::swap((*v)[i - 1], (*v)[j]);
  }
}

// Stable derivation of per-epoch (or per-purpose) streams from the run seed.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 step over seed ^ stream
  uint64_t z = seed ^ (stream * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace g2p

#endif  // G2P_RNG_H_
