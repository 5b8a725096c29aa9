// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace eepn {

// Stream ids used by the simulator. Each (seed, stream) pair gets its own
// generator, so adding a consumer never perturbs the others.
enum class Stream : std::uint64_t {
  Symbols = 1,
  TxPhase = 2,
  RxPhase = 3,
  Awgn = 4,
  InitialPhase = 5,
  MonteCarlo = 6,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of substream `stream` under master `seed`: mix64(mix64(seed) ^ stream).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);
inline std::uint64_t substream_seed(std::uint64_t seed, Stream s) {
  return substream_seed(seed, static_cast<std::uint64_t>(s));
}

/// mt19937_64 with Box-Muller normals. std::normal_distribution is avoided
/// because its algorithm is implementation-defined; this keeps sequences
/// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  Rng(std::uint64_t seed, Stream s) : eng_(substream_seed(seed, s)) {}

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  double normal();
  int integer(int lo, int hi);  // inclusive

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace eepn
