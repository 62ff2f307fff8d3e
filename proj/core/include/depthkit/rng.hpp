#pragma once

#include <cstdint>
#include <random>

namespace depthkit {

/// Derives an independent stream seed from a master seed and a stream index
/// (replicate number, direction-set id, ...).  splitmix64 finalizer; the same
/// (seed, index) pair always yields the same value on every platform.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic random source.  Wraps std::mt19937_64 (whose sequence is
/// fixed by the standard) and applies explicit, portable transforms instead
/// of the implementation-defined std::*_distribution adaptors, so a given
/// seed produces identical draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe under log().
  double uniform_oo() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in a fixed order.
  double normal();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace depthkit
