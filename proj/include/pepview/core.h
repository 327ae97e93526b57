//
// pepview - Copyright 2026 The pepview Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef PEPVIEW_CORE_H_
#define PEPVIEW_CORE_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pepview {

inline constexpr std::string_view kVersion = "0.1.0";

// Errors are grouped by how the command line reports them: bad
// configuration maps to a usage failure, bad input data to a data failure,
// and non-finite or failed numerical checks to a numeric failure.
class ConfigError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DataError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Seeded generator whose output sequence is identical on every platform.
///
/// The standard distributions are implementation-defined, so uniform,
/// normal and bounded-integer draws are derived here directly from the
/// 64-bit Mersenne twister.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0): engine_(seed) { }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

  // Uniform in [0, n); n must be positive.
  std::size_t below(std::size_t n);

  template <class Seq>
  void shuffle(Seq &seq) {
    using std::swap;
    for (std::size_t i = seq.size(); i > 1; --i)
      swap(seq[i - 1], seq[below(i)]);
  }

  std::string state() const;
  void restore(const std::string &state);

private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool has_spare_ = false;
};

// Mixes a base seed with a stream index (e.g. an epoch number).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace pepview

#endif  // PEPVIEW_CORE_H_
