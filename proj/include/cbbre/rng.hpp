#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cbbre {

/// Independent stream purposes derived from one user seed.
enum class Stream : std::uint32_t {
  Environment = 1,
  Demographic = 2,
  Jumps = 3,
  Immigration = 4,
  Auxiliary = 5
};

/// Per-path generator: (seed, path index, purpose) fully determine the stream.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t path, Stream purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32),
                      static_cast<std::uint32_t>(purpose)};
    eng_.seed(seq);
  }

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  /// Uniform on (0,1], safe for logs and negative powers.
  double uniform_pos() { return 1.0 - uniform_(eng_); }
  double exponential() { return -std::log(uniform_pos()); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(eng_); }
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(eng_);
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace cbbre
