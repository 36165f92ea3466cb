#pragma once

#include <cstdint>

namespace flowcritic {

// Deterministic stream-seeded generator built on splitmix64. A logical
// stream is identified by (seed, stream id); distinct streams never share
// state, so work distributed over streams is independent of scheduling
// order. Gaussian draws use Box-Muller with one cached spare.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);

  // Standard normal.
  double gaussian();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Stream-id helpers: combine purpose tags and indices into one id.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c);
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                           std::uint64_t d);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream purpose tags. Keeping every consumer on its own stream means
// adding or removing one consumer never shifts the draws of another.
namespace streams {
inline constexpr std::uint64_t kPolicyInit = 0x01;
inline constexpr std::uint64_t kCriticInit = 0x02;
inline constexpr std::uint64_t kEnv = 0x03;
inline constexpr std::uint64_t kAction = 0x04;
inline constexpr std::uint64_t kShuffle = 0x05;
inline constexpr std::uint64_t kFlowSample = 0x06;
inline constexpr std::uint64_t kFlowPath = 0x07;
inline constexpr std::uint64_t kToyData = 0x08;
inline constexpr std::uint64_t kToyEval = 0x09;
inline constexpr std::uint64_t kChecks = 0x0a;
}  // namespace streams

}  // namespace flowcritic
