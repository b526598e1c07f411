#pragma once

#include <cstdint>

namespace dbmd {

// Stream tags used by library code so that independent draws never share a
// counter sequence. Exposed so callers can reproduce an initialization.
inline constexpr std::uint64_t kStreamWInit = 1;
inline constexpr std::uint64_t kStreamHInit = 2;
inline constexpr std::uint64_t kStreamBernoulli = 3;
inline constexpr std::uint64_t kStreamDirichlet = 4;
inline constexpr std::uint64_t kStreamNoise = 5;
inline constexpr std::uint64_t kStreamRestart = 6;

// Counter-based generator: output n is a pure function of (key, n), built on
// the SplitMix64 finalizer. Streams for unrelated purposes are forked with
// derive(), so adding draws to one consumer never shifts another, and workers
// can draw concurrently from their own streams with stable results.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Hashes (seed, a, b, c) into a fresh stream key.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_open01();

  // Standard normal via Box-Muller on open-interval uniforms.
  double next_gaussian();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape > 0.
  double next_gamma(double shape);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dbmd
