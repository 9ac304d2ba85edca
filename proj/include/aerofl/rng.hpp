// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace aerofl {

// SplitMix64 finalizer, used both as a hash mixer and to expand seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent substream seed from a master seed and a set of
// labels (purpose string plus up to three integer coordinates). Every
// consumer of randomness in the simulator owns exactly one substream, so
// adding or removing a consumer never perturbs the draws of another.
std::uint64_t substream_seed(std::uint64_t master, std::string_view purpose,
                             std::uint64_t a = 0, std::uint64_t b = 0,
                             std::uint64_t c = 0);

// Deterministic generator: a SplitMix64 counter engine with self-owned
// transforms, so the produced streams do not depend on the standard
// library's engine or distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  int uniform_int(int n);

  // Standard normal via Box-Muller; caches the spare deviate.
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace aerofl
