// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "aerofl/learner.hpp"
#include "aerofl/rng.hpp"

namespace aerofl {

struct PruneResult {
  Mask mask;
  double delta = 0.0;  // realized prune fraction, zero_count / p
  ParamVector winning_ticket;
};

// Magnitude pruning in the lottery-ticket style: the mask zeroes the
// floor(delta_target * p) smallest-magnitude entries of `warmed`, ties broken
// by lowest index; the ticket rewinds to the dense model w_dense ⊙ mask.
PruneResult lottery_prune(const ParamVector& w_dense, const ParamVector& warmed,
                          double delta_target, double delta_th = 0.7);

// Low-precision stochastic quantizer state. Entries align, in order, with
// the support (set bits) of the accompanying mask. The norm travels as a
// 32-bit float on the wire; in memory it is kept at full precision.
struct QuantizedVector {
  double norm = 0.0;
  int levels_s = 1;  // s, the number of quantization levels
  std::vector<std::uint8_t> signs;   // 1 = negative
  std::vector<std::uint32_t> levels;  // each in [0, s]
};

QuantizedVector quantize(const Eigen::VectorXd& d, const Mask& support, int s,
                         Rng& rng);
// Convenience form quantizing over all coordinates.
QuantizedVector quantize(const Eigen::VectorXd& d, int s, Rng& rng);

// In-place variants used by the statistics harnesses to avoid allocation.
void quantize_into(const Eigen::VectorXd& d, const Mask& support, int s,
                   Rng& rng, QuantizedVector& out);
void decode_into(const QuantizedVector& qv, const Mask& support,
                 Eigen::VectorXd& out);

// Inverse mapping: coordinate i <- norm * sign_i * level_i / s on the mask
// support, zero elsewhere. Throws on levels above s.
Eigen::VectorXd decode(const QuantizedVector& qv, const Mask& support);

enum class PayloadKind : std::uint8_t { kRaw = 0, kQuantized = 1 };

struct OffloadPayload {
  PayloadKind kind = PayloadKind::kRaw;
  Eigen::VectorXd raw;  // populated for kRaw
  QuantizedVector quantized;  // populated for kQuantized
  Mask mask;
  std::uint64_t bit_count = 0;
};

// Uplink payload size in bits. Raw: n*(1+32) + p; quantized:
// n*(1+ceil(log2 s)) + 32 + p, where n = p - floor(delta*p) surviving
// coordinates and the trailing p bits carry the mask.
std::uint64_t payload_bits(PayloadKind kind, int p, double delta, int s);

// Sends the raw difference with probability q_prob, otherwise the quantized
// one; fills in the exact bit count either way.
OffloadPayload offload(const Eigen::VectorXd& d, const Mask& mask,
                       double q_prob, int s, Rng& rng);

Eigen::VectorXd decode_payload(const OffloadPayload& payload);

// Bit-exact wire format, documented in the README: header byte (kind),
// p and nonzero count as little-endian u32, mask bitset (LSB first), then
// the kind-specific body. Raw bodies carry sign bits plus float32
// magnitudes; quantized bodies carry the float32 norm, u32 s, sign bits and
// levels packed at ceil(log2(s+1)) bits each.
std::vector<std::uint8_t> encode_payload(const OffloadPayload& payload);
OffloadPayload decode_payload_bytes(const std::vector<std::uint8_t>& bytes);

}  // namespace aerofl
