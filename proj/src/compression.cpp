// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/compression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace aerofl {

namespace {

int ceil_log2(int s) {
  return s <= 1 ? 0 : std::bit_width(static_cast<unsigned>(s - 1));
}

// LSB-first bit packing used by the wire format.
struct BitWriter {
  std::vector<std::uint8_t>& out;
  int bit = 0;

  void push(std::uint64_t value, int nbits) {
    for (int i = 0; i < nbits; ++i) {
      if (bit == 0) out.push_back(0);
      if ((value >> i) & 1) out.back() |= static_cast<std::uint8_t>(1u << bit);
      bit = (bit + 1) % 8;
    }
  }
  void align() { bit = 0; }
};

struct BitReader {
  const std::vector<std::uint8_t>& in;
  std::size_t byte = 0;
  int bit = 0;

  std::uint64_t pull(int nbits) {
    std::uint64_t v = 0;
    for (int i = 0; i < nbits; ++i) {
      if (byte >= in.size())
        throw std::runtime_error("payload decode: truncated stream");
      if ((in[byte] >> bit) & 1) v |= (1ULL << i);
      if (++bit == 8) {
        bit = 0;
        ++byte;
      }
    }
    return v;
  }
  void align() {
    if (bit != 0) {
      bit = 0;
      ++byte;
    }
  }
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(BitReader& r) {
  r.align();
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(r.pull(8)) << (8 * i);
  return v;
}

int support_count(const Mask& mask) {
  return mask.size() - mask.zero_count();
}

// Overflow-safe two-pass norm: max * ||d / max||. Exact for vectors with a
// single nonzero entry, which the round-trip contract relies on.
double scaled_norm(const Eigen::VectorXd& d) {
  const double m = d.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return m * (d / m).norm();
}

}  // namespace

PruneResult lottery_prune(const ParamVector& w_dense, const ParamVector& warmed,
                          double delta_target, double delta_th) {
  if (delta_target < 0.0 || delta_target > delta_th)
    throw std::invalid_argument("lottery_prune: delta_target outside [0, delta_th]");
  if (w_dense.size() != warmed.size())
    throw std::invalid_argument("lottery_prune: parameter size mismatch");

  const int p = warmed.size();
  const int prune_count = static_cast<int>(std::floor(delta_target * p + 1e-9));

  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(warmed.values[a]);
    const double mb = std::abs(warmed.values[b]);
    return ma != mb ? ma < mb : a < b;
  });

  PruneResult result;
  result.mask = Mask::ones(p);
  for (int i = 0; i < prune_count; ++i) result.mask.bits[order[i]] = 0.0;
  result.delta = static_cast<double>(prune_count) / p;
  result.winning_ticket = w_dense;
  result.winning_ticket.values.array() *= result.mask.bits.array();
  return result;
}

void quantize_into(const Eigen::VectorXd& d, const Mask& support, int s,
                   Rng& rng, QuantizedVector& out) {
  if (s < 1) throw std::invalid_argument("quantize: s must be positive");
  if (support.size() != d.size())
    throw std::invalid_argument("quantize: support length mismatch");
  out.levels_s = s;
  out.signs.clear();
  out.levels.clear();
  out.norm = scaled_norm(d);
  if (out.norm == 0.0) return;  // canonical zero payload

  out.signs.resize(d.size());
  out.levels.resize(d.size());
  const double inv_norm = 1.0 / out.norm;
  std::size_t k = 0;
  for (int i = 0; i < d.size(); ++i) {
    if (support.bits[i] == 0.0) continue;
    const double ratio = std::clamp(std::abs(d[i]) * inv_norm, 0.0, 1.0);
    double l = std::floor(ratio * s);
    double frac = ratio * s - l;
    if (l >= s) {
      l = s;
      frac = 0.0;
    }
    out.signs[k] = d[i] < 0.0 ? 1 : 0;
    out.levels[k] =
        static_cast<std::uint32_t>(l) + (rng.uniform01() < frac ? 1u : 0u);
    ++k;
  }
  out.signs.resize(k);
  out.levels.resize(k);
}

QuantizedVector quantize(const Eigen::VectorXd& d, const Mask& support, int s,
                         Rng& rng) {
  QuantizedVector qv;
  quantize_into(d, support, s, rng, qv);
  return qv;
}

QuantizedVector quantize(const Eigen::VectorXd& d, int s, Rng& rng) {
  return quantize(d, Mask::ones(static_cast<int>(d.size())), s, rng);
}

void decode_into(const QuantizedVector& qv, const Mask& support,
                 Eigen::VectorXd& out) {
  const int n = support_count(support);
  if (n == support.size() && qv.norm != 0.0) {
    out.resize(support.size());  // dense support: every entry is written
  } else {
    out.setZero(support.size());
  }
  if (qv.norm == 0.0) return;
  if (static_cast<int>(qv.levels.size()) != n ||
      static_cast<int>(qv.signs.size()) != n)
    throw std::runtime_error("decode: corrupt payload (support size mismatch)");
  const double scale = qv.norm / qv.levels_s;
  int k = 0;
  for (int i = 0; i < support.size(); ++i) {
    if (support.bits[i] == 0.0) continue;
    const std::uint32_t level = qv.levels[k];
    if (level > static_cast<std::uint32_t>(qv.levels_s))
      throw std::runtime_error("decode: corrupt payload (level above s)");
    out[i] = (qv.signs[k] ? -1.0 : 1.0) * scale * level;
    ++k;
  }
}

Eigen::VectorXd decode(const QuantizedVector& qv, const Mask& support) {
  Eigen::VectorXd out;
  decode_into(qv, support, out);
  return out;
}

std::uint64_t payload_bits(PayloadKind kind, int p, double delta, int s) {
  if (delta < 0.0 || delta > 1.0)
    throw std::invalid_argument("payload_bits: delta outside [0,1]");
  if (s < 1) throw std::invalid_argument("payload_bits: s must be positive");
  const std::uint64_t zeros =
      static_cast<std::uint64_t>(std::floor(delta * p + 1e-9));
  const std::uint64_t n = static_cast<std::uint64_t>(p) - zeros;
  if (kind == PayloadKind::kRaw) return n * (1 + 32) + p;
  return n * (1 + static_cast<std::uint64_t>(ceil_log2(s))) + 32 + p;
}

OffloadPayload offload(const Eigen::VectorXd& d, const Mask& mask,
                       double q_prob, int s, Rng& rng) {
  if (q_prob < 0.0 || q_prob > 1.0)
    throw std::invalid_argument("offload: q_prob outside [0,1]");
  OffloadPayload payload;
  payload.mask = mask;
  const int p = static_cast<int>(d.size());
  const double delta = mask.prune_fraction();
  if (rng.bernoulli(q_prob)) {
    payload.kind = PayloadKind::kRaw;
    payload.raw = d;
    payload.bit_count = payload_bits(PayloadKind::kRaw, p, delta, s);
  } else {
    payload.kind = PayloadKind::kQuantized;
    payload.quantized = quantize(d, mask, s, rng);
    payload.bit_count = payload_bits(PayloadKind::kQuantized, p, delta, s);
  }
  return payload;
}

Eigen::VectorXd decode_payload(const OffloadPayload& payload) {
  if (payload.kind == PayloadKind::kRaw) return payload.raw;
  return decode(payload.quantized, payload.mask);
}

std::vector<std::uint8_t> encode_payload(const OffloadPayload& payload) {
  const int p = payload.mask.size();
  const int n = support_count(payload.mask);
  std::vector<std::uint8_t> bytes;
  bytes.push_back(static_cast<std::uint8_t>(payload.kind));
  put_u32(bytes, static_cast<std::uint32_t>(p));
  put_u32(bytes, static_cast<std::uint32_t>(n));

  BitWriter w{bytes};
  for (int i = 0; i < p; ++i) w.push(payload.mask.bits[i] != 0.0 ? 1 : 0, 1);
  w.align();

  if (payload.kind == PayloadKind::kRaw) {
    for (int i = 0; i < p; ++i)
      if (payload.mask.bits[i] != 0.0) w.push(payload.raw[i] < 0.0 ? 1 : 0, 1);
    w.align();
    for (int i = 0; i < p; ++i) {
      if (payload.mask.bits[i] == 0.0) continue;
      const float mag = static_cast<float>(std::abs(payload.raw[i]));
      std::uint32_t u;
      std::memcpy(&u, &mag, 4);
      w.push(u, 32);
    }
  } else {
    const float norm = static_cast<float>(payload.quantized.norm);
    std::uint32_t u;
    std::memcpy(&u, &norm, 4);
    w.push(u, 32);
    w.align();
    put_u32(bytes, static_cast<std::uint32_t>(payload.quantized.levels_s));
    if (payload.quantized.norm != 0.0) {
      for (int k = 0; k < n; ++k) w.push(payload.quantized.signs[k], 1);
      w.align();
      // Levels are packed losslessly at ceil(log2(s+1)) bits; the reported
      // bit_count keeps the ceil(log2 s) accounting.
      const int lb = ceil_log2(payload.quantized.levels_s + 1);
      for (int k = 0; k < n; ++k) w.push(payload.quantized.levels[k], lb);
    }
  }
  return bytes;
}

OffloadPayload decode_payload_bytes(const std::vector<std::uint8_t>& bytes) {
  BitReader r{bytes};
  const auto kind = static_cast<PayloadKind>(r.pull(8));
  if (kind != PayloadKind::kRaw && kind != PayloadKind::kQuantized)
    throw std::runtime_error("payload decode: unknown kind byte");
  const int p = static_cast<int>(get_u32(r));
  const int n = static_cast<int>(get_u32(r));

  OffloadPayload payload;
  payload.kind = kind;
  payload.mask.bits.setZero(p);
  for (int i = 0; i < p; ++i)
    if (r.pull(1)) payload.mask.bits[i] = 1.0;
  r.align();
  if (support_count(payload.mask) != n)
    throw std::runtime_error("payload decode: mask/nonzero count mismatch");

  if (kind == PayloadKind::kRaw) {
    std::vector<std::uint8_t> signs(n);
    for (int k = 0; k < n; ++k) signs[k] = static_cast<std::uint8_t>(r.pull(1));
    r.align();
    payload.raw.setZero(p);
    int k = 0;
    for (int i = 0; i < p; ++i) {
      if (payload.mask.bits[i] == 0.0) continue;
      const std::uint32_t u = static_cast<std::uint32_t>(r.pull(32));
      float mag;
      std::memcpy(&mag, &u, 4);
      payload.raw[i] = (signs[k] ? -1.0 : 1.0) * static_cast<double>(mag);
      ++k;
    }
  } else {
    const std::uint32_t u = static_cast<std::uint32_t>(r.pull(32));
    float norm;
    std::memcpy(&norm, &u, 4);
    r.align();
    payload.quantized.norm = static_cast<double>(norm);
    payload.quantized.levels_s = static_cast<int>(get_u32(r));
    if (payload.quantized.norm != 0.0) {
      payload.quantized.signs.resize(n);
      for (int k = 0; k < n; ++k)
        payload.quantized.signs[k] = static_cast<std::uint8_t>(r.pull(1));
      r.align();
      const int lb = ceil_log2(payload.quantized.levels_s + 1);
      payload.quantized.levels.resize(n);
      for (int k = 0; k < n; ++k)
        payload.quantized.levels[k] = static_cast<std::uint32_t>(r.pull(lb));
    }
  }
  const double delta = payload.mask.prune_fraction();
  payload.bit_count = payload_bits(kind, p, delta,
                                   kind == PayloadKind::kQuantized
                                       ? payload.quantized.levels_s
                                       : 1);
  return payload;
}

}  // namespace aerofl
