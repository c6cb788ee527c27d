// Copyright (c) 2026, the rlcuts authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace rlcuts {

// splitmix64 finalizer; statistically well mixed for hashing and for
// counter-based sample streams.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) { return mix64(a ^ mix64(b)); }

inline double to_unit_double(uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;  // [0,1)
}

// Counter-based random stream. Values depend only on the key and the draw
// index, never on execution order across pixels or threads.
class RandomSequence {
 public:
  RandomSequence() = default;
  RandomSequence(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    key_ = mix64(seed);
    key_ = hash_combine(key_, a);
    key_ = hash_combine(key_, b);
    key_ = hash_combine(key_, c);
  }

  double next() { return to_unit_double(next_bits()); }
  uint64_t next_bits() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++dim_); }

 private:
  uint64_t key_ = 0;
  uint64_t dim_ = 0;
};

}  // namespace rlcuts
