#pragma once

// Test oracles that do not go through the enumerator.

#include <cstdint>
#include <map>

#include "ait/dyadic.hpp"
#include "ait/pm1.hpp"

namespace testing_support {

/// Small deterministic generator for hand-rolled property tests.
struct Gen {
  std::uint64_t state;
  explicit Gen(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  bool coin() { return next() & 1; }
};

struct BruteEntry {
  unsigned k = 0;
  ait::Dyadic m;
  std::uint64_t count = 0;
};

struct BruteTable {
  std::map<ait::Natural, BruteEntry> entries;
  ait::Dyadic kraft;
};

/// Runs every bit string of every length <= L and keeps those that halt
/// after consuming exactly all their bits.
inline BruteTable brute_force(const ait::Limits& limits, ait::Natural condition = 0) {
  BruteTable t;
  for (unsigned len = 1; len <= limits.max_len; ++len) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      ait::RunResult r = ait::run(ait::Program(bits, len), limits, condition);
      const ait::Halted* h = ait::as_halted(r);
      if (!h || h->consumed != len) continue;
      auto& e = t.entries[h->output];
      if (e.count == 0 || len < e.k) e.k = len;
      e.m += ait::Dyadic::unit(len);
      ++e.count;
      t.kraft += ait::Dyadic::unit(len);
    }
  }
  return t;
}

}  // namespace testing_support
