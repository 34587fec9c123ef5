#pragma once

// Data generating sources: the universally distributed sampler (random program
// bits fed to PM1), an i.i.d. Bernoulli source, and file replay.
//
// Randomness: std::mt19937_64 (its output sequence is fixed by the C++
// standard), seeded directly with the 64-bit seed. Each 64-bit word is
// consumed least-significant bit first. Substream i of seed s is seeded with
// splitmix64(s ^ splitmix64(i + 1)).

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ait/codec.hpp"
#include "ait/error.hpp"
#include "ait/learning.hpp"
#include "ait/pm1.hpp"

namespace ait {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/lsb-first";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class SeededBitStream {
 public:
  explicit SeededBitStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return position_; }

  /// Independent stream for worker/trial `index`.
  SeededBitStream substream(std::uint64_t index) const {
    return SeededBitStream(splitmix64(seed_ ^ splitmix64(index + 1)));
  }

  bool next_bit() {
    if (available_ == 0) {
      word_ = engine_();
      available_ = 64;
    }
    bool b = word_ & 1u;
    word_ >>= 1;
    --available_;
    ++position_;
    return b;
  }

  std::uint64_t next_word() {
    std::uint64_t w = 0;
    for (int i = 0; i < 64; ++i) w |= std::uint64_t{next_bit()} << i;
    return w;
  }

  /// Uniform integer in [0, bound) by rejection on whole words.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw UsageError("uniform_below(0)");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      std::uint64_t w = next_word();
      if (w < limit) return w % bound;
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t word_ = 0;
  unsigned available_ = 0;
  std::uint64_t position_ = 0;
};

struct UniversalSample {
  Dataset dataset;
  Natural code = 0;
  std::uint64_t attempts = 0;  // including the accepted one
  Program program;
};

template <typename S>
concept BitStream = requires(S& s) {
  { s.next_bit() } -> std::convertible_to<bool>;
};

/// Feeds fresh random bits to PM1 until a program halts within `limits` with
/// an output that decodes to a non-empty dataset.
template <BitStream Stream>
UniversalSample sample_universal(const Limits& limits, Stream& stream,
                                 std::uint64_t max_attempts = 1'000'000) {
  limits.validate();
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::uint64_t bits = 0;
    unsigned length = 0;
    RunResult r = run([&]() -> std::optional<bool> {
      bool b = stream.next_bit();
      bits = (bits << 1) | std::uint64_t{b};
      ++length;
      return b;
    }, limits);
    const Halted* h = as_halted(r);
    if (!h || h->output == 0) continue;
    return {codec::decode_dataset(h->output), h->output, attempt, Program(bits, length)};
  }
  throw BudgetExhausted("universal sampler: no accepted draw in " + std::to_string(max_attempts) +
                        " attempts");
}

/// `count` consecutive accepted draws from one stream, as a CSV series.
template <BitStream Stream>
std::string universal_series_csv(const Limits& limits, Stream& stream, std::uint64_t count,
                                 std::uint64_t max_attempts = 1'000'000) {
  std::ostringstream series;
  series << "index,code,attempts,program_bits,points\n";
  for (std::uint64_t i = 0; i < count; ++i) {
    UniversalSample s = sample_universal(limits, stream, max_attempts);
    series << i << ',' << s.code << ',' << s.attempts << ',' << s.program.to_string() << ',';
    for (std::size_t j = 0; j < s.dataset.size(); ++j)
      series << (j ? ";" : "") << s.dataset[j].x << ':' << s.dataset[j].y;
    series << '\n';
  }
  return series.str();
}

/// n flips of an exact Bernoulli(p) coin.
inline std::vector<std::uint8_t> sample_iid_bernoulli(std::size_t n, const Rational& p,
                                                      SeededBitStream& stream) {
  if (p < 0 || p > 1) throw UsageError("bernoulli p must lie in [0,1]");
  BigInt num = boost::multiprecision::numerator(p), den = boost::multiprecision::denominator(p);
  if (den > BigInt(~std::uint64_t{0})) throw UsageError("bernoulli p denominator exceeds 64 bits");
  auto a = static_cast<std::uint64_t>(num), b = static_cast<std::uint64_t>(den);
  std::vector<std::uint8_t> out(n);
  for (auto& v : out) v = (a == 0) ? 0 : (a == b) ? 1 : static_cast<std::uint8_t>(stream.uniform_below(b) < a);
  return out;
}

/// A deterministic source replaying a recorded dataset file.
inline Dataset replay(const std::string& path) { return csv::read_dataset_file(path); }

}  // namespace ait
