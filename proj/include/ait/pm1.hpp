#pragma once

// PM1: a bit-demand stack machine. Programs are read 3 bits at a time, one
// opcode per group, until HALT; the consumed prefix *is* the program, so the
// set of halting programs is prefix-free by construction.

#include <array>
#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ait/error.hpp"

namespace ait {

using Natural = std::uint64_t;

inline constexpr std::string_view kMachineId = "PM1/1";

/// Normative opcode table. Hashed into every table and report header, so any
/// edit here must come with a new machine id.
inline constexpr std::string_view kMachineSemantics =
    "PM1/1 bit-demand stack machine over naturals; stack initially empty; "
    "pop on empty yields 0; loop: read 3 bits (MSB first) else OutOfBits; "
    "count one step, steps > T => OutOfSteps; execute; "
    "pushed value > V_max => ValueOverflow. "
    "000 HALT output top (0 if empty); 001 ZERO push 0; 010 INC pop a push a+1; "
    "011 DBL pop a push 2a; 100 ADD pop a pop b push a+b; "
    "101 MUL pop a pop b push a*b; 110 DUP pop a push a push a; "
    "111 CND push condition.";

enum class Opcode : std::uint8_t { Halt = 0, Zero, Inc, Dbl, Add, Mul, Dup, Cnd };

inline constexpr std::array<std::string_view, 8> kOpcodeNames = {
    "HALT", "ZERO", "INC", "DBL", "ADD", "MUL", "DUP", "CND"};

inline constexpr Natural kDefaultValueCap = 0xFFFFFFFFull;

struct Limits {
  unsigned max_len = 24;           // L, bits
  std::uint64_t max_steps = 256;   // T
  Natural value_cap = kDefaultValueCap;  // V_max

  void validate() const {
    if (max_len < 3) throw UsageError("limits: max_len must be >= 3");
    if (max_len > 60) throw UsageError("limits: max_len must be <= 60");
    if (max_steps < 1) throw UsageError("limits: max_steps must be >= 1");
    if (value_cap < 1) throw UsageError("limits: value_cap must be >= 1");
  }

  friend bool operator==(const Limits&, const Limits&) = default;
};

/// A bit string of at most 64 bits, first bit most significant.
class Program {
 public:
  static constexpr unsigned kMaxBits = 64;

  Program() = default;
  Program(std::uint64_t bits, unsigned length) : bits_(bits), length_(length) {
    if (length > kMaxBits) throw UsageError("program longer than 64 bits");
    if (length < kMaxBits) bits_ &= (std::uint64_t{1} << length) - 1;
  }

  static Program parse(std::string_view text) {
    if (text.size() > kMaxBits) throw UsageError("program longer than 64 bits");
    std::uint64_t v = 0;
    for (char c : text) {
      if (c != '0' && c != '1')
        throw UsageError("program bits must be '0'/'1', got '" + std::string(text) + "'");
      v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return Program(v, static_cast<unsigned>(text.size()));
  }

  static Program from_opcodes(std::initializer_list<Opcode> ops) {
    Program p;
    for (Opcode op : ops) p = p.append_opcode(op);
    return p;
  }

  unsigned length() const noexcept { return length_; }
  std::uint64_t packed() const noexcept { return bits_; }

  bool bit(unsigned i) const noexcept { return (bits_ >> (length_ - 1 - i)) & 1u; }

  Program append_opcode(Opcode op) const {
    return Program((bits_ << 3) | static_cast<std::uint64_t>(op), length_ + 3);
  }

  bool is_prefix_of(const Program& other) const noexcept {
    if (length_ > other.length_) return false;
    if (length_ == 0) return true;
    return (other.bits_ >> (other.length_ - length_)) == bits_;
  }

  std::string to_string() const {
    std::string s(length_, '0');
    for (unsigned i = 0; i < length_; ++i) s[i] = bit(i) ? '1' : '0';
    return s;
  }

  /// Length-lexicographic order: shorter first, then by bits.
  friend std::strong_ordering operator<=>(const Program& a, const Program& b) noexcept {
    if (auto c = a.length_ <=> b.length_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }
  friend bool operator==(const Program&, const Program&) = default;

 private:
  std::uint64_t bits_ = 0;
  unsigned length_ = 0;
};

struct Halted {
  Natural output = 0;
  std::uint64_t steps = 0;
  unsigned consumed = 0;
  friend bool operator==(const Halted&, const Halted&) = default;
};
struct OutOfSteps {
  friend bool operator==(const OutOfSteps&, const OutOfSteps&) = default;
};
struct OutOfBits {
  friend bool operator==(const OutOfBits&, const OutOfBits&) = default;
};
struct ValueOverflow {
  friend bool operator==(const ValueOverflow&, const ValueOverflow&) = default;
};

using RunResult = std::variant<Halted, OutOfSteps, OutOfBits, ValueOverflow>;

inline const Halted* as_halted(const RunResult& r) noexcept { return std::get_if<Halted>(&r); }

/// Anything that hands out program bits on demand; `std::nullopt` = exhausted.
template <typename F>
concept BitSource = std::invocable<F&> && requires(F& f) {
  { f() } -> std::convertible_to<std::optional<bool>>;
};

namespace pm1 {

inline constexpr unsigned kMaxStack = 24;

/// Mutable machine state between opcodes. Shared by `run` and the enumerator,
/// which snapshots it at every tree branch.
struct State {
  std::array<Natural, kMaxStack> stack{};
  unsigned depth = 0;  // stack size
  std::uint64_t steps = 0;

  Natural pop() noexcept { return depth == 0 ? 0 : stack[--depth]; }
  Natural top() const noexcept { return depth == 0 ? 0 : stack[depth - 1]; }
};

enum class StepOutcome : std::uint8_t { Continue, Halt, OutOfSteps, Overflow };

/// Executes one opcode in place. Stack depth grows by at most one per opcode
/// and programs are capped at 60 bits (20 opcodes), so kMaxStack is never reached.
inline StepOutcome step(State& s, Opcode op, const Limits& limits, Natural condition) noexcept {
  ++s.steps;
  if (s.steps > limits.max_steps) return StepOutcome::OutOfSteps;
  using U128 = unsigned __int128;
  auto push = [&](U128 v) {
    if (v > limits.value_cap) return StepOutcome::Overflow;
    s.stack[s.depth++] = static_cast<Natural>(v);
    return StepOutcome::Continue;
  };
  switch (op) {
    case Opcode::Halt:
      return StepOutcome::Halt;
    case Opcode::Zero:
      return push(0);
    case Opcode::Inc:
      return push(U128{s.pop()} + 1);
    case Opcode::Dbl:
      return push(U128{s.pop()} * 2);
    case Opcode::Add: {
      U128 a = s.pop();
      U128 b = s.pop();
      return push(a + b);
    }
    case Opcode::Mul: {
      U128 a = s.pop();
      U128 b = s.pop();
      return push(a * b);
    }
    case Opcode::Dup: {
      Natural a = s.pop();
      s.stack[s.depth++] = a;
      s.stack[s.depth++] = a;
      return StepOutcome::Continue;
    }
    case Opcode::Cnd:
      return push(condition);
  }
  return StepOutcome::Continue;
}

}  // namespace pm1

/// Runs PM1 reading bits from `source`. The source is never read past the
/// HALT opcode nor past `limits.max_len` bits.
template <BitSource Source>
RunResult run(Source&& source, const Limits& limits, Natural condition = 0) {
  limits.validate();
  if (condition > limits.value_cap) throw UsageError("condition exceeds value cap");
  pm1::State s;
  unsigned consumed = 0;
  for (;;) {
    if (consumed + 3 > limits.max_len) return OutOfBits{};
    unsigned code = 0;
    for (int i = 0; i < 3; ++i) {
      std::optional<bool> b = source();
      if (!b) return OutOfBits{};
      code = (code << 1) | static_cast<unsigned>(*b);
    }
    consumed += 3;
    switch (pm1::step(s, static_cast<Opcode>(code), limits, condition)) {
      case pm1::StepOutcome::Continue:
        break;
      case pm1::StepOutcome::Halt:
        return Halted{s.top(), s.steps, consumed};
      case pm1::StepOutcome::OutOfSteps:
        return OutOfSteps{};
      case pm1::StepOutcome::Overflow:
        return ValueOverflow{};
    }
  }
}

/// Convenience overload: feeds a fixed program, then reports exhaustion.
inline RunResult run(const Program& program, const Limits& limits, Natural condition = 0) {
  unsigned next = 0;
  return run([&]() -> std::optional<bool> {
    if (next >= program.length()) return std::nullopt;
    return program.bit(next++);
  }, limits, condition);
}

}  // namespace ait
