#pragma once

// Exhaustive exploration of the PM1 program tree. Every bit string of length
// <= L is either a halting program, a prefix of one, or closed by a budget;
// the table records exact masses for all of them.

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ait/dyadic.hpp"
#include "ait/error.hpp"
#include "ait/pm1.hpp"

namespace ait {

struct TableEntry {
  unsigned k = 0;          // shortest program length, bits
  Dyadic m;                // sum of 2^-|p| over programs outputting this value
  Program shortest;        // length-lex least among the shortest
  std::uint64_t program_count = 0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct ProgramRecord {
  Program program;
  Natural output = 0;
  std::uint64_t steps = 0;

  friend bool operator==(const ProgramRecord&, const ProgramRecord&) = default;
};

struct ComplexityTable {
  std::string machine_id{kMachineId};
  Limits limits;
  Natural condition = 0;
  std::map<Natural, TableEntry> entries;
  Dyadic omega;
  Dyadic kraft;
  Dyadic tail_mass;
  /// halting_by_length[b] = number of halting programs of exactly b bits.
  std::vector<std::uint64_t> halting_by_length;
  std::optional<std::vector<ProgramRecord>> programs;

  const TableEntry* find(Natural value) const {
    auto it = entries.find(value);
    return it == entries.end() ? nullptr : &it->second;
  }

  /// K_t(value), or nullopt when no program within the limits prints it.
  std::optional<unsigned> k(Natural value) const {
    const TableEntry* e = find(value);
    if (!e) return std::nullopt;
    return e->k;
  }

  unsigned k_or_throw(Natural value, std::string_view what = "value") const {
    const TableEntry* e = find(value);
    if (!e)
      throw OutOfTable(std::string(what) + " " + std::to_string(value) +
                       " has no program within L=" + std::to_string(limits.max_len));
    return e->k;
  }

  /// Outputs in the order a length-lexicographic walk over all halting
  /// programs first produces them.
  std::vector<Natural> outputs_in_enumeration_order() const {
    std::vector<std::pair<Program, Natural>> firsts;
    firsts.reserve(entries.size());
    for (const auto& [x, e] : entries) firsts.emplace_back(e.shortest, x);
    std::sort(firsts.begin(), firsts.end());
    std::vector<Natural> out;
    out.reserve(firsts.size());
    for (const auto& [p, x] : firsts) out.push_back(x);
    return out;
  }

  friend bool operator==(const ComplexityTable&, const ComplexityTable&) = default;
};

struct BuildOptions {
  unsigned jobs = 1;
  bool keep_programs = false;
  std::uint64_t max_nodes = 20'000'000'000ull;
  /// Order in which sibling opcodes are explored. The result must not depend
  /// on it; tests permute it to check that.
  std::array<std::uint8_t, 8> child_order{0, 1, 2, 3, 4, 5, 6, 7};
};

namespace detail {

// Masses are accumulated as integer numerators over 2^L (L <= 60).
struct Accum {
  unsigned k = 0;
  Program shortest;
  std::uint64_t mass = 0;
  std::uint64_t count = 0;
};

struct Partial {
  std::unordered_map<Natural, Accum> entries;
  std::uint64_t kraft = 0;
  std::uint64_t tail = 0;
  std::vector<std::uint64_t> halting_by_length;
  std::vector<ProgramRecord> programs;
  std::uint64_t nodes = 0;

  void record_halt(const Program& p, Natural output, unsigned L) {
    std::uint64_t w = std::uint64_t{1} << (L - p.length());
    kraft += w;
    ++halting_by_length[p.length()];
    auto [it, fresh] = entries.try_emplace(output);
    Accum& a = it->second;
    if (fresh || p < a.shortest) {
      a.shortest = p;
      a.k = p.length();
    }
    a.mass += w;
    ++a.count;
  }

  void merge(Partial&& o) {
    kraft += o.kraft;
    tail += o.tail;
    nodes += o.nodes;
    for (std::size_t i = 0; i < halting_by_length.size(); ++i)
      halting_by_length[i] += o.halting_by_length[i];
    for (auto& [x, b] : o.entries) {
      auto [it, fresh] = entries.try_emplace(x, b);
      if (fresh) continue;
      Accum& a = it->second;
      if (b.shortest < a.shortest) {
        a.shortest = b.shortest;
        a.k = b.k;
      }
      a.mass += b.mass;
      a.count += b.count;
    }
    programs.insert(programs.end(), std::make_move_iterator(o.programs.begin()),
                    std::make_move_iterator(o.programs.end()));
  }
};

struct Frontier {
  pm1::State state;
  Program prefix;
};

class Explorer {
 public:
  Explorer(const Limits& limits, Natural condition, const BuildOptions& opts,
           std::atomic<std::uint64_t>& global_nodes)
      : limits_(limits), condition_(condition), opts_(opts), global_nodes_(global_nodes) {}

  /// Explores below `node`. Nodes shallower than `split_depth` are not
  /// descended but handed to `on_split` instead.
  template <typename OnSplit>
  void explore(const Frontier& node, Partial& out, unsigned split_depth, OnSplit&& on_split) {
    const unsigned L = limits_.max_len;
    const unsigned depth = node.prefix.length();
    if (depth + 3 > L) {
      out.tail += std::uint64_t{1} << (L - depth);
      return;
    }
    if (++out.nodes % 65536 == 0) {
      if (global_nodes_.fetch_add(65536) + 65536 > opts_.max_nodes)
        throw BudgetExhausted("enumeration exceeded node ceiling " +
                              std::to_string(opts_.max_nodes));
    }
    for (std::uint8_t op_index : opts_.child_order) {
      auto op = static_cast<Opcode>(op_index);
      Frontier child{node.state, node.prefix.append_opcode(op)};
      switch (pm1::step(child.state, op, limits_, condition_)) {
        case pm1::StepOutcome::Halt:
          out.record_halt(child.prefix, child.state.top(), L);
          if (opts_.keep_programs)
            out.programs.push_back({child.prefix, child.state.top(), child.state.steps});
          break;
        case pm1::StepOutcome::Continue:
          if (child.prefix.length() < split_depth)
            explore(child, out, split_depth, on_split);
          else if (child.prefix.length() == split_depth && split_depth + 3 <= L)
            on_split(std::move(child));
          else
            explore(child, out, split_depth, on_split);
          break;
        case pm1::StepOutcome::OutOfSteps:
        case pm1::StepOutcome::Overflow:
          break;
      }
    }
  }

 private:
  Limits limits_;
  Natural condition_;
  const BuildOptions& opts_;
  std::atomic<std::uint64_t>& global_nodes_;
};

}  // namespace detail

/// Exhaustively enumerates every program of length <= L under `limits`.
/// The result is identical for every `opts.jobs` and `opts.child_order`.
inline ComplexityTable build_table(const Limits& limits, Natural condition = 0,
                                   const BuildOptions& opts = {}) {
  limits.validate();
  if (condition > limits.value_cap) throw UsageError("condition exceeds value cap");
  const unsigned L = limits.max_len;

  auto fresh_partial = [&] {
    detail::Partial p;
    p.halting_by_length.assign(L + 1, 0);
    return p;
  };

  std::atomic<std::uint64_t> global_nodes{0};
  detail::Explorer explorer(limits, condition, opts, global_nodes);

  // Shallow pass collects independent subtrees two opcodes deep.
  const unsigned split_depth = std::min(6u, (L / 3) * 3);
  detail::Partial total = fresh_partial();
  std::vector<detail::Frontier> work;
  explorer.explore(detail::Frontier{}, total, split_depth,
                   [&](detail::Frontier&& f) { work.push_back(std::move(f)); });

  unsigned jobs = std::max(1u, opts.jobs);
  std::vector<detail::Partial> partials;
  for (std::size_t i = 0; i < work.size(); ++i) partials.push_back(fresh_partial());
  auto no_split = [](detail::Frontier&&) {};
  if (jobs == 1 || work.size() < 2) {
    for (std::size_t i = 0; i < work.size(); ++i)
      explorer.explore(work[i], partials[i], 0, no_split);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < work.size();) {
          try {
            explorer.explore(work[i], partials[i], 0, no_split);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next = work.size();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (auto& p : partials) total.merge(std::move(p));

  ComplexityTable table;
  table.limits = limits;
  table.condition = condition;
  for (const auto& [x, a] : total.entries)
    table.entries.emplace(x, TableEntry{a.k, Dyadic(a.mass, L), a.shortest, a.count});
  table.kraft = Dyadic(total.kraft, L);
  table.omega = table.kraft;
  table.tail_mass = Dyadic(total.tail, L);
  table.halting_by_length = std::move(total.halting_by_length);
  if (opts.keep_programs) {
    std::sort(total.programs.begin(), total.programs.end(),
              [](const ProgramRecord& a, const ProgramRecord& b) { return a.program < b.program; });
    table.programs = std::move(total.programs);
  }
  return table;
}

struct QueryResult {
  unsigned k = 0;
  Dyadic m;
  Program shortest;
};

inline std::optional<QueryResult> query(const ComplexityTable& table, Natural value) {
  const TableEntry* e = table.find(value);
  if (!e) return std::nullopt;
  return QueryResult{e->k, e->m, e->shortest};
}

/// 1 + the largest output of a halting program of length <= n.
inline Natural bb(const ComplexityTable& table, unsigned n) {
  if (n > table.limits.max_len)
    throw UsageError("bb: n=" + std::to_string(n) + " exceeds table L=" +
                     std::to_string(table.limits.max_len));
  std::optional<Natural> best;
  for (const auto& [x, e] : table.entries)
    if (e.k <= n) best = x;  // entries are ordered by output
  if (!best) throw UsageError("bb: no halting program of length <= " + std::to_string(n));
  return *best + 1;
}

struct OmegaDigits {
  std::string bits;
  unsigned certified = 0;
};

/// First n binary digits of the table's halting mass, and how many of them
/// survive adding any mass up to the unexplored tail.
inline OmegaDigits omega_bits(const ComplexityTable& table, unsigned n) {
  OmegaDigits out;
  BigInt lo = table.omega.floor_scaled(n);
  for (unsigned i = 0; i < n; ++i) out.bits.push_back(bit_test(lo, n - 1 - i) ? '1' : '0');
  Dyadic upper = table.omega + table.tail_mass;
  while (out.certified < n) {
    unsigned i = out.certified + 1;
    if (table.omega.floor_scaled(i) != upper.floor_scaled(i)) break;
    out.certified = i;
  }
  return out;
}

/// Returns kraft; throws if the prefix property or mass bookkeeping is broken.
inline Dyadic kraft_check(const ComplexityTable& table) {
  Dyadic one(1, 0);
  if (table.kraft + table.tail_mass > one)
    throw InvariantViolation("kraft + tail exceeds 1: " + (table.kraft + table.tail_mass).to_string());
  Dyadic sum;
  std::uint64_t count = 0;
  for (const auto& [x, e] : table.entries) {
    sum += e.m;
    count += e.program_count;
    if (Dyadic::unit(e.k) > e.m)
      throw InvariantViolation("entry " + std::to_string(x) + ": 2^-k exceeds m");
  }
  if (sum != table.kraft) throw InvariantViolation("entry masses do not sum to kraft");
  Dyadic by_length;
  std::uint64_t by_length_count = 0;
  for (std::size_t b = 0; b < table.halting_by_length.size(); ++b) {
    by_length += Dyadic(BigInt(table.halting_by_length[b]), static_cast<unsigned>(b));
    by_length_count += table.halting_by_length[b];
  }
  if (by_length != table.kraft || by_length_count != count)
    throw InvariantViolation("length profile disagrees with entries");
  if (table.omega != table.kraft) throw InvariantViolation("omega differs from kraft");
  return table.kraft;
}

/// The oracle loop of the Lemma-3 style construction: walk halting programs by
/// length, stop once the accumulated mass reaches the n-bit truncation of
/// omega, and report bb(n) from what was seen. Agreement with `bb` is the
/// caller's assertion that the truncation really certifies all <= n programs.
struct OmegaThresholdScan {
  unsigned stop_length = 0;       // last length fully accumulated
  std::uint64_t programs_seen = 0;
  bool covers_n = false;          // every halting program of length <= n was seen
};

inline OmegaThresholdScan omega_threshold_scan(const ComplexityTable& table, unsigned n) {
  if (n > table.limits.max_len) throw UsageError("omega scan: n exceeds table L");
  Dyadic target(table.omega.floor_scaled(n), n);
  Dyadic acc;
  OmegaThresholdScan scan;
  for (std::size_t b = 0; b < table.halting_by_length.size(); ++b) {
    if (acc >= target && b > 0) break;
    acc += Dyadic(BigInt(table.halting_by_length[b]), static_cast<unsigned>(b));
    scan.programs_seen += table.halting_by_length[b];
    scan.stop_length = static_cast<unsigned>(b);
  }
  std::uint64_t up_to_n = 0;
  for (std::size_t b = 0; b <= n && b < table.halting_by_length.size(); ++b)
    up_to_n += table.halting_by_length[b];
  std::uint64_t seen_up_to_n = 0;
  for (std::size_t b = 0; b <= std::min<std::size_t>(n, scan.stop_length); ++b)
    seen_up_to_n += table.halting_by_length[b];
  scan.covers_n = seen_up_to_n == up_to_n;
  return scan;
}

/// Tables keyed by (limits, condition), built once and shared read-only.
class TableCache {
 public:
  explicit TableCache(BuildOptions opts = {}) : opts_(opts) {}

  std::shared_ptr<const ComplexityTable> get(const Limits& limits, Natural condition = 0) {
    Key key{limits.max_len, limits.max_steps, limits.value_cap, condition};
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const ComplexityTable>(build_table(limits, condition, opts_));
    std::lock_guard lock(mu_);
    return cache_.try_emplace(key, std::move(built)).first->second;
  }

  /// Seeds the cache with an existing table (e.g. one loaded from disk).
  void put(std::shared_ptr<const ComplexityTable> table) {
    Key key{table->limits.max_len, table->limits.max_steps, table->limits.value_cap,
            table->condition};
    std::lock_guard lock(mu_);
    cache_[key] = std::move(table);
  }

  const BuildOptions& options() const noexcept { return opts_; }

 private:
  using Key = std::tuple<unsigned, std::uint64_t, Natural, Natural>;
  BuildOptions opts_;
  std::mutex mu_;
  std::map<Key, std::shared_ptr<const ComplexityTable>> cache_;
};

}  // namespace ait
