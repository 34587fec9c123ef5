#include <catch_amalgamated.hpp>

#include <algorithm>

#include "ait/enumerator.hpp"
#include "support.hpp"

using namespace ait;

namespace {

const ComplexityTable& table6() {
  static const ComplexityTable t = build_table(Limits{6, 4}, 0);
  return t;
}

void require_matches_brute_force(const ComplexityTable& t) {
  auto brute = testing_support::brute_force(t.limits, t.condition);
  REQUIRE(t.kraft == brute.kraft);
  REQUIRE(t.entries.size() == brute.entries.size());
  for (const auto& [x, e] : brute.entries) {
    const TableEntry* got = t.find(x);
    REQUIRE(got);
    REQUIRE(got->k == e.k);
    REQUIRE(got->m == e.m);
    REQUIRE(got->program_count == e.count);
  }
}

}  // namespace

TEST_CASE("L=6 table matches the hand enumeration") {
  const auto& t = table6();
  REQUIRE(t.kraft == Dyadic(15, 6));
  REQUIRE(t.tail_mass == Dyadic(49, 6));
  REQUIRE(t.omega == t.kraft);
  REQUIRE(t.entries.size() == 2);
  REQUIRE(t.find(0)->m == Dyadic(14, 6));
  REQUIRE(t.find(0)->k == 3);
  REQUIRE(t.find(1)->m == Dyadic(1, 6));
  REQUIRE(t.find(1)->k == 6);
  require_matches_brute_force(t);
}

TEST_CASE("L=3, T=1 table holds only HALT") {
  auto t = build_table(Limits{3, 1}, 0);
  REQUIRE(t.kraft == Dyadic(1, 3));
  REQUIRE(t.entries.size() == 1);
  REQUIRE(t.find(0)->m == Dyadic(1, 3));
  REQUIRE(t.find(0)->shortest.to_string() == "000");
}

TEST_CASE("tables agree with running every bit string") {
  require_matches_brute_force(build_table(Limits{12, 64}, 0));
  require_matches_brute_force(build_table(Limits{15, 5}, 0));
  require_matches_brute_force(build_table(Limits{13, 64, 20}, 3));
  require_matches_brute_force(build_table(Limits{16, 64}, 7));
}

TEST_CASE("query") {
  auto r = query(table6(), 1);
  REQUIRE(r);
  REQUIRE(r->k == 6);
  REQUIRE(r->m == Dyadic(1, 6));
  REQUIRE(r->shortest.to_string() == "010000");
  REQUIRE_FALSE(query(table6(), 7));
  auto t9 = build_table(Limits{9, 256}, 0);
  REQUIRE(query(t9, 2)->k == 9);
  REQUIRE(query(t9, 2)->shortest.to_string() == "010010000");
}

TEST_CASE("bb") {
  auto t = build_table(Limits{12, 64}, 0);
  REQUIRE(bb(t, 3) == 1);
  REQUIRE(bb(t, 5) == 1);
  REQUIRE(bb(t, 6) == 2);
  REQUIRE(bb(t, 9) == 3);
  REQUIRE(bb(t, 12) == 5);
  REQUIRE_THROWS_AS(bb(t, 2), UsageError);
  REQUIRE_THROWS_AS(bb(t, 13), UsageError);
}

TEST_CASE("omega digits and certification") {
  auto d = omega_bits(table6(), 6);
  REQUIRE(d.bits == "001111");
  REQUIRE(d.certified == 0);
  auto empty = omega_bits(table6(), 0);
  REQUIRE(empty.bits.empty());
  REQUIRE(empty.certified == 0);

  auto closed = build_table(Limits{6, 1}, 0);  // every node resolves within one step
  REQUIRE(closed.tail_mass.is_zero());
  auto c = omega_bits(closed, 10);
  REQUIRE(c.bits == "0010000000");
  REQUIRE(c.certified == 10);
}

TEST_CASE("kraft_check") {
  REQUIRE(kraft_check(table6()) == Dyadic(15, 6));
  REQUIRE(kraft_check(build_table(Limits{3, 1}, 0)) == Dyadic(1, 3));
  auto broken = table6();
  broken.tail_mass = Dyadic(50, 6);
  REQUIRE_THROWS_AS(kraft_check(broken), InvariantViolation);
  broken = table6();
  broken.entries.at(1).m = Dyadic(2, 6);
  REQUIRE_THROWS_AS(kraft_check(broken), InvariantViolation);
}

TEST_CASE("conditions change only programs that use CND") {
  BuildOptions opts;
  opts.keep_programs = true;
  auto a = build_table(Limits{12, 64}, 2, opts);
  auto b = build_table(Limits{12, 64}, 3, opts);
  auto uses_cnd = [](const Program& p) {
    for (unsigned i = 0; i < p.length(); i += 3)
      if (p.bit(i) && p.bit(i + 1) && p.bit(i + 2)) return true;
    return false;
  };
  std::map<std::uint64_t, Natural> out_a;
  for (const auto& r : *a.programs)
    if (!uses_cnd(r.program)) out_a[r.program.packed() | (std::uint64_t{1} << r.program.length())] = r.output;
  std::size_t cnd_free_b = 0;
  for (const auto& r : *b.programs) {
    if (uses_cnd(r.program)) continue;
    ++cnd_free_b;
    auto key = r.program.packed() | (std::uint64_t{1} << r.program.length());
    REQUIRE(out_a.count(key));
    REQUIRE(out_a[key] == r.output);
  }
  REQUIRE(cnd_free_b == out_a.size());
  REQUIRE(a.find(2)->k == 6);
  REQUIRE(b.find(3)->k == 6);
  REQUIRE(a.entries != b.entries);
}

TEST_CASE("result is independent of jobs and sibling order") {
  Limits l{18, 64};
  auto base = build_table(l, 0);
  BuildOptions threaded;
  threaded.jobs = 4;
  REQUIRE(build_table(l, 0, threaded) == base);
  BuildOptions reversed;
  reversed.child_order = {7, 6, 5, 4, 3, 2, 1, 0};
  reversed.jobs = 3;
  REQUIRE(build_table(l, 0, reversed) == base);
}

TEST_CASE("the node ceiling raises a budget error") {
  BuildOptions tiny;
  tiny.max_nodes = 1000;
  REQUIRE_THROWS_AS(build_table(Limits{30, 256}, 0, tiny), BudgetExhausted);
}

TEST_CASE("program list is sorted and consistent with entries") {
  BuildOptions opts;
  opts.keep_programs = true;
  auto t = build_table(Limits{12, 64}, 0, opts);
  REQUIRE(std::is_sorted(t.programs->begin(), t.programs->end(),
                         [](const auto& a, const auto& b) { return a.program < b.program; }));
  std::uint64_t total = 0;
  for (const auto& [x, e] : t.entries) total += e.program_count;
  REQUIRE(total == t.programs->size());
}

TEST_CASE("the mass-threshold scan agrees with bb") {
  auto t = build_table(Limits{24, 256}, 0);
  for (unsigned n : {3u, 6u, 9u, 12u}) {
    auto scan = omega_threshold_scan(t, n);
    INFO("n=" << n << " stop=" << scan.stop_length);
    REQUIRE(scan.covers_n);
  }
}

TEST_CASE("table cache returns the same instance") {
  TableCache cache;
  auto a = cache.get(Limits{9, 256}, 0);
  auto b = cache.get(Limits{9, 256}, 0);
  REQUIRE(a.get() == b.get());
  REQUIRE(cache.get(Limits{9, 256}, 1).get() != a.get());
}
