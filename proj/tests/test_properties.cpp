#include <catch_amalgamated.hpp>

#include <set>

#include "ait/ait.hpp"
#include "support.hpp"

using namespace ait;
using testing_support::Gen;

TEST_CASE("property: halting programs form a prefix-free set") {
  BuildOptions opts;
  opts.keep_programs = true;
  for (Limits l : {Limits{12, 64}, Limits{18, 256}, Limits{17, 9, 1000}}) {
    auto t = build_table(l, 0, opts);
    std::set<std::pair<unsigned, std::uint64_t>> halting;
    for (const auto& r : *t.programs) halting.insert({r.program.length(), r.program.packed()});
    for (const auto& r : *t.programs)
      for (unsigned len = 3; len < r.program.length(); len += 3)
        REQUIRE_FALSE(halting.count({len, r.program.packed() >> (r.program.length() - len)}));
  }
}

TEST_CASE("property: kraft + tail <= 1 and entry bookkeeping on many limits") {
  Gen g(21);
  for (int i = 0; i < 12; ++i) {
    Limits l{3 + static_cast<unsigned>(g.below(13)), 1 + g.below(40), 1 + g.below(5000)};
    auto t = build_table(l, g.below(l.value_cap + 1));
    REQUIRE_NOTHROW(kraft_check(t));
    REQUIRE(check_coding(t).pass);
  }
}

TEST_CASE("property: enlarging the limits never loses an entry or raises k") {
  auto small = build_table(Limits{12, 5}, 0);
  for (Limits big : {Limits{15, 5}, Limits{12, 64}, Limits{18, 256}}) {
    auto t = build_table(big, 0);
    for (const auto& [x, e] : small.entries) {
      REQUIRE(t.find(x));
      REQUIRE(t.find(x)->k <= e.k);
    }
  }
}

TEST_CASE("property: conditioning never raises complexity") {
  TableCache cache;
  Limits l{18, 256};
  auto base = cache.get(l, 0);
  Gen g(22);
  for (int i = 0; i < 12; ++i) {
    Natural c = g.below(5000);
    auto cond = cache.get(l, c);
    for (const auto& [x, e] : base->entries) {
      REQUIRE(cond->find(x));
      REQUIRE(cond->find(x)->k <= e.k);
    }
    REQUIRE(cond->k(c));
    REQUIRE(*cond->k(c) <= 6u);
  }
}

TEST_CASE("property: bb is non-decreasing and jumps only at multiples of 3") {
  auto t = build_table(Limits{24, 256}, 0);
  Natural prev = bb(t, 3);
  for (unsigned n = 4; n <= 24; ++n) {
    Natural b = bb(t, n);
    REQUIRE(b >= prev);
    if (n % 3 != 0) REQUIRE(b == prev);
    prev = b;
  }
}

TEST_CASE("property: learn is total and MDL-first") {
  Gen g(23);
  FormalTheory t;
  t.model_budget = 300;
  for (int i = 0; i < 300; ++i) {
    Dataset d(1 + g.below(5));
    for (auto& p : d) p = {g.below(8), g.below(8)};
    t.epsilon = Rational(BigInt(g.below(3)), BigInt(1 + g.below(2)));
    LearningOutcome o;
    REQUIRE_NOTHROW(o = learn(d, t));
    REQUIRE(o.flag == (o.z <= t.epsilon));
    REQUIRE(o.z == f_per(o.model, d, t));
    Natural limit = o.flag ? o.model.code : t.model_budget + 1;
    for (Natural c = 0; c < limit; ++c)
      if (auto m = codec::decode_model(c)) REQUIRE_FALSE(p_opt(t, *m, d));
  }
}

TEST_CASE("property: the slow and fast mse paths agree near overflow") {
  FormalTheory t;
  t.model_budget = 50;
  Dataset d{{4'000'000'000ull, 4'000'000'000ull}, {1, 1}, {0, 0}};
  LearningOutcome o = learn(d, t);
  REQUIRE(o.flag);
  REQUIRE(o.model.code == 15);
  Dataset far{{~Natural{0}, 0}, {~Natural{0} - 1, 0}};
  REQUIRE(learn(far, t).model.code == 0);
  Dataset single{{~Natural{0}, 3}};
  LearningOutcome m = learn(single, t);
  REQUIRE(m.flag);
  REQUIRE(m.model == codec::make_model({3}));
}
