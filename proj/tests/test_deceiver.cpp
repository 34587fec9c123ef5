#include <catch_amalgamated.hpp>

#include <cstdio>

#include "ait/deceiver.hpp"

using namespace ait;

namespace {

const Limits kL27{27, 256};

TableCache& cache() {
  static TableCache c;
  return c;
}

FormalTheory mse0() { return FormalTheory{}; }

const DeceptionReport& first_report() {
  static const DeceptionReport r = construct_full(mse0(), 3, 6, kL27, cache(), ExtendMode::First);
  return r;
}

}  // namespace

TEST_CASE("available dataset for n = 3") {
  auto t = cache().get(kL27);
  AvailableResult r = construct_available(mse0(), 3, *t);
  REQUIRE(r.bb_n == 1);
  REQUIRE(r.d_a == Dataset{{0, 0}});
  REQUIRE(r.outcome.flag);
  REQUIRE(r.outcome.model.code == 0);
  REQUIRE(*t->k(r.outcome.model.code) <= 3);
}

TEST_CASE("available dataset postconditions hold for larger n") {
  auto t = cache().get(kL27);
  for (unsigned n : {6u, 9u}) {
    AvailableResult r = construct_available(mse0(), n, *t);
    REQUIRE(r.d_a.size() >= bb(*t, n));
    LearningOutcome o = learn(r.d_a, mse0());
    REQUIRE(o.flag);
    REQUIRE(*t->k(o.model.code) <= n);
  }
}

TEST_CASE("n below every model is a precondition error") {
  auto t = cache().get(kL27);
  REQUIRE_THROWS_AS(construct_available(mse0(), 2, *t), UsageError);
}

TEST_CASE("the n=9, m=12 configuration runs out of candidates at L=24") {
  TableCache c;
  REQUIRE_THROWS_AS(construct_full(mse0(), 9, 12, Limits{24, 256}, c), NotFound);
}

TEST_CASE("extension modes") {
  auto t = cache().get(kL27);
  Dataset d_a{{0, 0}};
  ExtensionResult first = extend_to_deceiver(mse0(), d_a, 6, *t, ExtendMode::First);
  REQUIRE(first.rank == 1);
  REQUIRE(is_strict_prefix(d_a, first.d_total));
  REQUIRE(is_deceiver(mse0(), d_a, first.d_total));
  ExtensionResult bb3 = extend_to_deceiver(mse0(), d_a, 3, *t, ExtendMode::BbRank);
  REQUIRE(bb3.target_rank == 1);
  REQUIRE(bb3.d_total == first.d_total);
  REQUIRE_THROWS_AS(extend_to_deceiver(mse0(), d_a, 6, *t, ExtendMode::BbRank), NotFound);
  REQUIRE_THROWS_AS(extend_to_deceiver(mse0(), {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}}, 6, *t,
                                       ExtendMode::First),
                    UsageError);
}

TEST_CASE("deceiver predicate") {
  Dataset d_a{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  Dataset d_total = d_a;
  d_total.push_back({5, 7});
  d_total.push_back({6, 7});
  REQUIRE(is_deceiver(mse0(), d_a, d_total));
  REQUIRE_FALSE(is_deceiver(mse0(), d_a, d_a));
  Dataset unfit{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}};
  Dataset unfit_total = unfit;
  unfit_total.push_back({9, 9});
  REQUIRE_FALSE(is_deceiver(mse0(), unfit, unfit_total));
  REQUIRE_THROWS_AS(is_deceiver(mse0(), d_a, {{1, 1}}), UsageError);
}

TEST_CASE("unpredictability gap") {
  Natural id_code = codec::encode_model({0, 1});
  auto self = unpredictability_gap_at(id_code, id_code, kL27, kDefaultUnpredictabilityC, cache());
  REQUIRE(self.k_conditional <= 6);
  REQUIRE(self.k_unconditional == 24);
  REQUIRE(self.gap < 0);
  REQUIRE_FALSE(self.holds);
  auto uncond = unpredictability_gap_at(id_code, 0, kL27, 23, cache());
  REQUIRE(uncond.k_conditional == uncond.k_unconditional);
  REQUIRE(uncond.gap == 23);
  REQUIRE(uncond.holds);
  REQUIRE_THROWS_AS(unpredictability_gap_at(1u << 30, 0, kL27, 6, cache()), OutOfTable);
}

TEST_CASE("the full construction passes at L=27 in first mode") {
  const DeceptionReport& r = first_report();
  INFO(report_to_json(r).dump(1));
  REQUIRE(r.all_pass());
  REQUIRE(r.d_a == Dataset{{0, 0}});
  REQUIRE(r.d_total == Dataset{{0, 0}, {1, 1}});
  REQUIRE(r.model_total.code == 15);
  REQUIRE(r.k_p == 12);
  REQUIRE(r.k_d_a == 6);
  REQUIRE(r.k_model_a == 3);
  REQUIRE(r.k_model_total == 24);
  REQUIRE(r.k_d_total == 27);
  REQUIRE(r.gap_c_prime == 3);
  REQUIRE(r.condition == 34);
  REQUIRE(r.d_a.size() >= r.bb_n);
  REQUIRE(r.k_model_a <= r.n);
}

TEST_CASE("infeasible (n, m) is rejected") {
  REQUIRE_THROWS_AS(construct_full(mse0(), 6, 6, kL27, cache()), UsageError);
  REQUIRE_THROWS_AS(construct_full(mse0(), 6, 30, kL27, cache()), UsageError);
}

TEST_CASE("reports round-trip through their file format") {
  const DeceptionReport& r = first_report();
  save_report(r, "report_rt.json");
  DeceptionReport back = load_report("report_rt.json");
  REQUIRE(report_to_json(back) == report_to_json(r));
  std::remove("report_rt.json");
}

TEST_CASE("bubble detection") {
  const DeceptionReport& r = first_report();
  BubbleResult b = detect_bubble(mse0(), r.d_a, kL27, r.C, cache());
  REQUIRE(b.bubble);
  REQUIRE(b.d_total == r.d_total);
  REQUIRE(b.gap.holds);
  REQUIRE_THROWS_AS(detect_bubble(mse0(), {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}}, kL27, 6, cache()),
                    UsageError);

  // Caged sub-universe: table length and C both at K_t(P) + c.
  unsigned c = 6;
  unsigned cage = r.k_p + c;
  BubbleResult caged = detect_bubble(mse0(), r.d_a, Limits{cage, 256}, cage, cache());
  REQUIRE_FALSE(caged.bubble);
}

TEST_CASE("caging gate") {
  auto t = cache().get(kL27);
  const DeceptionReport& r = first_report();
  long long margin = std::min(r.k_d_total, r.k_model_total) - static_cast<long long>(r.k_p);
  REQUIRE(margin > 0);
  CageDecision reject = cage_gate(r.d_total, mse0(), static_cast<unsigned>(margin - 1), *t);
  REQUIRE_FALSE(reject.accept);
  CageDecision accept = cage_gate(r.d_total, mse0(), static_cast<unsigned>(margin), *t);
  REQUIRE(accept.accept);

  // K_t(D) = 12 against a threshold of 30.
  Natural code = 0;
  for (const auto& [x, e] : t->entries)
    if (e.k == 12 && x != 0) {
      code = x;
      break;
    }
  REQUIRE(code != 0);
  CageDecision small = cage_gate(codec::decode_dataset(code), mse0(), 30 - r.k_p, *t);
  REQUIRE(small.accept);
  REQUIRE(small.threshold == 30);

  CageDecision absent = cage_gate({{7, 3}, {2, 9}}, mse0(), 0, *t);
  REQUIRE_FALSE(absent.accept);
  REQUIRE(absent.reason == "dataset is not in the table");
}
