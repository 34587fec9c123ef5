#include <catch_amalgamated.hpp>

#include <cmath>

#include "ait/verify.hpp"

using namespace ait;

namespace {

const Limits kL27{27, 256};

TableCache& cache() {
  static TableCache c;
  return c;
}

const DeceptionReport& report() {
  static const DeceptionReport r =
      construct_full(FormalTheory{}, 3, 6, kL27, cache(), ExtendMode::First);
  return r;
}

}  // namespace

TEST_CASE("lemma1 checker on the L=12 table") {
  auto t = build_table(Limits{12, 64}, 0);
  Verdict v = check_lemma1(t, 12);
  INFO(v.details);
  REQUIRE(v.pass);
  REQUIRE(v.measured["bb"]["6"] == 2);
  REQUIRE(v.measured["maxima_source"] == "brute-force");
  REQUIRE_THROWS_AS(check_lemma1(t, 13), UsageError);
}

TEST_CASE("lemma1 checker detects a corrupted table") {
  auto t = build_table(Limits{12, 64}, 0);
  t.entries[100] = TableEntry{6, Dyadic::unit(6), Program::parse("010000"), 1};
  REQUIRE_FALSE(check_lemma1(t, 12).pass);
}

TEST_CASE("coding theorem on the L=6 table") {
  auto t = build_table(Limits{6, 4}, 0);
  Verdict v = check_coding(t);
  REQUIRE(v.pass);
  double expected = 3 - std::log2(32.0 / 7.0);
  REQUIRE(v.measured["c_M"].get<double>() == Catch::Approx(expected));
  REQUIRE(v.measured["argmax"] == 0);
  const TableEntry* one = t.find(1);
  REQUIRE(one->k + one->m.log2() == Catch::Approx(0.0));
  for (const auto& [x, e] : t.entries) REQUIRE(e.k + e.m.log2() >= 0);
}

TEST_CASE("thm1 checker accepts the constructed report") {
  Verdict v = check_theorem1(report(), cache());
  INFO(v.details);
  REQUIRE(v.pass);
  REQUIRE(v.measured["gap_c_prime"] == 3);
}

TEST_CASE("thm1 checker rejects a truncated deceiver") {
  DeceptionReport bad = report();
  bad.d_total = bad.d_a;
  Verdict v = check_theorem1(bad, cache());
  REQUIRE_FALSE(v.pass);
  REQUIRE_FALSE(v.measured["clauses"]["deceiver"].get<bool>());
}

TEST_CASE("thm1 checker rejects tampered constants") {
  DeceptionReport bad = report();
  bad.k_model_total += 3;
  bad.gap_c_prime += 3;
  REQUIRE_FALSE(check_theorem1(bad, cache()).pass);
}

TEST_CASE("thm1 checker refuses a stale table") {
  DeceptionReport bad = report();
  bad.table_digest[0] = bad.table_digest[0] == 'a' ? 'b' : 'a';
  REQUIRE_THROWS_AS(check_theorem1(bad, cache()), DigestMismatch);
}

TEST_CASE("thm2 exponent") {
  auto t = cache().get(kL27);
  Verdict v = check_theorem2(report(), *t, report().bb_n);
  REQUIRE(v.pass);
  REQUIRE(std::isfinite(v.measured["c_star"].get<double>()));
  REQUIRE(v.measured["c_star"].get<double>() >= 0);
  Verdict vacuous = check_theorem2(report(), *t, 100);
  REQUIRE_FALSE(vacuous.pass);
  REQUIRE(vacuous.measured["vacuous"] == true);
}

TEST_CASE("iid contrast edge cases") {
  SeededBitStream s(5);
  IidContrast zero = iid_contrast({8, 64}, 1000, Rational(1, 100), s, 0);
  for (const auto& p : zero.series) REQUIRE(p.deceivers == 0);
  IidContrast huge = iid_contrast({8, 64}, 1000, 1000, s);
  for (const auto& p : huge.series) REQUIRE(p.deceivers == 0);
  REQUIRE_THROWS_AS(iid_contrast({64, 8}, 1000, 0, s), UsageError);
  REQUIRE_THROWS_AS(iid_contrast({8, 64}, 999, 0, s), UsageError);
  REQUIRE(decay_csv({{8, 10, 5}}) == "N,trials,deceivers,frequency\n8,10,5,0.5\n");
}

TEST_CASE("iid trial predicate") {
  // First half 0101 gives theta = 1/2; the whole 0101 1111 has phi = 3/4.
  REQUIRE(iid_trial_deceives({0, 1, 0, 1, 1, 1, 1, 1}, Rational(1, 100)));
  REQUIRE_FALSE(iid_trial_deceives({0, 1, 0, 1, 0, 1, 0, 1}, Rational(1, 100)));
  // First half 0001: KT theta = 3/10 fits within 1/100, Laplace theta = 1/3 does not.
  REQUIRE(iid_trial_deceives({0, 0, 0, 1, 1, 1, 1, 1}, Rational(1, 100)));
  REQUIRE_FALSE(iid_trial_deceives({0, 0, 0, 1, 1, 1, 1, 1}, Rational(1, 100), FrequencyEstimator::Laplace));
  REQUIRE_THROWS_AS(parse_estimator("mle"), UsageError);
}

TEST_CASE("iid deceiver frequencies match the exact binomial sums") {
  // Exact probabilities at eps = 1/100 by summing over first-half and
  // second-half counts; the simulation must agree within 4 standard errors.
  auto exact = [](std::size_t n, FrequencyEstimator est) {
    std::size_t na = n / 2, nb = n - na;
    auto binom = [](std::size_t k, std::size_t j) {
      double r = 1;
      for (std::size_t i = 1; i <= j; ++i) r = r * static_cast<double>(k - j + i) / static_cast<double>(i);
      return r / std::exp2(static_cast<double>(k));
    };
    double total = 0;
    for (std::size_t a = 0; a <= na; ++a)
      for (std::size_t b = 0; b <= nb; ++b) {
        std::vector<std::uint8_t> flips(n, 0);
        for (std::size_t i = 0; i < a; ++i) flips[i] = 1;
        for (std::size_t i = 0; i < b; ++i) flips[na + i] = 1;
        if (iid_trial_deceives(flips, Rational(1, 100), est)) total += binom(na, a) * binom(nb, b);
      }
    return total;
  };
  REQUIRE(exact(8, FrequencyEstimator::KrichevskyTrofimov) == Catch::Approx(0.609375));
  REQUIRE(exact(8, FrequencyEstimator::Laplace) == Catch::Approx(0.234375));
  REQUIRE(exact(64, FrequencyEstimator::Laplace) > exact(8, FrequencyEstimator::Laplace));
  IidContrast c = iid_contrast({8, 64}, 4000, Rational(1, 100), SeededBitStream(9));
  for (const auto& p : c.series) {
    double e = exact(p.n, FrequencyEstimator::KrichevskyTrofimov);
    REQUIRE(std::abs(p.frequency() - e) < 4 * std::sqrt(e * (1 - e) / p.trials));
  }
}

TEST_CASE("axioms hold for the mse learner") {
  SeededBitStream s(17);
  Verdict v = check_axioms(FormalTheory{}, 100, s);
  INFO(v.details);
  REQUIRE(v.pass);
  REQUIRE(v.measured["extensibility_tested"].get<std::size_t>() > 0);
  FormalTheory jk;
  jk.loss = Loss::Jk;
  REQUIRE_THROWS_AS(check_axioms(jk, 1, s), UsageError);
  FormalTheory loose;
  loose.epsilon = Rational(5, 2);
  REQUIRE(check_axioms(loose, 100, s).pass);
}
