#pragma once

// Theorem and lemma checkers. check_theorem1 re-derives everything it needs
// from tables and its own arithmetic; it never calls the construction code.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ait/codec.hpp"
#include "ait/deceiver.hpp"
#include "ait/enumerator.hpp"
#include "ait/learning.hpp"
#include "ait/sources.hpp"
#include "ait/table_io.hpp"
#include "ait/verdict.hpp"

namespace ait {

namespace detail {

/// Largest output per exact program length, by running every bit string.
inline std::vector<std::optional<Natural>> brute_force_max_outputs(const Limits& limits,
                                                                   Natural condition,
                                                                   unsigned n_max) {
  std::vector<std::optional<Natural>> best(n_max + 1);
  for (unsigned len = 3; len <= n_max; len += 3) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      const Halted* h = nullptr;
      RunResult r = run(Program(bits, len), limits, condition);
      if ((h = as_halted(r)) && h->consumed == len && (!best[len] || h->output > *best[len]))
        best[len] = h->output;
    }
  }
  return best;
}

}  // namespace detail

inline constexpr unsigned kBruteForceMaxLen = 24;

/// For 3 <= n <= n_max: no program of length <= n prints a value >= bb(n);
/// every tabled value >= bb(n) has K_t > n; bb is non-decreasing.
inline Verdict check_lemma1(const ComplexityTable& table, unsigned n_max) {
  if (n_max > table.limits.max_len) throw UsageError("lemma1: n_max exceeds table L");
  Verdict v;
  v.name = "lemma1";
  v.inputs_digest = table_digest(table);
  v.pass = true;
  std::ostringstream details;

  // Independent maxima: brute force when affordable, else the program list.
  std::vector<std::optional<Natural>> max_at(n_max + 1);
  std::string source;
  if (n_max <= kBruteForceMaxLen) {
    max_at = detail::brute_force_max_outputs(table.limits, table.condition, n_max);
    source = "brute-force";
  } else if (table.programs) {
    for (const auto& r : *table.programs)
      if (r.program.length() <= n_max && (!max_at[r.program.length()] || r.output > *max_at[r.program.length()]))
        max_at[r.program.length()] = r.output;
    source = "program-list";
  } else {
    for (const auto& [x, e] : table.entries)
      if (e.k <= n_max) max_at[e.k] = x;
    source = "entries";
  }

  Json bbs = Json::object();
  std::optional<Natural> prev, running_max;
  std::vector<unsigned> strict_steps, flat_steps;
  for (unsigned n = 1; n <= n_max; ++n) {
    if (max_at[n] && (!running_max || *max_at[n] > *running_max)) running_max = max_at[n];
    if (n < 3) continue;
    Natural b = bb(table, n);
    bbs[std::to_string(n)] = b;
    if (!running_max || *running_max + 1 != b) {
      v.pass = false;
      details << "n=" << n << ": bb=" << b << " but the longest-halting scan gives "
              << (running_max ? std::to_string(*running_max + 1) : "none") << "; ";
    }
    for (const auto& [x, e] : table.entries) {
      if (x < b) continue;
      if (e.k <= n) {
        v.pass = false;
        details << "n=" << n << ": value " << x << " >= bb has k=" << e.k << "; ";
      }
    }
    if (prev) {
      if (b < *prev) {
        v.pass = false;
        details << "bb decreases at n=" << n << "; ";
      }
      if (n % 3 == 0) (b > *prev ? strict_steps : flat_steps).push_back(n);
    }
    prev = b;
  }
  v.measured["bb"] = bbs;
  v.measured["maxima_source"] = source;
  v.measured["strict_increase_at"] = strict_steps;
  v.measured["no_increase_at_multiple_of_3"] = flat_steps;
  v.details = details.str().empty() ? "all clauses hold" : details.str();
  return v;
}

/// -log2 m(x) <= k(x) exactly for every x; c_M = max (k(x) + log2 m(x)).
inline Verdict check_coding(const ComplexityTable& table) {
  Verdict v;
  v.name = "coding";
  v.inputs_digest = table_digest(table);
  v.pass = !table.entries.empty();
  double c_m = -std::numeric_limits<double>::infinity();
  std::optional<Natural> argmax;
  std::ostringstream details;
  for (const auto& [x, e] : table.entries) {
    if (Dyadic::unit(e.k) > e.m) {
      v.pass = false;
      details << "x=" << x << ": 2^-k exceeds m; ";
    }
    double dev = e.k + e.m.log2();
    if (dev > c_m) {
      c_m = dev;
      argmax = x;
    }
  }
  v.pass = v.pass && std::isfinite(c_m);
  v.measured["c_M"] = std::isfinite(c_m) ? Json(c_m) : Json(nullptr);
  if (argmax) v.measured["argmax"] = *argmax;
  v.measured["entries"] = table.entries.size();
  v.details = details.str().empty() ? "exact direction holds for every entry" : details.str();
  return v;
}

// ---------------------------------------------------------------------------
// Independent re-evaluation of the learner's performance measure.

namespace oracle {

inline BigInt horner(const std::vector<std::int64_t>& c, Natural x) {
  BigInt y = 0;
  for (std::size_t i = c.size(); i-- > 0;) y = y * BigInt(x) + BigInt(c[i]);
  return y;
}

inline Rational slice_loss(const Model& m, const Dataset& d, std::size_t parity, bool singleton,
                           const FormalTheory& t, const TableProvider& tables) {
  BigInt total = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!singleton && i % 2 != parity) continue;
    BigInt pred = horner(m.coeffs, d[i].x);
    ++count;
    if (t.loss == Loss::Mse) {
      BigInt r = BigInt(d[i].y) - pred;
      total += r * r;
    } else {
      if (pred < 0 || pred > BigInt(~Natural{0})) throw OutOfTable("prediction outside naturals");
      auto tab = tables(static_cast<Natural>(pred));
      auto k = tab->k(d[i].y);
      if (!k) throw OutOfTable("target not tabled");
      total += BigInt(*k) * *k;
    }
  }
  if (t.loss == Loss::Mse) return Rational(total, BigInt(count));
  Rational out(total);
  if (t.lambda != 0) {
    auto k = tables(0)->k(m.code);
    if (!k) throw OutOfTable("model code not tabled");
    out += t.lambda * *k;
  }
  return out;
}

inline Rational f_per(const Model& m, const Dataset& d, const FormalTheory& t,
                      const TableProvider& tables) {
  bool singleton = d.size() == 1;
  Rational a = slice_loss(m, d, 0, singleton, t, tables);
  Rational b = slice_loss(m, d, 1, singleton, t, tables);
  return a > b ? a : b;
}

inline Natural bb(const ComplexityTable& table, long long n) {
  Natural best = 0;
  bool any = false;
  for (const auto& [x, e] : table.entries)
    if (static_cast<long long>(e.k) <= n) {
      best = std::max(best, x);
      any = true;
    }
  return any ? best + 1 : 0;
}

}  // namespace oracle

/// Re-derives every field of a deception report and checks the theorem's
/// clauses. Throws DigestMismatch if the tables the cache yields differ from
/// the ones the report was built on.
inline Verdict check_theorem1(const DeceptionReport& r, TableCache& cache) {
  Verdict v;
  v.name = "theorem1";
  auto table = cache.get(r.table_limits, 0);
  if (table_digest(*table) != r.table_digest)
    throw DigestMismatch("report table digest does not match the rebuilt table");
  Natural p_id = learner_id(r.learner);
  Natural cond = codec::pair(codec::encode_dataset(r.d_a), codec::pair(p_id, r.model_a.code));
  auto cond_table = cache.get(r.table_limits, cond);
  if (table_digest(*cond_table) != r.conditional_table_digest)
    throw DigestMismatch("report conditional table digest does not match the rebuilt table");
  v.inputs_digest = sha256_hex(r.table_digest + r.conditional_table_digest +
                               report_to_json(r).at("digest").get<std::string>());
  TableProvider tables = [&](Natural c) { return cache.get(r.table_limits, c); };

  std::map<std::string, bool> clauses;
  std::ostringstream details;
  auto k_of = [&](Natural x) -> long long {
    auto k = table->k(x);
    return k ? static_cast<long long>(*k) : -1;
  };
  long long k_p = k_of(p_id), k_da = -1, k_dt = -1, k_ma = k_of(r.model_a.code),
            k_mt = k_of(r.model_total.code);
  try {
    k_da = k_of(codec::encode_dataset(r.d_a));
    k_dt = k_of(codec::encode_dataset(r.d_total));
  } catch (const CodeOverflow&) {
  }
  clauses["fields_reproduce"] =
      p_id == r.p_id && cond == r.condition && k_p == r.k_p && k_da == r.k_d_a &&
      k_dt == r.k_d_total && k_ma == r.k_model_a && k_mt == r.k_model_total &&
      k_mt - (k_p + k_da + k_ma) == r.gap_c_prime;

  Natural bb_n = oracle::bb(*table, r.n);
  clauses["lemma3_size"] = bb_n == r.bb_n && r.d_a.size() >= bb_n;
  clauses["lemma3_model_complexity"] = k_ma >= 0 && k_ma <= static_cast<long long>(r.n);

  LearningOutcome on_a = learn(r.d_a, r.learner, tables);
  bool a_optimal = false, total_rejects_a = false, total_optimal = false;
  try {
    a_optimal = on_a.flag && on_a.model == r.model_a &&
                oracle::f_per(r.model_a, r.d_a, r.learner, tables) <= r.learner.epsilon;
    bool extends = r.d_total.size() > r.d_a.size() &&
                   std::equal(r.d_a.begin(), r.d_a.end(), r.d_total.begin());
    total_rejects_a = extends && oracle::f_per(r.model_a, r.d_total, r.learner, tables) > r.learner.epsilon;
    LearningOutcome on_total = learn(r.d_total, r.learner, tables);
    total_optimal = on_total.flag && on_total.model == r.model_total &&
                    oracle::f_per(r.model_total, r.d_total, r.learner, tables) <= r.learner.epsilon;
  } catch (const OutOfTable& e) {
    details << "out of table: " << e.what() << "; ";
  }
  clauses["lemma3_optimal"] = a_optimal;
  clauses["deceiver"] = a_optimal && total_rejects_a;
  clauses["global_optimum_found"] = total_optimal;

  auto k_cond = cond_table->k(r.model_total.code);
  long long gap = k_cond && k_mt >= 0 ? static_cast<long long>(*k_cond) - (k_mt - r.C) : -1;
  clauses["unpredictable"] = k_cond && gap == r.unpredictability_gap && gap >= 0 &&
                             static_cast<long long>(r.C) < k_mt;
  clauses["gap_c_prime_positive"] = k_mt - (k_p + k_da + k_ma) > 0;
  clauses["size_bound"] = k_dt >= 0 && r.d_a.size() >= oracle::bb(*table, k_dt - r.c_measured);

  v.pass = true;
  for (const auto& [name, ok] : clauses) {
    if (!ok) details << name << " fails; ";
    v.pass = v.pass && ok;
  }
  v.measured["clauses"] = clauses;
  v.measured["gap_c_prime"] = k_mt - (k_p + k_da + k_ma);
  v.measured["unpredictability_gap"] = gap;
  v.measured["c_measured"] = r.c_measured;
  v.measured["k_p"] = k_p;
  v.details = details.str().empty() ? "all clauses re-derived and hold" : details.str();
  return v;
}

/// c* = max over tabled datasets of size >= k of log2 m(D) - log2 m(D_total).
inline Verdict check_theorem2(const DeceptionReport& r, const ComplexityTable& table, std::size_t k) {
  Verdict v;
  v.name = "theorem2";
  v.inputs_digest = table_digest(table);
  Natural deceiver_code = codec::encode_dataset(r.d_total);
  const TableEntry* dec = table.find(deceiver_code);
  if (!dec) {
    v.details = "the deceiver is not in this table";
    v.measured["vacuous"] = true;
    return v;
  }
  std::optional<Dyadic> best;
  Natural argmax = 0;
  std::size_t considered = 0;
  for (const auto& [x, e] : table.entries) {
    if (codec::dataset_size(x) < k) continue;
    ++considered;
    if (!best || e.m > *best) {
      best = e.m;
      argmax = x;
    }
  }
  v.measured["k"] = k;
  v.measured["datasets_considered"] = considered;
  if (!best) {
    v.details = "vacuous: no tabled dataset of size >= k";
    v.measured["vacuous"] = true;
    return v;
  }
  double c_star = best->log2() - dec->m.log2();
  v.measured["vacuous"] = false;
  v.measured["c_star"] = c_star;
  v.measured["argmax"] = argmax;
  v.measured["log2_m_deceiver"] = dec->m.log2();
  v.measured["k_p"] = r.k_p;
  v.measured["within_k_p"] = c_star <= static_cast<double>(r.k_p);
  v.pass = std::isfinite(c_star);
  std::ostringstream details;
  details << "c* = " << c_star << " bits over " << considered << " datasets (K_t(P) = " << r.k_p << ")";
  v.details = details.str();
  return v;
}

// ---------------------------------------------------------------------------

struct DecayPoint {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t deceivers = 0;
  double frequency() const { return trials ? static_cast<double>(deceivers) / trials : 0.0; }
};

struct IidContrast {
  Verdict verdict;
  std::vector<DecayPoint> series;
};

inline constexpr double kZOneSided95 = 1.6448536269514722;
inline constexpr double kZTwoSided95 = 1.959963984540054;

inline std::string decay_csv(const std::vector<DecayPoint>& series) {
  std::ostringstream out;
  out << "N,trials,deceivers,frequency\n";
  out.precision(17);
  for (const auto& p : series) out << p.n << ',' << p.trials << ',' << p.deceivers << ',' << p.frequency() << '\n';
  return out.str();
}

/// Frequency estimate learned from the available half. Both keep theta
/// strictly inside (0,1): KT = (ones + 1/2)/(N_a + 1), Laplace = (ones + 1)/(N_a + 2).
enum class FrequencyEstimator { KrichevskyTrofimov, Laplace };

inline std::string_view estimator_name(FrequencyEstimator e) {
  return e == FrequencyEstimator::Laplace ? "laplace" : "kt";
}

inline FrequencyEstimator parse_estimator(std::string_view s) {
  if (s == "kt") return FrequencyEstimator::KrichevskyTrofimov;
  if (s == "laplace") return FrequencyEstimator::Laplace;
  throw UsageError("unknown estimator '" + std::string(s) + "' (expected kt or laplace)");
}

/// One trial: the first half is available data. A deceiver fits the first
/// half within epsilon (KL) and misses the whole.
inline bool iid_trial_deceives(const std::vector<std::uint8_t>& flips, const Rational& epsilon,
                               FrequencyEstimator est = FrequencyEstimator::KrichevskyTrofimov) {
  std::size_t n_a = flips.size() / 2;
  std::size_t ones_a = 0, ones = 0;
  for (std::size_t i = 0; i < flips.size(); ++i) {
    ones += flips[i];
    if (i < n_a) ones_a += flips[i];
  }
  Rational theta = est == FrequencyEstimator::Laplace
                       ? Rational(BigInt(ones_a + 1), BigInt(n_a + 2))
                       : Rational(BigInt(2 * ones_a + 1), BigInt(2 * n_a + 2));
  Rational phi_a = n_a ? Rational(BigInt(ones_a), BigInt(n_a)) : Rational(0);
  Rational phi = Rational(BigInt(ones), BigInt(flips.size()));
  double eps = static_cast<double>(epsilon);
  return kl_bernoulli(phi_a, theta) <= eps && kl_bernoulli(phi, theta) > eps;
}

inline IidContrast iid_contrast(const std::vector<std::size_t>& sizes, std::size_t trials,
                                const Rational& epsilon, const SeededBitStream& stream,
                                const Rational& p = Rational(1, 2),
                                FrequencyEstimator est = FrequencyEstimator::KrichevskyTrofimov) {
  if (sizes.empty()) throw UsageError("iid_contrast: no sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 2) throw UsageError("iid_contrast: sizes must be >= 2");
    if (i && sizes[i] <= sizes[i - 1]) throw UsageError("iid_contrast: sizes must increase");
  }
  if (trials < 1000) throw UsageError("iid_contrast: trials must be >= 1000");
  IidContrast out;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    DecayPoint pt{sizes[si], trials, 0};
    for (std::size_t t = 0; t < trials; ++t) {
      SeededBitStream s = stream.substream(si * trials + t);
      if (iid_trial_deceives(sample_iid_bernoulli(sizes[si], p, s), epsilon, est)) ++pt.deceivers;
    }
    out.series.push_back(pt);
  }
  auto se_pooled = [](const DecayPoint& a, const DecayPoint& b) {
    double pooled = static_cast<double>(a.deceivers + b.deceivers) / (a.trials + b.trials);
    return std::sqrt(pooled * (1 - pooled) * (1.0 / a.trials + 1.0 / b.trials));
  };
  const DecayPoint& first = out.series.front();
  const DecayPoint& last = out.series.back();
  double diff = first.frequency() - last.frequency();
  double se = se_pooled(first, last);
  double z = se > 0 ? diff / se : 0.0;
  bool decreasing = diff > 0 && z > kZOneSided95;
  bool monotone = true;
  for (std::size_t i = 1; i < out.series.size(); ++i) {
    const auto& a = out.series[i - 1];
    const auto& b = out.series[i];
    double s = std::sqrt(a.frequency() * (1 - a.frequency()) / a.trials +
                         b.frequency() * (1 - b.frequency()) / b.trials);
    if (b.frequency() > a.frequency() + kZTwoSided95 * s) monotone = false;
  }
  Verdict& v = out.verdict;
  v.name = "iid-contrast";
  v.pass = decreasing && monotone;
  v.measured["z"] = z;
  v.measured["frequency_first"] = first.frequency();
  v.measured["frequency_last"] = last.frequency();
  v.measured["monotone_within_bound"] = monotone;
  v.measured["seed"] = stream.seed();
  v.measured["rng"] = kRngAlgorithm;
  v.measured["estimator"] = estimator_name(est);
  v.inputs_digest = sha256_hex(decay_csv(out.series) + format_rational(epsilon) + format_rational(p) +
                               std::string(estimator_name(est)));
  std::ostringstream details;
  details << "frequency " << first.frequency() << " at N=" << first.n << " vs " << last.frequency()
          << " at N=" << last.n << ", z=" << z;
  v.details = details.str();
  return out;
}

// ---------------------------------------------------------------------------

/// Non-triviality and extensibility of f_per on random datasets. Half the
/// samples are drawn from a random polynomial so extensibility is exercised.
inline Verdict check_axioms(const FormalTheory& t, std::size_t samples, SeededBitStream& stream) {
  t.validate();
  if (t.loss != Loss::Mse) throw UsageError("check_axioms supports the mse loss");
  Verdict v;
  v.name = "axioms";
  v.pass = true;
  std::size_t nontrivial_ok = 0, extensible_ok = 0, extensible_tested = 0;
  std::ostringstream details;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t size = 1 + stream.uniform_below(8);
    Dataset d;
    if (s % 2 == 0) {
      for (std::size_t i = 0; i < size; ++i) d.push_back({stream.uniform_below(21), stream.uniform_below(21)});
    } else {
      std::vector<std::int64_t> c(1 + stream.uniform_below(3));
      for (auto& ci : c) ci = static_cast<std::int64_t>(stream.uniform_below(5));
      Model gen = codec::make_model(c);
      for (std::size_t i = 0; i < size; ++i) {
        Natural x = stream.uniform_below(11);
        d.push_back({x, static_cast<Natural>(eval_model(gen, x))});
      }
    }
    LearningOutcome o = learn(d, t);

    // Non-triviality: a far point in both parities pushes f_per past z.
    Rational z(BigInt(1 + stream.uniform_below(1'000'000)), BigInt(1 + stream.uniform_below(100)));
    Natural x_far = stream.uniform_below(50);
    BigInt at = eval_model(o.model, x_far);
    BigInt need = boost::multiprecision::sqrt(BigInt(boost::multiprecision::numerator(z)) *
                                              (d.size() + 2)) + 1;
    BigInt y_far = (at < 0 ? BigInt(0) : at) + need;
    Dataset worse = d;
    worse.push_back({x_far, static_cast<Natural>(y_far)});
    worse.push_back({x_far, static_cast<Natural>(y_far)});
    if (f_per(o.model, worse, t) >= z)
      ++nontrivial_ok;
    else {
      v.pass = false;
      details << "sample " << s << ": non-triviality extension stayed below z; ";
    }

    // Extensibility: points on the model keep it optimal.
    if (o.flag) {
      ++extensible_tested;
      Dataset ext = d;
      std::size_t added = 0;
      for (int tries = 0; tries < 64 && added < 2; ++tries) {
        Natural x = stream.uniform_below(30);
        BigInt y = eval_model(o.model, x);
        if (y < 0 || y > BigInt(~Natural{0})) continue;
        ext.push_back({x, static_cast<Natural>(y)});
        ++added;
      }
      if (p_opt(t, o.model, ext))
        ++extensible_ok;
      else {
        v.pass = false;
        details << "sample " << s << ": extension on the model broke optimality; ";
      }
    }
  }
  v.measured["samples"] = samples;
  v.measured["non_triviality_ok"] = nontrivial_ok;
  v.measured["extensibility_tested"] = extensible_tested;
  v.measured["extensibility_ok"] = extensible_ok;
  v.measured["seed"] = stream.seed();
  v.inputs_digest = sha256_hex(theory_json(t).dump() + std::to_string(samples) + std::to_string(stream.seed()));
  v.details = details.str().empty() ? "both axioms held on every sample" : details.str();
  return v;
}

}  // namespace ait
