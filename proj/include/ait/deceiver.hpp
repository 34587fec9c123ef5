#pragma once

// Deceiving-dataset constructions over an exhaustive complexity table.
//
// Candidate datasets are the table's outputs walked in length-lexicographic
// order of their shortest programs: the dovetailing enumeration collapses to
// a sorted walk because the bounded halting set is known in full.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ait/codec.hpp"
#include "ait/enumerator.hpp"
#include "ait/learning.hpp"
#include "ait/table_io.hpp"
#include "ait/verdict.hpp"

namespace ait {

enum class ExtendMode { BbRank, First };

inline std::string_view mode_name(ExtendMode m) { return m == ExtendMode::BbRank ? "bb-rank" : "first"; }

inline ExtendMode parse_mode(std::string_view s) {
  if (s == "bb-rank") return ExtendMode::BbRank;
  if (s == "first") return ExtendMode::First;
  throw UsageError("unknown mode '" + std::string(s) + "' (expected bb-rank or first)");
}

inline constexpr unsigned kDefaultUnpredictabilityC = 6;

inline bool is_strict_prefix(const Dataset& prefix, const Dataset& d) {
  return prefix.size() < d.size() && std::equal(prefix.begin(), prefix.end(), d.begin());
}

/// Condition value carrying <D_a, P, M_a>: pair(code(D_a), pair(P_id, code(M_a))).
inline Natural triple_condition(const Dataset& d_a, const FormalTheory& t, const Model& model_a) {
  return codec::pair(codec::encode_dataset(d_a), codec::pair(learner_id(t), model_a.code));
}

// ---------------------------------------------------------------------------

struct AvailableResult {
  Dataset d_a;
  Natural code = 0;
  LearningOutcome outcome;
  Natural bb_n = 0;
  std::size_t candidates_examined = 0;
};

/// First tabled dataset D_a with |D_a| >= bb(n), learn(D_a) optimal and
/// K_t(model code) <= n.
inline AvailableResult construct_available(const FormalTheory& t, unsigned n,
                                           const ComplexityTable& table,
                                           const TableProvider& tables = {}) {
  t.validate();
  Natural bb_n = bb(table, n);
  std::optional<unsigned> cheapest;
  for (const auto& [x, e] : table.entries)
    if (codec::decode_model(x) && (!cheapest || e.k < *cheapest)) cheapest = e.k;
  if (!cheapest || n < *cheapest)
    throw UsageError("n=" + std::to_string(n) + " is below the complexity of every tabled model");

  AvailableResult r;
  r.bb_n = bb_n;
  for (Natural x : table.outputs_in_enumeration_order()) {
    ++r.candidates_examined;
    if (codec::dataset_size(x) < bb_n) continue;
    Dataset d = codec::decode_dataset(x);
    LearningOutcome o = learn(d, t, tables);
    if (!o.flag) continue;
    auto k = table.k(o.model.code);
    if (!k || *k > n) continue;
    r.d_a = std::move(d);
    r.code = x;
    r.outcome = std::move(o);
    return r;
  }
  throw NotFound("no available dataset within L=" + std::to_string(table.limits.max_len) +
                 " (examined " + std::to_string(r.candidates_examined) + " outputs, need |D_a| >= " +
                 std::to_string(bb_n) + ")");
}

// ---------------------------------------------------------------------------

struct ExtensionResult {
  Dataset d_total;
  Natural code = 0;
  Model model_total;
  std::size_t rank = 0;          // index of model_total among distinct optimal models
  std::size_t target_rank = 0;
  std::size_t candidates_examined = 0;
};

/// Walks tabled strict extensions of d_a; keeps those on which model_a is no
/// longer optimal but learn finds an optimal model with a tabled code; stops
/// at the target_rank-th distinct such model (1 for First, bb(m) for BbRank).
inline ExtensionResult extend_to_deceiver(const FormalTheory& t, const Dataset& d_a, unsigned m,
                                          const ComplexityTable& table, ExtendMode mode,
                                          const TableProvider& tables = {}) {
  LearningOutcome base = learn(d_a, t, tables);
  if (!base.flag) throw UsageError("extend: the learner finds no optimal model on D_a");
  ExtensionResult r;
  r.target_rank = mode == ExtendMode::First ? 1 : static_cast<std::size_t>(bb(table, m));
  std::set<Natural> distinct;
  for (Natural x : table.outputs_in_enumeration_order()) {
    ++r.candidates_examined;
    if (codec::dataset_size(x) <= d_a.size()) continue;
    Dataset d = codec::decode_dataset(x);
    if (!is_strict_prefix(d_a, d)) continue;
    bool still_optimal;
    try {
      still_optimal = p_opt(t, base.model, d, tables);
    } catch (const OutOfTable&) {
      continue;
    }
    if (still_optimal) continue;
    LearningOutcome o = learn(d, t, tables);
    if (!o.flag || !table.find(o.model.code)) continue;
    if (!distinct.insert(o.model.code).second) continue;
    if (distinct.size() == r.target_rank) {
      r.d_total = std::move(d);
      r.code = x;
      r.model_total = o.model;
      r.rank = distinct.size();
      return r;
    }
  }
  throw NotFound("no deceiving extension of rank " + std::to_string(r.target_rank) + " within L=" +
                 std::to_string(table.limits.max_len) + " (found " +
                 std::to_string(distinct.size()) + " distinct optimal models in " +
                 std::to_string(r.candidates_examined) + " outputs)");
}

/// D_a deceives: the learner's model is optimal on D_a but not on D_total.
inline bool is_deceiver(const FormalTheory& t, const Dataset& d_a, const Dataset& d_total,
                        const TableProvider& tables = {}) {
  if (d_total.size() < d_a.size() || !std::equal(d_a.begin(), d_a.end(), d_total.begin()))
    throw UsageError("is_deceiver: D_total does not extend D_a");
  LearningOutcome o = learn(d_a, t, tables);
  return o.flag && !p_opt(t, o.model, d_total, tables);
}

// ---------------------------------------------------------------------------

struct UnpredictabilityGap {
  long long gap = 0;
  bool holds = false;
  unsigned k_conditional = 0;
  unsigned k_unconditional = 0;
  Natural condition = 0;
};

/// gap = K_t(code | condition) - (K_t(code) - C); holds iff gap >= 0 and C < K_t(code).
inline UnpredictabilityGap unpredictability_gap_at(Natural code, Natural condition,
                                                   const Limits& limits, unsigned C,
                                                   TableCache& cache) {
  UnpredictabilityGap g;
  g.condition = condition;
  if (condition > limits.value_cap)
    throw OutOfTable("condition " + std::to_string(condition) + " exceeds the value cap");
  g.k_unconditional = cache.get(limits, 0)->k_or_throw(code, "model code");
  g.k_conditional = cache.get(limits, condition)->k_or_throw(code, "model code");
  if (g.k_conditional > g.k_unconditional)
    throw InvariantViolation("conditional complexity exceeds unconditional complexity");
  g.gap = static_cast<long long>(g.k_conditional) - static_cast<long long>(g.k_unconditional) + C;
  g.holds = g.gap >= 0 && C < g.k_unconditional;
  return g;
}

/// The gap of model_total given <D_a, P, M_a>.
inline UnpredictabilityGap unpredictability_gap(const Model& model_total, const Dataset& d_a,
                                                const FormalTheory& t, const Model& model_a,
                                                const Limits& limits, unsigned C,
                                                TableCache& cache) {
  return unpredictability_gap_at(model_total.code, triple_condition(d_a, t, model_a), limits, C,
                                 cache);
}

// ---------------------------------------------------------------------------

struct DeceptionReport {
  FormalTheory learner;
  Natural p_id = 0;
  unsigned n = 0;
  unsigned m = 0;
  ExtendMode mode = ExtendMode::BbRank;
  std::size_t rank = 0;
  unsigned C = kDefaultUnpredictabilityC;
  Limits table_limits;
  std::string table_digest;
  std::string conditional_table_digest;
  Dataset d_a;
  Dataset d_total;
  Model model_a;
  Model model_total;
  unsigned k_model_a = 0;
  unsigned k_model_total = 0;
  unsigned k_d_a = 0;
  unsigned k_d_total = 0;
  unsigned k_p = 0;
  Natural bb_n = 0;
  long long gap_c_prime = 0;      // k_model_total - (k_p + k_d_a + k_model_a)
  unsigned conditional_k = 0;     // K_t(model_total | <D_a, P, M_a>)
  Natural condition = 0;
  long long unpredictability_gap = 0;
  long long c_measured = 0;       // k_d_total - n
  bool omega_scan_covers_n = false;
  std::map<std::string, bool> verdicts;

  bool all_pass() const {
    for (const auto& [name, ok] : verdicts)
      if (!ok) return false;
    return !verdicts.empty();
  }
};

/// BB(n), with BB = 0 when no program of length <= n halts (n < 3 or n < 0).
inline Natural bb_or_zero(const ComplexityTable& table, long long n) {
  if (n < 3) return 0;
  return bb(table, static_cast<unsigned>(std::min<long long>(n, table.limits.max_len)));
}

/// Runs the available-data construction, the extension, and measures every
/// constant of the resulting deceiver.
inline DeceptionReport construct_full(const FormalTheory& t, unsigned n, unsigned m,
                                      const Limits& limits, TableCache& cache,
                                      ExtendMode mode = ExtendMode::BbRank,
                                      unsigned C = kDefaultUnpredictabilityC) {
  t.validate();
  if (m <= n) throw UsageError("infeasible: m must exceed n");
  if (m > limits.max_len) throw UsageError("infeasible: m exceeds the table length L");
  auto table = cache.get(limits, 0);
  TableProvider tables = provider_for(cache, limits);

  DeceptionReport r;
  r.learner = t;
  r.p_id = learner_id(t);
  r.n = n;
  r.m = m;
  r.mode = mode;
  r.C = C;
  r.table_limits = limits;
  r.table_digest = table_digest(*table);
  r.k_p = table->k_or_throw(r.p_id, "learner id");
  r.omega_scan_covers_n = omega_threshold_scan(*table, n).covers_n;

  AvailableResult avail = construct_available(t, n, *table, tables);
  ExtensionResult ext = extend_to_deceiver(t, avail.d_a, m, *table, mode, tables);

  r.bb_n = avail.bb_n;
  r.d_a = avail.d_a;
  r.d_total = ext.d_total;
  r.model_a = avail.outcome.model;
  r.model_total = ext.model_total;
  r.rank = ext.rank;
  r.k_d_a = table->k_or_throw(avail.code, "D_a");
  r.k_d_total = table->k_or_throw(ext.code, "D_total");
  r.k_model_a = table->k_or_throw(r.model_a.code, "model_a");
  r.k_model_total = table->k_or_throw(r.model_total.code, "model_total");
  r.gap_c_prime = static_cast<long long>(r.k_model_total) -
                  static_cast<long long>(r.k_p + r.k_d_a + r.k_model_a);
  r.c_measured = static_cast<long long>(r.k_d_total) - static_cast<long long>(n);

  UnpredictabilityGap g = unpredictability_gap(r.model_total, r.d_a, t, r.model_a, limits, C, cache);
  r.condition = g.condition;
  r.conditional_k = g.k_conditional;
  r.unpredictability_gap = g.gap;
  r.conditional_table_digest = table_digest(*cache.get(limits, g.condition));

  r.verdicts["lemma3_size"] = r.d_a.size() >= r.bb_n;
  r.verdicts["lemma3_model_complexity"] = r.k_model_a <= n;
  r.verdicts["lemma3_optimal"] = avail.outcome.flag;
  r.verdicts["omega_scan_agrees"] = r.omega_scan_covers_n;
  r.verdicts["global_optimum_found"] = learn(r.d_total, t, tables).flag;
  r.verdicts["deceiver"] = is_deceiver(t, r.d_a, r.d_total, tables);
  r.verdicts["unpredictable"] = g.holds;
  r.verdicts["gap_c_prime_positive"] = r.gap_c_prime > 0;
  r.verdicts["size_bound"] = r.d_a.size() >= bb_or_zero(*table, r.k_d_total - r.c_measured);
  return r;
}

// ---------------------------------------------------------------------------

struct BubbleResult {
  bool bubble = false;
  Dataset d_total;
  Model model_total;
  UnpredictabilityGap gap;
  std::size_t candidates_examined = 0;
};

/// Searches tabled strict extensions of d_a for a witness that the learner's
/// model is optimal locally, not globally, and that the global optimum is
/// unpredictable from <D_a, P, M_a> at constant C.
inline BubbleResult detect_bubble(const FormalTheory& t, const Dataset& d_a,
                                  const Limits& search_limits, unsigned C, TableCache& cache) {
  TableProvider tables = provider_for(cache, search_limits);
  LearningOutcome base = learn(d_a, t, tables);
  if (!base.flag) throw UsageError("detect_bubble: the learner finds no optimal model on D_a");
  auto table = cache.get(search_limits, 0);
  BubbleResult r;
  for (Natural x : table->outputs_in_enumeration_order()) {
    ++r.candidates_examined;
    if (codec::dataset_size(x) <= d_a.size()) continue;
    Dataset d = codec::decode_dataset(x);
    if (!is_strict_prefix(d_a, d)) continue;
    try {
      if (p_opt(t, base.model, d, tables)) continue;
      LearningOutcome o = learn(d, t, tables);
      if (!o.flag || !table->find(o.model.code)) continue;
      UnpredictabilityGap g =
          unpredictability_gap(o.model, d_a, t, base.model, search_limits, C, cache);
      if (!g.holds) continue;
      r.bubble = true;
      r.d_total = std::move(d);
      r.model_total = o.model;
      r.gap = g;
      return r;
    } catch (const OutOfTable&) {
      continue;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

struct CageDecision {
  bool accept = false;
  std::string reason;
  std::optional<unsigned> k_dataset;
  std::optional<unsigned> k_model;
  unsigned threshold = 0;  // K_t(P_id) + slack_c
};

/// Accept iff K_t(D) <= K_t(P) + c, or the learner is optimal on D with
/// K_t(model) <= K_t(P) + c.
inline CageDecision cage_gate(const Dataset& d, const FormalTheory& t, unsigned slack_c,
                              const ComplexityTable& table, const TableProvider& tables = {}) {
  CageDecision out;
  auto k_p = table.k(learner_id(t));
  if (!k_p) {
    out.reason = "learner id is not in the table";
    return out;
  }
  out.threshold = *k_p + slack_c;
  Natural code;
  try {
    code = codec::encode_dataset(d);
  } catch (const CodeOverflow&) {
    out.reason = "dataset code exceeds 64 bits";
    return out;
  }
  out.k_dataset = table.k(code);
  if (out.k_dataset && *out.k_dataset <= out.threshold) {
    out.accept = true;
    out.reason = "dataset complexity within the cage";
    return out;
  }
  LearningOutcome o;
  try {
    o = learn(d, t, tables);
  } catch (const Error& e) {
    out.reason = std::string("learner failed: ") + e.what();
    return out;
  }
  if (o.flag) out.k_model = table.k(o.model.code);
  if (out.k_model && *out.k_model <= out.threshold) {
    out.accept = true;
    out.reason = "global model complexity within the cage";
    return out;
  }
  if (!out.k_dataset && !out.k_model)
    out.reason = "dataset is not in the table";
  else
    out.reason = "complexity exceeds the cage";
  return out;
}

// ---------------------------------------------------------------------------
// Report document

inline Json theory_json(const FormalTheory& t) {
  return {{"epsilon", format_rational(t.epsilon)},
          {"split_rule", t.split_rule},
          {"model_budget", t.model_budget},
          {"loss", loss_name(t.loss)},
          {"lambda", format_rational(t.lambda)}};
}

inline FormalTheory theory_from(const Json& j) {
  FormalTheory t;
  t.epsilon = parse_rational(j.at("epsilon").get<std::string>());
  t.split_rule = j.at("split_rule").get<std::string>();
  t.model_budget = j.at("model_budget").get<Natural>();
  t.loss = parse_loss(j.at("loss").get<std::string>());
  t.lambda = parse_rational(j.at("lambda").get<std::string>());
  t.validate();
  return t;
}

inline Json model_json(const Model& m) {
  return {{"code", m.code}, {"coeffs", m.coeffs}, {"text", to_string(m)}};
}

inline Model model_from(const Json& j) {
  auto m = codec::decode_model(j.at("code").get<Natural>());
  if (!m || m->coeffs != j.at("coeffs").get<std::vector<std::int64_t>>())
    throw CorruptFile("model code and coefficients disagree");
  return *m;
}

inline Json report_to_json(const DeceptionReport& r, const Json& config = Json::object()) {
  Json doc;
  doc["format"] = kReportFormat;
  doc["kind"] = "deception";
  doc["tool_version"] = kToolVersion;
  doc["machine_id"] = kMachineId;
  doc["machine_digest"] = machine_digest();
  doc["config"] = config;
  doc["seeds"] = Json::array();
  doc["learner"] = theory_json(r.learner);
  doc["p_id"] = r.p_id;
  doc["n"] = r.n;
  doc["m"] = r.m;
  doc["mode"] = mode_name(r.mode);
  doc["rank"] = r.rank;
  doc["C"] = r.C;
  doc["table_limits"] = io::limits_json(r.table_limits);
  doc["table_digest"] = r.table_digest;
  doc["conditional_table_digest"] = r.conditional_table_digest;
  doc["d_a"] = io::dataset_json(r.d_a);
  doc["d_total"] = io::dataset_json(r.d_total);
  doc["model_a"] = model_json(r.model_a);
  doc["model_total"] = model_json(r.model_total);
  doc["k_model_a"] = r.k_model_a;
  doc["k_model_total"] = r.k_model_total;
  doc["k_d_a"] = r.k_d_a;
  doc["k_d_total"] = r.k_d_total;
  doc["k_p"] = r.k_p;
  doc["bb_n"] = r.bb_n;
  doc["gap_c_prime"] = r.gap_c_prime;
  doc["conditional_k"] = r.conditional_k;
  doc["condition"] = r.condition;
  doc["unpredictability_gap"] = r.unpredictability_gap;
  doc["c_measured"] = r.c_measured;
  doc["omega_scan_covers_n"] = r.omega_scan_covers_n;
  doc["verdicts"] = r.verdicts;
  doc["pass"] = r.all_pass();
  return io::seal(std::move(doc));
}

inline DeceptionReport report_from_json(const Json& doc) {
  try {
    if (doc.at("kind").get<std::string>() != "deception")
      throw UsageError("report is not a deception report");
    if (doc.at("machine_id").get<std::string>() != kMachineId ||
        doc.at("machine_digest").get<std::string>() != machine_digest())
      throw VersionUnknown("report was produced for another machine");
    DeceptionReport r;
    r.learner = theory_from(doc.at("learner"));
    r.p_id = doc.at("p_id").get<Natural>();
    r.n = doc.at("n").get<unsigned>();
    r.m = doc.at("m").get<unsigned>();
    r.mode = parse_mode(doc.at("mode").get<std::string>());
    r.rank = doc.at("rank").get<std::size_t>();
    r.C = doc.at("C").get<unsigned>();
    r.table_limits = io::limits_from(doc.at("table_limits"));
    r.table_digest = doc.at("table_digest").get<std::string>();
    r.conditional_table_digest = doc.at("conditional_table_digest").get<std::string>();
    r.d_a = io::dataset_from(doc.at("d_a"));
    r.d_total = io::dataset_from(doc.at("d_total"));
    r.model_a = model_from(doc.at("model_a"));
    r.model_total = model_from(doc.at("model_total"));
    r.k_model_a = doc.at("k_model_a").get<unsigned>();
    r.k_model_total = doc.at("k_model_total").get<unsigned>();
    r.k_d_a = doc.at("k_d_a").get<unsigned>();
    r.k_d_total = doc.at("k_d_total").get<unsigned>();
    r.k_p = doc.at("k_p").get<unsigned>();
    r.bb_n = doc.at("bb_n").get<Natural>();
    r.gap_c_prime = doc.at("gap_c_prime").get<long long>();
    r.conditional_k = doc.at("conditional_k").get<unsigned>();
    r.condition = doc.at("condition").get<Natural>();
    r.unpredictability_gap = doc.at("unpredictability_gap").get<long long>();
    r.c_measured = doc.at("c_measured").get<long long>();
    r.omega_scan_covers_n = doc.at("omega_scan_covers_n").get<bool>();
    r.verdicts = doc.at("verdicts").get<std::map<std::string, bool>>();
    return r;
  } catch (const Json::exception& e) {
    throw CorruptFile(std::string("malformed report: ") + e.what());
  }
}

inline void save_report(const DeceptionReport& r, const std::string& path,
                        const Json& config = Json::object()) {
  io::write_atomic(path, report_to_json(r, config).dump(1) + "\n");
}

inline DeceptionReport load_report(const std::string& path) {
  return report_from_json(io::unseal(io::read_file(path), kReportFormat));
}

}  // namespace ait
