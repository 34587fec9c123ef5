#pragma once

// Models, error functions, the performance measure f_per, the optimality
// decision p_opt and the MDL-first enumerative learner.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ait/codec.hpp"
#include "ait/dyadic.hpp"
#include "ait/enumerator.hpp"
#include "ait/error.hpp"

namespace ait {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q" or "p" into a non-negative exact rational.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos)
      throw UsageError("expected a non-negative rational 'p/q', got '" + std::string(text) + "'");
    return BigInt(std::string(s));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw UsageError("rational with zero denominator: '" + std::string(text) + "'");
  return Rational(num, den);
}

inline std::string format_rational(const Rational& r) {
  BigInt n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

enum class Loss : std::uint8_t { Mse = 0, Jk = 1 };

inline std::string_view loss_name(Loss l) { return l == Loss::Mse ? "mse" : "jk"; }

inline Loss parse_loss(std::string_view s) {
  if (s == "mse") return Loss::Mse;
  if (s == "jk") return Loss::Jk;
  throw UsageError("unknown loss '" + std::string(s) + "' (expected mse or jk)");
}

inline constexpr std::string_view kSplitRule = "even-train/odd-test";

/// Parameter record of the learner P.
struct FormalTheory {
  Rational epsilon = 0;
  std::string split_rule{kSplitRule};
  Natural model_budget = 1000;  // B: model codes 0..B are scanned
  Loss loss = Loss::Mse;
  Rational lambda = 0;

  void validate() const {
    if (epsilon < 0) throw UsageError("epsilon must be >= 0");
    if (lambda < 0) throw UsageError("lambda must be >= 0");
    if (model_budget < 1) throw UsageError("model budget must be >= 1");
    if (split_rule != kSplitRule) throw UsageError("unknown split rule '" + split_rule + "'");
  }
};

/// Identity code of the learner: encode_list([<eps>, loss] ++ [<lambda>] for
/// jk) with <p/q> = pair(p, q - 1). The model budget is a resource bound, like
/// the machine's step budget, and is not part of the identity.
inline Natural learner_id(const FormalTheory& t) {
  auto rational_code = [](const Rational& r) {
    BigInt n = boost::multiprecision::numerator(r), d = boost::multiprecision::denominator(r);
    if (n > BigInt(~Natural{0}) || d - 1 > BigInt(~Natural{0}))
      throw CodeOverflow("rational too large for a learner id");
    return codec::pair(static_cast<Natural>(n), static_cast<Natural>(d - 1));
  };
  std::vector<Natural> fields{rational_code(t.epsilon), static_cast<Natural>(t.loss)};
  if (t.loss == Loss::Jk) fields.push_back(rational_code(t.lambda));
  return codec::encode_list(fields);
}

/// Supplies complexity tables by condition value; the jk loss needs them.
using TableProvider = std::function<std::shared_ptr<const ComplexityTable>(Natural condition)>;

inline TableProvider provider_for(TableCache& cache, const Limits& limits) {
  return [&cache, limits](Natural condition) { return cache.get(limits, condition); };
}

struct LearningOutcome {
  Model model;
  bool flag = false;
  Rational z;
};

inline BigInt eval_model(const Model& m, Natural x) {
  BigInt acc = 0;
  for (auto it = m.coeffs.rbegin(); it != m.coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline Rational mse(const Model& m, const Dataset& points) {
  if (points.empty()) throw UsageError("mse of an empty slice");
  BigInt sse = 0;
  for (const Point& p : points) {
    BigInt r = BigInt(p.y) - eval_model(m, p.x);
    sse += r * r;
  }
  return Rational(sse, BigInt(points.size()));
}

/// Even 0-based indices train, odd indices test; a singleton is both.
inline std::pair<Dataset, Dataset> split(const Dataset& d) {
  if (d.empty()) throw UsageError("split of an empty dataset");
  if (d.size() == 1) return {d, d};
  Dataset train, test;
  for (std::size_t i = 0; i < d.size(); ++i) (i % 2 == 0 ? train : test).push_back(d[i]);
  return {train, test};
}

/// KL(Bernoulli(phi) || Bernoulli(theta)) in bits, 0 log 0 = 0.
inline double kl_bernoulli(const Rational& phi, const Rational& theta) {
  if (phi < 0 || phi > 1) throw UsageError("phi must lie in [0,1]");
  if (theta <= 0 || theta >= 1) throw UsageError("theta must lie strictly inside (0,1)");
  double p = static_cast<double>(phi), q = static_cast<double>(theta);
  double out = 0;
  if (phi > 0) out += p * std::log2(p / q);
  if (phi < 1) out += (1 - p) * std::log2((1 - p) / (1 - q));
  return out;
}

inline Rational jk_loss(const Model& m, const Dataset& d, const Rational& lambda,
                        const TableProvider& tables) {
  Rational total = 0;
  if (lambda != 0) total += lambda * tables(0)->k_or_throw(m.code, "model code");
  for (const Point& p : d) {
    BigInt pred = eval_model(m, p.x);
    if (pred < 0 || pred > BigInt(~Natural{0}))
      throw OutOfTable("prediction " + pred.str() + " is not a natural condition");
    auto table = tables(static_cast<Natural>(pred));
    if (pred > BigInt(table->limits.value_cap))
      throw OutOfTable("prediction " + pred.str() + " exceeds the value cap");
    unsigned k = table->k_or_throw(p.y, "target");
    total += Rational(k) * k;
  }
  return total;
}

inline Rational f_per(const Model& m, const Dataset& d, const FormalTheory& t,
                      const TableProvider& tables = {}) {
  auto [train, test] = split(d);
  if (t.loss == Loss::Mse) return std::max(mse(m, train), mse(m, test));
  if (!tables) throw UsageError("the jk loss needs complexity tables");
  return std::max(jk_loss(m, train, t.lambda, tables), jk_loss(m, test, t.lambda, tables));
}

/// Z_not-opt = { z : z > epsilon }.
inline bool in_not_optimal_set(const Rational& z, const FormalTheory& t) { return z > t.epsilon; }

inline bool p_opt(const FormalTheory& t, const Model& m, const Dataset& d,
                  const TableProvider& tables = {}) {
  return !in_not_optimal_set(f_per(m, d, t, tables), t);
}

namespace detail {

using I128 = __int128;

/// Decoded models for codes 0..B, shared across learn() calls.
class ModelBank {
 public:
  static std::shared_ptr<const std::vector<std::optional<Model>>> get(Natural budget) {
    static std::mutex mu;
    static std::map<Natural, std::shared_ptr<const std::vector<std::optional<Model>>>> banks;
    std::lock_guard lock(mu);
    auto& slot = banks[budget];
    if (!slot) {
      auto v = std::make_shared<std::vector<std::optional<Model>>>();
      v->reserve(budget + 1);
      for (Natural c = 0; c <= budget; ++c) v->push_back(codec::decode_model(c));
      slot = std::move(v);
    }
    return slot;
  }
};

/// Sum of squared residuals in 128-bit arithmetic; nullopt on overflow.
inline std::optional<I128> fast_sse(const Model& m, const Dataset& pts) {
  I128 sse = 0;
  for (const Point& p : pts) {
    I128 acc = 0;
    for (auto it = m.coeffs.rbegin(); it != m.coeffs.rend(); ++it) {
      if (__builtin_mul_overflow(acc, static_cast<I128>(p.x), &acc)) return std::nullopt;
      if (__builtin_add_overflow(acc, static_cast<I128>(*it), &acc)) return std::nullopt;
    }
    I128 r;
    if (__builtin_sub_overflow(static_cast<I128>(p.y), acc, &r)) return std::nullopt;
    I128 sq;
    if (__builtin_mul_overflow(r, r, &sq)) return std::nullopt;
    if (__builtin_add_overflow(sse, sq, &sse)) return std::nullopt;
  }
  return sse;
}

inline BigInt to_big(I128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  BigInt out = static_cast<std::uint64_t>(u >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-out) : out;
}

/// mse(slice) <= epsilon, i.e. sse * eps_den <= eps_num * |slice|.
inline bool slice_within(const Model& m, const Dataset& pts, const Rational& eps) {
  BigInt sse;
  if (auto fast = fast_sse(m, pts)) {
    if (*fast == 0) return true;
    sse = to_big(*fast);
  } else {
    for (const Point& p : pts) {
      BigInt r = BigInt(p.y) - eval_model(m, p.x);
      sse += r * r;
    }
  }
  return sse * boost::multiprecision::denominator(eps) <=
         boost::multiprecision::numerator(eps) * BigInt(pts.size());
}

}  // namespace detail

/// The learning algorithm P: the first model code in 0..B that p_opt accepts.
/// Falls back to (zero polynomial, 0, f_per(zero)) so it is total.
inline LearningOutcome learn(const Dataset& d, const FormalTheory& t,
                             const TableProvider& tables = {}) {
  t.validate();
  if (d.empty()) throw UsageError("learn needs a non-empty dataset");
  auto bank = detail::ModelBank::get(t.model_budget);
  if (t.loss == Loss::Mse) {
    auto [train, test] = split(d);
    for (const auto& m : *bank) {
      if (!m) continue;
      if (detail::slice_within(*m, train, t.epsilon) && detail::slice_within(*m, test, t.epsilon))
        return {*m, true, f_per(*m, d, t)};
    }
  } else {
    for (const auto& m : *bank) {
      if (!m) continue;
      try {
        Rational z = f_per(*m, d, t, tables);
        if (!in_not_optimal_set(z, t)) return {*m, true, z};
      } catch (const OutOfTable&) {
        // a model whose predictions leave the table cannot be certified
      }
    }
  }
  Model zero{};
  return {zero, false, f_per(zero, d, t, tables)};
}

}  // namespace ait
