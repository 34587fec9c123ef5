#pragma once

// Bijections between naturals and the structured objects the learner works
// on. Cantor pairing underlies everything:
//   pair(a, b) = (a + b)(a + b + 1)/2 + b
//   list:  0 <-> [],  n + 1 <-> head : tail  with (head, tail) = unpair(n)
//   point: pair(x, y);  dataset: list of points
//   model: list of zigzag-coded coefficients c0..cd, d <= 3

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ait/error.hpp"
#include "ait/pm1.hpp"

namespace ait {

/// Thrown when an encoding does not fit in 64 bits.
class CodeOverflow : public Error {
 public:
  using Error::Error;
};

namespace codec {

using U128 = unsigned __int128;

inline Natural checked_narrow(U128 v) {
  if (v > U128{~Natural{0}}) throw CodeOverflow("code exceeds 64 bits");
  return static_cast<Natural>(v);
}

/// floor(sqrt(v)) for v < 2^128.
inline U128 isqrt(U128 v) {
  if (v < 2) return v;
  U128 x = static_cast<U128>(std::sqrt(static_cast<long double>(v)));
  while (x * x > v) --x;
  while ((x + 1) * (x + 1) <= v) ++x;
  return x;
}

inline Natural pair(Natural a, Natural b) {
  U128 s = U128{a} + b;
  return checked_narrow(s * (s + 1) / 2 + b);
}

inline std::pair<Natural, Natural> unpair(Natural n) {
  U128 w = (isqrt(U128{8} * n + 1) - 1) / 2;
  U128 t = w * (w + 1) / 2;
  auto b = static_cast<Natural>(U128{n} - t);
  auto a = static_cast<Natural>(w - b);
  return {a, b};
}

inline Natural encode_list(const std::vector<Natural>& xs) {
  Natural code = 0;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
    Natural p = pair(*it, code);
    if (p == ~Natural{0}) throw CodeOverflow("list code exceeds 64 bits");
    code = p + 1;
  }
  return code;
}

inline std::vector<Natural> decode_list(Natural n) {
  std::vector<Natural> out;
  while (n != 0) {
    auto [head, tail] = unpair(n - 1);
    out.push_back(head);
    n = tail;
  }
  return out;
}

}  // namespace codec

struct Point {
  Natural x = 0;
  Natural y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Dataset = std::vector<Point>;

namespace codec {

inline Natural encode_dataset(const Dataset& d) {
  std::vector<Natural> elems;
  elems.reserve(d.size());
  for (const Point& p : d) elems.push_back(pair(p.x, p.y));
  return encode_list(elems);
}

inline Dataset decode_dataset(Natural n) {
  Dataset d;
  for (Natural e : decode_list(n)) {
    auto [x, y] = unpair(e);
    d.push_back({x, y});
  }
  return d;
}

/// Number of points without materialising them.
inline std::size_t dataset_size(Natural n) {
  std::size_t size = 0;
  while (n != 0) {
    n = unpair(n - 1).second;
    ++size;
  }
  return size;
}

inline Natural zigzag(std::int64_t c) {
  return c >= 0 ? Natural(c) * 2 : (Natural(-(c + 1)) * 2 + 1);
}

inline std::int64_t unzigzag(Natural z) {
  return (z & 1) ? -static_cast<std::int64_t>(z >> 1) - 1 : static_cast<std::int64_t>(z >> 1);
}

}  // namespace codec

inline constexpr std::size_t kMaxCoefficients = 4;  // degree <= 3

/// Integer polynomial y = sum coeffs[i] * x^i, with its canonical code.
struct Model {
  std::vector<std::int64_t> coeffs;
  Natural code = 0;

  friend bool operator==(const Model&, const Model&) = default;
};

namespace codec {

inline Natural encode_model(const std::vector<std::int64_t>& coeffs) {
  if (coeffs.size() > kMaxCoefficients) throw UsageError("model degree exceeds 3");
  std::vector<Natural> zs;
  zs.reserve(coeffs.size());
  for (std::int64_t c : coeffs) zs.push_back(zigzag(c));
  return encode_list(zs);
}

inline Model make_model(std::vector<std::int64_t> coeffs) {
  Natural code = encode_model(coeffs);
  return Model{std::move(coeffs), code};
}

/// nullopt marks an invalid code (more than four coefficients).
inline std::optional<Model> decode_model(Natural n) {
  Model m;
  m.code = n;
  while (n != 0) {
    if (m.coeffs.size() == kMaxCoefficients) return std::nullopt;
    auto [head, tail] = unpair(n - 1);
    m.coeffs.push_back(unzigzag(head));
    n = tail;
  }
  return m;
}

}  // namespace codec

inline std::string to_string(const Model& m) {
  if (m.coeffs.empty()) return "y = 0";
  std::string s = "y =";
  bool first = true;
  for (std::size_t i = 0; i < m.coeffs.size(); ++i) {
    std::int64_t c = m.coeffs[i];
    if (c == 0 && !(first && i + 1 == m.coeffs.size())) continue;
    s += first ? (c < 0 ? " -" : " ") : (c < 0 ? " - " : " + ");
    std::uint64_t mag = c < 0 ? std::uint64_t(-(c + 1)) + 1 : std::uint64_t(c);
    if (i == 0 || mag != 1) s += std::to_string(mag);
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
    first = false;
  }
  if (first) s += " 0";
  return s;
}

// ---------------------------------------------------------------------------
// Dataset text format: header "x,y", then one "x,y" row of unsigned decimals
// per point, order significant.

namespace csv {

inline Natural parse_natural(std::string_view field, std::size_t line) {
  if (field.empty()) throw ParseError("empty field", line);
  Natural v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParseError("not an unsigned decimal: '" + std::string(field) + "'", line);
  return v;
}

inline Dataset read_dataset(std::istream& in) {
  Dataset d;
  std::string row;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (!header) {
      if (row != "x,y") throw ParseError("expected header 'x,y'", line);
      header = true;
      continue;
    }
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos)
      throw ParseError("expected exactly two fields", line);
    std::string_view sv(row);
    d.push_back({parse_natural(sv.substr(0, comma), line), parse_natural(sv.substr(comma + 1), line)});
  }
  if (!header) throw ParseError("missing header 'x,y'", line + 1);
  return d;
}

inline Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset file " + path);
  return read_dataset(in);
}

inline Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in);
}

inline void write_dataset(std::ostream& out, const Dataset& d) {
  out << "x,y\n";
  for (const Point& p : d) out << p.x << ',' << p.y << '\n';
}

inline std::string format_dataset(const Dataset& d) {
  std::ostringstream out;
  write_dataset(out, d);
  return out.str();
}

}  // namespace csv

}  // namespace ait
