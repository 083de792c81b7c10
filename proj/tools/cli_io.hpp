#pragma once

// Text formats of the command-line tool: numbers with 17 significant digits,
// complex numbers as [re, im] in JSON and split columns in CSV, and "a+bi"
// parsing for complex arguments.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace starkres::cli {

using json = nlohmann::json;
using cplx = std::complex<double>;

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// JSON text with every float rendered by fmt17 (non-finite values become null).
inline void dump17(const json& j, std::string& out, int indent, int level = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump17(it.value(), out, indent, level + 1);
      }
      out += nl + close + "}";
      return;
    }
    case json::value_t::array: {
      // Short numeric arrays (complex pairs, hats) stay on one line.
      bool flat = j.size() <= 4;
      for (const auto& e : j) flat = flat && e.is_primitive();
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      if (!flat) out += nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) {
          out += ",";
          if (!flat) out += nl;
          else if (indent > 0) out += " ";
        }
        first = false;
        if (!flat) out += pad;
        dump17(e, out, indent, level + 1);
      }
      if (!flat) out += nl + close;
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

inline std::string dump17(const json& j, int indent = 2) {
  std::string s;
  dump17(j, s, indent);
  return s;
}

/// Parses "a", "bi", "a+bi", "a-bi" (also with j, spaces, exponents, and a
/// bare "i" for a unit coefficient). Returns nullopt on malformed input.
inline std::optional<cplx> parse_complex(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) return std::nullopt;
  const char* p = s.c_str();
  const char* end = p + s.size();
  auto is_unit = [](char c) { return c == 'i' || c == 'j'; };
  auto read = [&](const char*& q, double& v) {
    char* e = nullptr;
    v = std::strtod(q, &e);
    if (e == q) return false;
    q = e;
    return true;
  };
  double a = 0.0;
  const char* q = p;
  // A bare sign or unit means a coefficient of +-1 on i.
  if ((*q == '+' || *q == '-') && q + 2 == end && is_unit(q[1])) return cplx{0.0, *q == '-' ? -1.0 : 1.0};
  if (is_unit(*q) && q + 1 == end) return cplx{0.0, 1.0};
  if (!read(q, a)) return std::nullopt;
  if (q == end) return cplx{a, 0.0};
  if (is_unit(*q) && q + 1 == end) return cplx{0.0, a};
  if (*q != '+' && *q != '-') return std::nullopt;
  const double sign = *q == '-' ? -1.0 : 1.0;
  ++q;
  double b = 1.0;
  if (!is_unit(*q)) {
    if (*q == '+' || *q == '-') return std::nullopt;
    if (!read(q, b)) return std::nullopt;
  }
  if (q + 1 != end || !is_unit(*q)) return std::nullopt;
  return cplx{a, sign * b};
}

}  // namespace starkres::cli
