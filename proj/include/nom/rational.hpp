#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace nom {

// Exact rational arithmetic everywhere; no floating point in the core.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PaymentsRequiredError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "p/q" or plain integer shorthand ("-3", "7").
inline Rat parse_rat(const std::string& s) {
  if (s.empty()) throw InputError("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den <= 0) throw InputError("rational denominator must be positive: " + s);
    return Rat(num, den);
  } catch (const std::exception&) {
    throw InputError("malformed rational: " + s);
  }
}

inline std::string rat_str(const Rat& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace nom
