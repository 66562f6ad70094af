#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace tiltmut {

// Exact rational coefficients. mpq_class keeps numerator/denominator reduced
// after every arithmetic operation.
using Scalar = mpq_class;

inline std::string to_string(const Scalar& q) { return q.get_str(); }

// Accepts "p" or "p/q" with optional leading '-'.
inline Scalar parse_scalar(std::string_view text) {
  Scalar q;
  if (text.empty() || q.set_str(std::string(text), 10) != 0) {
    throw std::invalid_argument("bad rational: " + std::string(text));
  }
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
  q.canonicalize();
  return q;
}

}  // namespace tiltmut
