// Copyright 2026 The ggpgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GGPGRAPH_SPECIAL_HPP
#define GGPGRAPH_SPECIAL_HPP

#include <cmath>
#include <limits>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ggpgraph/error.hpp"

namespace ggpgraph::special {

namespace detail {

// Legendre continued fraction for log Gamma(a, x), modified Lentz. Valid for
// any real a; converges quickly once x > max(1, a + 1).
inline double log_upper_gamma_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return -x + a * std::log(x) + std::log(h);
}

// Gamma(a, x) for small x; a may be zero or negative (non-integer below 0).
inline double upper_gamma_small_x(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^-x) / a
  return (upper_gamma_small_x(a + 1.0, x) - std::exp(a * std::log(x) - x)) / a;
}

}  // namespace detail

/// log of the upper incomplete gamma function Gamma(a, x) for x > 0 and any
/// real a that is not a negative integer. Shapes with |a| < 1e-12 are
/// evaluated as a = 0 (exponential integral E1).
inline double log_upper_gamma(double a, double x) {
  if (!(x > 0.0)) throw domain_error("log_upper_gamma: x must be positive");
  if (std::fabs(a) < 1e-12) a = 0.0;
  if (x >= 1.0 && x > a + 1.0) return detail::log_upper_gamma_cf(a, x);
  return std::log(detail::upper_gamma_small_x(a, x));
}

inline double upper_gamma(double a, double x) { return std::exp(log_upper_gamma(a, x)); }

/// (exp(s * l) - 1) / s, continuous at s = 0 where it equals l.
inline double expm1_ratio(double s, double l) {
  if (std::fabs(s * l) < 1e-300 || s == 0.0) return l;
  return std::expm1(s * l) / s;
}

}  // namespace ggpgraph::special

#endif  // GGPGRAPH_SPECIAL_HPP
