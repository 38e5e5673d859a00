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

// Exact samplers for positive stable and exponentially tilted stable laws.
//
// The tilted law has Laplace transform
//     E[exp(-t X)] = exp(-V0 * ((t + lambda)^s - lambda^s)),  0 < s < 1.
// For small lambda^s * V0 we sample the untilted stable variable and accept
// with probability exp(-lambda X). Otherwise we use Devroye's double
// rejection scheme (ACM TOMACS 19(4), 2009) with the corrections of Hofert
// (2011), whose expected cost is bounded uniformly in the tilt.

#ifndef GGPGRAPH_TILTED_STABLE_HPP
#define GGPGRAPH_TILTED_STABLE_HPP

#include <cmath>
#include <numbers>

#include "ggpgraph/error.hpp"
#include "ggpgraph/rng.hpp"

namespace ggpgraph {

namespace detail {

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// log of Zolotarev's function A(u)^{1/(1-s)}.
inline double log_zolotarev(double u, double s) {
  return (s * std::log(std::sin(s * u)) + (1.0 - s) * std::log(std::sin((1.0 - s) * u)) -
          std::log(std::sin(u))) /
         (1.0 - s);
}

// B(x) / B(0) in Devroye's notation.
inline double zolotarev_ratio(double x, double s) {
  return sinc(x) / (std::pow(sinc(s * x), s) * std::pow(sinc((1.0 - s) * x), 1.0 - s));
}

}  // namespace detail

/// Positive stable variate with Laplace transform exp(-t^s) (Kanter).
inline double sample_positive_stable(double s, RngStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  const double b = (1.0 - s) / s;
  return std::exp(b * (detail::log_zolotarev(u, s) - std::log(e)));
}

/// Exponentially tilted stable variate; see the file comment for the law.
/// Takes log(V0) so that very large scale factors stay representable.
inline double sample_tilted_stable(double log_v0, double s, double lambda, RngStream& rng) {
  if (!(s > 0.0 && s < 1.0)) throw domain_error("tilted stable: index must lie in (0, 1)");
  if (!(lambda >= 0.0)) throw domain_error("tilted stable: tilt must be nonnegative");

  const double scale = std::exp(log_v0 / s);
  const double log_lambda_s = lambda > 0.0 ? s * std::log(lambda) + log_v0
                                           : -std::numeric_limits<double>::infinity();
  const double lambda_s = std::exp(log_lambda_s);

  if (lambda_s < 1.0) {
    for (;;) {
      const double x = scale * sample_positive_stable(s, rng);
      if (rng.uniform() <= std::exp(-lambda * x)) return x;
    }
  }

  constexpr double pi = std::numbers::pi;
  const double c1 = std::sqrt(pi / 2.0);
  const double c2 = 2.0 + c1;
  const double b = (1.0 - s) / s;
  const double gamma = lambda_s * s * (1.0 - s);
  const double sgamma = std::sqrt(gamma);
  const double c3 = c2 * sgamma;
  const double xi = (1.0 + std::numbers::sqrt2 * c3) / pi;
  const double psi = c3 * std::exp(-gamma * pi * pi / 8.0) / std::sqrt(pi);
  const double w1 = c1 * xi / sgamma;
  const double w2 = 2.0 * std::sqrt(pi) * psi;
  const double w3 = xi * pi;

  for (;;) {
    double u = 0.0;
    double z = 0.0;
    // U from the dominating density of its marginal, then accept/reject.
    for (;;) {
      const double w_ = rng.uniform();
      const double v = rng.uniform();
      if (gamma >= 1.0) {
        u = v < w1 / (w1 + w2) ? std::fabs(rng.normal()) / sgamma : pi * (1.0 - w_ * w_);
      } else {
        u = v < w3 / (w2 + w3) ? pi * w_ : pi * (1.0 - w_ * w_);
      }
      const double w = rng.uniform();
      if (!(u < pi)) continue;
      const double zeta = std::sqrt(detail::zolotarev_ratio(u, s));
      z = 1.0 / (1.0 - std::pow(1.0 + s * zeta / sgamma, -1.0 / s));
      double rho = pi * std::exp(-lambda_s * (1.0 - 1.0 / (zeta * zeta))) /
                   ((1.0 + c1) * sgamma / zeta + z);
      double d = 0.0;
      if (gamma >= 1.0) d += xi * std::exp(-gamma * u * u / 2.0);
      if (u > 0.0) d += psi / std::sqrt(pi - u);
      if (gamma < 1.0) d += xi;
      rho *= d;
      if (w * rho <= 1.0) break;
    }

    // X given U: log-concave target, normal / flat / exponential envelope.
    const double a = std::exp(detail::log_zolotarev(u, s));
    const double m = std::pow(b / a, s) * lambda_s;
    const double delta = std::sqrt(m * s / a);
    const double a1 = delta * c1;
    const double a3 = z / a;
    const double total = a1 + delta + a3;
    const double v_ = rng.uniform();
    double n_ = 0.0;
    double e_ = 0.0;
    double x;
    if (v_ < a1 / total) {
      n_ = rng.normal();
      x = m - delta * std::fabs(n_);
    } else if (v_ < (a1 + delta) / total) {
      x = m + delta * rng.uniform();
    } else {
      e_ = rng.exponential();
      x = m + delta + e_ * a3;
    }
    if (!(x >= 0.0)) continue;
    const double e = rng.exponential();
    double c = a * (x - m) + std::exp(log_lambda_s / s - b * std::log(m)) * (std::pow(m / x, b) - 1.0);
    if (x < m) {
      c -= n_ * n_ / 2.0;
    } else if (x > m + delta) {
      c -= e_;
    }
    if (c <= e) return std::exp(log_v0 / s - b * std::log(x));
  }
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_TILTED_STABLE_HPP
