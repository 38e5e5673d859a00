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

// Levy-measure mathematics for the generalized gamma process (GGP)
//
//     rho(dw) = w^(-1-sigma) exp(-tau w) / Gamma(1 - sigma) dw
//
// restricted to [0, alpha], together with the exact samplers needed by the
// simulators and the MCMC kernels.

#ifndef GGPGRAPH_CRM_HPP
#define GGPGRAPH_CRM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "ggpgraph/error.hpp"
#include "ggpgraph/rng.hpp"
#include "ggpgraph/special.hpp"
#include "ggpgraph/tilted_stable.hpp"

namespace ggpgraph {

/// |sigma| below this is treated as the gamma process (sigma = 0).
inline constexpr double kSigmaZero = 1e-12;

/// True iff (sigma, tau) lies in the admissible GGP region.
inline bool in_ggp_region(double sigma, double tau) {
  if (!std::isfinite(sigma) || !std::isfinite(tau)) return false;
  return (sigma <= 0.0 && tau > 0.0) || (sigma > 0.0 && sigma < 1.0 && tau >= 0.0);
}

/// Validated GGP hyperparameters (alpha, sigma, tau).
class GgpParams {
 public:
  GgpParams(double alpha, double sigma, double tau) : alpha_(alpha), sigma_(sigma), tau_(tau) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw non_positive_alpha("alpha must be positive and finite, got " + std::to_string(alpha));
    }
    if (!in_ggp_region(sigma, tau)) {
      throw out_of_region("(sigma, tau) = (" + std::to_string(sigma) + ", " +
                          std::to_string(tau) + ") is outside the GGP region");
    }
  }

  double alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }
  double tau() const noexcept { return tau_; }

  bool finite_activity() const noexcept { return sigma_ < 0.0; }

  friend bool operator==(const GgpParams&, const GgpParams&) = default;

 private:
  double alpha_;
  double sigma_;
  double tau_;
};

inline GgpParams validate_params(double alpha, double sigma, double tau) {
  return GgpParams(alpha, sigma, tau);
}

/// GGP parameters with an extra exponential tilt c >= 0 on the total mass.
struct TiltedStableSpec {
  GgpParams base;
  double tilt;

  TiltedStableSpec(GgpParams base_, double tilt_) : base(base_), tilt(tilt_) {
    if (!(tilt_ >= 0.0) || !std::isfinite(tilt_)) throw domain_error("tilt must be >= 0");
  }
};

// ---------------------------------------------------------------------------
// Densities and integrals
// ---------------------------------------------------------------------------

inline double log_levy_density(double sigma, double tau, double w) {
  return -(1.0 + sigma) * std::log(w) - tau * w - std::lgamma(1.0 - sigma);
}

inline double log_levy_density(const GgpParams& p, double w) {
  if (!(w > 0.0)) throw domain_error("levy_density: w must be positive");
  return log_levy_density(p.sigma(), p.tau(), w);
}

inline double levy_density(const GgpParams& p, double w) { return std::exp(log_levy_density(p, w)); }

/// log of the tail intensity rho_bar(x) = int_x^inf rho(dw).
inline double log_tail_intensity(double sigma, double tau, double x) {
  if (tau == 0.0) return -sigma * std::log(x) - std::log(sigma) - std::lgamma(1.0 - sigma);
  return sigma * std::log(tau) + special::log_upper_gamma(-sigma, tau * x) - std::lgamma(1.0 - sigma);
}

inline double tail_intensity(const GgpParams& p, double x) {
  if (!(x > 0.0)) throw domain_error("tail_intensity: x must be positive");
  return std::exp(log_tail_intensity(p.sigma(), p.tau(), x));
}

/// Total mass tau^sigma / (-sigma) of rho; infinite unless sigma < 0.
inline double levy_total_mass(const GgpParams& p) {
  if (p.sigma() >= 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(p.sigma() * std::log(p.tau()) - std::log(-p.sigma()));
}

/// x with rho_bar(x) = y.
///
/// Safeguarded Newton iteration on log rho_bar as a function of log x inside
/// the bracket [1e-300, 1e300]. `hint`, if positive, is used as the starting
/// point; consecutive calls on sorted y values converge in a few steps.
inline double inv_tail_intensity(const GgpParams& p, double y, double hint = 0.0) {
  if (!(y > 0.0)) throw domain_error("inv_tail_intensity: y must be positive");
  const double sigma = p.sigma();
  const double tau = p.tau();
  if (tau == 0.0) {
    return std::exp(-std::log(sigma * std::tgamma(1.0 - sigma) * y) / sigma);
  }
  if (sigma < 0.0 && y >= levy_total_mass(p)) {
    throw not_invertible("inv_tail_intensity: y exceeds the total Levy mass");
  }
  const double log_y = std::log(y);
  auto g = [&](double u) { return log_tail_intensity(sigma, tau, std::exp(u)) - log_y; };

  double lo = std::log(1e-300);
  double hi = std::log(1e300);
  if (g(lo) < 0.0) throw not_invertible("inv_tail_intensity: solution below 1e-300");

  double u;
  if (hint > 0.0) {
    u = std::log(hint);
  } else if (sigma > 0.0) {
    // the stable (tau = 0) solution is an upper bound
    u = -std::log(sigma * std::tgamma(1.0 - sigma) * y) / sigma;
  } else {
    u = 0.0;
  }
  u = std::clamp(u, lo, hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double x = std::exp(u);
    const double log_tail = log_tail_intensity(sigma, tau, x);
    const double gu = log_tail - log_y;
    if (!std::isfinite(gu)) {
      hi = u;
      u = 0.5 * (lo + hi);
      continue;
    }
    if (gu > 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    if (std::fabs(gu) < 1e-13) return x;
    // d log rho_bar / d log x = -x rho(x) / rho_bar(x)
    const double slope = -std::exp(std::log(x) + log_levy_density(sigma, tau, x) - log_tail);
    double next = u - gu / slope;
    // far in the tail log rho and log rho_bar cancel badly and the slope is
    // unreliable; fall back to bisection when the step stalls away from the root
    // (|slope| is below ~1e3 wherever rho_bar is representable)
    const bool stalled = std::fabs(next - u) < 1e-6 * std::fabs(gu);
    if (!(next > lo && next < hi) || !std::isfinite(next) || stalled) {
      next = 0.5 * (lo + hi);
    } else if (std::fabs(next - u) < 1e-15 * std::max(1.0, std::fabs(u))) {
      return std::exp(next);
    }
    if (hi - lo < 1e-15 * std::max(1.0, std::fabs(u))) return std::exp(next);
    u = next;
  }
  return std::exp(u);
}

/// log psi(t) for raw (sigma, tau); psi(t) = ((t + tau)^sigma - tau^sigma) / sigma.
inline double log_laplace_exponent(double sigma, double tau, double t) {
  if (tau == 0.0) return sigma * std::log(t) - std::log(sigma);
  return sigma * std::log(tau) + std::log(special::expm1_ratio(sigma, std::log1p(t / tau)));
}

/// Laplace exponent per unit alpha: E[exp(-t W*)] = exp(-alpha psi(t)).
inline double laplace_exponent(const GgpParams& p, double t) {
  if (!(t >= 0.0)) throw domain_error("laplace_exponent: t must be >= 0");
  if (t == 0.0) return 0.0;
  return std::exp(log_laplace_exponent(p.sigma(), p.tau(), t));
}

/// log kappa(m, z) = log int w^m exp(-z w) rho(dw).
inline double log_kappa(double sigma, double tau, double m, double z) {
  return std::lgamma(m - sigma) - std::lgamma(1.0 - sigma) + (sigma - m) * std::log(z + tau);
}

inline double kappa(const GgpParams& p, int m, double z) {
  if (m < 1) throw domain_error("kappa: m must be >= 1");
  if (!(z >= 0.0) || !(z + p.tau() > 0.0)) throw domain_error("kappa: need z >= 0 and z + tau > 0");
  return std::exp(log_kappa(p.sigma(), p.tau(), m, z));
}

/// Mass alpha * int_0^eps w rho(dw) carried by atoms below eps.
inline double mass_below(const GgpParams& p, double eps) {
  const double s = p.sigma();
  if (p.tau() == 0.0) {
    return p.alpha() * std::exp((1.0 - s) * std::log(eps) - std::log(1.0 - s) - std::lgamma(1.0 - s));
  }
  return p.alpha() * std::pow(p.tau(), s - 1.0) * boost::math::gamma_p(1.0 - s, p.tau() * eps);
}

/// Mean mass alpha * int_eps^inf w rho(dw) of atoms above eps (tau > 0).
inline double mass_above(const GgpParams& p, double eps) {
  if (p.tau() == 0.0) return std::numeric_limits<double>::infinity();
  return p.alpha() * std::pow(p.tau(), p.sigma() - 1.0) *
         boost::math::gamma_q(1.0 - p.sigma(), p.tau() * eps);
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Total mass of a GGP restricted to [0, alpha], with alpha passed as
/// log(alpha). Exact in all three regimes.
inline double sample_ggp_total_mass(double log_alpha, double sigma, double tau, RngStream& rng) {
  if (!in_ggp_region(sigma, tau)) throw domain_error("total mass: (sigma, tau) outside region");
  if (std::fabs(sigma) < kSigmaZero) {
    if (!(tau > 0.0)) throw domain_error("total mass: gamma process needs tau > 0");
    return rng.gamma(std::exp(log_alpha), tau);
  }
  if (sigma > 0.0) {
    return sample_tilted_stable(log_alpha - std::log(sigma), sigma, tau, rng);
  }
  // compound Poisson: Poisson(-(alpha/sigma) tau^sigma) jumps, each Gamma(-sigma, tau)
  const double rate = std::exp(log_alpha + sigma * std::log(tau) - std::log(-sigma));
  const std::uint64_t k = rng.poisson(rate);
  if (k == 0) return 0.0;
  return rng.gamma(-sigma * static_cast<double>(k), tau);
}

inline double sample_total_mass(const GgpParams& p, RngStream& rng) {
  return sample_ggp_total_mass(std::log(p.alpha()), p.sigma(), p.tau(), rng);
}

/// Draw from exp(-c w) g*(w) / E[exp(-c W*)]; the GGP total mass with tau + c.
inline double sample_tilted_total_mass(const TiltedStableSpec& spec, RngStream& rng) {
  return sample_ggp_total_mass(std::log(spec.base.alpha()), spec.base.sigma(),
                               spec.base.tau() + spec.tilt, rng);
}

/// Zero-truncated Poisson draw, k >= 1.
inline std::uint64_t sample_truncated_poisson(double rate, RngStream& rng) {
  if (!(rate > 0.0)) throw domain_error("truncated Poisson: rate must be positive");
  if (rate < 1.0) {
    // inverse CDF; P(1) = rate / expm1(rate) is accurate as rate -> 0
    double p = rate / std::expm1(rate);
    double u = rng.uniform();
    std::uint64_t k = 1;
    while (u > p) {
      u -= p;
      ++k;
      p *= rate / static_cast<double>(k);
      if (p <= 0.0) break;
    }
    return k;
  }
  for (;;) {
    const std::uint64_t k = rng.poisson(rate);
    if (k > 0) return k;
  }
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_CRM_HPP
