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

// Posterior sampling for GGP graphs.
//
// Undirected graphs: each sweep runs
//   1. HMC on the log-sociabilities omega_i = log w_i,
//   2. a joint Metropolis-Hastings move on (alpha, sigma, tau, w*) whose
//      proposal for w* is the exponentially tilted total-mass law, so the
//      total-mass density never has to be evaluated,
//   3. the latent symmetric counts nbar_ij on the observed edges.
//
// Bipartite graphs use the conjugate Gibbs sweep with the sociabilities of
// one side integrated out in the hyperparameter move.

#ifndef GGPGRAPH_INFERENCE_HPP
#define GGPGRAPH_INFERENCE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ggpgraph/crm.hpp"
#include "ggpgraph/error.hpp"
#include "ggpgraph/graph.hpp"
#include "ggpgraph/rng.hpp"

namespace ggpgraph {

enum class LatentMode { exact, mh };
enum class PriorMode { improper, lognormal };

/// Starting point of a chain; unset fields use the default initialization.
struct InitSpec {
  std::optional<double> alpha;
  std::optional<double> sigma;
  std::optional<double> tau;
  std::optional<double> w_star;
  std::optional<std::vector<double>> weights;
  double jitter = 0.1;  // sd of the per-chain perturbation of log w
};

struct McmcConfig {
  std::size_t n_iter = 1000;
  std::size_t n_chains = 3;
  std::size_t leapfrog_steps = 10;
  double target_accept = 0.6;
  std::optional<std::size_t> adapt_iters;  // default n_iter / 4
  double initial_stepsize = 0.01;
  double rw_sd = 0.02;
  double scale_sd = 0.1;  // joint shift of log tau and -log w; 0 disables
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  LatentMode latent_mode = LatentMode::exact;
  PriorMode prior = PriorMode::improper;
  // lognormal priors on alpha, 1 - sigma and tau (PriorMode::lognormal)
  double prior_log_mean = 0.0;
  double prior_log_sd = 3.0;
  bool estimate_alpha = true;
  bool estimate_sigma = true;
  bool estimate_tau = true;
  bool estimate_w = true;
  std::size_t omega_stride = 0;  // keep every k-th kept omega vector; 0 = none
  InitSpec init;

  std::size_t adapt() const { return adapt_iters.value_or(n_iter / 4); }

  void validate() const {
    if (leapfrog_steps < 1) throw domain_error("leapfrog_steps must be >= 1");
    if (!(target_accept > 0.0 && target_accept < 1.0)) throw domain_error("target_accept must lie in (0, 1)");
    if (!(rw_sd > 0.0)) throw domain_error("rw_sd must be positive");
    if (!(scale_sd >= 0.0)) throw domain_error("scale_sd must be >= 0");
    if (thin < 1) throw domain_error("thin must be >= 1");
    if (n_chains < 1) throw domain_error("n_chains must be >= 1");
    if (!(initial_stepsize > 0.0)) throw domain_error("initial_stepsize must be positive");
    if (adapt() > n_iter) throw domain_error("adapt_iters exceeds n_iter");
    if (!(prior_log_sd > 0.0)) throw domain_error("prior_log_sd must be positive");
  }
};

/// Sampler state for an undirected graph. `latent[e]` belongs to
/// graph.edges()[e]; m_i = sum_{j != i} nbar_ij + 2 nbar_ii.
struct McmcState {
  std::vector<double> omega;
  double w_star = 0.1;
  double log_alpha = 0.0;
  double sigma = 0.0;
  double tau = 1.0;
  std::vector<std::uint64_t> latent;
  std::vector<std::uint64_t> m;

  double alpha() const { return std::exp(log_alpha); }
};

struct AcceptanceCounter {
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;

  void add(bool ok) {
    ++proposed;
    accepted += ok ? 1 : 0;
  }
  double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

struct TraceRecord {
  std::size_t iteration = 0;
  std::size_t chain = 0;
  double alpha = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double w_star = 0.0;
  double log_post = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Running mean and sum of squared deviations per coordinate (Welford).
struct RunningStats {
  std::size_t n = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  void add(const std::vector<double>& x) {
    if (n == 0) {
      mean.assign(x.size(), 0.0);
      m2.assign(x.size(), 0.0);
    }
    ++n;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean[i];
      mean[i] += d / static_cast<double>(n);
      m2[i] += d * (x[i] - mean[i]);
    }
  }
  double variance(std::size_t i) const { return n > 1 ? m2[i] / static_cast<double>(n - 1) : 0.0; }
};

struct ChainTrace {
  std::size_t chain = 0;
  std::vector<TraceRecord> records;
  std::vector<TraceRecord> secondary;  // right-hand side of a bipartite fit
  std::vector<std::size_t> omega_iterations;
  std::vector<std::vector<double>> omega_snapshots;
  RunningStats w_stats;  // of w_i over kept iterations
  AcceptanceCounter hmc;
  AcceptanceCounter hyper;
  AcceptanceCounter hyper_secondary;
  AcceptanceCounter scale;
  AcceptanceCounter latent;
  double stepsize = 0.0;
  double adapt_accept = 0.0;  // mean HMC acceptance probability after adaptation
  McmcState initial_state;
  McmcState final_state;
};

// ---------------------------------------------------------------------------
// Posterior pieces
// ---------------------------------------------------------------------------

/// m_i from the latent counts; self counts contribute twice.
inline std::vector<std::uint64_t> node_exponents(const UndirectedGraph& g, const std::vector<std::uint64_t>& latent) {
  std::vector<std::uint64_t> m(g.n_nodes(), 0);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i == j) {
      m[i] += 2 * latent[e];
    } else {
      m[i] += latent[e];
      m[j] += latent[e];
    }
  }
  return m;
}

inline void check_consistency(const McmcState& s, const UndirectedGraph& g) {
  if (s.omega.size() != g.n_nodes() || s.m.size() != g.n_nodes()) {
    throw inconsistent_state("state size does not match the graph");
  }
  if (s.latent.size() != g.n_edges()) throw inconsistent_state("latent count size does not match the edges");
  for (auto n : s.latent) {
    if (n < 1) throw inconsistent_state("latent count below 1 on an observed edge");
  }
  if (node_exponents(g, s.latent) != s.m) throw inconsistent_state("m does not match the latent counts");
  if (!(s.w_star >= 0.0)) throw inconsistent_state("negative remainder mass");
  if (!in_ggp_region(s.sigma, s.tau)) throw inconsistent_state("hyperparameters outside the GGP region");
}

namespace detail {

inline double sum_exp(const std::vector<double>& omega) {
  double s = 0.0;
  for (double o : omega) s += std::exp(o);
  return s;
}

// Terms of the log posterior that depend on omega (and on sigma, tau through
// the Levy density), Jacobian included:
//   sum_i (m_i - sigma) omega_i - tau w_i - (S + w*)^2.
inline double omega_log_density(const std::vector<double>& omega, const std::vector<std::uint64_t>& m, double sigma,
                                double tau, double w_star) {
  double acc = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double w = std::exp(omega[i]);
    s += w;
    acc += (static_cast<double>(m[i]) - sigma) * omega[i] - tau * w;
  }
  const double total = s + w_star;
  return acc - total * total;
}

inline void omega_gradient(const std::vector<double>& omega, const std::vector<std::uint64_t>& m, double sigma,
                           double tau, double w_star, std::vector<double>& grad) {
  grad.resize(omega.size());
  const double s = sum_exp(omega);
  const double k = tau + 2.0 * (s + w_star);
  for (std::size_t i = 0; i < omega.size(); ++i) {
    grad[i] = static_cast<double>(m[i]) - sigma - std::exp(omega[i]) * k;
  }
}

}  // namespace detail

/// log p(w, w*, nbar | alpha, sigma, tau, graph) in omega coordinates, up to
/// an additive constant and without the total-mass density g*(w*):
///   sum_i [m_i omega_i + log rho(w_i)] + sum_i omega_i - (sum_i w_i + w*)^2
///   + N log alpha.
inline double log_posterior(const McmcState& s, const UndirectedGraph& g) {
  check_consistency(s, g);
  const double n = static_cast<double>(s.omega.size());
  return detail::omega_log_density(s.omega, s.m, s.sigma, s.tau, s.w_star) - n * std::lgamma(1.0 - s.sigma) +
         n * s.log_alpha;
}

/// d log_posterior / d omega_i = m_i - sigma - w_i (tau + 2 sum_j w_j + 2 w*).
inline std::vector<double> grad_log_posterior(const McmcState& s) {
  std::vector<double> grad;
  detail::omega_gradient(s.omega, s.m, s.sigma, s.tau, s.w_star, grad);
  return grad;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

struct HmcResult {
  bool accepted = false;
  double accept_prob = 0.0;  // min(1, r); 0 for non-finite energies
};

/// One HMC transition on omega with identity mass matrix: half momentum step,
/// L - 1 full steps, final position step and closing half step, momentum
/// negation, accept/reject on the energy difference.
inline HmcResult hmc_update(McmcState& s, std::size_t n_steps, double stepsize, RngStream& rng) {
  const std::size_t n = s.omega.size();
  std::vector<double> p(n), grad;
  for (auto& x : p) x = rng.normal();
  double kinetic0 = 0.0;
  for (double x : p) kinetic0 += 0.5 * x * x;
  const double logp0 = detail::omega_log_density(s.omega, s.m, s.sigma, s.tau, s.w_star);

  std::vector<double> omega = s.omega;
  detail::omega_gradient(omega, s.m, s.sigma, s.tau, s.w_star, grad);
  for (std::size_t i = 0; i < n; ++i) p[i] += 0.5 * stepsize * grad[i];
  for (std::size_t l = 1; l <= n_steps; ++l) {
    for (std::size_t i = 0; i < n; ++i) omega[i] += stepsize * p[i];
    detail::omega_gradient(omega, s.m, s.sigma, s.tau, s.w_star, grad);
    const double scale = l < n_steps ? 1.0 : 0.5;
    for (std::size_t i = 0; i < n; ++i) p[i] += scale * stepsize * grad[i];
  }
  for (auto& x : p) x = -x;

  double kinetic1 = 0.0;
  for (double x : p) kinetic1 += 0.5 * x * x;
  const double logp1 = detail::omega_log_density(omega, s.m, s.sigma, s.tau, s.w_star);
  const double log_r = logp1 - kinetic1 - logp0 + kinetic0;
  HmcResult out;
  if (!std::isfinite(log_r)) return out;
  out.accept_prob = log_r >= 0.0 ? 1.0 : std::exp(log_r);
  if (std::log(rng.uniform()) < log_r) {
    s.omega = std::move(omega);
    out.accepted = true;
  }
  return out;
}

namespace detail {

inline double log_prior_ratio(const McmcConfig& cfg, double log_new, double log_old) {
  if (cfg.prior == PriorMode::improper) return 0.0;
  // lognormal prior p(x) on x = alpha, 1 - sigma or tau; the improper 1/x
  // prior is what the proposal Jacobian cancels, so only the Gaussian
  // factor in log x remains
  const double a = (log_new - cfg.prior_log_mean) / cfg.prior_log_sd;
  const double b = (log_old - cfg.prior_log_mean) / cfg.prior_log_sd;
  return -0.5 * (a * a - b * b);
}

}  // namespace detail

/// Joint Metropolis-Hastings move on (alpha, sigma, tau, w*).
///
/// tau and 1 - sigma get lognormal random-walk proposals; alpha is drawn
/// from Gamma(N, psi_new(c)) and w* from the total-mass law tilted by
/// c = 2 sum_i w_i + w*. With the 1/alpha, 1/(1-sigma), 1/tau priors the
/// log acceptance ratio is
///   w*^2 - w~*^2 - (tau~ - tau) S + (sigma - sigma~) sum_i omega_i
///   + N [lgamma(1-sigma) - lgamma(1-sigma~)]
///   + N [log psi(2S + w~*) - log psi~(2S + w*)].
/// Fixed hyperparameters stay at their value; with alpha fixed the alpha
/// draw is skipped and the psi terms become alpha [psi(2S + w~*) - psi~(2S + w*)].
inline bool hyper_update(McmcState& s, const McmcConfig& cfg, RngStream& rng) {
  const double n = static_cast<double>(s.omega.size());
  double sum_w = 0.0, sum_omega = 0.0;
  for (double o : s.omega) {
    sum_w += std::exp(o);
    sum_omega += o;
  }
  const double tau_new = cfg.estimate_tau ? s.tau * std::exp(cfg.rw_sd * rng.normal()) : s.tau;
  double sigma_new = cfg.estimate_sigma ? 1.0 - (1.0 - s.sigma) * std::exp(cfg.rw_sd * rng.normal()) : s.sigma;
  if (std::fabs(sigma_new) < kSigmaZero) sigma_new = 0.0;
  if (!in_ggp_region(sigma_new, tau_new)) return false;

  const double c_fwd = 2.0 * sum_w + s.w_star;
  const double log_psi_new_fwd = log_laplace_exponent(sigma_new, tau_new, c_fwd);
  double log_alpha_new = s.log_alpha;
  if (cfg.estimate_alpha) log_alpha_new = std::log(rng.gamma(n, 1.0)) - log_psi_new_fwd;
  const double w_star_new = sample_ggp_total_mass(log_alpha_new, sigma_new, tau_new + c_fwd, rng);
  const double c_rev = 2.0 * sum_w + w_star_new;
  const double log_psi_old_rev = log_laplace_exponent(s.sigma, s.tau, c_rev);

  double log_r = s.w_star * s.w_star - w_star_new * w_star_new - (tau_new - s.tau) * sum_w +
                 (s.sigma - sigma_new) * sum_omega + n * (std::lgamma(1.0 - s.sigma) - std::lgamma(1.0 - sigma_new));
  if (cfg.estimate_alpha) {
    log_r += n * (log_psi_old_rev - log_psi_new_fwd);
  } else {
    log_r += s.alpha() * (std::exp(log_psi_old_rev) - std::exp(log_psi_new_fwd));
  }
  if (cfg.estimate_alpha) log_r += detail::log_prior_ratio(cfg, log_alpha_new, s.log_alpha);
  if (cfg.estimate_sigma) {
    log_r += detail::log_prior_ratio(cfg, std::log(1.0 - sigma_new), std::log(1.0 - s.sigma));
  }
  if (cfg.estimate_tau) log_r += detail::log_prior_ratio(cfg, std::log(tau_new), std::log(s.tau));

  if (!std::isfinite(log_r) || !std::isfinite(log_alpha_new) || !std::isfinite(w_star_new)) return false;
  if (std::log(rng.uniform()) < log_r) {
    s.tau = tau_new;
    s.sigma = sigma_new;
    s.log_alpha = log_alpha_new;
    s.w_star = w_star_new;
    return true;
  }
  return false;
}

/// Joint move along the tau / weight-scale ridge: log tau -> log tau + d,
/// omega_i -> omega_i - d with d ~ N(0, scale_sd^2), sigma fixed, alpha and
/// w* redrawn as in hyper_update. With S~ = S e^{-d} the log ratio is
///   -d sum_i (m_i - sigma) - tau~ S~ + tau S - S~^2 + S^2 - w~*^2 + w*^2
///   + 2 (S - S~)(w* + w~*) + N [log psi(2S~ + w~*) - log psi~(2S + w*)].
inline bool scale_update(McmcState& s, const McmcConfig& cfg, RngStream& rng) {
  const double n = static_cast<double>(s.omega.size());
  double sum_w = 0.0, sum_m = 0.0;
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    sum_w += std::exp(s.omega[i]);
    sum_m += static_cast<double>(s.m[i]);
  }
  const double d = cfg.scale_sd * rng.normal();
  const double tau_new = s.tau * std::exp(d);
  if (!in_ggp_region(s.sigma, tau_new)) return false;
  const double sum_w_new = sum_w * std::exp(-d);

  const double c_fwd = 2.0 * sum_w + s.w_star;
  const double log_psi_new_fwd = log_laplace_exponent(s.sigma, tau_new, c_fwd);
  double log_alpha_new = s.log_alpha;
  if (cfg.estimate_alpha) log_alpha_new = std::log(rng.gamma(n, 1.0)) - log_psi_new_fwd;
  const double w_star_new = sample_ggp_total_mass(log_alpha_new, s.sigma, tau_new + c_fwd, rng);
  const double c_rev = 2.0 * sum_w_new + w_star_new;
  const double log_psi_old_rev = log_laplace_exponent(s.sigma, s.tau, c_rev);

  double log_r = -d * (sum_m - n * s.sigma) - tau_new * sum_w_new + s.tau * sum_w - sum_w_new * sum_w_new +
                 sum_w * sum_w - w_star_new * w_star_new + s.w_star * s.w_star +
                 2.0 * (sum_w - sum_w_new) * (s.w_star + w_star_new);
  if (cfg.estimate_alpha) {
    log_r += n * (log_psi_old_rev - log_psi_new_fwd);
    log_r += detail::log_prior_ratio(cfg, log_alpha_new, s.log_alpha);
  } else {
    log_r += s.alpha() * (std::exp(log_psi_old_rev) - std::exp(log_psi_new_fwd));
  }
  log_r += detail::log_prior_ratio(cfg, std::log(tau_new), std::log(s.tau));

  if (!std::isfinite(log_r) || !std::isfinite(log_alpha_new) || !std::isfinite(w_star_new)) return false;
  if (std::log(rng.uniform()) < log_r) {
    for (double& o : s.omega) o -= d;
    s.tau = tau_new;
    s.log_alpha = log_alpha_new;
    s.w_star = w_star_new;
    return true;
  }
  return false;
}

/// Latent counts given the weights. Exact mode draws every nbar_ij from the
/// zero-truncated Poisson with rate 2 w_i w_j (w_i^2 on the diagonal); mh mode
/// makes one +-1 random-walk proposal per edge (always +1 from 1). Returns
/// the number of accepted MH moves (the number of edges in exact mode).
inline std::size_t latent_update(McmcState& s, const UndirectedGraph& g, LatentMode mode, RngStream& rng) {
  const auto& edges = g.edges();
  std::size_t accepted = 0;
  if (mode == LatentMode::exact) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [i, j] = edges[e];
      const double rate = i == j ? std::exp(2.0 * s.omega[i]) : 2.0 * std::exp(s.omega[i] + s.omega[j]);
      s.latent[e] = sample_truncated_poisson(rate, rng);
    }
    s.m = node_exponents(g, s.latent);
    return edges.size();
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const double log_rate = i == j ? 2.0 * s.omega[i] : std::log(2.0) + s.omega[i] + s.omega[j];
    const std::uint64_t cur = s.latent[e];
    const bool up = cur == 1 || rng.uniform() < 0.5;
    const std::uint64_t prop = up ? cur + 1 : cur - 1;
    // target ratio nbar! / nbar~! rate^(nbar~ - nbar)
    double log_r = up ? log_rate - std::log(static_cast<double>(prop)) : std::log(static_cast<double>(cur)) - log_rate;
    // q(cur | prop) / q(prop | cur)
    if (cur == 1) log_r += std::log(0.5);
    if (prop == 1) log_r -= std::log(0.5);
    if (std::log(rng.uniform()) < log_r) {
      s.latent[e] = prop;
      const std::int64_t delta = up ? 1 : -1;
      if (i == j) {
        s.m[i] = static_cast<std::uint64_t>(static_cast<std::int64_t>(s.m[i]) + 2 * delta);
      } else {
        s.m[i] = static_cast<std::uint64_t>(static_cast<std::int64_t>(s.m[i]) + delta);
        s.m[j] = static_cast<std::uint64_t>(static_cast<std::int64_t>(s.m[j]) + delta);
      }
      ++accepted;
    }
  }
  return accepted;
}

// ---------------------------------------------------------------------------
// Chains
// ---------------------------------------------------------------------------

/// Default starting point: w_i proportional to degree with sum sqrt(#edges),
/// sigma = 0, tau = 1, w* = 0.1, alpha = N / psi(2 sum w + w*), latent = 1.
/// Each chain perturbs log w_i by N(0, jitter^2).
inline McmcState initial_state(const UndirectedGraph& g, const McmcConfig& cfg, RngStream& rng) {
  if (g.n_edges() == 0) throw empty_graph("inference needs a graph with at least one edge");
  if (g.has_isolated_nodes()) throw inconsistent_state("inference needs a graph without isolated nodes");
  McmcState s;
  const InitSpec& init = cfg.init;
  s.sigma = init.sigma.value_or(0.0);
  s.tau = init.tau.value_or(1.0);
  s.w_star = init.w_star.value_or(0.1);
  if (!in_ggp_region(s.sigma, s.tau)) throw out_of_region("initial (sigma, tau) outside the GGP region");
  const std::size_t n = g.n_nodes();
  s.omega.resize(n);
  if (init.weights) {
    if (init.weights->size() != n) throw domain_error("initial weights do not match the graph");
    for (std::size_t i = 0; i < n; ++i) s.omega[i] = std::log((*init.weights)[i]);
  } else {
    double deg_sum = 0.0;
    for (auto d : g.degree()) deg_sum += static_cast<double>(d);
    const double scale = std::sqrt(static_cast<double>(g.n_edges())) / deg_sum;
    for (std::size_t i = 0; i < n; ++i) s.omega[i] = std::log(static_cast<double>(g.degree()[i]) * scale);
  }
  if (init.jitter > 0.0) {
    for (auto& o : s.omega) o += init.jitter * rng.normal();
  }
  s.latent.assign(g.n_edges(), 1);
  s.m = node_exponents(g, s.latent);
  if (init.alpha) {
    if (!(*init.alpha > 0.0)) throw non_positive_alpha("initial alpha must be positive");
    s.log_alpha = std::log(*init.alpha);
  } else {
    const double c = 2.0 * detail::sum_exp(s.omega) + s.w_star;
    s.log_alpha = std::log(static_cast<double>(n)) - log_laplace_exponent(s.sigma, s.tau, c);
  }
  return s;
}

namespace detail {

// Dual averaging of log(stepsize) toward a target acceptance probability.
struct DualAveraging {
  double mu;
  double target;
  double h_bar = 0.0;
  double log_eps;
  double log_eps_bar = 0.0;
  std::size_t t = 0;

  DualAveraging(double eps0, double target_) : mu(std::log(10.0 * eps0)), target(target_), log_eps(std::log(eps0)) {}

  double update(double accept_prob) {
    constexpr double gamma = 0.05, t0 = 10.0, kappa = 0.75;
    ++t;
    const double td = static_cast<double>(t);
    h_bar = (1.0 - 1.0 / (td + t0)) * h_bar + (target - accept_prob) / (td + t0);
    log_eps = mu - std::sqrt(td) / gamma * h_bar;
    const double eta = std::pow(td, -kappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    return std::exp(log_eps);
  }
  double final_stepsize() const { return std::exp(log_eps_bar); }
};

inline TraceRecord make_record(const McmcState& s, const UndirectedGraph& g, std::size_t iter, std::size_t chain) {
  return {iter, chain, s.alpha(), s.sigma, s.tau, s.w_star, log_posterior(s, g)};
}

inline std::vector<double> weights_of(const McmcState& s) {
  std::vector<double> w(s.omega.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(s.omega[i]);
  return w;
}

}  // namespace detail

/// One chain: HMC, hyperparameter move, tau / weight-scale move and latent update per iteration. The
/// stepsize is adapted by dual averaging during the first adapt() iterations,
/// which are also discarded; afterwards every thin-th iteration is recorded.
inline ChainTrace run_chain(const UndirectedGraph& g, const McmcConfig& cfg, RngStream& rng, std::size_t chain = 0,
                            const McmcState* start = nullptr) {
  cfg.validate();
  ChainTrace trace;
  trace.chain = chain;
  McmcState s = start ? *start : initial_state(g, cfg, rng);
  check_consistency(s, g);
  trace.initial_state = s;
  const std::size_t burn = cfg.adapt();
  detail::DualAveraging da(cfg.initial_stepsize, cfg.target_accept);
  double stepsize = cfg.initial_stepsize;
  double accept_sum = 0.0;
  std::size_t accept_n = 0;
  std::size_t kept = 0;
  for (std::size_t it = 0; it < cfg.n_iter; ++it) {
    if (cfg.estimate_w) {
      const HmcResult h = hmc_update(s, cfg.leapfrog_steps, stepsize, rng);
      trace.hmc.add(h.accepted);
      if (it < burn) {
        stepsize = da.update(h.accept_prob);
        if (it + 1 == burn) stepsize = da.final_stepsize();
      } else {
        accept_sum += h.accept_prob;
        ++accept_n;
      }
    }
    trace.hyper.add(hyper_update(s, cfg, rng));
    if (cfg.scale_sd > 0.0 && cfg.estimate_tau && cfg.estimate_w) trace.scale.add(scale_update(s, cfg, rng));
    const std::size_t acc = latent_update(s, g, cfg.latent_mode, rng);
    trace.latent.accepted += acc;
    trace.latent.proposed += g.n_edges();

    if (it >= burn && (it - burn + 1) % cfg.thin == 0) {
      trace.records.push_back(detail::make_record(s, g, it, chain));
      trace.w_stats.add(detail::weights_of(s));
      if (cfg.omega_stride > 0 && kept % cfg.omega_stride == 0) {
        trace.omega_iterations.push_back(it);
        trace.omega_snapshots.push_back(s.omega);
      }
      ++kept;
    }
  }
  trace.stepsize = stepsize;
  trace.adapt_accept = accept_n ? accept_sum / static_cast<double>(accept_n) : 0.0;
  trace.final_state = std::move(s);
  return trace;
}

/// Number of worker threads: GGPGRAPH_THREADS if set, else hardware concurrency.
inline std::size_t worker_threads() {
  if (const char* env = std::getenv("GGPGRAPH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `n` independent jobs job(k) on up to worker_threads() threads.
template <class Job>
void parallel_for(std::size_t n, Job&& job) {
  const std::size_t workers = std::min(n, worker_threads());
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// cfg.n_chains independent chains, chain k on stream (cfg.seed, k).
inline std::vector<ChainTrace> run_chains(const UndirectedGraph& g, const McmcConfig& cfg) {
  cfg.validate();
  std::vector<ChainTrace> traces(cfg.n_chains);
  parallel_for(cfg.n_chains, [&](std::size_t k) {
    RngStream rng(cfg.seed, k);
    traces[k] = run_chain(g, cfg, rng, k);
  });
  return traces;
}

// ---------------------------------------------------------------------------
// Bipartite graphs
// ---------------------------------------------------------------------------

/// State of the bipartite sampler; the right-hand side has tau' = 1.
struct BipartiteState {
  std::vector<double> w;
  std::vector<double> w_right;
  double w_star = 0.1;
  double w_star_right = 0.1;
  double log_alpha = 0.0;
  double sigma = 0.0;
  double tau = 1.0;
  double log_alpha_right = 0.0;
  double sigma_right = 0.0;
  std::vector<std::uint64_t> latent;  // per edge of the graph
  std::vector<std::uint64_t> m;
  std::vector<std::uint64_t> m_right;
};

namespace detail {

inline void bipartite_exponents(const BipartiteGraph& g, BipartiteState& s) {
  s.m.assign(g.n_left(), 0);
  s.m_right.assign(g.n_right(), 0);
  const auto& edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    s.m[edges[e].left] += s.latent[e];
    s.m_right[edges[e].right] += s.latent[e];
  }
}

// log of alpha^N exp(-alpha psi(z)) prod_i kappa(m_i, z), the likelihood of
// one side with its weights integrated out.
inline double bipartite_side_log_marginal(double log_alpha, double sigma, double tau, double z,
                                          const std::vector<std::uint64_t>& m) {
  double acc = static_cast<double>(m.size()) * log_alpha - std::exp(log_alpha + log_laplace_exponent(sigma, tau, z));
  for (auto mi : m) acc += log_kappa(sigma, tau, static_cast<double>(mi), z);
  return acc;
}

// MH on (alpha, sigma, tau) of one side given z = total mass of the other
// side: lognormal walks on tau and 1 - sigma, alpha ~ Gamma(N, psi_new(z)).
inline bool bipartite_hyper_move(double& log_alpha, double& sigma, double& tau, bool move_tau, double z,
                                 const std::vector<std::uint64_t>& m, const McmcConfig& cfg, RngStream& rng) {
  const double n = static_cast<double>(m.size());
  const double tau_new = move_tau && cfg.estimate_tau ? tau * std::exp(cfg.rw_sd * rng.normal()) : tau;
  double sigma_new = cfg.estimate_sigma ? 1.0 - (1.0 - sigma) * std::exp(cfg.rw_sd * rng.normal()) : sigma;
  if (std::fabs(sigma_new) < kSigmaZero) sigma_new = 0.0;
  if (!in_ggp_region(sigma_new, tau_new)) return false;
  const double log_psi_new = log_laplace_exponent(sigma_new, tau_new, z);
  const double log_psi_old = log_laplace_exponent(sigma, tau, z);
  double log_alpha_new = log_alpha;
  double log_r = 0.0;
  for (auto mi : m) {
    const double md = static_cast<double>(mi);
    log_r += log_kappa(sigma_new, tau_new, md, z) - log_kappa(sigma, tau, md, z);
  }
  if (cfg.estimate_alpha) {
    log_alpha_new = std::log(rng.gamma(n, 1.0)) - log_psi_new;
    log_r += n * (log_psi_old - log_psi_new);
    log_r += log_prior_ratio(cfg, log_alpha_new, log_alpha);
  } else {
    log_r += std::exp(log_alpha + log_psi_old) - std::exp(log_alpha + log_psi_new);
  }
  if (cfg.estimate_sigma) log_r += log_prior_ratio(cfg, std::log(1.0 - sigma_new), std::log(1.0 - sigma));
  if (move_tau && cfg.estimate_tau) log_r += log_prior_ratio(cfg, std::log(tau_new), std::log(tau));
  if (!std::isfinite(log_r) || !std::isfinite(log_alpha_new)) return false;
  if (std::log(rng.uniform()) < log_r) {
    log_alpha = log_alpha_new;
    sigma = sigma_new;
    tau = tau_new;
    return true;
  }
  return false;
}

}  // namespace detail

inline BipartiteState initial_bipartite_state(const BipartiteGraph& g, const McmcConfig& cfg, RngStream& rng) {
  if (g.n_edges() == 0) throw empty_graph("inference needs a bipartite graph with at least one edge");
  for (auto d : g.degree_left()) {
    if (d == 0) throw inconsistent_state("bipartite inference needs every left node to have an edge");
  }
  for (auto d : g.degree_right()) {
    if (d == 0) throw inconsistent_state("bipartite inference needs every right node to have an edge");
  }
  BipartiteState s;
  s.sigma = cfg.init.sigma.value_or(0.0);
  s.tau = cfg.init.tau.value_or(1.0);
  s.sigma_right = s.sigma;
  s.w_star = s.w_star_right = cfg.init.w_star.value_or(0.1);
  const double scale = std::sqrt(static_cast<double>(g.n_edges())) / static_cast<double>(g.n_edges());
  s.w.resize(g.n_left());
  s.w_right.resize(g.n_right());
  for (std::size_t i = 0; i < s.w.size(); ++i) {
    s.w[i] = static_cast<double>(g.degree_left()[i]) * scale * std::exp(cfg.init.jitter * rng.normal());
  }
  for (std::size_t j = 0; j < s.w_right.size(); ++j) {
    s.w_right[j] = static_cast<double>(g.degree_right()[j]) * scale * std::exp(cfg.init.jitter * rng.normal());
  }
  s.latent.assign(g.n_edges(), 1);
  detail::bipartite_exponents(g, s);
  double sl = s.w_star, sr = s.w_star_right;
  for (double x : s.w) sl += x;
  for (double x : s.w_right) sr += x;
  s.log_alpha = cfg.init.alpha ? std::log(*cfg.init.alpha)
                               : std::log(static_cast<double>(g.n_left())) - log_laplace_exponent(s.sigma, s.tau, sr);
  s.log_alpha_right = std::log(static_cast<double>(g.n_right())) - log_laplace_exponent(s.sigma_right, 1.0, sl);
  return s;
}

/// Gibbs sweep for bipartite graphs; records hold the left-hand parameters
/// and `secondary` the right-hand ones (tau' = 1). log_post is the log
/// marginal likelihood of the left side given the right-hand total mass.
inline ChainTrace run_bipartite_gibbs(const BipartiteGraph& g, const McmcConfig& cfg, RngStream& rng,
                                      std::size_t chain = 0) {
  cfg.validate();
  ChainTrace trace;
  trace.chain = chain;
  BipartiteState s = initial_bipartite_state(g, cfg, rng);
  const std::size_t burn = cfg.adapt();
  const auto& edges = g.edges();
  auto total = [](const std::vector<double>& w, double w_star) {
    double t = w_star;
    for (double x : w) t += x;
    return t;
  };
  for (std::size_t it = 0; it < cfg.n_iter; ++it) {
    double tau_right = 1.0;
    // left side
    double z = total(s.w_right, s.w_star_right);
    trace.hyper.add(detail::bipartite_hyper_move(s.log_alpha, s.sigma, s.tau, true, z, s.m, cfg, rng));
    if (cfg.estimate_w) {
      for (std::size_t i = 0; i < s.w.size(); ++i) {
        s.w[i] = rng.gamma(static_cast<double>(s.m[i]) - s.sigma, s.tau + z);
      }
    }
    s.w_star = sample_ggp_total_mass(s.log_alpha, s.sigma, s.tau + z, rng);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      s.latent[e] = sample_truncated_poisson(s.w[edges[e].left] * s.w_right[edges[e].right], rng);
    }
    detail::bipartite_exponents(g, s);
    trace.latent.accepted += edges.size();
    trace.latent.proposed += edges.size();
    // right side
    const double z_right = total(s.w, s.w_star);
    trace.hyper_secondary.add(detail::bipartite_hyper_move(s.log_alpha_right, s.sigma_right, tau_right, false,
                                                           z_right, s.m_right, cfg, rng));
    if (cfg.estimate_w) {
      for (std::size_t j = 0; j < s.w_right.size(); ++j) {
        s.w_right[j] = rng.gamma(static_cast<double>(s.m_right[j]) - s.sigma_right, 1.0 + z_right);
      }
    }
    s.w_star_right = sample_ggp_total_mass(s.log_alpha_right, s.sigma_right, 1.0 + z_right, rng);

    if (it >= burn && (it - burn + 1) % cfg.thin == 0) {
      z = total(s.w_right, s.w_star_right);
      trace.records.push_back({it, chain, std::exp(s.log_alpha), s.sigma, s.tau, s.w_star,
                               detail::bipartite_side_log_marginal(s.log_alpha, s.sigma, s.tau, z, s.m)});
      trace.secondary.push_back(
          {it, chain, std::exp(s.log_alpha_right), s.sigma_right, 1.0, s.w_star_right,
           detail::bipartite_side_log_marginal(s.log_alpha_right, s.sigma_right, 1.0, total(s.w, s.w_star),
                                               s.m_right)});
      trace.w_stats.add(s.w);
    }
  }
  return trace;
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_INFERENCE_HPP
