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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "ggpgraph/inference.hpp"
#include "ggpgraph/simulate.hpp"
#include "oracles.hpp"

using namespace ggpgraph;

namespace {

McmcState state_for(const UndirectedGraph& g, std::vector<double> w, double sigma, double tau, double alpha,
                    double w_star) {
  McmcState s;
  for (double x : w) s.omega.push_back(std::log(x));
  s.sigma = sigma;
  s.tau = tau;
  s.log_alpha = std::log(alpha);
  s.w_star = w_star;
  s.latent.assign(g.n_edges(), 1);
  s.m = node_exponents(g, s.latent);
  return s;
}

UndirectedGraph small_ggp_graph(double alpha, std::uint64_t seed) {
  SimConfig cfg;
  cfg.params = GgpParams(alpha, 0.5, 1.0);
  cfg.truncation_eps = 1e-6;
  RngStream rng(seed, 0);
  return sample_undirected_ggp(cfg, rng).graph;
}

// Dense joint log density of (nbar, w, w*) given the hyperparameters, in
// omega coordinates, without g*(w*).
double brute_force_joint(const McmcState& s, const UndirectedGraph& g) {
  const std::size_t n = s.omega.size();
  std::vector<std::vector<std::uint64_t>> nbar(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t e = 0; e < g.n_edges(); ++e) {
    const auto [i, j] = g.edges()[e];
    nbar[i][j] = nbar[j][i] = s.latent[e];
  }
  std::vector<double> w(n);
  double sum_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum_w += w[i] = std::exp(s.omega[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double rate = i == j ? w[i] * w[i] : 2.0 * w[i] * w[j];
      const double k = static_cast<double>(nbar[i][j]);
      acc += k * std::log(rate) - rate - std::lgamma(k + 1.0);
    }
    acc += std::log(s.alpha()) + oracle::log_ggp_density(s.sigma, s.tau, w[i]) + s.omega[i];
  }
  return acc - 2.0 * s.w_star * sum_w - s.w_star * s.w_star;
}

}  // namespace

TEST(LogPosterior, WorkedExample) {
  UndirectedGraph g(2, {{0, 1}});
  const auto s = state_for(g, {1.0, 1.0}, 0.5, 1.0, 1.0, 0.0);
  EXPECT_NEAR(log_posterior(s, g), -7.144730, 1e-6);
  const auto grad = grad_log_posterior(s);
  EXPECT_NEAR(grad[0], -4.5, 1e-12);
  EXPECT_NEAR(grad[1], -4.5, 1e-12);
}

TEST(LogPosterior, DiffersFromDenseJointByConstant) {
  const auto g = small_ggp_graph(5.0, 11);
  ASSERT_GT(g.n_nodes(), 5u);
  RngStream rng(12, 0);
  std::vector<std::uint64_t> latent(g.n_edges());
  for (auto& k : latent) k = 1 + static_cast<std::uint64_t>(3 * rng.uniform());
  double offset = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> w(g.n_nodes());
    for (auto& x : w) x = std::exp(rng.normal());
    const double sigma = rep % 2 ? 0.9 * rng.uniform() : -3.0 * rng.uniform();
    auto s = state_for(g, w, sigma, 0.1 + 3.0 * rng.uniform(), 0.5 + 10.0 * rng.uniform(), rng.uniform());
    s.latent = latent;
    s.m = node_exponents(g, s.latent);
    const double diff = log_posterior(s, g) - brute_force_joint(s, g);
    if (rep == 0) offset = diff;
    EXPECT_NEAR(diff, offset, 1e-8 * std::max(1.0, std::fabs(offset)));
  }
}

TEST(GradLogPosterior, MatchesFiniteDifferences) {
  RngStream rng(13, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(20 * rng.uniform());
    std::vector<UndirectedEdge> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, static_cast<NodeId>(rng.uniform() * n));
    UndirectedGraph g(n, edges);
    std::vector<double> w(n);
    for (auto& x : w) x = std::exp(0.8 * rng.normal());
    auto s = state_for(g, w, 0.9 * rng.uniform(), 2.0 * rng.uniform(), 3.0, rng.uniform());
    for (auto& k : s.latent) k = 1 + static_cast<std::uint64_t>(4 * rng.uniform());
    s.m = node_exponents(g, s.latent);
    const auto grad = grad_log_posterior(s);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto up = s, down = s;
      up.omega[i] += h;
      down.omega[i] -= h;
      const double fd = (log_posterior(up, g) - log_posterior(down, g)) / (2.0 * h);
      EXPECT_LE(std::fabs(fd - grad[i]), 1e-5 * std::max(1.0, std::fabs(grad[i])));
    }
  }
}

TEST(CheckConsistency, DetectsStaleExponents) {
  UndirectedGraph g(2, {{0, 1}, {1, 1}});
  auto s = state_for(g, {1.0, 1.0}, 0.5, 1.0, 1.0, 0.1);
  EXPECT_EQ(s.m, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_NO_THROW(check_consistency(s, g));
  s.latent[1] = 2;
  EXPECT_THROW(log_posterior(s, g), inconsistent_state);
  s.m = node_exponents(g, s.latent);
  s.latent[0] = 0;
  EXPECT_THROW(check_consistency(s, g), inconsistent_state);
}

TEST(HmcUpdate, SingleNodeStationaryMean) {
  UndirectedGraph g(1, {{0, 0}});
  auto s = state_for(g, {1.0}, 0.5, 1.0, 1.0, 0.2);
  s.latent = {2};
  s.m = node_exponents(g, s.latent);  // m = 4
  const double m = 4.0, sigma = 0.5, tau = 1.0, w_star = 0.2;
  auto log_dens = [&](double o) {
    const double w = std::exp(o);
    return (m - sigma) * o - tau * w - (w + w_star) * (w + w_star);
  };
  const double z = oracle::integrate([&](double o) { return std::exp(log_dens(o)); }, -40.0, 5.0);
  const double ew = oracle::integrate([&](double o) { return std::exp(o + log_dens(o)); }, -40.0, 5.0) / z;

  RngStream rng(14, 0);
  std::vector<double> draws;
  std::size_t accepted = 0;
  for (int it = 0; it < 40000; ++it) {
    accepted += hmc_update(s, 5, 0.25, rng).accepted;
    draws.push_back(std::exp(s.omega[0]));
  }
  const auto bm = oracle::batch_means(draws);
  EXPECT_NEAR(bm.mean, ew, 4.0 * bm.se);
  EXPECT_GT(accepted, 20000u);
}

TEST(HmcUpdate, RejectsNonFiniteTrajectories) {
  UndirectedGraph g(1, {{0, 0}});
  auto s = state_for(g, {1.0}, 0.5, 1.0, 1.0, 0.2);
  const auto before = s.omega;
  RngStream rng(15, 0);
  for (int it = 0; it < 20; ++it) {
    const auto r = hmc_update(s, 20, 50.0, rng);
    EXPECT_FALSE(r.accepted);
    EXPECT_EQ(r.accept_prob, 0.0);
  }
  EXPECT_EQ(s.omega, before);
}

TEST(LatentUpdate, TruncatedPoissonStationaryLaw) {
  UndirectedGraph g(2, {{0, 1}, {1, 1}});
  for (auto mode : {LatentMode::mh, LatentMode::exact}) {
    auto s = state_for(g, {1.0, 1.0}, 0.5, 1.0, 1.0, 0.1);
    RngStream rng(16, 0);
    std::vector<double> off, diag;
    std::vector<double> counts(6, 0.0);
    const int n_keep = 20000, thin = 10;
    for (int it = 0; it < n_keep * thin; ++it) {
      latent_update(s, g, mode, rng);
      ASSERT_EQ(s.m, node_exponents(g, s.latent));
      if (it % thin == 0) {
        off.push_back(static_cast<double>(s.latent[0]));
        diag.push_back(static_cast<double>(s.latent[1]));
        counts[std::min<std::uint64_t>(s.latent[0], 5)] += 1.0;
      }
    }
    const auto mo = oracle::moments(off);
    const auto md = oracle::moments(diag);
    EXPECT_NEAR(mo.mean, 2.0 / (1.0 - std::exp(-2.0)), 5.0 * mo.se);
    EXPECT_NEAR(2.0 / (1.0 - std::exp(-2.0)), 2.313035, 1e-6);
    EXPECT_NEAR(md.mean, 1.0 / (1.0 - std::exp(-1.0)), 5.0 * md.se);
    // pmf of the zero-truncated Poisson(2) on {1, 2, 3, 4, >= 5}
    std::vector<double> observed, expected;
    double tail = 1.0;
    for (int k = 1; k <= 4; ++k) {
      const double p = std::exp(k * std::log(2.0) - 2.0 - std::lgamma(k + 1.0)) / (1.0 - std::exp(-2.0));
      observed.push_back(counts[k]);
      expected.push_back(p * n_keep);
      tail -= p;
    }
    observed.push_back(counts[5]);
    expected.push_back(tail * n_keep);
    EXPECT_GT(oracle::chi_square_p(observed, expected), 1e-3);
  }
}

// Hyperparameter move alone with sigma = 0 fixed: the conditional target of
// (alpha, tau, w*) given w is available in closed form up to a 1-d integral.
TEST(HyperUpdate, MatchesGammaProcessConditional) {
  const std::vector<double> w = {0.5, 0.3, 1.0, 0.2, 0.4};
  const double n = 5.0, s_w = 2.4;
  // log int_0^inf x^(alpha-1) exp(-(tau + 2S) x - x^2) dx via x = y^(1/alpha)
  auto log_inner = [&](double alpha, double tau, double moment) {
    const double v = oracle::integrate_to_inf(
        [&](double y) {
          const double x = std::pow(y, 1.0 / alpha);
          if (!(x > 0.0) || !std::isfinite(x * x)) return 0.0;
          return std::exp(-(tau + 2.0 * s_w) * x - x * x + moment * std::log(x));
        },
        0.0);
    return std::log(v) - std::log(alpha);
  };
  double z = 0.0, e_alpha = 0.0, e_tau = 0.0, e_wstar = 0.0;
  const int grid = 120;
  const double u_lo = -6.0, u_hi = 5.0, v_lo = -7.0, v_hi = 4.0;
  const double du = (u_hi - u_lo) / grid, dv = (v_hi - v_lo) / grid;
  for (int a = 0; a < grid; ++a) {
    const double alpha = std::exp(u_lo + (a + 0.5) * du);
    for (int b = 0; b < grid; ++b) {
      const double tau = std::exp(v_lo + (b + 0.5) * dv);
      // alpha^N / (alpha tau) * e^(-tau S) * tau^alpha / Gamma(alpha), times
      // the Jacobian alpha tau of the log grid
      const double base = n * std::log(alpha) - tau * s_w + alpha * std::log(tau) - std::lgamma(alpha);
      const double li = log_inner(alpha, tau, 0.0);
      const double p = std::exp(base + li);
      z += p;
      e_alpha += p * alpha;
      e_tau += p * tau;
      e_wstar += std::exp(base + log_inner(alpha, tau, 1.0));
    }
  }
  e_alpha /= z;
  e_tau /= z;
  e_wstar /= z;

  UndirectedGraph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto s = state_for(g, w, 0.0, 1.0, 2.0, 0.3);
  McmcConfig cfg;
  cfg.estimate_sigma = false;
  cfg.rw_sd = 0.5;
  RngStream rng(17, 0);
  std::vector<double> alphas, taus, wstars;
  for (int it = 0; it < 200000; ++it) {
    hyper_update(s, cfg, rng);
    alphas.push_back(s.alpha());
    taus.push_back(s.tau);
    wstars.push_back(s.w_star);
  }
  EXPECT_EQ(s.sigma, 0.0);
  const auto ma = oracle::batch_means(alphas), mt = oracle::batch_means(taus), mw = oracle::batch_means(wstars);
  EXPECT_NEAR(ma.mean, e_alpha, 4.0 * ma.se) << "oracle " << e_alpha;
  EXPECT_NEAR(mt.mean, e_tau, 4.0 * mt.se) << "oracle " << e_tau;
  EXPECT_NEAR(mw.mean, e_wstar, 4.0 * mw.se) << "oracle " << e_wstar;
}

// Same with alpha fixed: only tau and w* move.
TEST(HyperUpdate, FixedAlphaMatchesConditional) {
  const std::vector<double> w = {0.5, 0.3, 1.0, 0.2, 0.4};
  const double s_w = 2.4, alpha = 3.0;
  double z = 0.0, e_tau = 0.0, e_wstar = 0.0;
  const int grid = 2000;
  const double v_lo = -8.0, v_hi = 4.0, dv = (v_hi - v_lo) / grid;
  for (int b = 0; b < grid; ++b) {
    const double tau = std::exp(v_lo + (b + 0.5) * dv);
    const double base = -tau * s_w + alpha * std::log(tau);
    auto inner = [&](double moment) {
      return oracle::integrate_to_inf(
          [&](double x) {
            return std::exp((alpha - 1.0 + moment) * std::log(x) - (tau + 2.0 * s_w) * x - x * x + base);
          },
          0.0);
    };
    z += inner(0.0);
    e_tau += tau * inner(0.0);
    e_wstar += inner(1.0);
  }
  UndirectedGraph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto s = state_for(g, w, 0.0, 1.0, alpha, 0.3);
  McmcConfig cfg;
  cfg.estimate_sigma = false;
  cfg.estimate_alpha = false;
  cfg.rw_sd = 0.5;
  RngStream rng(18, 0);
  std::vector<double> taus, wstars;
  for (int it = 0; it < 200000; ++it) {
    hyper_update(s, cfg, rng);
    taus.push_back(s.tau);
    wstars.push_back(s.w_star);
  }
  EXPECT_DOUBLE_EQ(s.alpha(), alpha);
  const auto mt = oracle::batch_means(taus), mw = oracle::batch_means(wstars);
  EXPECT_NEAR(mt.mean, e_tau / z, 4.0 * mt.se);
  EXPECT_NEAR(mw.mean, e_wstar / z, 4.0 * mw.se);
}

// hyper_update never moves omega and scale_update shifts it along (1, ..., 1),
// so alternating them samples (t, tau, w*) with omega = omega0 - t from the
// joint restricted to that line. sigma = 0 and alpha fixed make the total
// mass law Gamma(alpha, tau).
TEST(ScaleUpdate, MatchesLineRestrictedJoint) {
  const std::vector<double> w = {0.5, 0.3, 1.0, 0.2, 0.4};
  const double s0 = 2.4, alpha = 3.0, m_sum = 8.0;
  double z = 0.0, e_tau = 0.0, e_wstar = 0.0, e_t = 0.0;
  const int grid = 400;
  const double t_lo = -4.0, t_hi = 8.0, dt = (t_hi - t_lo) / grid;
  const double v_lo = -8.0, v_hi = 5.0, dv = (v_hi - v_lo) / grid;
  for (int a = 0; a < grid; ++a) {
    const double t = t_lo + (a + 0.5) * dt;
    const double s_w = s0 * std::exp(-t);
    for (int b = 0; b < grid; ++b) {
      const double tau = std::exp(v_lo + (b + 0.5) * dv);
      const double base = -m_sum * t - tau * s_w + alpha * std::log(tau);
      auto inner = [&](double moment) {
        return oracle::integrate_to_inf(
            [&](double x) {
              if (!(x > 0.0) || !std::isfinite(x * x)) return 0.0;
              return std::exp((alpha - 1.0 + moment) * std::log(x) - tau * x - (s_w + x) * (s_w + x) + base);
            },
            0.0);
      };
      const double p = inner(0.0);
      z += p;
      e_tau += tau * p;
      e_t += t * p;
      e_wstar += inner(1.0);
    }
  }
  UndirectedGraph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  auto s = state_for(g, w, 0.0, 1.0, alpha, 0.3);
  const double omega0 = s.omega[0];
  McmcConfig cfg;
  cfg.estimate_sigma = false;
  cfg.estimate_alpha = false;
  cfg.rw_sd = 0.5;
  cfg.scale_sd = 0.5;
  RngStream rng(20, 0);
  std::vector<double> taus, wstars, ts;
  std::size_t accepted = 0;
  for (int it = 0; it < 200000; ++it) {
    hyper_update(s, cfg, rng);
    accepted += scale_update(s, cfg, rng);
    taus.push_back(s.tau);
    wstars.push_back(s.w_star);
    ts.push_back(omega0 - s.omega[0]);
  }
  EXPECT_GT(accepted, 20000u);
  EXPECT_DOUBLE_EQ(s.alpha(), alpha);
  const auto mt = oracle::batch_means(taus), mw = oracle::batch_means(wstars), mx = oracle::batch_means(ts);
  EXPECT_NEAR(mt.mean, e_tau / z, 4.0 * mt.se);
  EXPECT_NEAR(mw.mean, e_wstar / z, 4.0 * mw.se);
  EXPECT_NEAR(mx.mean, e_t / z, 4.0 * mx.se);
}

TEST(HyperUpdate, StaysInRegion) {
  UndirectedGraph g(3, {{0, 1}, {1, 2}});
  auto s = state_for(g, {0.1, 0.2, 0.1}, -0.5, 0.5, 1.0, 0.1);
  McmcConfig cfg;
  cfg.rw_sd = 1.0;
  RngStream rng(19, 0);
  for (int it = 0; it < 5000; ++it) {
    hyper_update(s, cfg, rng);
    ASSERT_TRUE(in_ggp_region(s.sigma, s.tau));
    ASSERT_TRUE(std::isfinite(s.log_alpha));
    ASSERT_GE(s.w_star, 0.0);
  }
}

TEST(InitialState, DefaultsAndErrors) {
  UndirectedGraph g(3, {{0, 1}, {1, 2}, {2, 2}});
  McmcConfig cfg;
  cfg.init.jitter = 0.0;
  RngStream rng(20, 0);
  const auto s = initial_state(g, cfg, rng);
  double sum_w = 0.0;
  for (double o : s.omega) sum_w += std::exp(o);
  EXPECT_NEAR(sum_w, std::sqrt(3.0), 1e-12);
  EXPECT_EQ(s.sigma, 0.0);
  EXPECT_EQ(s.tau, 1.0);
  EXPECT_EQ(s.w_star, 0.1);
  EXPECT_NEAR(s.alpha(), 3.0 / std::log1p(2.0 * sum_w + 0.1), 1e-12);
  EXPECT_THROW(initial_state(UndirectedGraph(), cfg, rng), empty_graph);
  EXPECT_THROW(initial_state(UndirectedGraph(3, {{0, 1}}), cfg, rng), inconsistent_state);
}

TEST(RunChain, RecordCountAndDeterminism) {
  const auto g = small_ggp_graph(5.0, 21);
  McmcConfig cfg;
  cfg.n_iter = 103;
  cfg.adapt_iters = 20;
  cfg.thin = 4;
  cfg.omega_stride = 5;
  RngStream r1(22, 0), r2(22, 0);
  const auto a = run_chain(g, cfg, r1);
  const auto b = run_chain(g, cfg, r2);
  EXPECT_EQ(a.records.size(), (103u - 20u) / 4u);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.omega_snapshots.size(), (a.records.size() + 4) / 5);
  EXPECT_EQ(a.records.front().iteration, 23u);
  for (const auto& r : a.records) EXPECT_TRUE(std::isfinite(r.log_post));
  EXPECT_NO_THROW(check_consistency(a.final_state, g));
}

TEST(RunChain, RejectsBadConfig) {
  const auto g = small_ggp_graph(5.0, 21);
  RngStream rng(1, 0);
  McmcConfig cfg;
  cfg.leapfrog_steps = 0;
  EXPECT_THROW(run_chain(g, cfg, rng), domain_error);
  cfg = McmcConfig{};
  cfg.thin = 0;
  EXPECT_THROW(run_chain(g, cfg, rng), domain_error);
  cfg = McmcConfig{};
  cfg.target_accept = 1.0;
  EXPECT_THROW(run_chain(g, cfg, rng), domain_error);
}

TEST(RunChain, StepsizeAdaptationReachesTarget) {
  const auto g = small_ggp_graph(20.0, 23);
  McmcConfig cfg;
  cfg.n_iter = 2000;
  RngStream rng(24, 0);
  const auto t = run_chain(g, cfg, rng);
  EXPECT_NEAR(t.adapt_accept, 0.6, 0.15);
  EXPECT_GT(t.stepsize, 0.0);
}

TEST(RunChains, ThreadCountDoesNotChangeResults) {
  const auto g = small_ggp_graph(5.0, 25);
  McmcConfig cfg;
  cfg.n_iter = 60;
  cfg.n_chains = 3;
  setenv("GGPGRAPH_THREADS", "1", 1);
  const auto seq = run_chains(g, cfg);
  setenv("GGPGRAPH_THREADS", "3", 1);
  const auto par = run_chains(g, cfg);
  unsetenv("GGPGRAPH_THREADS");
  ASSERT_EQ(seq.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(seq[k].records, par[k].records);
    EXPECT_EQ(seq[k].records.front().chain, k);
  }
  EXPECT_NE(seq[0].records.back().alpha, seq[1].records.back().alpha);
}

TEST(RunChain, MhLatentModeKeepsExponentsInSync) {
  const auto g = small_ggp_graph(10.0, 26);
  McmcConfig cfg;
  cfg.n_iter = 300;
  cfg.latent_mode = LatentMode::mh;
  RngStream rng(27, 0);
  const auto t = run_chain(g, cfg, rng);
  EXPECT_NO_THROW(check_consistency(t.final_state, g));
  EXPECT_GT(t.latent.accepted, 0u);
  EXPECT_LT(t.latent.accepted, t.latent.proposed);
}

TEST(RunChain, RecoversSparseSigma) {
  const auto g = small_ggp_graph(60.0, 28);
  McmcConfig cfg;
  cfg.n_iter = 4000;
  RngStream rng(29, 0);
  const auto t = run_chain(g, cfg, rng);
  std::vector<double> sig;
  for (const auto& r : t.records) sig.push_back(r.sigma);
  std::sort(sig.begin(), sig.end());
  const double lo = sig[sig.size() / 100], hi = sig[sig.size() * 99 / 100];
  EXPECT_LE(lo, 0.5);
  EXPECT_GE(hi, 0.5);
}

TEST(RunChain, LognormalPriorRuns) {
  const auto g = small_ggp_graph(10.0, 30);
  McmcConfig cfg;
  cfg.n_iter = 200;
  cfg.prior = PriorMode::lognormal;
  RngStream rng(31, 0);
  const auto t = run_chain(g, cfg, rng);
  EXPECT_GT(t.hyper.accepted, 0u);
}

TEST(BipartiteGibbs, RecoversSigma) {
  RngStream rng(32, 0);
  const auto draw = sample_bipartite(GgpParams(40.0, 0.5, 1.0), GgpParams(40.0, 0.3, 1.0), 1e-6, rng);
  McmcConfig cfg;
  cfg.n_iter = 3000;
  const auto t = run_bipartite_gibbs(draw.graph, cfg, rng);
  ASSERT_EQ(t.records.size(), t.secondary.size());
  std::vector<double> sig, sig_r;
  for (const auto& r : t.records) sig.push_back(r.sigma);
  for (const auto& r : t.secondary) sig_r.push_back(r.sigma);
  std::sort(sig.begin(), sig.end());
  std::sort(sig_r.begin(), sig_r.end());
  EXPECT_LE(sig[sig.size() / 40], 0.5);
  EXPECT_GE(sig[sig.size() * 39 / 40], 0.5);
  EXPECT_LE(sig_r[sig_r.size() / 40], 0.3);
  EXPECT_GE(sig_r[sig_r.size() * 39 / 40], 0.3);
  for (const auto& r : t.secondary) EXPECT_EQ(r.tau, 1.0);
}
