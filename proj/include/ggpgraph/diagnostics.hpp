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

// Convergence diagnostics, interval summaries, the sparsity test, posterior
// predictive degree bands and the empirical scaling/power-law checks.

#ifndef GGPGRAPH_DIAGNOSTICS_HPP
#define GGPGRAPH_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ggpgraph/error.hpp"
#include "ggpgraph/graph.hpp"
#include "ggpgraph/inference.hpp"
#include "ggpgraph/simulate.hpp"

namespace ggpgraph {

inline constexpr std::size_t kMinPsrfSamples = 10;

struct PsrfEntry {
  std::string param;
  double psrf = 1.0;
  std::vector<double> chain_means;
  std::vector<double> chain_variances;
};

struct PsrfReport {
  std::vector<PsrfEntry> entries;
  double max_psrf = 1.0;
};

/// Between/within-chain potential scale reduction from per-chain means and
/// unbiased variances of n draws each:
///   sqrt(1 + B / ((n - 1) W)),  B = n var(means),  W = mean(variances),
/// i.e. sqrt(Vhat / ((n-1)/n W)) with Vhat = (n-1)/n W + B/n. No chain
/// splitting. Equals 1 for identical chains.
inline double psrf_from_moments(const std::vector<double>& means, const std::vector<double>& variances,
                                std::size_t n) {
  const std::size_t m = means.size();
  if (m < 2) throw too_few_chains("PSRF needs at least 2 chains");
  if (n < kMinPsrfSamples) throw too_few_samples("PSRF needs at least 10 kept samples per chain");
  double grand = 0.0, w = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    grand += means[k];
    w += variances[k];
  }
  grand /= static_cast<double>(m);
  w /= static_cast<double>(m);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / static_cast<double>(m - 1);
  if (w <= 0.0) return b <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(1.0 + b / (static_cast<double>(n - 1) * w));
}

inline PsrfEntry psrf(const std::vector<std::vector<double>>& chains, std::string param = "") {
  if (chains.size() < 2) throw too_few_chains("PSRF needs at least 2 chains");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != n) throw domain_error("PSRF needs chains of equal length");
  }
  if (n < kMinPsrfSamples) throw too_few_samples("PSRF needs at least 10 kept samples per chain");
  PsrfEntry e;
  e.param = std::move(param);
  for (const auto& c : chains) {
    double mean = 0.0;
    for (double x : c) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : c) ss += (x - mean) * (x - mean);
    e.chain_means.push_back(mean);
    e.chain_variances.push_back(ss / static_cast<double>(n - 1));
  }
  e.psrf = psrf_from_moments(e.chain_means, e.chain_variances, n);
  return e;
}

using TraceSelector = std::function<double(const TraceRecord&)>;

inline std::vector<double> trace_column(const ChainTrace& t, const TraceSelector& f) {
  std::vector<double> out;
  out.reserve(t.records.size());
  for (const auto& r : t.records) out.push_back(f(r));
  return out;
}

inline TraceSelector trace_selector(const std::string& param) {
  if (param == "alpha") return [](const TraceRecord& r) { return r.alpha; };
  if (param == "sigma") return [](const TraceRecord& r) { return r.sigma; };
  if (param == "tau") return [](const TraceRecord& r) { return r.tau; };
  if (param == "w_star") return [](const TraceRecord& r) { return r.w_star; };
  if (param == "log_post") return [](const TraceRecord& r) { return r.log_post; };
  throw domain_error("unknown trace parameter: " + param);
}

inline PsrfEntry psrf(const std::vector<ChainTrace>& traces, const std::string& param) {
  std::vector<std::vector<double>> chains;
  for (const auto& t : traces) chains.push_back(trace_column(t, trace_selector(param)));
  return psrf(chains, param);
}

/// PSRF of every w_i from the per-chain running moments; returns the node
/// with the largest value, reported as "w[i]".
inline PsrfEntry psrf_weights(const std::vector<ChainTrace>& traces) {
  if (traces.size() < 2) throw too_few_chains("PSRF needs at least 2 chains");
  const std::size_t n = traces.front().w_stats.n;
  const std::size_t nodes = traces.front().w_stats.mean.size();
  for (const auto& t : traces) {
    if (t.w_stats.n != n || t.w_stats.mean.size() != nodes) throw domain_error("PSRF needs chains of equal length");
  }
  PsrfEntry best;
  best.psrf = -1.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<double> means, vars;
    for (const auto& t : traces) {
      means.push_back(t.w_stats.mean[i]);
      vars.push_back(t.w_stats.variance(i));
    }
    const double r = psrf_from_moments(means, vars, n);
    if (r > best.psrf) best = {"w[" + std::to_string(i) + "]", r, means, vars};
  }
  if (best.psrf < 0.0) throw too_few_samples("PSRF needs recorded weights");
  return best;
}

/// PSRF of alpha, sigma, tau, w* and the worst w_i (when recorded).
inline PsrfReport psrf_report(const std::vector<ChainTrace>& traces) {
  PsrfReport rep;
  for (const char* p : {"alpha", "sigma", "tau", "w_star"}) rep.entries.push_back(psrf(traces, p));
  if (traces.front().w_stats.n > 0) rep.entries.push_back(psrf_weights(traces));
  rep.max_psrf = 0.0;
  for (const auto& e : rep.entries) {
    if (std::isnan(e.psrf)) continue;
    rep.max_psrf = std::max(rep.max_psrf, e.psrf);
  }
  return rep;
}

/// Type-7 empirical quantile of sorted data.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw too_few_samples("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Equal-tailed interval at the given level.
inline Interval credible_interval(std::vector<double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw domain_error("credible level must lie in (0, 1)");
  if (static_cast<double>(draws.size()) < 2.0 / (1.0 - level)) {
    throw too_few_samples("too few draws for a credible interval at this level");
  }
  std::sort(draws.begin(), draws.end());
  const double tail = 0.5 * (1.0 - level);
  return {sorted_quantile(draws, tail), sorted_quantile(draws, 1.0 - tail)};
}

inline std::vector<double> pooled(const std::vector<ChainTrace>& traces, const std::string& param) {
  std::vector<double> out;
  for (const auto& t : traces) {
    auto c = trace_column(t, trace_selector(param));
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

struct SparsityTestResult {
  double p_sparse = 0.0;  // Pr(sigma >= 0 | graph)
  Interval ci_sigma;      // 99% equal-tailed
  double max_psrf = std::numeric_limits<double>::quiet_NaN();
  bool psrf_warning = false;  // max_psrf > 1.1
  std::size_t n_draws = 0;
};

inline SparsityTestResult sparsity_test(const std::vector<ChainTrace>& traces) {
  SparsityTestResult res;
  const auto sigma = pooled(traces, "sigma");
  if (sigma.empty()) throw too_few_samples("sparsity test needs posterior draws");
  std::size_t hits = 0;
  for (double s : sigma) hits += s >= 0.0;
  res.n_draws = sigma.size();
  res.p_sparse = static_cast<double>(hits) / static_cast<double>(sigma.size());
  res.ci_sigma = credible_interval(sigma, 0.99);
  if (traces.size() >= 2 && traces.front().records.size() >= kMinPsrfSamples) {
    res.max_psrf = psrf_report(traces).max_psrf;
    res.psrf_warning = res.max_psrf > 1.1;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Posterior predictive degree bands
// ---------------------------------------------------------------------------

/// Degree bins: unit bins for 1..16, then [2^k + 1, 2^(k+1)] for k >= 4.
inline std::size_t degree_bin(std::uint64_t degree) {
  if (degree == 0) throw domain_error("degree bins start at 1");
  if (degree <= 16) return degree - 1;
  std::size_t k = 4;
  while ((std::uint64_t{1} << (k + 1)) < degree) ++k;
  return 16 + (k - 4);
}

inline std::pair<std::uint64_t, std::uint64_t> degree_bin_range(std::size_t bin) {
  if (bin < 16) return {bin + 1, bin + 1};
  const std::size_t k = bin - 16 + 4;
  return {(std::uint64_t{1} << k) + 1, std::uint64_t{1} << (k + 1)};
}

inline std::vector<double> binned_degree_counts(const UndirectedGraph& g) {
  std::vector<double> counts;
  for (auto d : g.degree()) {
    if (d == 0) continue;
    const std::size_t b = degree_bin(d);
    if (b >= counts.size()) counts.resize(b + 1, 0.0);
    counts[b] += 1.0;
  }
  return counts;
}

struct DegreeBand {
  std::uint64_t bin_lo = 0;  // smallest degree in the bin
  std::uint64_t bin_hi = 0;
  double lo = 0.0;  // 2.5% quantile of the node count
  double median = 0.0;
  double hi = 0.0;  // 97.5% quantile
  double observed = 0.0;
};

/// Draws n_draws records uniformly from the pooled traces, simulates a graph
/// from each (alpha, sigma, tau) with `sim` (truncation, path, self-loops)
/// and returns per-bin quantiles of the number of nodes.
inline std::vector<DegreeBand> posterior_predictive_degrees(const std::vector<ChainTrace>& traces,
                                                            std::size_t n_draws, const SimConfig& sim,
                                                            RngStream& rng, const UndirectedGraph* observed = nullptr) {
  if (n_draws == 0) throw too_few_samples("posterior predictive check needs n_draws >= 1");
  std::vector<const TraceRecord*> pool;
  for (const auto& t : traces) {
    for (const auto& r : t.records) pool.push_back(&r);
  }
  if (pool.empty()) throw too_few_samples("posterior predictive check needs posterior draws");
  std::vector<std::vector<double>> per_draw;
  std::size_t n_bins = 0;
  for (std::size_t d = 0; d < n_draws; ++d) {
    const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size()));
    const TraceRecord& r = *pool[std::min(k, pool.size() - 1)];
    SimConfig cfg = sim;
    cfg.params = GgpParams(r.alpha, r.sigma, r.tau);
    RngStream sub = rng.substream(d);
    per_draw.push_back(binned_degree_counts(sample_graph(cfg, sub)));
    n_bins = std::max(n_bins, per_draw.back().size());
  }
  std::vector<double> obs;
  if (observed) obs = binned_degree_counts(*observed);
  n_bins = std::max(n_bins, obs.size());
  std::vector<DegreeBand> bands(n_bins);
  std::vector<double> column(n_draws);
  for (std::size_t b = 0; b < n_bins; ++b) {
    for (std::size_t d = 0; d < n_draws; ++d) column[d] = b < per_draw[d].size() ? per_draw[d][b] : 0.0;
    std::sort(column.begin(), column.end());
    auto& band = bands[b];
    std::tie(band.bin_lo, band.bin_hi) = degree_bin_range(b);
    band.lo = sorted_quantile(column, 0.025);
    band.median = sorted_quantile(column, 0.5);
    band.hi = sorted_quantile(column, 0.975);
    band.observed = b < obs.size() ? obs[b] : 0.0;
  }
  return bands;
}

// ---------------------------------------------------------------------------
// Empirical scaling and power-law checks
// ---------------------------------------------------------------------------

struct ScalingRow {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
};

struct ScalingResult {
  double sigma = 0.0;
  double tau = 1.0;
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // of log median edges on log median nodes across alpha
};

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx <= 0.0) throw domain_error("slope needs at least two distinct node counts");
  return sxy / sxx;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return sorted_quantile(v, 0.5);
}

/// Slope of log N^(e) on log N through the per-alpha medians of `rows`.
inline double scaling_slope(const std::vector<ScalingRow>& rows) {
  std::vector<double> alphas;
  for (const auto& r : rows) alphas.push_back(r.alpha);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  std::vector<double> x, y;
  for (double a : alphas) {
    std::vector<double> nodes, edges;
    for (const auto& r : rows) {
      if (r.alpha != a) continue;
      nodes.push_back(static_cast<double>(r.n_nodes));
      edges.push_back(static_cast<double>(r.n_edges));
    }
    const double mn = median_of(nodes), me = median_of(edges);
    if (mn <= 0.0 || me <= 0.0) continue;
    x.push_back(std::log(mn));
    y.push_back(std::log(me));
  }
  return least_squares_slope(x, y);
}

/// One graph per (alpha, seed) with the given sigma, tau; seeds are the
/// stream ids under `base_seed`.
inline ScalingResult scaling_experiment(double sigma, double tau, const std::vector<double>& alpha_grid,
                                        const std::vector<std::uint64_t>& seeds, double truncation_eps,
                                        std::uint64_t base_seed = 0) {
  if (alpha_grid.size() < 3) throw domain_error("scaling experiment needs at least 3 alpha values");
  if (seeds.size() < 3) throw domain_error("scaling experiment needs at least 3 seeds");
  ScalingResult res;
  res.sigma = sigma;
  res.tau = tau;
  for (double a : alpha_grid) {
    for (auto seed : seeds) {
      SimConfig cfg;
      cfg.params = GgpParams(a, sigma, tau);
      cfg.truncation_eps = truncation_eps;
      RngStream rng(base_seed, seed);
      const auto g = sample_undirected_ggp(cfg, rng).graph;
      res.rows.push_back({a, seed, g.n_nodes(), g.n_edges()});
    }
  }
  res.slope = scaling_slope(res.rows);
  return res;
}

/// Limit fraction of multigraph nodes with degree j:
///   sigma Gamma(j - sigma) / (Gamma(1 - sigma) Gamma(j + 1)),
/// via p_1 = sigma, p_(j+1) = p_j (j - sigma) / (j + 1).
inline std::vector<double> powerlaw_fractions(double sigma, std::size_t j_max) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw domain_error("power-law fractions need sigma in (0, 1)");
  std::vector<double> p(j_max);
  if (j_max == 0) return p;
  p[0] = sigma;
  for (std::size_t j = 1; j < j_max; ++j) {
    p[j] = p[j - 1] * (static_cast<double>(j) - sigma) / static_cast<double>(j + 1);
  }
  return p;
}

struct PowerlawRow {
  std::size_t j = 0;
  double empirical = 0.0;
  double theoretical = 0.0;
  double gap = 0.0;
};

/// Mean over seeds of the multigraph degree fractions against the limit.
inline std::vector<PowerlawRow> powerlaw_check(const GgpParams& params, const std::vector<std::uint64_t>& seeds,
                                               std::size_t j_max, double truncation_eps,
                                               std::uint64_t base_seed = 0) {
  const auto theory = powerlaw_fractions(params.sigma(), j_max);
  if (seeds.empty()) throw too_few_samples("power-law check needs at least one seed");
  std::vector<double> emp(j_max, 0.0);
  for (auto seed : seeds) {
    SimConfig cfg;
    cfg.params = params;
    cfg.truncation_eps = truncation_eps;
    RngStream rng(base_seed, seed);
    const auto draw = sample_undirected_ggp(cfg, rng);
    const auto f = multigraph_degree_fractions(draw.multigraph, j_max);
    for (std::size_t j = 0; j < j_max; ++j) emp[j] += f[j] / static_cast<double>(seeds.size());
  }
  std::vector<PowerlawRow> rows;
  for (std::size_t j = 0; j < j_max; ++j) {
    rows.push_back({j + 1, emp[j], theory[j], std::fabs(emp[j] - theory[j])});
  }
  return rows;
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_DIAGNOSTICS_HPP
