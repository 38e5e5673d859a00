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

// Command-line front end: sample, fit, test-sparsity, ppc, scaling, diag.
// Exit status 0 on success, 2 on usage errors, 1 on runtime errors.

#ifndef GGPGRAPH_CLI_HPP
#define GGPGRAPH_CLI_HPP

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggpgraph/diagnostics.hpp"
#include "ggpgraph/inference.hpp"
#include "ggpgraph/io.hpp"
#include "ggpgraph/simulate.hpp"

namespace ggpgraph::cli {

struct SampleArgs {
  std::optional<double> alpha, sigma, tau;
  std::optional<std::size_t> er_n;
  std::optional<double> er_p;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::string path = "truncated";
  bool no_self_loops = false;
  bool directed = false;
  std::string out, sidecar;
};

struct FitArgs {
  std::string input, config, trace, trace_right, state_out, report;
  bool bipartite = false;
  bool directed = false;
  // overrides of the configuration file
  std::optional<std::size_t> iters, chains, leapfrog, thin, adapt;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> latent, prior;
  std::optional<double> rw_sd, scale_sd;
};

struct PpcArgs {
  std::string trace, input, out, path = "truncated";
  std::size_t draws = 500;
  double eps = 1e-6;
  std::uint64_t seed = 0;
};

struct ScalingArgs {
  double sigma = 0.5, tau = 1.0;
  std::vector<double> alphas = {50, 100, 200, 400, 800};
  std::size_t seeds = 3;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t powerlaw_jmax = 0;
  std::string powerlaw_out;
};

struct DiagArgs {
  std::vector<std::string> traces;
  std::string out, summary;
  double level = 0.95;
};

namespace detail {

inline std::string short_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

inline void add_fit_options(CLI::App* app, FitArgs& a) {
  app->add_option("--input,-i", a.input, "edge list file")->required()->check(CLI::ExistingFile);
  app->add_option("--config", a.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--iters", a.iters, "MCMC iterations per chain");
  app->add_option("--chains", a.chains, "number of chains");
  app->add_option("--seed", a.seed, "sampler seed");
  app->add_option("--leapfrog", a.leapfrog, "leapfrog steps per HMC move");
  app->add_option("--thin", a.thin, "keep every k-th iteration after burn-in");
  app->add_option("--adapt", a.adapt, "adaptation (= burn-in) iterations; default iters/4");
  app->add_option("--latent", a.latent, "latent count update")->check(CLI::IsMember({"exact", "mh"}));
  app->add_option("--prior", a.prior, "hyperparameter prior")->check(CLI::IsMember({"improper", "lognormal"}));
  app->add_option("--rw-sd", a.rw_sd, "random-walk sd for tau and 1 - sigma");
  app->add_option("--scale-sd", a.scale_sd, "sd of the joint tau / weight-scale move (0 disables it)");
  app->add_option("--trace-right", a.trace_right, "bipartite: trace CSV of the right-hand parameters");
  app->add_option("--state-out", a.state_out, "JSON file with the final state of every chain");
  app->add_flag("--bipartite", a.bipartite, "input is a bipartite 'left right' edge list");
  app->add_flag("--directed", a.directed, "read arcs with multiplicity before symmetrizing");
}

inline RunConfig resolve_config(const FitArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : read_run_config(a.config);
  McmcConfig& m = cfg.mcmc;
  if (a.iters) m.n_iter = *a.iters;
  if (a.chains) m.n_chains = *a.chains;
  if (a.seed) m.seed = *a.seed;
  if (a.leapfrog) m.leapfrog_steps = *a.leapfrog;
  if (a.thin) m.thin = *a.thin;
  if (a.adapt) m.adapt_iters = *a.adapt;
  if (a.latent) m.latent_mode = ggpgraph::detail::parse_latent_mode(*a.latent);
  if (a.prior) m.prior = ggpgraph::detail::parse_prior_mode(*a.prior);
  if (a.rw_sd) m.rw_sd = *a.rw_sd;
  if (a.scale_sd) m.scale_sd = *a.scale_sd;
  if (!a.trace.empty()) cfg.trace_path = a.trace;
  if (!a.report.empty()) cfg.report_path = a.report;
  m.validate();
  return cfg;
}

inline std::vector<ChainTrace> fit(const FitArgs& a, const RunConfig& cfg, std::ostream& out) {
  const McmcConfig& m = cfg.mcmc;
  std::vector<ChainTrace> traces(m.n_chains);
  if (a.bipartite) {
    const auto el = read_bipartite_edge_list(a.input);
    out << "bipartite graph: " << el.graph.n_left() << " + " << el.graph.n_right() << " nodes, "
        << el.graph.n_edges() << " edges\n";
    parallel_for(m.n_chains, [&](std::size_t k) {
      RngStream rng(m.seed, k);
      traces[k] = run_bipartite_gibbs(el.graph, m, rng, k);
    });
  } else {
    EdgeListOptions opt;
    opt.directed = a.directed;
    const auto el = read_edge_list(a.input, opt);
    out << "graph: " << el.graph.n_nodes() << " nodes, " << el.graph.n_edges() << " edges\n";
    traces = run_chains(el.graph, m);
  }
  for (const auto& t : traces) {
    out << "chain " << t.chain << ": hmc accept " << short_double(t.hmc.rate()) << ", hyper accept "
        << short_double(t.hyper.rate());
    if (t.scale.proposed > 0) out << ", scale accept " << short_double(t.scale.rate());
    out << ", stepsize " << short_double(t.stepsize) << '\n';
  }
  if (!cfg.trace_path.empty()) write_trace_csv(traces, cfg.trace_path);
  if (a.bipartite && !a.trace_right.empty()) write_trace_csv(traces, a.trace_right, true);
  if (!a.state_out.empty()) {
    json states = json::array();
    for (const auto& t : traces) states.push_back(to_json(t.final_state));
    write_json(states, a.state_out);
  }
  return traces;
}

template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  auto f = ggpgraph::detail::open_out(path);
  fn(f);
  if (!f) throw io_error("write failure on '" + path + "'");
}

inline int cmd_sample(const SampleArgs& a, std::ostream& out) {
  if (a.er_n) {
    RngStream rng(a.seed, 0);
    const auto g = sample_gnp(*a.er_n, *a.er_p, rng);
    write_edge_list(g, a.out);
    const json side = {{"schema_version", kSchemaVersion}, {"generator", "ggpgraph"}, {"version", kVersion},
                       {"model", "gnp"},  {"n", *a.er_n},        {"p", *a.er_p},
                       {"seed", a.seed},  {"n_nodes", g.n_nodes()}, {"n_edges", g.n_edges()},
                       {"graph_hash", graph_hash(g)}};
    write_json(side, a.sidecar.empty() ? a.out + ".json" : a.sidecar);
    out << "nodes " << g.n_nodes() << " edges " << g.n_edges() << '\n';
    return 0;
  }
  SimConfig cfg;
  cfg.params = GgpParams(*a.alpha, *a.sigma, *a.tau);
  cfg.truncation_eps = a.eps;
  cfg.seed = a.seed;
  cfg.path = parse_sim_path(a.path);
  cfg.include_self_loops = !a.no_self_loops;
  RngStream rng(a.seed, 0);
  UndirectedGraph g;
  if (a.directed) {
    if (cfg.path != SimPath::truncated) throw domain_error("--directed needs the truncated path");
    const auto draw = sample_undirected_ggp(cfg, rng);
    write_edge_list(draw.multigraph, a.out);
    g = draw.graph;
  } else {
    g = sample_graph(cfg, rng);
    write_edge_list(g, a.out);
  }
  write_json(sidecar_json(cfg, g), a.sidecar.empty() ? a.out + ".json" : a.sidecar);
  out << "nodes " << g.n_nodes() << " edges " << g.n_edges() << '\n';
  return 0;
}

inline int cmd_fit(const FitArgs& a, std::ostream& out) {
  const RunConfig cfg = resolve_config(a);
  if (cfg.trace_path.empty()) throw domain_error("fit needs --trace or output.trace in the configuration");
  const auto traces = fit(a, cfg, out);
  if (traces.size() >= 2 && traces.front().records.size() >= kMinPsrfSamples) {
    out << "max psrf " << short_double(psrf_report(traces).max_psrf) << '\n';
  }
  return 0;
}

inline int cmd_test_sparsity(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = resolve_config(a);
  std::ostringstream log;
  const auto traces = fit(a, cfg, log);
  err << log.str();
  const auto res = sparsity_test(traces);
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.psrf_warning) err << "warning: max PSRF " << short_double(res.max_psrf) << " exceeds 1.1\n";
  const json j = to_json(res, runtime);
  with_output(cfg.report_path, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return 0;
}

inline int cmd_ppc(const PpcArgs& a, std::ostream& out) {
  const auto traces = read_trace_csv(a.trace);
  const auto el = read_edge_list(a.input);
  SimConfig sim;
  sim.truncation_eps = a.eps;
  sim.path = parse_sim_path(a.path);
  sim.seed = a.seed;
  RngStream rng(a.seed, 0);
  const auto bands = posterior_predictive_degrees(traces, a.draws, sim, rng, &el.graph);
  with_output(a.out, out, [&](std::ostream& o) { write_ppc_csv(bands, o); });
  return 0;
}

inline int cmd_scaling(const ScalingArgs& a, std::ostream& out) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < a.seeds; ++k) seeds.push_back(k);
  const auto res = scaling_experiment(a.sigma, a.tau, a.alphas, seeds, a.eps, a.seed);
  with_output(a.out, out, [&](std::ostream& o) { write_scaling_csv(res.rows, o); });
  out << "slope " << short_double(res.slope) << '\n';
  if (a.powerlaw_jmax > 0) {
    const auto rows = powerlaw_check(GgpParams(a.alphas.back(), a.sigma, a.tau), seeds, a.powerlaw_jmax, a.eps,
                                     a.seed);
    with_output(a.powerlaw_out, out, [&](std::ostream& o) { write_powerlaw_csv(rows, o); });
  }
  return 0;
}

inline int cmd_diag(const DiagArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<ChainTrace> traces;
  for (const auto& p : a.traces) {
    for (auto& t : read_trace_csv(p)) traces.push_back(std::move(t));
  }
  if (traces.size() >= 2) {
    // chains of unequal length are cut to the shortest
    std::size_t n = traces.front().records.size();
    for (const auto& t : traces) n = std::min(n, t.records.size());
    for (auto& t : traces) t.records.resize(n);
    PsrfReport rep;
    for (const char* p : {"alpha", "sigma", "tau", "w_star"}) rep.entries.push_back(psrf(traces, p));
    rep.max_psrf = 0.0;
    for (const auto& e : rep.entries) rep.max_psrf = std::max(rep.max_psrf, e.psrf);
    with_output(a.out, out, [&](std::ostream& o) { write_psrf_csv(rep, o); });
  } else {
    err << "warning: PSRF needs at least 2 chains; reporting intervals only\n";
  }
  with_output(a.summary, out, [&](std::ostream& o) {
    o << "param,mean,lo,hi\n";
    for (const char* p : {"alpha", "sigma", "tau", "w_star"}) {
      const auto draws = pooled(traces, p);
      double mean = 0.0;
      for (double x : draws) mean += x;
      mean /= static_cast<double>(draws.size());
      const auto ci = credible_interval(draws, a.level);
      o << p << ',' << format_double(mean) << ',' << format_double(ci.lo) << ',' << format_double(ci.hi) << '\n';
    }
  });
  return 0;
}

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse exchangeable random graphs: simulation and posterior inference", "ggpgraph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "simulate a graph and write an edge list plus sidecar");
  auto* o_alpha = sample->add_option("--alpha", sa.alpha, "mass parameter");
  auto* o_sigma = sample->add_option("--sigma", sa.sigma, "discount parameter");
  auto* o_tau = sample->add_option("--tau", sa.tau, "exponential tilting");
  auto* o_er_n = sample->add_option("--er-n", sa.er_n, "Erdos-Renyi G(n, p) instead of a GGP graph: n");
  auto* o_er_p = sample->add_option("--er-p", sa.er_p, "Erdos-Renyi edge probability p");
  o_alpha->needs(o_sigma, o_tau)->excludes(o_er_n, o_er_p);
  o_sigma->needs(o_alpha);
  o_tau->needs(o_alpha);
  o_er_n->needs(o_er_p);
  o_er_p->needs(o_er_n);
  sample->add_option("--eps", sa.eps, "truncation level of small weights")->capture_default_str();
  sample->add_option("--seed", sa.seed, "random seed")->capture_default_str();
  sample->add_option("--path", sa.path, "simulation path")
      ->check(CLI::IsMember({"truncated", "urn", "kallenberg", "compound-poisson"}))
      ->capture_default_str();
  sample->add_flag("--no-self-loops", sa.no_self_loops, "drop self-loops");
  sample->add_flag("--directed", sa.directed, "write the directed multigraph, one line per arc");
  sample->add_option("--out,-o", sa.out, "edge list output")->required();
  sample->add_option("--sidecar", sa.sidecar, "parameter sidecar (default <out>.json)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "run the MCMC sampler and write traces");
  detail::add_fit_options(fit, fa);
  fit->add_option("--trace,-o", fa.trace, "trace CSV output");

  FitArgs ta;
  auto* sparsity = app.add_subcommand("test-sparsity", "fit and report Pr(sigma >= 0 | graph)");
  detail::add_fit_options(sparsity, ta);
  sparsity->add_option("--trace", ta.trace, "trace CSV output");
  sparsity->add_option("--report,-o", ta.report, "JSON report (default stdout)");

  PpcArgs pa;
  auto* ppc = app.add_subcommand("ppc", "posterior predictive degree bands");
  ppc->add_option("--trace", pa.trace, "trace CSV from fit")->required()->check(CLI::ExistingFile);
  ppc->add_option("--input,-i", pa.input, "observed edge list")->required()->check(CLI::ExistingFile);
  ppc->add_option("--draws", pa.draws, "posterior predictive graphs")->capture_default_str();
  ppc->add_option("--eps", pa.eps, "truncation level")->capture_default_str();
  ppc->add_option("--seed", pa.seed, "random seed")->capture_default_str();
  ppc->add_option("--path", pa.path, "simulation path")
      ->check(CLI::IsMember({"truncated", "urn", "kallenberg", "compound-poisson"}));
  ppc->add_option("--out,-o", pa.out, "CSV output (default stdout)");

  ScalingArgs ca;
  auto* scaling = app.add_subcommand("scaling", "edge/node scaling over a grid of alpha");
  scaling->add_option("--sigma", ca.sigma, "discount parameter")->capture_default_str();
  scaling->add_option("--tau", ca.tau, "exponential tilting")->capture_default_str();
  scaling->add_option("--alphas", ca.alphas, "alpha grid")->delimiter(',');
  scaling->add_option("--seeds", ca.seeds, "replicates per alpha")->capture_default_str();
  scaling->add_option("--eps", ca.eps, "truncation level")->capture_default_str();
  scaling->add_option("--seed", ca.seed, "base seed")->capture_default_str();
  scaling->add_option("--out,-o", ca.out, "CSV output (default stdout)");
  scaling->add_option("--powerlaw-jmax", ca.powerlaw_jmax, "also compare degree fractions up to j at the largest alpha");
  scaling->add_option("--powerlaw-out", ca.powerlaw_out, "power-law CSV output (default stdout)");

  DiagArgs da;
  auto* diag = app.add_subcommand("diag", "PSRF and credible intervals from stored traces");
  diag->add_option("--trace", da.traces, "trace CSV files")->required()->check(CLI::ExistingFile);
  diag->add_option("--out,-o", da.out, "PSRF CSV output (default stdout)");
  diag->add_option("--summary", da.summary, "interval CSV output (default stdout)");
  diag->add_option("--level", da.level, "credible level")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (*sample && !sa.alpha && !sa.er_n) {
    err << "sample needs --alpha/--sigma/--tau or --er-n/--er-p\n" << sample->help();
    return 2;
  }
  try {
    if (*sample) return detail::cmd_sample(sa, out);
    if (*fit) return detail::cmd_fit(fa, out);
    if (*sparsity) return detail::cmd_test_sparsity(ta, out, err);
    if (*ppc) return detail::cmd_ppc(pa, out);
    if (*scaling) return detail::cmd_scaling(ca, out);
    if (*diag) return detail::cmd_diag(da, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ggpgraph::cli

#endif  // GGPGRAPH_CLI_HPP
