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

// Edge lists, trace CSV files and the JSON documents (run configuration,
// sampler state, simulation sidecar, sparsity report).

#ifndef GGPGRAPH_IO_HPP
#define GGPGRAPH_IO_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggpgraph/diagnostics.hpp"
#include "ggpgraph/error.hpp"
#include "ggpgraph/graph.hpp"
#include "ggpgraph/inference.hpp"
#include "ggpgraph/simulate.hpp"

namespace ggpgraph {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Edge lists
// ---------------------------------------------------------------------------

struct EdgeListOptions {
  bool directed = false;  // keep arc multiplicity in `multigraph`
  std::string comment_prefixes = "#%";
};

/// Parsed edge list. Node ids are contiguous in order of first appearance;
/// external_ids[k] is the id that became node k.
struct EdgeList {
  UndirectedGraph graph;
  DirectedMultigraph multigraph;  // filled when options.directed
  std::vector<std::int64_t> external_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits off the next whitespace-delimited token.
inline std::string_view next_token(std::string_view& s) {
  const auto b = s.find_first_not_of(" \t,");
  if (b == std::string_view::npos) {
    s = {};
    return {};
  }
  s.remove_prefix(b);
  const auto e = s.find_first_of(" \t,");
  const auto tok = s.substr(0, e);
  s.remove_prefix(e == std::string_view::npos ? s.size() : e);
  return tok;
}

inline std::int64_t parse_id(std::string_view tok, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw parse_error(line, "expected an integer node id, got '" + std::string(tok) + "'");
  }
  return v;
}

// Reads "a b" pairs; extra columns (weights, timestamps) are ignored.
inline std::vector<std::pair<std::int64_t, std::int64_t>> read_pairs(std::istream& in, const EdgeListOptions& opt) {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || opt.comment_prefixes.find(s.front()) != std::string::npos) continue;
    const auto a = next_token(s);
    const auto b = next_token(s);
    if (b.empty()) throw parse_error(line, "expected two node ids");
    pairs.emplace_back(parse_id(a, line), parse_id(b, line));
  }
  if (in.bad()) throw io_error("read failure while parsing edge list");
  return pairs;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline EdgeList read_edge_list(std::istream& in, const EdgeListOptions& opt = {}) {
  const auto pairs = detail::read_pairs(in, opt);
  if (pairs.empty()) throw empty_graph("edge list has no edges");
  EdgeList out;
  std::unordered_map<std::int64_t, NodeId> dict;
  auto id_of = [&](std::int64_t ext) {
    const auto [it, fresh] = dict.emplace(ext, static_cast<NodeId>(out.external_ids.size()));
    if (fresh) out.external_ids.push_back(ext);
    return it->second;
  };
  std::vector<std::pair<NodeId, NodeId>> mapped;
  mapped.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const NodeId i = id_of(a);
    const NodeId j = id_of(b);
    mapped.emplace_back(i, j);
  }
  const std::size_t n = out.external_ids.size();
  if (opt.directed) {
    out.multigraph = DirectedMultigraph(n, mapped);
    out.graph = to_undirected(out.multigraph);
  } else {
    std::vector<UndirectedEdge> edges(mapped.begin(), mapped.end());
    out.graph = UndirectedGraph(n, std::move(edges));
  }
  return out;
}

inline EdgeList read_edge_list(const std::string& path, const EdgeListOptions& opt = {}) {
  auto in = detail::open_in(path);
  return read_edge_list(in, opt);
}

struct BipartiteEdgeList {
  BipartiteGraph graph;  // binary; duplicate pairs collapsed
  std::vector<std::int64_t> left_ids;
  std::vector<std::int64_t> right_ids;
};

/// "left right" pairs with separate id dictionaries for the two sides.
inline BipartiteEdgeList read_bipartite_edge_list(std::istream& in, const EdgeListOptions& opt = {}) {
  const auto pairs = detail::read_pairs(in, opt);
  if (pairs.empty()) throw empty_graph("edge list has no edges");
  BipartiteEdgeList out;
  std::unordered_map<std::int64_t, NodeId> left, right;
  std::vector<BipartiteEdge> edges;
  for (const auto& [a, b] : pairs) {
    const auto [li, lf] = left.emplace(a, static_cast<NodeId>(out.left_ids.size()));
    if (lf) out.left_ids.push_back(a);
    const auto [ri, rf] = right.emplace(b, static_cast<NodeId>(out.right_ids.size()));
    if (rf) out.right_ids.push_back(b);
    edges.push_back({li->second, ri->second, 1});
  }
  out.graph = BipartiteGraph(out.left_ids.size(), out.right_ids.size(), std::move(edges)).binarized();
  return out;
}

inline BipartiteEdgeList read_bipartite_edge_list(const std::string& path, const EdgeListOptions& opt = {}) {
  auto in = detail::open_in(path);
  return read_bipartite_edge_list(in, opt);
}

inline void write_edge_list(const UndirectedGraph& g, std::ostream& out) {
  out << "# undirected graph: " << g.n_nodes() << " nodes, " << g.n_edges() << " edges\n";
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

/// One line per arc, repeated by multiplicity.
inline void write_edge_list(const DirectedMultigraph& d, std::ostream& out) {
  out << "# directed multigraph: " << d.n_nodes() << " nodes, " << d.total_edges() << " arcs\n";
  for (const auto& e : d.edges()) {
    for (std::uint64_t k = 0; k < e.count; ++k) out << e.from << ' ' << e.to << '\n';
  }
}

template <class Graph>
void write_edge_list(const Graph& g, const std::string& path) {
  auto out = detail::open_out(path);
  write_edge_list(g, out);
  if (!out) throw io_error("write failure on '" + path + "'");
}

/// FNV-1a over the sorted edge list; equal graphs hash equally.
inline std::uint64_t graph_hash(const UndirectedGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(g.n_nodes());
  for (const auto& [i, j] : g.edges()) {
    mix(i);
    mix(j);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader = "iteration,chain,alpha,sigma,tau,w_star,log_post";

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_trace_csv(const std::vector<ChainTrace>& traces, std::ostream& out, bool secondary = false) {
  out << kTraceHeader << '\n';
  for (const auto& t : traces) {
    for (const auto& r : secondary ? t.secondary : t.records) {
      out << r.iteration << ',' << r.chain << ',' << format_double(r.alpha) << ',' << format_double(r.sigma) << ','
          << format_double(r.tau) << ',' << format_double(r.w_star) << ',' << format_double(r.log_post) << '\n';
    }
  }
}

inline void write_trace_csv(const std::vector<ChainTrace>& traces, const std::string& path, bool secondary = false) {
  auto out = detail::open_out(path);
  write_trace_csv(traces, out, secondary);
  if (!out) throw io_error("write failure on '" + path + "'");
}

/// Records grouped into one ChainTrace per chain id, in order of appearance.
inline std::vector<ChainTrace> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw schema_error("trace file is empty");
  if (detail::trim(line) != kTraceHeader) {
    throw schema_error("unexpected trace header '" + std::string(detail::trim(line)) + "'");
  }
  std::vector<ChainTrace> traces;
  std::map<std::size_t, std::size_t> slot;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    double v[7];
    const char* p = s.data();
    const char* end = s.data() + s.size();
    for (int k = 0; k < 7; ++k) {
      std::from_chars_result res{};
      if (k < 2) {
        std::uint64_t u = 0;
        res = std::from_chars(p, end, u);
        v[k] = static_cast<double>(u);
      } else {
        res = std::from_chars(p, end, v[k]);
      }
      if (res.ec != std::errc()) throw schema_error("trace line " + std::to_string(lineno) + ": bad field");
      p = res.ptr;
      if (k < 6) {
        if (p == end || *p != ',') throw schema_error("trace line " + std::to_string(lineno) + ": expected 7 fields");
        ++p;
      }
    }
    if (p != end) throw schema_error("trace line " + std::to_string(lineno) + ": expected 7 fields");
    TraceRecord r{static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), v[2], v[3], v[4], v[5], v[6]};
    const auto [it, fresh] = slot.emplace(r.chain, traces.size());
    if (fresh) {
      traces.emplace_back();
      traces.back().chain = r.chain;
    }
    traces[it->second].records.push_back(r);
  }
  if (in.bad()) throw io_error("read failure while parsing trace");
  return traces;
}

inline std::vector<ChainTrace> read_trace_csv(const std::string& path) {
  auto in = detail::open_in(path);
  return read_trace_csv(in);
}

// ---------------------------------------------------------------------------
// Other CSV tables
// ---------------------------------------------------------------------------

inline void write_psrf_csv(const PsrfReport& rep, std::ostream& out) {
  out << "param,psrf\n";
  for (const auto& e : rep.entries) out << e.param << ',' << format_double(e.psrf) << '\n';
}

inline void write_powerlaw_csv(const std::vector<PowerlawRow>& rows, std::ostream& out) {
  out << "j,empirical,theoretical\n";
  for (const auto& r : rows) out << r.j << ',' << format_double(r.empirical) << ',' << format_double(r.theoretical) << '\n';
}

inline void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
  out << "alpha,seed,n_nodes,n_edges\n";
  for (const auto& r : rows) out << format_double(r.alpha) << ',' << r.seed << ',' << r.n_nodes << ',' << r.n_edges << '\n';
}

inline void write_ppc_csv(const std::vector<DegreeBand>& bands, std::ostream& out) {
  out << "degree_bin,lo,median,hi,observed\n";
  for (const auto& b : bands) {
    out << b.bin_lo << ',' << format_double(b.lo) << ',' << format_double(b.median) << ',' << format_double(b.hi)
        << ',' << format_double(b.observed) << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON documents
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw schema_error(where + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw schema_error(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void get_if(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw schema_error(where + "." + key + ": " + e.what());
  }
}

inline void check_schema_version(const json& j, const std::string& where) {
  if (!j.contains("schema_version")) throw schema_error(where + ": missing schema_version");
  if (j.at("schema_version") != kSchemaVersion) {
    throw schema_error(where + ": unsupported schema_version " + j.at("schema_version").dump());
  }
}

inline LatentMode parse_latent_mode(const std::string& s) {
  if (s == "exact") return LatentMode::exact;
  if (s == "mh") return LatentMode::mh;
  throw schema_error("latent_mode must be 'exact' or 'mh', got '" + s + "'");
}

inline PriorMode parse_prior_mode(const std::string& s) {
  if (s == "improper") return PriorMode::improper;
  if (s == "lognormal") return PriorMode::lognormal;
  throw schema_error("prior must be 'improper' or 'lognormal', got '" + s + "'");
}

}  // namespace detail

inline std::string to_string(LatentMode m) { return m == LatentMode::exact ? "exact" : "mh"; }
inline std::string to_string(PriorMode m) { return m == PriorMode::improper ? "improper" : "lognormal"; }

/// Simulation settings, sampler settings and output paths of one run.
struct RunConfig {
  double alpha = 300.0;
  double sigma = 0.5;
  double tau = 1.0;
  double truncation_eps = 1e-6;
  std::uint64_t sim_seed = 0;
  SimPath path = SimPath::truncated;
  bool include_self_loops = true;
  McmcConfig mcmc;
  std::string trace_path;
  std::string report_path;

  SimConfig sim() const {
    SimConfig s;
    s.params = GgpParams(alpha, sigma, tau);
    s.truncation_eps = truncation_eps;
    s.seed = sim_seed;
    s.path = path;
    s.include_self_loops = include_self_loops;
    return s;
  }
};

inline json to_json(const McmcConfig& c) {
  json j = {{"n_iter", c.n_iter},
            {"n_chains", c.n_chains},
            {"leapfrog_steps", c.leapfrog_steps},
            {"target_accept", c.target_accept},
            {"initial_stepsize", c.initial_stepsize},
            {"rw_sd", c.rw_sd},
            {"scale_sd", c.scale_sd},
            {"thin", c.thin},
            {"seed", c.seed},
            {"latent_mode", to_string(c.latent_mode)},
            {"prior", to_string(c.prior)},
            {"prior_log_mean", c.prior_log_mean},
            {"prior_log_sd", c.prior_log_sd},
            {"estimate_alpha", c.estimate_alpha},
            {"estimate_sigma", c.estimate_sigma},
            {"estimate_tau", c.estimate_tau},
            {"estimate_w", c.estimate_w},
            {"omega_stride", c.omega_stride},
            {"init_jitter", c.init.jitter}};
  j["adapt_iters"] = c.adapt_iters ? json(*c.adapt_iters) : json(nullptr);
  return j;
}

inline McmcConfig mcmc_config_from_json(const json& j) {
  const std::string where = "mcmc";
  detail::reject_unknown(j,
                         {"n_iter", "n_chains", "leapfrog_steps", "target_accept", "adapt_iters", "initial_stepsize",
                          "rw_sd", "scale_sd", "thin", "seed", "latent_mode", "prior", "prior_log_mean", "prior_log_sd",
                          "estimate_alpha", "estimate_sigma", "estimate_tau", "estimate_w", "omega_stride",
                          "init_jitter"},
                         where);
  McmcConfig c;
  detail::get_if(j, "n_iter", c.n_iter, where);
  detail::get_if(j, "n_chains", c.n_chains, where);
  detail::get_if(j, "leapfrog_steps", c.leapfrog_steps, where);
  detail::get_if(j, "target_accept", c.target_accept, where);
  if (j.contains("adapt_iters") && !j.at("adapt_iters").is_null()) {
    std::size_t a = 0;
    detail::get_if(j, "adapt_iters", a, where);
    c.adapt_iters = a;
  }
  detail::get_if(j, "initial_stepsize", c.initial_stepsize, where);
  detail::get_if(j, "rw_sd", c.rw_sd, where);
  detail::get_if(j, "scale_sd", c.scale_sd, where);
  detail::get_if(j, "thin", c.thin, where);
  detail::get_if(j, "seed", c.seed, where);
  std::string s;
  if (j.contains("latent_mode")) {
    detail::get_if(j, "latent_mode", s, where);
    c.latent_mode = detail::parse_latent_mode(s);
  }
  if (j.contains("prior")) {
    detail::get_if(j, "prior", s, where);
    c.prior = detail::parse_prior_mode(s);
  }
  detail::get_if(j, "prior_log_mean", c.prior_log_mean, where);
  detail::get_if(j, "prior_log_sd", c.prior_log_sd, where);
  detail::get_if(j, "estimate_alpha", c.estimate_alpha, where);
  detail::get_if(j, "estimate_sigma", c.estimate_sigma, where);
  detail::get_if(j, "estimate_tau", c.estimate_tau, where);
  detail::get_if(j, "estimate_w", c.estimate_w, where);
  detail::get_if(j, "omega_stride", c.omega_stride, where);
  detail::get_if(j, "init_jitter", c.init.jitter, where);
  return c;
}

inline json to_json(const RunConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"sim",
           {{"alpha", c.alpha},
            {"sigma", c.sigma},
            {"tau", c.tau},
            {"truncation_eps", c.truncation_eps},
            {"seed", c.sim_seed},
            {"path", to_string(c.path)},
            {"include_self_loops", c.include_self_loops}}},
          {"mcmc", to_json(c.mcmc)},
          {"output", {{"trace", c.trace_path}, {"report", c.report_path}}}};
}

inline RunConfig run_config_from_json(const json& j) {
  detail::reject_unknown(j, {"schema_version", "sim", "mcmc", "output"}, "config");
  detail::check_schema_version(j, "config");
  RunConfig c;
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    detail::reject_unknown(s, {"alpha", "sigma", "tau", "truncation_eps", "seed", "path", "include_self_loops"},
                           "sim");
    detail::get_if(s, "alpha", c.alpha, "sim");
    detail::get_if(s, "sigma", c.sigma, "sim");
    detail::get_if(s, "tau", c.tau, "sim");
    detail::get_if(s, "truncation_eps", c.truncation_eps, "sim");
    detail::get_if(s, "seed", c.sim_seed, "sim");
    detail::get_if(s, "include_self_loops", c.include_self_loops, "sim");
    if (s.contains("path")) {
      std::string p;
      detail::get_if(s, "path", p, "sim");
      try {
        c.path = parse_sim_path(p);
      } catch (const domain_error& e) {
        throw schema_error(std::string("sim.path: ") + e.what());
      }
    }
  }
  if (j.contains("mcmc")) c.mcmc = mcmc_config_from_json(j.at("mcmc"));
  if (j.contains("output")) {
    const json& o = j.at("output");
    detail::reject_unknown(o, {"trace", "report"}, "output");
    detail::get_if(o, "trace", c.trace_path, "output");
    detail::get_if(o, "report", c.report_path, "output");
  }
  return c;
}

inline RunConfig read_run_config(const std::string& path) {
  auto in = detail::open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw schema_error("config '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

inline json to_json(const McmcState& s) {
  return {{"schema_version", kSchemaVersion}, {"omega", s.omega}, {"w_star", s.w_star}, {"log_alpha", s.log_alpha},
          {"sigma", s.sigma},                 {"tau", s.tau},     {"latent", s.latent}, {"m", s.m}};
}

inline McmcState state_from_json(const json& j) {
  detail::reject_unknown(j, {"schema_version", "omega", "w_star", "log_alpha", "sigma", "tau", "latent", "m"},
                         "state");
  detail::check_schema_version(j, "state");
  McmcState s;
  detail::get_if(j, "omega", s.omega, "state");
  detail::get_if(j, "w_star", s.w_star, "state");
  detail::get_if(j, "log_alpha", s.log_alpha, "state");
  detail::get_if(j, "sigma", s.sigma, "state");
  detail::get_if(j, "tau", s.tau, "state");
  detail::get_if(j, "latent", s.latent, "state");
  detail::get_if(j, "m", s.m, "state");
  return s;
}

/// Provenance of a simulated graph.
inline json sidecar_json(const SimConfig& cfg, const UndirectedGraph& g) {
  return {{"schema_version", kSchemaVersion},
          {"generator", "ggpgraph"},
          {"version", kVersion},
          {"alpha", cfg.params.alpha()},
          {"sigma", cfg.params.sigma()},
          {"tau", cfg.params.tau()},
          {"truncation_eps", cfg.truncation_eps},
          {"seed", cfg.seed},
          {"path", to_string(cfg.path)},
          {"include_self_loops", cfg.include_self_loops},
          {"n_nodes", g.n_nodes()},
          {"n_edges", g.n_edges()},
          {"graph_hash", graph_hash(g)}};
}

inline json to_json(const SparsityTestResult& r, double runtime_seconds) {
  json j = {{"schema_version", kSchemaVersion},
            {"p_sparse", r.p_sparse},
            {"ci_sigma", {r.ci_sigma.lo, r.ci_sigma.hi}},
            {"ci_level", 0.99},
            {"n_draws", r.n_draws},
            {"psrf_warning", r.psrf_warning},
            {"runtime", runtime_seconds}};
  j["max_psrf"] = std::isnan(r.max_psrf) ? json(nullptr) : json(r.max_psrf);
  return j;
}

inline void write_json(const json& j, const std::string& path) {
  auto out = detail::open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw io_error("write failure on '" + path + "'");
}

}  // namespace ggpgraph

#endif  // GGPGRAPH_IO_HPP
