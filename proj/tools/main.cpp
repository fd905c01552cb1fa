#include "mdesc/cut.hpp"
#include "mdesc/decomp.hpp"
#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/glue.hpp"
#include "mdesc/io.hpp"
#include "mdesc/parallel.hpp"
#include "mdesc/sdp.hpp"
#include "mdesc/single_scale.hpp"
#include "mdesc/suite.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

using namespace mdesc;

namespace {

struct Global {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double tol = 1e-6;
};

ZeroSetKind parse_ensemble(const std::string& name) {
  return name == "partition" ? ZeroSetKind::Partition : ZeroSetKind::Arv;
}

int cmd_gen(const Global& g, const std::string& kind, int a, int b, bool as_cut, const std::string& out) {
  std::string text;
  if (as_cut) {
    Graph graph;
    if (kind == "hypercube") graph = hypercube_graph(a);
    else if (kind == "cycle") graph = cycle_graph(a);
    else if (kind == "path") graph = path_graph(a);
    else if (kind == "grid") graph = grid_graph(a, b);
    else if (kind == "star") graph = star_graph(a);
    else throw Error(ErrorKind::InvalidArgument, "no graph for kind " + kind);
    text = cut_instance_to_json(uniform_demand_instance(graph));
  } else {
    text = metric_to_json(generate(kind, a, b, g.seed));
  }
  if (out.empty()) std::cout << text;
  else write_file_atomic(out, text);
  return 0;
}

int cmd_embed(const Global& g, const std::string& input, const std::string& ensemble, int samples,
              const std::string& out, const std::string& report) {
  const MetricSpace m = metric_from_json(read_file(input));
  ProviderConfig pc;
  pc.kind = parse_ensemble(ensemble);
  const SingleScaleProvider provider(m, pc, derive_seed(g.seed, "embed/provider"));
  PipelineConfig cfg;
  cfg.samples = samples;
  const PipelineResult r = full_embedding(m, provider, cfg, derive_seed(g.seed, "embed/pipeline"));
  CsvTable table({"stage", "dim", "lip", "colip", "distortion"});
  for (const auto& s : r.stages)
    table.add_row({std::to_string(s.stage), std::to_string(s.dim), format_real(s.lip),
                   format_real(s.colip), format_real(s.distortion)});
  table.add_row({"total", std::to_string(r.embedding.dim()), format_real(r.total.lip),
                 format_real(r.total.colip), format_real(r.total.distortion)});
  if (!out.empty()) write_file_atomic(out, embedding_to_json(r.embedding));
  if (!report.empty()) write_file_atomic(report, table.str());
  fmt::print("alpha_hat {}\ndim {}\ndistortion {}\n", format_real(r.alpha_hat), r.embedding.dim(),
             format_real(r.total.distortion));
  for (const auto& w : r.warnings) fmt::print(stderr, "warning: {}\n", w);
  return 0;
}

int cmd_distortion(const Global& g, const std::string& input, const std::vector<int>& subset,
                   const std::string& out, const std::string& dump) {
  const MetricSpace m = metric_from_json(read_file(input));
  SdpOptions o;
  o.tol = g.tol;
  const MinDistortionResult r = min_distortion_embedding(m, subset, o);
  fmt::print("epsilon {}\ndistortion {}\nstatus {}\n", format_real(r.epsilon), format_real(r.distortion),
             to_string(r.solution.status));
  if (!out.empty()) write_file_atomic(out, embedding_to_json(r.embedding));
  if (!dump.empty()) write_file_atomic(dump, sdp_solution_to_json(r.solution));
  return 0;
}

int cmd_cut(const Global& g, const std::string& input, bool brute, int directions,
            const std::string& report) {
  const CutInstance inst = cut_instance_from_json(read_file(input));
  RoundConfig rc;
  rc.directions = directions;
  rc.sdp.tol = g.tol;
  const RoundResult r = round_sdp(inst, rc, derive_seed(g.seed, "cut/round"));
  double phi_star = std::numeric_limits<double>::quiet_NaN();
  if (brute) phi_star = brute_force_optimum(inst).phi;
  CsvTable table({"seed", "sdp_value", "epsilon", "lambda_measured", "phi_alg", "phi_star", "ratio"});
  table.add_row({std::to_string(g.seed), format_real(r.trace.sdp_value), format_real(r.trace.epsilon),
                 format_real(r.trace.lambda), format_real(r.phi), brute ? format_real(phi_star) : "",
                 brute ? format_real(r.phi / phi_star) : format_real(r.phi / r.trace.sdp_value)});
  if (!report.empty()) write_file_atomic(report, table.str());
  std::string side;
  for (int v = 0; v < inst.n; ++v)
    if (r.cut[v]) side += (side.empty() ? "" : ",") + std::to_string(v);
  fmt::print("cut {}\nphi_alg {}\nsdp_value {}\n", side, format_real(r.phi), format_real(r.trace.sdp_value));
  if (brute) fmt::print("phi_star {}\n", format_real(phi_star));
  return 0;
}

int cmd_zeroset(const Global& g, const std::string& input, const std::string& ensemble, double delta,
                int samples, double sigma, double p, const std::string& report) {
  const MetricSpace m = metric_from_json(read_file(input));
  const std::uint64_t seed = derive_seed(g.seed, "zeroset");
  ArvConfig arv;
  arv.sigma = sigma;
  const ZeroSetDistribution dist = parse_ensemble(ensemble) == ZeroSetKind::Arv
                                       ? arv_zero_set_family(m, delta, arv, seed)
                                       : partition_zero_sets(m, delta, seed);
  const SpreadingEstimate est = estimate_zeta(m, dist, p, samples);
  CsvTable table({"x", "y", "delta", "empirical_p", "zeta"});
  for (const auto& s : est.pairs)
    table.add_row({std::to_string(s.x), std::to_string(s.y), format_real(delta), format_real(s.empirical_p),
                   format_real(s.zeta)});
  if (!report.empty()) write_file_atomic(report, table.str());
  fmt::print("zeta {}\npairs {}\n", format_real(est.zeta), est.pairs.size());
  return 0;
}

int cmd_suite(const Global& g, const std::vector<int>& criteria, const std::vector<std::string>& instances,
              int samples, const std::string& out_dir) {
  SuiteConfig cfg;
  cfg.seed = g.seed;
  cfg.tol = g.tol;
  cfg.samples = samples;
  cfg.criteria = criteria;
  cfg.instances = instances;
  const SuiteReport report = run_suite(cfg);
  std::filesystem::create_directories(out_dir);
  write_file_atomic(std::filesystem::path(out_dir) / "suite.csv", report.csv());
  write_file_atomic(std::filesystem::path(out_dir) / "suite.json", report.json_summary());
  for (const auto& c : report.criteria)
    fmt::print("{} {} {} ({} rows, {} failing)\n", c.pass() ? "PASS" : "FAIL", c.id, c.name, c.rows,
               c.failures);
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-descent: negative-type embeddings and sparsest cut rounding"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--tol", g.tol, "solver tolerance")->check(CLI::PositiveNumber);

  std::string kind, input, out, report, ensemble = "arv", dump, out_dir = "suite_report";
  int a = 1, b = 1, samples = 200, directions = 0;
  bool as_cut = false, brute = false;
  double delta = 1.0, sigma = 0.25, p = 0.125;
  std::vector<int> subset, criteria;
  std::vector<std::string> instances;

  auto* gen = app.add_subcommand("gen", "generate a metric or a uniform-demand cut instance");
  gen->add_option("--kind", kind, "hypercube|cycle|path|grid|random_l1|uniform|star")->required();
  gen->add_option("--a", a, "first size parameter (d, n or rows)");
  gen->add_option("--b", b, "second size parameter (columns or dimension)");
  gen->add_flag("--cut", as_cut, "emit the graph as a cut instance");
  gen->add_option("--out", out, "output JSON (stdout when omitted)");

  auto* embed = app.add_subcommand("embed", "full multi-scale embedding");
  embed->add_option("--input", input, "metric JSON")->required()->check(CLI::ExistingFile);
  embed->add_option("--ensemble", ensemble)->check(CLI::IsMember({"arv", "partition"}));
  embed->add_option("--samples", samples, "samples per random map")->check(CLI::PositiveNumber);
  embed->add_option("--out", out, "embedding JSON");
  embed->add_option("--report", report, "per-stage CSV");

  auto* dist = app.add_subcommand("distortion", "minimum-distortion Euclidean embedding by SDP");
  dist->add_option("--input", input, "metric JSON")->required()->check(CLI::ExistingFile);
  dist->add_option("--subset", subset, "indices of X")->delimiter(',');
  dist->add_option("--out", out, "embedding JSON");
  dist->add_option("--dump", dump, "solver state JSON");

  auto* cut = app.add_subcommand("cut", "sparsest cut by SDP rounding");
  cut->add_option("--input", input, "instance JSON")->required()->check(CLI::ExistingFile);
  cut->add_flag("--brute-force", brute, "also compute the exact optimum");
  cut->add_option("--directions", directions, "sign vectors (0 = ceil(20 log2 n))");
  cut->add_option("--report", report, "CSV report");

  auto* zs = app.add_subcommand("zeroset", "spreading of random zero sets");
  zs->add_option("--input", input, "metric JSON")->required()->check(CLI::ExistingFile);
  zs->add_option("--ensemble", ensemble)->check(CLI::IsMember({"arv", "partition"}));
  zs->add_option("--delta", delta, "scale")->check(CLI::PositiveNumber);
  zs->add_option("--samples", samples, "draws")->check(CLI::Range(100, 100000000));
  zs->add_option("--sigma", sigma, "ARV separation constant")->check(CLI::Range(0.0, 1.0));
  zs->add_option("--p", p, "target probability")->check(CLI::Range(0.0, 1.0));
  zs->add_option("--report", report, "per-pair CSV");

  auto* suite = app.add_subcommand("suite", "run the acceptance battery");
  suite->add_option("--criteria", criteria, "criteria 1..9 (default all)")->delimiter(',');
  suite->add_option("--instances", instances, "extra instances, e.g. hypercube(3)")->delimiter(';');
  suite->add_option("--samples", samples, "samples per random map")->check(CLI::PositiveNumber);
  suite->add_option("--out-dir", out_dir, "directory for suite.csv and suite.json");
  suite->add_flag("--empty", "run no criteria unless listed");

  CLI11_PARSE(app, argc, argv);
  set_thread_count(g.threads);
  try {
    if (*gen) return cmd_gen(g, kind, a, b, as_cut, out);
    if (*embed) return cmd_embed(g, input, ensemble, samples, out, report);
    if (*dist) return cmd_distortion(g, input, subset, out, dump);
    if (*cut) return cmd_cut(g, input, brute, directions, report);
    if (*zs) return cmd_zeroset(g, input, ensemble, delta, samples, sigma, p, report);
    if (*suite) {
      if (criteria.empty() && suite->count("--empty") == 0 && instances.empty()) criteria = all_criteria();
      return cmd_suite(g, criteria, instances, samples, out_dir);
    }
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}: {}\n", to_string(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
