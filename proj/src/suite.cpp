#include "mdesc/suite.hpp"

#include "mdesc/cut.hpp"
#include "mdesc/decomp.hpp"
#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/glue.hpp"
#include "mdesc/io.hpp"
#include "mdesc/parallel.hpp"
#include "mdesc/rng.hpp"
#include "mdesc/sdp.hpp"
#include "mdesc/single_scale.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <regex>

namespace mdesc {

namespace {

using Rows = std::vector<SuiteRow>;

// runs body, turning a module error into a failing row
void guarded(Rows& rows, int criterion, const std::string& instance,
             const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    rows.push_back({criterion, instance, "error:" + std::string(to_string(e.kind())), 0.0, 0.0, false});
  }
}

std::uint64_t stream(const SuiteConfig& c, const std::string& key) { return derive_seed(c.seed, key); }

SdpOptions sdp_options(const SuiteConfig& c) {
  SdpOptions o;
  o.tol = c.tol;
  return o;
}

std::vector<std::string> core_instances() {
  return {"hypercube(2)", "hypercube(3)", "hypercube(4)", "cycle(4)", "cycle(5)", "cycle(6)",
          "cycle(7)",     "cycle(8)",     "path(6)",      "grid(2,3)", "k(2,3)"};
}

std::string random_l1_spec(const SuiteConfig& c, int n, int dim, const std::string& key) {
  return fmt::format("random_l1({},{},{})", n, dim, stream(c, key));
}

double max_growth_excess(const MetricSpace& m, int a) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < m.size(); ++x) worst = std::max(worst, growth_sum(m, x, a));
  return worst;
}

// 1: cube distortion
Rows criterion_cube_distortion(const SuiteConfig& c) {
  Rows rows;
  for (int d : {2, 3}) {
    const std::string name = fmt::format("hypercube({})", d);
    guarded(rows, 1, name, [&] {
      const auto r = min_distortion_embedding(hypercube(d), {}, sdp_options(c));
      rows.push_back({1, name, "c2", r.distortion, std::sqrt(double(d)),
                      std::abs(r.distortion - std::sqrt(double(d))) <= 1e-2});
    });
  }
  return rows;
}

// 2: negative-type oracle
Rows criterion_negative_type(const SuiteConfig& c) {
  std::vector<std::string> names = {"hypercube(2)", "hypercube(3)", "hypercube(4)", "cycle(4)",
                                    "cycle(5)",     "cycle(6)",     "cycle(7)",     "cycle(8)"};
  for (int i = 0; i < 50; ++i)
    names.push_back(random_l1_spec(c, 6 + i % 11, 1 + i % 5, fmt::format("negtype/{}", i)));
  Rows rows;
  for (const auto& name : names)
    guarded(rows, 2, name, [&] {
      const auto v = is_negative_type(metric_from_spec(name));
      rows.push_back({2, name, "negative_type", v.min_eigenvalue, 0.0, v.is_negative_type});
    });
  guarded(rows, 2, "k(2,3)", [&] {
    const MetricSpace m = metric_from_spec("k(2,3)");
    const auto v = is_negative_type(m);
    rows.push_back({2, "k(2,3)", "not_negative_type", v.min_eigenvalue, 0.0, !v.is_negative_type});
    const bool has = v.witness.size() == m.size();
    const double sum = has ? std::abs(v.witness.sum()) / v.witness.lpNorm<1>() : 1.0;
    const double form = has ? v.witness.dot(m.matrix() * v.witness) : 0.0;
    rows.push_back({2, "k(2,3)", "witness_sum", sum, 1e-9, has && sum <= 1e-9});
    rows.push_back({2, "k(2,3)", "witness_form", form, 0.0, has && form > 0.0});
  });
  return rows;
}

std::vector<std::string> growth_instances(const SuiteConfig& c) {
  auto names = core_instances();
  names.push_back(random_l1_spec(c, 16, 4, "random_l1/16"));
  names.push_back(random_l1_spec(c, 32, 4, "random_l1/32"));
  return names;
}

// 3: growth-sum identity
Rows criterion_growth_sum(const SuiteConfig& c) {
  Rows rows;
  for (const auto& name : growth_instances(c))
    guarded(rows, 3, name, [&] {
      const MetricSpace m = metric_from_spec(name);
      for (int a = 1; a <= 4; ++a) {
        const double bound = a * std::log2(double(m.size()));
        const double v = max_growth_excess(m, a);
        rows.push_back({3, name, fmt::format("growth_sum_a{}", a), v, bound, v <= bound * (1 + 1e-12)});
      }
    });
  return rows;
}

// 4: truncation map
Rows criterion_truncation(const SuiteConfig& c) {
  Rows rows(200);
  const double tau = 1.0;
  parallel_for(100, [&](std::size_t i) {
    const std::string name = fmt::format("points5d/{}", i);
    Engine e = make_engine(stream(c, "truncation/" + std::to_string(i)));
    PointConfig p{Eigen::MatrixXd(16, 5)};
    for (int r = 0; r < 16; ++r)
      for (int k = 0; k < 5; ++k) p.coords(r, k) = uniform_real(e, 0.0, 1.0);
    Rows local;
    guarded(local, 4, name, [&] {
      const PointConfig g = truncation_map(p, tau);
      double pair = 0.0, norm = 0.0;
      for (int x = 0; x < 16; ++x) {
        norm = std::max(norm, std::abs(g.coords.row(x).norm() - tau));
        for (int y = x + 1; y < 16; ++y) {
          const double cap = std::min(tau, p.distance(x, y));
          const double dg = g.distance(x, y);
          pair = std::max({pair, 0.5 * cap - dg, dg - cap});
        }
      }
      local.push_back({4, name, "pair_bounds", pair, 1e-9 * tau, pair <= 1e-9 * tau});
      local.push_back({4, name, "norm", norm, 1e-9 * tau, norm <= 1e-9 * tau});
    });
    if (local.size() == 1) local.push_back(local[0]);
    rows[2 * i] = local[0];
    rows[2 * i + 1] = local[1];
  });
  return rows;
}

// 5: zero-set spreading
Rows criterion_spreading(const SuiteConfig& c) {
  Rows rows;
  const int draws = 5000;
  const double p = 1.0 / 8.0;
  const double bound = p - 3.0 * std::sqrt(p * (1 - p) / draws);
  for (const std::string name : {"cycle(8)", "hypercube(4)"})
    guarded(rows, 5, name, [&] {
      const MetricSpace m = metric_from_spec(name);
      const double alpha = estimate_alpha(m, 200, stream(c, "spreading/alpha/" + name));
      const ScaleRange scales = dyadic_scales(m);
      for (int k = scales.lo; k <= scales.hi + 1; ++k) {
        const double delta = std::ldexp(1.0, k);
        if (m.diameter() < delta) continue;
        const auto dist = partition_zero_sets(m, delta, stream(c, fmt::format("spreading/{}/{}", name, k)));
        const auto sets = dist.draw_many(draws);
        double worst = 1.0;
        for (int x = 0; x < m.size(); ++x)
          for (int y = 0; y < m.size(); ++y) {
            if (m(x, y) < delta) continue;
            int hits = 0;
            for (const auto& z : sets)
              hits += std::binary_search(z.begin(), z.end(), y) &&
                      m.distance_to_set(x, z) >= delta / alpha;
            worst = std::min(worst, double(hits) / draws);
          }
        rows.push_back({5, name, fmt::format("spread_delta_{}", format_real(delta)), worst, bound,
                        worst >= bound});
      }
    });
  return rows;
}

// 1-Lipschitz maps of the cube: bit coordinates mixed per scale
std::map<int, Embedding> cube_maps(int d, const ScaleRange& range) {
  const int n = 1 << d;
  std::map<int, Embedding> maps;
  for (int s = range.lo; s <= range.hi; ++s) {
    Eigen::MatrixXd e(n, d);
    for (int x = 0; x < n; ++x)
      for (int k = 0; k < d; ++k) e(x, k) = ((x >> (((k + s) % d + d) % d)) & 1) ? 0.5 : 0.0;
    maps.emplace(s, Embedding(e, 1.0));
  }
  return maps;
}

// 6: glue bounds
Rows criterion_glue(const SuiteConfig&) {
  Rows rows;
  const MetricSpace m = hypercube(4);
  for (GlueConfig g : {GlueConfig{1.0, 1.0}, GlueConfig{4.0, 6.0}, GlueConfig{16.0, 24.0}}) {
    const std::string name = fmt::format("hypercube(4)/A={},B={}", g.A, g.B);
    guarded(rows, 6, name, [&] {
      const ScaleRange r = glue_scale_range(m, g);
      const auto maps = cube_maps(4, r);
      const Embedding e = glue(m, maps, g);
      const double lip = measured_lipschitz(m, e);
      const double bound = glue_lip_bound(m.size(), g);
      rows.push_back({6, name, "lip", lip, bound, lip <= bound});
      double worst = std::numeric_limits<double>::infinity();
      for (int x = 0; x < m.size(); ++x)
        for (int s = r.lo; s <= r.hi; ++s) {
          const int outer = ball_size(m, x, std::ldexp(2.0 * g.A, s));
          const int inner = ball_size(m, x, std::ldexp(1.0, s) / g.B);
          const double levels = std::floor(std::log2(double(outer) / inner));
          if (levels < 1) continue;
          for (int y = 0; y < m.size(); ++y) {
            if (y == x) continue;
            const double lower = 0.25 * std::sqrt(levels) *
                                 std::min(std::ldexp(1.0, s) / g.B, maps.at(s).distance(x, y));
            if (lower > 0) worst = std::min(worst, e.distance(x, y) / lower);
          }
        }
      rows.push_back({6, name, "lower_bound_ratio", worst, 1.0, worst >= 1.0 - 1e-9});
    });
  }
  return rows;
}

void pipeline_rows(Rows& rows, int criterion, const std::string& name, const SuiteConfig& c) {
  const MetricSpace m = metric_from_spec(name);
  const auto sdp = min_distortion_embedding(m, {}, sdp_options(c));
  rows.push_back({criterion, name, "c2", sdp.distortion, 0.0, sdp.solution.status == SdpStatus::Optimal});
  const SingleScaleProvider provider(m, {}, stream(c, "pipeline/provider/" + name));
  PipelineConfig pc;
  pc.samples = c.samples;
  const auto result = full_embedding(m, provider, pc, stream(c, "pipeline/" + name));
  rows.push_back({criterion, name, "pipeline_distortion", result.total.distortion,
                  3.0 * sdp.distortion, result.total.distortion <= 3.0 * sdp.distortion});
}

// 7: full pipeline
Rows criterion_pipeline(const SuiteConfig& c) {
  const std::vector<std::string> names = {"hypercube(2)", "hypercube(3)", "hypercube(4)",
                                          random_l1_spec(c, 16, 4, "random_l1/16"),
                                          random_l1_spec(c, 32, 4, "random_l1/32")};
  std::vector<Rows> parts(names.size());
  parallel_for(names.size(), [&](std::size_t i) {
    guarded(parts[i], 7, names[i], [&] { pipeline_rows(parts[i], 7, names[i], c); });
  });
  Rows rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

// 8: sparsest cut
Rows criterion_sparsest_cut(const SuiteConfig& c) {
  Rows rows;
  RoundConfig rc;
  rc.sdp = sdp_options(c);
  const std::vector<std::pair<std::string, Graph>> graphs = {
      {"cycle(4)", cycle_graph(4)}, {"cycle(6)", cycle_graph(6)}, {"path(6)", path_graph(6)},
      {"grid(2,3)", grid_graph(2, 3)}};
  for (const auto& [name, graph] : graphs)
    guarded(rows, 8, name, [&] {
      const CutInstance inst = uniform_demand_instance(graph);
      const double phi_star = brute_force_optimum(inst).phi;
      const RoundResult r = round_sdp(inst, rc, stream(c, "round/" + name));
      rows.push_back({8, name, "sdp_value", r.trace.sdp_value, phi_star + 1e-4,
                      r.trace.sdp_value <= phi_star + 1e-4});
      rows.push_back({8, name, "phi_star", phi_star, r.phi + 1e-4, phi_star <= r.phi + 1e-4});
      rows.push_back({8, name, "phi_alg_over_sdp", r.phi / r.trace.sdp_value,
                      r.trace.lambda * (1 + c.tol), r.trace.accounting_holds});
    });
  guarded(rows, 8, "cycle(4)", [&] {
    const CutInstance inst = uniform_demand_instance(cycle_graph(4));
    const double phi_star = brute_force_optimum(inst).phi;
    rows.push_back({8, "cycle(4)", "phi_star_exact", phi_star, 0.5, phi_star == 0.5});
    std::vector<double> phi(20);
    parallel_for(20, [&](std::size_t i) {
      phi[i] = round_sdp(inst, rc, stream(c, fmt::format("round/cycle(4)/{}", i))).phi;
    });
    const double worst = *std::max_element(phi.begin(), phi.end());
    const double hits = double(std::count(phi.begin(), phi.end(), 0.5)) / 20.0;
    rows.push_back({8, "cycle(4)", "phi_alg_max_20_seeds", worst, 2.0 / 3.0, worst <= 2.0 / 3.0});
    rows.push_back({8, "cycle(4)", "phi_alg_optimal_fraction", hits, 0.8, hits >= 0.8});
  });
  return rows;
}

// 9: cut decomposition
Rows criterion_decomposition(const SuiteConfig& c) {
  Rows rows(100);
  parallel_for(100, [&](std::size_t i) {
    Engine e = make_engine(stream(c, "decomposition/" + std::to_string(i)));
    const int n = 2 + static_cast<int>(uniform_index(e, 31));
    const int k = 1 + static_cast<int>(uniform_index(e, 8));
    Eigen::MatrixXd p(n, k);
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < k; ++j) p(r, j) = standard_normal(e);
    double diameter = 0.0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) diameter = std::max(diameter, (p.row(x) - p.row(y)).lpNorm<1>());
    if (diameter > 0) p /= diameter;
    const CutDecomposition d = cut_decomposition(p);
    double err = 0.0;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y)
        err = std::max(err, std::abs(decomposition_distance(d, x, y) - (p.row(x) - p.row(y)).lpNorm<1>()));
    rows[i] = {9, fmt::format("line_config/{}/n={},coords={}", i, n, k), "reconstruction_error", err,
               1e-12, err <= 1e-12};
  });
  return rows;
}

}  // namespace

MetricSpace metric_from_spec(const std::string& spec) {
  static const std::regex pattern(R"(^\s*([a-z_0-9]+)\s*\(\s*([0-9]+)\s*(?:,\s*([0-9]+)\s*)?(?:,\s*([0-9]+)\s*)?\)\s*$)");
  std::smatch match;
  if (!std::regex_match(spec, match, pattern))
    throw Error(ErrorKind::ParseError, "instance spec '" + spec + "' is not kind(args)");
  const std::string kind = match[1];
  std::vector<std::uint64_t> args;
  for (int g = 2; g <= 4; ++g)
    if (match[g].matched) args.push_back(std::stoull(match[g]));
  auto arg = [&](std::size_t i) -> std::uint64_t {
    if (i >= args.size()) throw Error(ErrorKind::ParseError, "instance spec '" + spec + "' lacks arguments");
    return args[i];
  };
  auto small = [&](std::size_t i) {
    const std::uint64_t v = arg(i);
    if (v > static_cast<std::uint64_t>(kMaxGeneratedPoints))
      throw Error(ErrorKind::TooLarge, "instance parameter too large in '" + spec + "'");
    return static_cast<int>(v);
  };
  if (kind == "k") return shortest_path_metric(complete_bipartite_graph(small(0), small(1)));
  if (kind == "random_l1") return random_l1(small(0), small(1), arg(2));
  const std::size_t needed = kind == "grid" ? 2 : 1;
  if (args.size() != needed) throw Error(ErrorKind::ParseError, "wrong argument count in '" + spec + "'");
  return generate(kind, small(0), needed == 2 ? small(1) : 0, 0);
}

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

std::string criterion_name(int id) {
  switch (id) {
    case 0: return "instances";
    case 1: return "cube_distortion";
    case 2: return "negative_type_oracle";
    case 3: return "growth_sum";
    case 4: return "truncation_map";
    case 5: return "zero_set_spreading";
    case 6: return "glue_bounds";
    case 7: return "pipeline_distortion";
    case 8: return "sparsest_cut";
    case 9: return "cut_decomposition";
    case 10: return "determinism";
  }
  return "unknown";
}

std::vector<SuiteRow> run_criterion(int id, const SuiteConfig& config) {
  switch (id) {
    case 1: return criterion_cube_distortion(config);
    case 2: return criterion_negative_type(config);
    case 3: return criterion_growth_sum(config);
    case 4: return criterion_truncation(config);
    case 5: return criterion_spreading(config);
    case 6: return criterion_glue(config);
    case 7: return criterion_pipeline(config);
    case 8: return criterion_sparsest_cut(config);
    case 9: return criterion_decomposition(config);
  }
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown criterion {}", id));
}

std::vector<SuiteRow> run_instance_checks(const std::string& spec, const SuiteConfig& config) {
  Rows rows;
  guarded(rows, 0, spec, [&] {
    const MetricSpace m = metric_from_spec(spec);
    const auto v = is_negative_type(m);
    rows.push_back({0, spec, "negative_type", v.is_negative_type ? 1.0 : 0.0, 1.0, true});
    double excess = -std::numeric_limits<double>::infinity();
    for (int a = 1; a <= 4; ++a)
      excess = std::max(excess, max_growth_excess(m, a) - a * std::log2(double(m.size())));
    rows.push_back({0, spec, "growth_sum_excess", excess, 0.0, excess <= 1e-12});
    pipeline_rows(rows, 0, spec, config);
  });
  return rows;
}

SuiteReport run_suite(const SuiteConfig& config) {
  for (int id : config.criteria)
    if (id < 1 || id > 9) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown criterion {}", id));
  const std::size_t items = config.criteria.size() + config.instances.size();
  std::vector<Rows> parts(items);
  parallel_for(items, [&](std::size_t i) {
    parts[i] = i < config.criteria.size()
                   ? run_criterion(config.criteria[i], config)
                   : run_instance_checks(config.instances[i - config.criteria.size()], config);
  });
  SuiteReport report;
  report.seed = config.seed;
  for (std::size_t i = 0; i < items; ++i) {
    const int id = i < config.criteria.size() ? config.criteria[i] : 0;
    if (report.criteria.empty() || report.criteria.back().id != id || id != 0)
      report.criteria.push_back({id, criterion_name(id), 0, 0});
    for (const auto& r : parts[i]) {
      report.criteria.back().rows += 1;
      report.criteria.back().failures += !r.pass;
      report.rows.push_back(r);
    }
  }
  return report;
}

bool SuiteReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
}

std::string SuiteReport::csv() const {
  CsvTable table({"criterion", "instance", "check", "value", "bound", "pass"});
  for (const auto& r : rows)
    table.add_row({std::to_string(r.criterion), r.instance, r.check, format_real(r.value),
                   format_real(r.bound), r.pass ? "1" : "0"});
  return table.str();
}

std::string SuiteReport::json_summary() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["rows"] = rows.size();
  j["pass"] = pass();
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : criteria)
    j["criteria"].push_back(
        {{"id", c.id}, {"name", c.name}, {"rows", c.rows}, {"failures", c.failures}, {"pass", c.pass()}});
  return j.dump(2) + "\n";
}

}  // namespace mdesc
