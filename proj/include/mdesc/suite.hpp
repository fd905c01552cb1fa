#pragma once

#include "mdesc/metric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdesc {

/// Parses "hypercube(d)", "cycle(n)", "path(n)", "grid(a,b)",
/// "random_l1(n,dim,seed)", "uniform(n)", "k(a,b)" (complete bipartite
/// shortest-path metric). Throws ParseError.
MetricSpace metric_from_spec(const std::string& spec);

struct SuiteConfig {
  std::uint64_t seed = 1;
  double tol = 1e-6;
  /// T for the pipeline's random maps.
  int samples = 200;
  /// Acceptance criteria to run (1..9).
  std::vector<int> criteria;
  /// Extra instances, each checked for negative type, the growth-sum bound,
  /// c2 and the pipeline distortion.
  std::vector<std::string> instances;
};

/// All acceptance criteria that produce report rows.
std::vector<int> all_criteria();

struct SuiteRow {
  /// 0 for rows of the extra instance list.
  int criterion = 0;
  std::string instance;
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct CriterionSummary {
  int id = 0;
  std::string name;
  int rows = 0;
  int failures = 0;
  bool pass() const { return failures == 0; }
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteRow> rows;
  std::vector<CriterionSummary> criteria;

  bool pass() const;
  /// Columns criterion, instance, check, value, bound, pass.
  std::string csv() const;
  std::string json_summary() const;
};

std::string criterion_name(int id);

/// Rows of one criterion. Module errors become failing rows named
/// "error:<kind>" and the run continues.
std::vector<SuiteRow> run_criterion(int id, const SuiteConfig& config);

/// Rows for one extra instance.
std::vector<SuiteRow> run_instance_checks(const std::string& spec, const SuiteConfig& config);

/// Criteria in the given order, then the extra instances, each in its own
/// work item; output order follows the config regardless of threads.
SuiteReport run_suite(const SuiteConfig& config);

}  // namespace mdesc
