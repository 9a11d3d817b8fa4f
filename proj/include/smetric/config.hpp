#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smetric/rough.hpp"

namespace smetric {

struct SpaceSpec {
  SMetricKind kind = SMetricKind::NormSum;
  NormKind norm = NormKind::Euclidean;
  int dim = 2;
};

/// One [analysis] block. Empty schedule fields fall back to the standard
/// (or named) schedule via resolve_schedules.
struct AnalysisSpec {
  std::string type;
  std::vector<Point> candidates;
  std::vector<double> rs;
  std::vector<double> eps;
  std::vector<std::uint64_t> ns;
  std::string schedule = "standard";  // standard | smoke
  int config_line = 0;                // line of the [analysis] header
  int candidates_line = 0;
};

struct OutputSpec {
  std::string format = "csv";  // csv | json
  std::string path;            // empty writes to stdout
};

struct LimitSetSpec {
  double r = 0;
  std::optional<double> step;
  std::optional<Region> region;
  std::vector<double> eps;
  std::vector<std::uint64_t> ns;
  std::string schedule = "standard";
  int config_line = 0;
};

struct RunConfig {
  SpaceSpec space;
  std::string family_expr;
  int family_line = 0;
  std::vector<AnalysisSpec> analyses;
  OutputSpec output;
  std::optional<LimitSetSpec> limitset;
};

/// The analysis kinds the `run` subcommand understands.
extern const std::vector<std::string> kAnalysisKinds;

/// Parses the sectioned key=value format:
///
///   [space]                 kind, norm, dim
///   [sequence]              family = <family expression>
///   [analysis]              type, candidates, r, eps, ns, schedule
///   [output]                format, path
///   [limitset]              r, step, region, eps, ns, schedule
///
/// `#` starts a comment, [analysis] may repeat, candidates and region use
/// "(a, b)" tuples separated by ";". Throws ConfigError carrying the 1-based
/// line number of the offending line.
RunConfig parse_run_config(std::string_view text);

SMetric build_space(const SpaceSpec& spec);

/// "(a, b)" with at least one coordinate.
Point parse_point(std::string_view text);

Schedules resolve_schedules(const AnalysisSpec& spec);
Schedules resolve_schedules(const LimitSetSpec& spec);

/// Dimension cross-checks that need the built family; throws ConfigError
/// pointing at the offending config lines.
void validate_dimensions(const RunConfig& config, const SequenceFamily& family);

}  // namespace smetric
