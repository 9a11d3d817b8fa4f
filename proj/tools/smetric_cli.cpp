// Command-line front end: run config-driven analyses, run the verification
// battery, estimate densities and rough limit sets. Exit codes: 0 the command
// ran (verdicts do not affect it), 1 a verification property failed, 2 config
// error, 3 runtime error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smetric/config.hpp"
#include "smetric/report.hpp"
#include "smetric/verify.hpp"

namespace {

using namespace smetric;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_report(const OutputSpec& out, std::span<const ReportRow> rows) {
  const std::string text = out.format == "json" ? to_json(rows) : to_csv(rows);
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + out.path);
  f << text;
  if (!f) throw Error("write failed: " + out.path);
  std::cerr << "wrote " << rows.size() << " rows to " << out.path << "\n";
}

void append(std::vector<ReportRow>& all, std::vector<ReportRow> rows) {
  for (ReportRow& r : rows) all.push_back(std::move(r));
}

std::vector<ReportRow> run_analysis(const SMetric& space, const SequenceFamily& family,
                                    const AnalysisSpec& spec) {
  const Schedules sched = resolve_schedules(spec);
  const std::uint64_t n_max = sched.ns.back();
  std::vector<ReportRow> rows;
  if (spec.type == "convergence") {
    std::vector<double> rs = spec.rs.empty() ? std::vector<double>{0.0} : spec.rs;
    for (const Point& cand : spec.candidates)
      for (double r : rs) {
        auto v = r == 0.0
                     ? is_convergent_prefix(space, family, cand, sched.eps, n_max)
                     : rough_limit_check(space, family, cand, r, sched.eps, n_max);
        append(rows, rows_from(spec.type, family.name(), v));
      }
  } else if (spec.type == "cauchy") {
    append(rows, rows_from(spec.type, family.name(),
                           is_cauchy_prefix(space, family, sched.eps, n_max)));
  } else if (spec.type == "boundedness") {
    append(rows, rows_from(spec.type, family.name(),
                           is_s_bounded_prefix(space, family, n_max)));
  } else if (spec.type == "st_convergence") {
    for (const Point& cand : spec.candidates)
      append(rows, rows_from(spec.type, family.name(),
                             st_converges(space, family, cand, sched.eps, sched.ns,
                                          kernels::Exec::Parallel, EvidenceMode::Full)));
  } else if (spec.type == "st_cauchy") {
    append(rows, rows_from(spec.type, family.name(),
                           st_cauchy(space, family, sched.eps, sched.ns), sched.ns));
  } else if (spec.type == "st_boundedness") {
    std::vector<Point> refs = spec.candidates;
    if (refs.empty())
      refs.push_back(prefix_medoid(space, family, std::min<std::uint64_t>(n_max, 4096)));
    for (const Point& ref : refs)
      append(rows, rows_from(spec.type, family.name(),
                             st_bounded(space, family, ref, sched.ns), sched.ns));
  } else if (spec.type == "rough_st_convergence") {
    for (const Point& cand : spec.candidates)
      for (double r : spec.rs)
        append(rows,
               rows_from(spec.type, family.name(),
                         rough_st_converges(space, family, cand, r, sched.eps, sched.ns,
                                            kernels::Exec::Parallel, EvidenceMode::Full)));
  } else if (spec.type == "cluster") {
    for (const Point& cand : spec.candidates)
      append(rows, rows_from(spec.type, family.name(),
                             cluster_point_check(space, family, cand, sched.eps, sched.ns),
                             sched.ns));
  } else {
    // parse_run_config rejects unknown kinds; guard against drift.
    throw ConfigError("unknown analysis kind: " + spec.type, spec.config_line);
  }
  return rows;
}

int cmd_run(const std::string& config_path) {
  RunConfig config = parse_run_config(read_file(config_path));
  SequenceFamily family = parse_family(config.family_expr);
  validate_dimensions(config, family);
  SMetric space = build_space(config.space);
  std::vector<ReportRow> rows;
  for (const AnalysisSpec& spec : config.analyses)
    append(rows, run_analysis(space, family, spec));
  write_report(config.output, rows);
  return 0;
}

int cmd_verify(const std::string& scale, const std::string& out_path, bool with_broken) {
  VerifyOptions opt;
  opt.scale = scale == "full" ? VerifyScale::Full : VerifyScale::Smoke;
  opt.with_broken_space = with_broken;
  auto results = run_verification(opt);
  std::cout << property_lines(results);
  const std::uint64_t n_max =
      (opt.scale == VerifyScale::Full ? Schedules::standard() : Schedules::smoke())
          .ns.back();
  if (!out_path.empty()) {
    OutputSpec out;
    out.path = out_path;
    write_report(out, rows_from(results, n_max));
  }
  for (const PropertyResult& r : results)
    if (r.status == PropertyStatus::Fail) return 1;
  return 0;
}

int cmd_density(const std::string& expr, std::vector<std::uint64_t> ns) {
  IndexSet set = parse_index_set(expr);
  if (ns.empty()) ns = Schedules::standard().ns;
  try {
    validate_n_schedule(ns);
  } catch (const Error& e) {
    throw ConfigError(std::string("--n: ") + e.what());
  }
  DensityEstimate est = natural_density(set, ns);
  std::cout << to_csv(rows_from("density", expr, est));
  return 0;
}

int cmd_limitset(const std::string& config_path) {
  RunConfig config = parse_run_config(read_file(config_path));
  if (!config.limitset)
    throw ConfigError("limitset command needs a [limitset] section");
  SequenceFamily family = parse_family(config.family_expr);
  validate_dimensions(config, family);
  SMetric space = build_space(config.space);
  const LimitSetSpec& spec = *config.limitset;
  GridOptions options;
  options.region = spec.region;
  options.step = spec.step;
  const Schedules sched = resolve_schedules(spec);
  RoughLimitSet set = estimate_rough_limit_set(space, family, spec.r, options, sched);
  write_report(config.output, rows_from(family.name(), set, sched.ns.back()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-metric sequence analysis harness"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "Execute the analyses in a config file");
  run->add_option("config", run_config, "config file path")->required();

  std::string scale = "smoke";
  std::string verify_out;
  bool with_broken = false;
  CLI::App* verify = app.add_subcommand("verify", "Run the theorem verification battery");
  verify->add_option("--scale", scale, "schedule scale")
      ->check(CLI::IsMember({"smoke", "full"}));
  verify->add_option("--out", verify_out, "also write the results as CSV");
  verify->add_flag("--with-broken-space", with_broken,
                   "add an axiom-violating space to the roster");

  std::string density_expr;
  std::vector<std::uint64_t> density_ns;
  CLI::App* density =
      app.add_subcommand("density", "Estimate the natural density of an index set");
  density->add_option("expr", density_expr, "index set expression")->required();
  density->add_option("--n", density_ns, "prefix length schedule")->delimiter(',');

  std::string limitset_config;
  CLI::App* limitset =
      app.add_subcommand("limitset", "Estimate a rough statistical limit set");
  limitset->add_option("config", limitset_config, "config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_config);
    if (verify->parsed()) return cmd_verify(scale, verify_out, with_broken);
    if (density->parsed()) return cmd_density(density_expr, density_ns);
    if (limitset->parsed()) return cmd_limitset(limitset_config);
  } catch (const smetric::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
