#include "smetric/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smetric {

std::string to_string(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::Pass: return "pass";
    case PropertyStatus::Fail: return "fail";
    case PropertyStatus::Skip: return "skip";
  }
  return "?";
}

const std::vector<std::string>& family_zoo() {
  static const std::vector<std::string> zoo = {
      "example3_1",
      "example4_1",
      "constant(3,-1)",
      "reciprocal(1,1; 1,0)",
      "reciprocal(0,0; 0,1)",
      "spike_on(squares; 5,5; 0,0)",
      "spike_on(residue(10,0); 9,9; 1,1)",
      "spike_on(cubes; 7,-7; -1,2)",
      "periodic((0,0),(3,4))",
      "periodic((2,2),(2,2),(5,5),(2,2))",
      "drift(1,0)",
      "perturb(example3_1; 1/n)",
      "perturb(constant(2,2); 2^-n)",
  };
  return zoo;
}

namespace {

using kernels::Exec;

struct NamedSpace {
  std::string name;
  SMetric space;
};

struct Ctx {
  VerifyOptions opt;
  Schedules sched;
  std::size_t samples = 0;
  SMetric space;  // the space every sequence analysis runs in
  std::vector<SequenceFamily> zoo;
  std::vector<NamedSpace> roster;   // axiom / symmetry roster
  std::vector<std::string> broken;  // roster entries whose axiom check failed
};

/// Collapses to 0 whenever the two norm legs sum below 10, so the
/// zero-iff-equal condition fails on plenty of random triples.
SMetric deadzone_space() {
  return SMetric::custom("deadzone_norm_sum",
                         [](const Point& x, const Point& y, const Point& z) {
                           double v = norm_l2(x - z) + norm_l2(y - z) - 10.0;
                           return v > 0 ? v : 0.0;
                         });
}

Ctx make_context(const VerifyOptions& opt) {
  Ctx ctx;
  ctx.opt = opt;
  ctx.sched = opt.scale == VerifyScale::Full ? Schedules::standard() : Schedules::smoke();
  ctx.samples = opt.scale == VerifyScale::Full ? 10000 : 2000;
  ctx.space = SMetric::norm_sum(NormKind::Euclidean);
  for (const std::string& expr : family_zoo()) ctx.zoo.push_back(parse_family(expr));
  ctx.roster.push_back({"norm_sum(euclidean)", SMetric::norm_sum(NormKind::Euclidean)});
  ctx.roster.push_back({"norm_sum(taxicab)", SMetric::norm_sum(NormKind::Taxicab)});
  ctx.roster.push_back({"norm_sum(max)", SMetric::norm_sum(NormKind::Max)});
  ctx.roster.push_back({"metric_sum(euclidean)", SMetric::metric_sum(NormKind::Euclidean)});
  if (opt.with_broken_space) ctx.roster.push_back({"deadzone_norm_sum", deadzone_space()});
  return ctx;
}

Point canonical_candidate(const Ctx& ctx, const SequenceFamily& fam) {
  if (fam.structure() && fam.structure()->known_st_limit)
    return *fam.structure()->known_st_limit;
  return prefix_medoid(ctx.space, fam,
                       std::min<std::uint64_t>(ctx.sched.ns.back(), 4096));
}

Point offset_point(const Point& p, double delta) {
  Point::Storage c;
  for (int i = 0; i < p.dim(); ++i) c.push_back(p[i] + delta);
  return Point(std::move(c));
}

std::string fmt(double v) { return format_number(v); }

PropertyResult guarded(const std::string& name,
                       const std::function<PropertyResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, PropertyStatus::Fail, std::string("error: ") + e.what()};
  }
}

// ---- properties ------------------------------------------------------------

PropertyResult prop_axioms(Ctx& ctx) {
  auto sample = random_quadruples(2, ctx.samples, -10.0, 10.0, ctx.opt.seed);
  std::size_t violations = 0;
  double worst = kAxiomTolerance;
  for (const NamedSpace& ns : ctx.roster) {
    AxiomReport rep = check_axioms(ns.space, sample);
    worst = std::min(worst, rep.worst_slack);
    if (!rep.pass()) {
      violations += rep.violations.size();
      ctx.broken.push_back(ns.name);
    }
  }
  std::ostringstream d;
  d << "spaces=" << ctx.roster.size() << " samples=" << ctx.samples
    << " violations=" << violations << " worst_slack=" << fmt(worst);
  if (!ctx.broken.empty()) {
    d << " failing=";
    for (std::size_t i = 0; i < ctx.broken.size(); ++i)
      d << (i ? "," : "") << ctx.broken[i];
  }
  return {"axioms", violations == 0 ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_symmetry(Ctx& ctx) {
  auto sample = random_quadruples(2, ctx.samples, -10.0, 10.0, ctx.opt.seed + 1);
  double worst = 0;
  std::size_t spaces = 0;
  for (const NamedSpace& ns : ctx.roster) {
    if (std::find(ctx.broken.begin(), ctx.broken.end(), ns.name) != ctx.broken.end())
      continue;  // axiom failures gate the rest of the battery for that space
    ++spaces;
    for (const Quadruple& q : sample)
      worst = std::max(worst, symmetry_defect(ns.space, q.x, q.y));
  }
  std::ostringstream d;
  d << "spaces=" << spaces << " pairs=" << ctx.samples << " max_defect=" << fmt(worst);
  return {"symmetry",
          worst <= kSymmetryTolerance ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_implication_chain(Ctx& ctx) {
  const auto& eps = ctx.sched.eps;
  const auto& ns = ctx.sched.ns;
  const std::uint64_t n_max = ns.back();
  std::size_t checks = 0, violations = 0;
  std::ostringstream bad;
  auto imply = [&](const std::string& fam, const char* what, Verdict from, Verdict to) {
    ++checks;
    if (from == Verdict::Holds && to != Verdict::Holds) {
      ++violations;
      bad << " " << fam << ":" << what;
    }
  };
  for (const SequenceFamily& fam : ctx.zoo) {
    Point cand = canonical_candidate(ctx, fam);
    auto conv = is_convergent_prefix(ctx.space, fam, cand, eps, n_max, ctx.opt.exec);
    auto stconv = st_converges(ctx.space, fam, cand, eps, ns, ctx.opt.exec,
                               EvidenceMode::StructuralFastPath);
    auto cauchy = is_cauchy_prefix(ctx.space, fam, eps, n_max, ctx.opt.exec, ctx.opt.seed);
    auto stcauchy = st_cauchy(ctx.space, fam, eps, ns, ctx.opt.exec);
    auto stbound = st_bounded(ctx.space, fam, cand, ns, ctx.opt.exec);
    auto rough = rough_limit_check(ctx.space, fam, cand, 1.0, eps, n_max, ctx.opt.exec);
    auto roughst = rough_st_converges(ctx.space, fam, cand, 1.0, eps, ns, ctx.opt.exec,
                                      EvidenceMode::StructuralFastPath);
    imply(fam.name(), "conv=>st", conv.verdict, stconv.verdict);
    imply(fam.name(), "st=>stCauchy", stconv.verdict, stcauchy.verdict);
    imply(fam.name(), "stCauchy=>stBounded", stcauchy.verdict, stbound.verdict);
    imply(fam.name(), "cauchy=>stCauchy", cauchy.verdict, stcauchy.verdict);
    imply(fam.name(), "rough=>roughSt", rough.verdict, roughst.verdict);
  }
  std::ostringstream d;
  d << "families=" << ctx.zoo.size() << " checks=" << checks
    << " violations=" << violations << bad.str();
  return {"implication_chain",
          violations == 0 ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

PropertyResult prop_r_zero_reduction(Ctx& ctx) {
  const auto& eps = ctx.sched.eps;
  const auto& ns = ctx.sched.ns;
  std::size_t mismatches = 0;
  for (const SequenceFamily& fam : ctx.zoo) {
    Point cand = canonical_candidate(ctx, fam);
    auto st = st_converges(ctx.space, fam, cand, eps, ns, ctx.opt.exec,
                           EvidenceMode::StructuralFastPath);
    auto rough0 = rough_st_converges(ctx.space, fam, cand, 0.0, eps, ns, ctx.opt.exec,
                                     EvidenceMode::StructuralFastPath);
    if (st.verdict != rough0.verdict) ++mismatches;
    auto conv = is_convergent_prefix(ctx.space, fam, cand, eps, ns.back(), ctx.opt.exec);
    auto roughc = rough_limit_check(ctx.space, fam, cand, 0.0, eps, ns.back(),
                                    ctx.opt.exec);
    if (conv.verdict != roughc.verdict) ++mismatches;
  }
  std::ostringstream d;
  d << "families=" << ctx.zoo.size() << " mismatches=" << mismatches;
  return {"r_zero_reduction",
          mismatches == 0 ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

PropertyResult prop_uniqueness(Ctx& ctx) {
  const auto& eps = ctx.sched.eps;
  const auto& ns = ctx.sched.ns;
  std::size_t pairs = 0, far_holds = 0;
  double max_separation = 0;
  bool all_pass = true;
  for (const SequenceFamily& fam : ctx.zoo) {
    if (!fam.structure() || !fam.structure()->known_st_limit) continue;
    Point limit = *fam.structure()->known_st_limit;
    auto at_limit = st_converges(ctx.space, fam, limit, eps, ns, ctx.opt.exec,
                                 EvidenceMode::StructuralFastPath);
    if (at_limit.verdict != Verdict::Holds) continue;
    auto near = st_converges(ctx.space, fam, offset_point(limit, 1e-9), eps, ns,
                             ctx.opt.exec, EvidenceMode::StructuralFastPath);
    if (near.verdict != Verdict::Holds) {
      all_pass = false;
      continue;
    }
    UniquenessReport rep = st_limit_unique_check(ctx.space, at_limit, near);
    ++pairs;
    max_separation = std::max(max_separation, rep.separation);
    if (!rep.pass) all_pass = false;
    auto far = st_converges(ctx.space, fam, offset_point(limit, 5.0), eps, ns,
                            ctx.opt.exec, EvidenceMode::StructuralFastPath);
    if (far.verdict == Verdict::Holds) ++far_holds;
  }
  std::ostringstream d;
  d << "pairs=" << pairs << " max_separation=" << fmt(max_separation)
    << " far_holds=" << far_holds;
  bool pass = all_pass && pairs > 0 && far_holds == 0;
  return {"uniqueness", pass ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

PropertyResult prop_ball_characterization(Ctx& ctx) {
  const double r = 1.0, step = 0.05;
  const SequenceFamily& fam = ctx.zoo.front();  // the square-spike family
  GridOptions options;
  options.region = Region{Point{-r - 1, -r - 1}, Point{r + 1, r + 1}};
  options.step = step;
  options.prefer_exact_ball = false;
  RoughLimitSet set = estimate_rough_limit_set(ctx.space, fam, r, options, ctx.sched,
                                               ctx.opt.exec);
  const double shell = 2 * step + ctx.sched.eps.back() + 1e-9;
  std::size_t outside_disagreements = 0, in_shell = 0;
  for (const auto& cell : set.grid) {
    const bool predicted = cell.verdict == Verdict::Holds;
    const double dist = 2 * norm_l2(cell.point);
    const bool truth = dist <= r;
    if (predicted == truth) continue;
    if (std::fabs(dist - r) <= shell) ++in_shell;
    else ++outside_disagreements;
  }
  std::ostringstream d;
  d << "cells=" << set.grid.size() << " shell_width=" << fmt(shell)
    << " in_shell=" << in_shell << " outside_disagreements=" << outside_disagreements;
  return {"ball_characterization",
          outside_disagreements == 0 ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_diameter_bound(Ctx& ctx) {
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t sets = 0;
  bool all_pass = true;
  auto take = [&](const RoughLimitSet& set) {
    DiamBoundReport rep = diam_bound_check(set);
    ++sets;
    min_margin = std::min(min_margin, rep.bound - rep.diameter);
    if (!rep.pass) all_pass = false;
  };
  const SequenceFamily& spikes = ctx.zoo.front();
  for (double r : {0.5, 1.0})
    take(estimate_rough_limit_set(ctx.space, spikes, r, GridOptions{}, ctx.sched,
                                  ctx.opt.exec));
  // The two-member set the parity family converges to at r = 2*sqrt(2).
  const double r4 = 2 * std::sqrt(2.0);
  RoughLimitSet pair_set;
  pair_set.roughness = r4;
  pair_set.members = {Point{0, 0}, Point{1, 1}};
  pair_set.diameter_estimate = ctx.space(Point{0, 0}, Point{0, 0}, Point{1, 1});
  take(pair_set);
  std::ostringstream d;
  d << "sets=" << sets << " min_margin=" << fmt(min_margin);
  return {"diameter_bound", all_pass ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_closedness(Ctx& ctx) {
  const double r = 1.0;
  std::vector<Point> members;
  for (int i = 0; i < 10; ++i)
    members.push_back(Point{(r / 2) * (1.0 - std::ldexp(1.0, -(i + 1))), 0.0});
  ClosednessReport rep = limit_set_closed_check(ctx.space, ctx.zoo.front(), r, members,
                                                ctx.sched, ctx.opt.exec);
  std::ostringstream d;
  d << "members=" << members.size() << " limit=" << format_candidate(rep.limit)
    << " final_gap=" << fmt(rep.gaps.back())
    << " limit_verdict=" << to_string(rep.limit_verdict.verdict);
  return {"closedness", rep.pass ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

PropertyResult prop_subsequence_dense(Ctx& ctx) {
  IndexSet nonsquares = IndexSet::complement(IndexSet::squares());
  const double r4 = 2 * std::sqrt(2.0);
  std::vector<Point> c3 = {Point{0, 0}};
  std::vector<Point> c4 = {Point{0, 0}, Point{1, 1}};
  SubsequenceReport rep3 = subsequence_limitset_check(ctx.space, ctx.zoo[0], c3, 1.0,
                                                      nonsquares, ctx.sched, ctx.opt.exec);
  SubsequenceReport rep4 = subsequence_limitset_check(ctx.space, ctx.zoo[1], c4, r4,
                                                      nonsquares, ctx.sched, ctx.opt.exec);
  std::size_t carried = 0, total = 0;
  for (const auto* rep : {&rep3, &rep4})
    for (const auto& pc : rep->per_candidate) {
      ++total;
      if (pc.full_verdict == Verdict::Holds && pc.sub_verdict == Verdict::Holds)
        ++carried;
    }
  std::ostringstream d;
  d << "candidates=" << total << " carried=" << carried
    << " sub_length=" << rep4.sub_length;
  bool pass = rep3.pass && rep4.pass;
  return {"subsequence_dense", pass ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_perturbation_agree(Ctx& ctx) {
  std::size_t checks = 0, disagreements = 0;
  std::ostringstream bad;
  for (const SequenceFamily& fam : ctx.zoo) {
    Point cand = canonical_candidate(ctx, fam);
    for (DecayKind decay : {DecayKind::OneOverN, DecayKind::GeometricHalf}) {
      PerturbationReport rep = perturbation_equivalence_check(
          ctx.space, fam, cand, 1.0, decay, ctx.sched, ctx.opt.exec);
      ++checks;
      if (!rep.pass) {
        ++disagreements;
        bad << " " << fam.name() << "/" << to_string(decay) << ":"
            << to_string(rep.base_verdict) << "!=" << to_string(rep.perturbed_verdict);
      }
    }
  }
  std::ostringstream d;
  d << "checks=" << checks << " disagreements=" << disagreements << bad.str();
  return {"perturbation_agree",
          disagreements == 0 ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

PropertyResult prop_cluster_cover(Ctx& ctx) {
  const double r4 = 2 * std::sqrt(2.0);
  RoughLimitSet set;
  set.roughness = r4;
  set.members = {Point{0, 0}, Point{1, 1}};
  set.diameter_estimate = ctx.space(Point{0, 0}, Point{0, 0}, Point{1, 1});
  std::vector<Point> clusters = {Point{0, 0}, Point{1, 1}};
  BallCoverReport rep = cluster_ball_cover_check(ctx.space, ctx.zoo[1], set, clusters,
                                                 ctx.sched, ctx.opt.exec);
  std::ostringstream d;
  d << "pairs=" << rep.pairs_checked << " worst=" << fmt(rep.worst)
    << " tolerance=" << fmt(rep.tolerance)
    << " margin=" << fmt(rep.tolerance - rep.worst);
  return {"cluster_cover", rep.pass ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_bounded_iff_nonempty(Ctx& ctx) {
  BoundedEquivalenceReport spikes =
      bounded_iff_nonempty_check(ctx.space, ctx.zoo.front(), ctx.sched, ctx.opt.exec);
  BoundedEquivalenceReport drift = bounded_iff_nonempty_check(
      ctx.space, ctx.zoo[10], ctx.sched, ctx.opt.exec);  // drift(1,0)
  std::ostringstream d;
  d << "square_spikes: bounded=" << to_string(spikes.bounded.verdict)
    << " limit_set=" << (spikes.limit_set_found ? "nonempty" : "empty")
    << "; drift: bounded=" << to_string(drift.bounded.verdict)
    << " limit_set=" << (drift.limit_set_found ? "nonempty" : "empty");
  bool pass = spikes.pass && drift.pass;
  return {"bounded_iff_nonempty", pass ? PropertyStatus::Pass : PropertyStatus::Fail,
          d.str()};
}

PropertyResult prop_serial_parallel_determinism(Ctx& ctx) {
  std::size_t comparisons = 0, mismatches = 0;
  std::vector<double> thresholds(ctx.sched.eps.begin(), ctx.sched.eps.end());
  for (std::size_t fi : {std::size_t{0}, std::size_t{11}}) {  // spikes, perturbed spikes
    const SequenceFamily& fam = ctx.zoo[fi];
    Point cand = canonical_candidate(ctx, fam);
    auto serial = kernels::scan_exceedances_serial(ctx.space, fam, cand, thresholds,
                                                   ctx.sched.ns);
    auto parallel = kernels::scan_exceedances(ctx.space, fam, cand, thresholds,
                                              ctx.sched.ns, Exec::Parallel);
    ++comparisons;
    bool same = serial.max_value == parallel.max_value &&
                serial.argmax == parallel.argmax &&
                serial.per_threshold.size() == parallel.per_threshold.size();
    for (std::size_t t = 0; same && t < serial.per_threshold.size(); ++t) {
      const auto& a = serial.per_threshold[t];
      const auto& b = parallel.per_threshold[t];
      same = a.counts_at == b.counts_at && a.first_exceedance == b.first_exceedance &&
             a.last_exceedance == b.last_exceedance && a.total == b.total;
    }
    if (!same) ++mismatches;
  }
  Ball ball{Point{0, 0}, 1.0, true};
  auto pts = ball_boundary_sample(ctx.space, ball, 64, ctx.opt.seed);
  auto ds = kernels::pairwise_diameter(ctx.space, pts, Exec::Serial);
  auto dp = kernels::pairwise_diameter(ctx.space, pts, Exec::Parallel);
  ++comparisons;
  if (!(ds.value == dp.value && ds.i == dp.i && ds.j == dp.j)) ++mismatches;
  auto pairs = kernels::sample_pairs(ctx.sched.ns.back(), 128, 1000, ctx.opt.seed);
  auto ps = kernels::scan_pairs_serial(ctx.space, ctx.zoo[0], pairs, thresholds,
                                       ctx.sched.ns.back());
  auto pp = kernels::scan_pairs(ctx.space, ctx.zoo[0], pairs, thresholds,
                                ctx.sched.ns.back(), Exec::Parallel);
  ++comparisons;
  bool same = ps.max_value == pp.max_value && ps.max_n == pp.max_n && ps.max_m == pp.max_m;
  for (std::size_t t = 0; same && t < ps.per_threshold.size(); ++t) {
    const auto& a = ps.per_threshold[t];
    const auto& b = pp.per_threshold[t];
    same = a.count == b.count && a.last_min_exceedance == b.last_min_exceedance &&
           a.late_count == b.late_count && a.witness_n == b.witness_n &&
           a.witness_m == b.witness_m;
  }
  if (!same) ++mismatches;
  std::ostringstream d;
  d << "comparisons=" << comparisons << " mismatches=" << mismatches
    << " threads=" << kernels::max_threads();
  return {"serial_parallel_determinism",
          mismatches == 0 ? PropertyStatus::Pass : PropertyStatus::Fail, d.str()};
}

}  // namespace

std::vector<PropertyResult> run_verification(const VerifyOptions& options) {
  Ctx ctx = make_context(options);
  std::vector<PropertyResult> out;
  out.push_back(guarded("axioms", [&] { return prop_axioms(ctx); }));
  out.push_back(guarded("symmetry", [&] { return prop_symmetry(ctx); }));
  out.push_back(guarded("implication_chain", [&] { return prop_implication_chain(ctx); }));
  out.push_back(guarded("r_zero_reduction", [&] { return prop_r_zero_reduction(ctx); }));
  out.push_back(guarded("uniqueness", [&] { return prop_uniqueness(ctx); }));
  out.push_back(
      guarded("ball_characterization", [&] { return prop_ball_characterization(ctx); }));
  out.push_back(guarded("diameter_bound", [&] { return prop_diameter_bound(ctx); }));
  out.push_back(guarded("closedness", [&] { return prop_closedness(ctx); }));
  out.push_back(guarded("subsequence_dense", [&] { return prop_subsequence_dense(ctx); }));
  out.push_back(guarded("perturbation_agree", [&] { return prop_perturbation_agree(ctx); }));
  out.push_back(guarded("cluster_cover", [&] { return prop_cluster_cover(ctx); }));
  out.push_back(
      guarded("bounded_iff_nonempty", [&] { return prop_bounded_iff_nonempty(ctx); }));
  out.push_back(guarded("serial_parallel_determinism",
                        [&] { return prop_serial_parallel_determinism(ctx); }));
  // Analyses never run against a space that failed its axiom check; report
  // the skip explicitly so the gate is visible in the output.
  for (const std::string& name : ctx.broken)
    out.push_back({"analyses[" + name + "]", PropertyStatus::Skip,
                   "axiom check failed; downstream analyses skipped"});
  return out;
}

std::string property_lines(std::span<const PropertyResult> results) {
  std::string out;
  for (const PropertyResult& r : results) {
    out += "[" + to_string(r.status) + "] " + r.name;
    if (!r.detail.empty()) out += "  " + r.detail;
    out += "\n";
  }
  return out;
}

std::vector<ReportRow> rows_from(std::span<const PropertyResult> results,
                                 std::uint64_t n_max) {
  std::vector<ReportRow> rows;
  for (const PropertyResult& r : results) {
    ReportRow row;
    row.analysis = r.name;
    row.sequence = "zoo";
    row.n = n_max;
    row.verdict = r.status == PropertyStatus::Pass   ? "holds"
                  : r.status == PropertyStatus::Fail ? "fails"
                                                     : "inconclusive";
    row.evidence = r.status == PropertyStatus::Skip ? "skipped: " + r.detail : r.detail;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace smetric
