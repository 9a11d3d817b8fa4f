#include "smetric/rough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "smetric/rng.hpp"

namespace smetric {

namespace {

Verdict cap_for_finite_data(const SequenceFamily& family, Verdict v) {
  if (family.finite_data() && v == Verdict::Holds) return Verdict::Inconclusive;
  return v;
}

Verdict verdict_over(std::span<const ExceedanceReport> reports) {
  bool all_zero = true, any_positive = false;
  for (const auto& rep : reports) {
    if (rep.density.verdict != DensityVerdict::Zero) all_zero = false;
    if (rep.density.verdict == DensityVerdict::Positive) any_positive = true;
  }
  return all_zero ? Verdict::Holds : any_positive ? Verdict::Fails : Verdict::Inconclusive;
}

}  // namespace

StConvergenceVerdict rough_st_converges(const SMetric& s, const SequenceFamily& family,
                                        const Point& candidate, double roughness,
                                        std::span<const double> eps_schedule,
                                        std::span<const std::uint64_t> n_schedule,
                                        Exec exec, EvidenceMode mode) {
  if (roughness < 0) throw DomainError("roughness degree must be >= 0");
  validate_eps_schedule(eps_schedule);
  std::vector<double> thresholds;
  thresholds.reserve(eps_schedule.size());
  for (double e : eps_schedule) thresholds.push_back(roughness + e);
  auto reports = analyze_exceedances(s, family, candidate, thresholds, n_schedule,
                                     exec, mode);
  StConvergenceVerdict out;
  out.candidate = candidate;
  out.roughness = roughness;
  out.n_schedule.assign(n_schedule.begin(), n_schedule.end());
  for (std::size_t t = 0; t < reports.size(); ++t)
    out.per_eps.push_back({eps_schedule[t], reports[t].density});
  out.verdict = cap_for_finite_data(family, verdict_over(reports));
  return out;
}

namespace {

/// Bounding box of the probe prefix with the farthest 1% (from the medoid)
/// dropped, inflated by `inflate` on every side.
Region bulk_region(const SMetric& s, const SequenceFamily& family, double inflate,
                   std::uint64_t n_max) {
  const std::uint64_t probe = std::min<std::uint64_t>(n_max, 4096);
  Point medoid = prefix_medoid(s, family, probe);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(probe));
  for (std::uint64_t n = 1; n <= probe; ++n) pts.push_back(family.at(n));
  std::vector<double> dist;
  dist.reserve(pts.size());
  for (const Point& p : pts) dist.push_back(s(p, p, medoid));
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const double cutoff = sorted[static_cast<std::size_t>(0.99 * (sorted.size() - 1))];

  const int d = family.dim();
  Point::Storage lo(static_cast<std::size_t>(d), 0.0), hi(static_cast<std::size_t>(d), 0.0);
  bool seeded = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (dist[i] > cutoff) continue;
    for (int c = 0; c < d; ++c) {
      if (!seeded || pts[i][c] < lo[static_cast<std::size_t>(c)])
        lo[static_cast<std::size_t>(c)] = pts[i][c];
      if (!seeded || pts[i][c] > hi[static_cast<std::size_t>(c)])
        hi[static_cast<std::size_t>(c)] = pts[i][c];
    }
    seeded = true;
  }
  for (int c = 0; c < d; ++c) {
    lo[static_cast<std::size_t>(c)] -= inflate;
    hi[static_cast<std::size_t>(c)] += inflate;
  }
  return Region{Point(std::move(lo)), Point(std::move(hi))};
}

std::uint64_t cells_for(const Region& region, double step, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int c = 0; c < region.lo.dim(); ++c) {
    const double span = region.hi[c] - region.lo[c];
    const auto count = static_cast<std::uint64_t>(std::floor(span / step + 1e-9)) + 1;
    if (total > cap / count + 1) return cap + 1;  // saturate, avoid overflow
    total *= count;
  }
  return total;
}

}  // namespace

RoughLimitSet estimate_rough_limit_set(const SMetric& s, const SequenceFamily& family,
                                       double roughness, const GridOptions& options,
                                       const Schedules& schedules, Exec exec) {
  if (roughness < 0) throw DomainError("roughness degree must be >= 0");
  validate_eps_schedule(schedules.eps);
  validate_n_schedule(schedules.ns);

  RoughLimitSet out;
  out.roughness = roughness;

  if (options.prefer_exact_ball) {
    const auto& st = family.structure();
    if (st && st->known_st_limit) {
      auto v = st_converges(s, family, *st->known_st_limit, schedules.eps, schedules.ns,
                            exec, options.evidence);
      if (v.verdict == Verdict::Holds) {
        Ball ball{*st->known_st_limit, roughness, /*closed=*/true};
        out.exact_ball = RoughLimitSet::ExactBall{ball, *st->known_st_limit};
        out.members = ball_boundary_sample(s, ball, 64);
        out.diameter_estimate = ball_diameter(s, ball);
        return out;
      }
    }
  }

  Region region = options.region ? *options.region
                                 : bulk_region(s, family, roughness + 1, schedules.ns.back());
  if (region.lo.dim() != family.dim() || region.hi.dim() != family.dim())
    throw UsageError("grid region dimension does not match the family");
  for (int c = 0; c < region.lo.dim(); ++c)
    if (region.lo[c] > region.hi[c]) throw UsageError("grid region is empty");

  double step = options.step.value_or(std::max(roughness / 8, 0.05));
  if (step <= 0) throw UsageError("grid step must be positive");
  if (options.step) {
    if (cells_for(region, step, options.max_cells) > options.max_cells)
      throw UsageError("grid step yields more cells than max_cells");
  } else {
    while (cells_for(region, step, options.max_cells) > options.max_cells) step *= 2;
  }

  std::vector<double> thresholds;
  for (double e : schedules.eps) thresholds.push_back(roughness + e);

  const int d = family.dim();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(d));
  for (int c = 0; c < d; ++c) {
    const double span = region.hi[c] - region.lo[c];
    counts[static_cast<std::size_t>(c)] =
        static_cast<std::uint64_t>(std::floor(span / step + 1e-9)) + 1;
  }

  std::vector<std::uint64_t> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Point::Storage coords;
    coords.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c)
      coords.push_back(region.lo[c] + static_cast<double>(idx[static_cast<std::size_t>(c)]) * step);
    Point cell(std::move(coords));

    auto reports = analyze_exceedances(s, family, cell, thresholds, schedules.ns, exec,
                                       options.evidence);
    Verdict v = cap_for_finite_data(family, verdict_over(reports));
    out.grid.push_back({cell, v});
    if (v == Verdict::Holds) out.members.push_back(cell);

    int c = 0;
    for (; c < d; ++c) {
      auto& i = idx[static_cast<std::size_t>(c)];
      if (++i < counts[static_cast<std::size_t>(c)]) break;
      i = 0;
    }
    if (c == d) break;
  }

  if (out.members.size() >= 2)
    out.diameter_estimate = kernels::pairwise_diameter(s, out.members, exec).value;
  return out;
}

std::vector<Point> ball_boundary_sample(const SMetric& s, const Ball& ball,
                                        std::size_t count, std::uint64_t seed) {
  if (count == 0) throw UsageError("boundary sample needs a positive count");
  if (ball.radius <= 0) return {ball.center};
  const int d = ball.center.dim();

  std::vector<Point> directions;
  if (d == 1) {
    directions.push_back({1.0});
    directions.push_back({-1.0});
  } else if (d == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double a = 2 * std::numbers::pi * static_cast<double>(i) /
                       static_cast<double>(count);
      directions.push_back({std::cos(a), std::sin(a)});
    }
  } else {
    SplitMix64 rng(seed);
    while (directions.size() < count) {
      Point::Storage u(static_cast<std::size_t>(d), 0.0);
      for (auto& v : u) v = rng.uniform(-1, 1);
      Point p(std::move(u));
      const double norm = norm_l2(p);
      if (norm < 1e-3) continue;
      directions.push_back((1.0 / norm) * p);
    }
  }

  std::vector<Point> sample;
  sample.reserve(directions.size());
  for (const Point& u : directions) {
    double lo = 0, hi = 1;
    int doublings = 0;
    while (s(ball.center + hi * u, ball.center + hi * u, ball.center) <=
               ball.radius + kBoundarySlack &&
           doublings++ < 80)
      hi *= 2;
    if (doublings >= 80) continue;  // S never leaves the ball along u
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      const Point y = ball.center + mid * u;
      if (s(y, y, ball.center) <= ball.radius + kBoundarySlack)
        lo = mid;
      else
        hi = mid;
    }
    sample.push_back(ball.center + lo * u);
  }
  if (sample.empty()) sample.push_back(ball.center);
  return sample;
}

double ball_diameter(const SMetric& s, const Ball& ball, std::size_t directions,
                     std::uint64_t seed) {
  auto sample = ball_boundary_sample(s, ball, directions, seed);
  if (sample.size() < 2) return 0;
  return kernels::pairwise_diameter(s, sample, Exec::Serial).value;
}

DiamBoundReport diam_bound_check(const RoughLimitSet& set) {
  DiamBoundReport rep;
  rep.diameter = set.diameter_estimate;
  rep.bound = 3 * set.roughness + kDiameterSlack;
  rep.pass = rep.diameter <= rep.bound;
  return rep;
}

ClosednessReport limit_set_closed_check(const SMetric& s, const SequenceFamily& family,
                                        double roughness, std::span<const Point> members,
                                        const Schedules& schedules, Exec exec) {
  if (members.size() < 3)
    throw UsageError("closedness probe needs at least three members");
  for (const Point& m : members) {
    auto v = rough_st_converges(s, family, m, roughness, schedules.eps, schedules.ns,
                                exec, EvidenceMode::StructuralFastPath);
    if (v.verdict != Verdict::Holds)
      throw UsageError("closedness probe member is outside the limit set");
  }

  ClosednessReport rep;
  for (std::size_t i = 0; i + 1 < members.size(); ++i)
    rep.gaps.push_back(s(members[i + 1], members[i + 1], members[i]));
  for (std::size_t i = 0; i + 1 < rep.gaps.size(); ++i)
    if (rep.gaps[i + 1] > rep.gaps[i] + 1e-9)
      throw UsageError("closedness probe gaps must be non-increasing");
  if (rep.gaps.back() > 1e-3)
    throw UsageError("closedness probe final gap is too wide");

  const Point& a = members[members.size() - 3];
  const Point& b = members[members.size() - 2];
  const Point& c = members[members.size() - 1];
  Point::Storage lim;
  lim.reserve(static_cast<std::size_t>(c.dim()));
  for (int i = 0; i < c.dim(); ++i) {
    const double denom = c[i] - 2 * b[i] + a[i];
    const double delta = c[i] - b[i];
    lim.push_back(std::fabs(denom) > 1e-30 ? c[i] - delta * delta / denom : c[i]);
  }
  rep.limit = Point(std::move(lim));
  rep.limit_verdict = rough_st_converges(s, family, rep.limit, roughness, schedules.eps,
                                         schedules.ns, exec,
                                         EvidenceMode::StructuralFastPath);
  rep.pass = rep.limit_verdict.verdict == Verdict::Holds;
  return rep;
}

SubsequenceReport subsequence_limitset_check(const SMetric& s,
                                             const SequenceFamily& family,
                                             std::span<const Point> candidates,
                                             double roughness, const IndexSet& subset,
                                             const Schedules& schedules, Exec exec) {
  validate_eps_schedule(schedules.eps);
  validate_n_schedule(schedules.ns);
  if (candidates.empty()) throw UsageError("subsequence check needs candidates");

  SubsequenceReport rep;
  rep.subset_density = natural_density(subset, schedules.ns);
  const bool exact_one = rep.subset_density.exact && *rep.subset_density.exact == 1.0;
  const bool est_one = rep.subset_density.verdict == DensityVerdict::Positive &&
                       rep.subset_density.positive_value >= 0.99;
  if (!exact_one && !est_one)
    throw UsageError("subsequence check needs a density-one index set");

  rep.sub_length = subset.prefix_count(schedules.ns.back());
  if (rep.sub_length < 2)
    throw UsageError("subsequence check needs at least two members");

  // Re-index the subset as a total family: position p maps to the p-th member.
  SequenceFamily sub(family.name() + "|subsequence", family.dim(),
                     [family, subset](std::uint64_t p) {
                       return family.at(subset.nth_element(p));
                     });

  rep.pass = true;
  for (const Point& cand : candidates) {
    SubsequenceReport::PerCandidate pc;
    pc.candidate = cand;
    pc.full_verdict = rough_st_converges(s, family, cand, roughness, schedules.eps,
                                         schedules.ns, exec,
                                         EvidenceMode::StructuralFastPath)
                          .verdict;
    pc.sub_verdict = rough_st_converges(s, sub, cand, roughness, schedules.eps,
                                        schedules.ns, exec, EvidenceMode::Full)
                         .verdict;
    if (pc.full_verdict == Verdict::Holds && pc.sub_verdict != Verdict::Holds)
      rep.pass = false;
    rep.per_candidate.push_back(std::move(pc));
  }
  return rep;
}

PerturbationReport perturbation_equivalence_check(const SMetric& s,
                                                  const SequenceFamily& family,
                                                  const Point& candidate,
                                                  double roughness, DecayKind decay,
                                                  const Schedules& schedules, Exec exec) {
  PerturbationReport rep;
  rep.decay = decay;
  rep.base_verdict = rough_st_converges(s, family, candidate, roughness, schedules.eps,
                                        schedules.ns, exec,
                                        EvidenceMode::StructuralFastPath)
                         .verdict;
  auto perturbed = perturbed_family(family, decay);
  rep.perturbed_verdict = rough_st_converges(s, perturbed, candidate, roughness,
                                             schedules.eps, schedules.ns, exec,
                                             EvidenceMode::Full)
                              .verdict;
  rep.pass = rep.base_verdict == rep.perturbed_verdict;
  return rep;
}

ClusterVerdict cluster_point_check(const SMetric& s, const SequenceFamily& family,
                                   const Point& point,
                                   std::span<const double> eps_schedule,
                                   std::span<const std::uint64_t> n_schedule, Exec exec) {
  validate_eps_schedule(eps_schedule);
  auto reports = analyze_exceedances(s, family, point, eps_schedule, n_schedule, exec,
                                     EvidenceMode::StructuralFastPath);
  ClusterVerdict out;
  out.point = point;
  bool all_positive = true, any_zero = false;
  for (std::size_t t = 0; t < reports.size(); ++t) {
    // Hit set {S < eps} is the exact complement of the exceedance set.
    std::optional<double> exact;
    if (reports[t].density.exact) exact = 1.0 - *reports[t].density.exact;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    for (const auto& [n, c] : reports[t].density.prefix_counts)
      counts.emplace_back(n, n - c);
    auto est = estimate_from_counts(std::move(counts), exact, "hit-set complement");
    if (est.verdict != DensityVerdict::Positive) all_positive = false;
    if (est.verdict == DensityVerdict::Zero) any_zero = true;
    out.per_eps.push_back({eps_schedule[t], std::move(est)});
  }
  Verdict v = all_positive ? Verdict::Holds
              : any_zero   ? Verdict::Fails
                           : Verdict::Inconclusive;
  out.verdict = cap_for_finite_data(family, v);
  return out;
}

BallCoverReport cluster_ball_cover_check(const SMetric& s, const SequenceFamily& family,
                                         const RoughLimitSet& set,
                                         std::span<const Point> cluster_points,
                                         const Schedules& schedules, Exec exec) {
  if (cluster_points.empty()) throw UsageError("ball cover needs cluster points");
  if (set.members.empty()) throw UsageError("ball cover needs a non-empty limit set");
  for (const Point& g : cluster_points) {
    auto v = cluster_point_check(s, family, g, schedules.eps, schedules.ns, exec);
    if (v.verdict != Verdict::Holds)
      throw UsageError("ball cover requires certified cluster points");
  }
  BallCoverReport rep;
  rep.tolerance = set.roughness + 1e-6;
  for (const Point& m : set.members)
    for (const Point& g : cluster_points) {
      rep.worst = std::max(rep.worst, s(m, m, g));
      ++rep.pairs_checked;
    }
  rep.pass = rep.worst <= rep.tolerance;
  return rep;
}

BoundedEquivalenceReport bounded_iff_nonempty_check(const SMetric& s,
                                                    const SequenceFamily& family,
                                                    const Schedules& schedules,
                                                    Exec exec) {
  validate_eps_schedule(schedules.eps);
  validate_n_schedule(schedules.ns);
  const std::uint64_t n_max = schedules.ns.back();
  Point ref = prefix_medoid(s, family, std::min<std::uint64_t>(n_max, 4096));

  BoundedEquivalenceReport rep;
  rep.bounded = st_bounded(s, family, ref, schedules.ns, exec);

  if (rep.bounded.verdict == Verdict::Holds) {
    rep.forward = rough_st_converges(s, family, ref, rep.bounded.bound, schedules.eps,
                                     schedules.ns, exec, EvidenceMode::StructuralFastPath);
    rep.limit_set_found = rep.forward->verdict == Verdict::Holds;
    rep.pass = rep.limit_set_found;
    rep.note = "bound certifies the reference point as a rough limit";
    return rep;
  }
  if (rep.bounded.verdict == Verdict::Inconclusive) {
    rep.pass = true;
    rep.note = "boundedness inconclusive; equivalence not exercised";
    return rep;
  }

  // Unbounded: sweep roughness values over a coarse candidate grid; none may
  // come out as a rough limit.
  auto r_grid = default_roughness_grid(s, family, ref, n_max);
  Region box = bulk_region(s, family, r_grid.back(), n_max);
  std::vector<Point> candidates{ref};
  SplitMix64 rng(default_seed());
  while (candidates.size() < 64) {
    Point::Storage u(static_cast<std::size_t>(family.dim()), 0.0);
    for (int c = 0; c < family.dim(); ++c)
      u[static_cast<std::size_t>(c)] = rng.uniform(box.lo[c], box.hi[c]);
    candidates.push_back(Point(std::move(u)));
  }

  std::vector<double> thresholds;
  for (double r : r_grid)
    for (double e : schedules.eps) thresholds.push_back(r + e);

  std::vector<std::size_t> holds_count(r_grid.size(), 0);
  for (const Point& cand : candidates) {
    auto reports = analyze_exceedances(s, family, cand, thresholds, schedules.ns, exec,
                                       EvidenceMode::Full);
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      std::span<const ExceedanceReport> slice(reports.data() + j * schedules.eps.size(),
                                              schedules.eps.size());
      if (verdict_over(slice) == Verdict::Holds) ++holds_count[j];
    }
  }
  rep.backward_holds.reserve(r_grid.size());
  for (std::size_t j = 0; j < r_grid.size(); ++j)
    rep.backward_holds.emplace_back(r_grid[j], holds_count[j]);
  rep.limit_set_found =
      std::any_of(holds_count.begin(), holds_count.end(), [](std::size_t c) { return c > 0; });
  rep.pass = !rep.limit_set_found;
  rep.note = "unbounded family swept for rough limits";
  return rep;
}

}  // namespace smetric
