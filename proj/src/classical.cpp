#include "smetric/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smetric {

namespace {

/// Checkpoints {n/2, 15n/16, n}, deduplicated, for late-recurrence evidence.
std::vector<std::uint64_t> convergence_checkpoints(std::uint64_t n_max) {
  std::vector<std::uint64_t> cps{n_max / 2, n_max - n_max / 16, n_max};
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  while (!cps.empty() && cps.front() == 0) cps.erase(cps.begin());
  return cps;
}

ConvergenceVerdict threshold_verdict(const SMetric& s, const SequenceFamily& family,
                                     const Point& candidate, double r,
                                     std::span<const double> eps_schedule,
                                     std::uint64_t n_max, Exec exec) {
  validate_eps_schedule(eps_schedule);
  if (n_max == 0) throw UsageError("prefix length must be >= 1");
  if (r < 0) throw DomainError("roughness degree must be >= 0");

  std::vector<double> thresholds;
  thresholds.reserve(eps_schedule.size());
  for (double eps : eps_schedule) thresholds.push_back(r + eps);

  auto cps = convergence_checkpoints(n_max);
  auto scan = kernels::scan_exceedances(s, family, candidate, thresholds, cps, exec);

  ConvergenceVerdict out;
  out.candidate = candidate;
  out.roughness = r;
  out.n_max = n_max;

  const std::uint64_t tail_window = std::max<std::uint64_t>(1, n_max / 16);
  const std::size_t half_idx = 0;  // first checkpoint is n_max/2 when it exists
  bool holds = true;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    const auto& stats = scan.per_threshold[t];
    EpsEvidence ev;
    ev.eps = eps_schedule[t];
    ev.exceedance_count = stats.total;
    ev.first_exceedance = stats.first_exceedance;
    ev.last_exceedance = stats.last_exceedance;
    ev.late_count = cps.size() > 1 ? stats.total - stats.counts_at[half_idx] : stats.total;
    out.per_eps.push_back(ev);
    if (stats.last_exceedance != 0 && stats.last_exceedance + tail_window > n_max)
      holds = false;
  }
  if (family.finite_data() && holds) {
    out.verdict = Verdict::Inconclusive;
    out.witness = "explicit-prefix data cannot certify a tail";
    return out;
  }
  if (holds) {
    out.verdict = Verdict::Holds;
    std::ostringstream w;
    w << "all exceedances settle by n=" << tail_window << " before the end";
    out.witness = w.str();
    return out;
  }
  // Fails when the coarsest threshold keeps being exceeded into the last
  // sixteenth of the prefix and recurrence is not a one-off.
  const auto& coarse = scan.per_threshold.front();
  if (coarse.last_exceedance != 0 && coarse.last_exceedance + tail_window > n_max &&
      coarse.total - (cps.size() > 1 ? coarse.counts_at[half_idx] : 0) >= 2) {
    out.verdict = Verdict::Fails;
    std::ostringstream w;
    w << "exceedance at n=" << coarse.last_exceedance << " with "
      << coarse.total << " exceedances of the coarsest threshold";
    out.witness = w.str();
    return out;
  }
  out.verdict = Verdict::Inconclusive;
  out.witness = "late exceedances are too sparse to classify";
  return out;
}

}  // namespace

ConvergenceVerdict is_convergent_prefix(const SMetric& s, const SequenceFamily& family,
                                        const Point& candidate,
                                        std::span<const double> eps_schedule,
                                        std::uint64_t n_max, Exec exec) {
  return threshold_verdict(s, family, candidate, 0.0, eps_schedule, n_max, exec);
}

ConvergenceVerdict rough_limit_check(const SMetric& s, const SequenceFamily& family,
                                     const Point& candidate, double r,
                                     std::span<const double> eps_schedule,
                                     std::uint64_t n_max, Exec exec) {
  return threshold_verdict(s, family, candidate, r, eps_schedule, n_max, exec);
}

CauchyVerdict is_cauchy_prefix(const SMetric& s, const SequenceFamily& family,
                               std::span<const double> eps_schedule, std::uint64_t n_max,
                               Exec exec, std::uint64_t seed) {
  validate_eps_schedule(eps_schedule);
  if (n_max < 2) throw UsageError("cauchy check needs n_max >= 2");
  if (family.finite_data() && n_max > family.data_limit())
    throw UsageError("scan range exceeds the data of an explicit-prefix family");

  auto pairs = kernels::sample_pairs(n_max, kCauchyWindow, kCauchyRandomPairs, seed);
  auto scan = kernels::scan_pairs(s, family, pairs, eps_schedule, n_max, exec);

  CauchyVerdict out;
  out.n_max = n_max;
  const std::uint64_t tail_window = std::max<std::uint64_t>(1, n_max / 16);
  bool holds = true;
  for (std::size_t t = 0; t < eps_schedule.size(); ++t) {
    const auto& stats = scan.per_threshold[t];
    PairEpsEvidence ev;
    ev.eps = eps_schedule[t];
    ev.exceedance_count = stats.count;
    ev.last_min_exceedance = stats.last_min_exceedance;
    ev.late_count = stats.late_count;
    if (stats.last_min_exceedance != 0)
      ev.witness = PairWitness{stats.witness_n, stats.witness_m, 0};
    out.per_eps.push_back(ev);
    if (stats.last_min_exceedance != 0 &&
        stats.last_min_exceedance + tail_window > n_max)
      holds = false;
  }
  if (family.finite_data() && holds) {
    out.verdict = Verdict::Inconclusive;
    return out;
  }
  if (holds) {
    out.verdict = Verdict::Holds;
    return out;
  }
  const auto& coarse = scan.per_threshold.front();
  if (coarse.last_min_exceedance != 0 &&
      coarse.last_min_exceedance + tail_window > n_max && coarse.late_count >= 2) {
    out.verdict = Verdict::Fails;
    Point xn = family.at(coarse.witness_n);
    Point xm = family.at(coarse.witness_m);
    out.witness = PairWitness{coarse.witness_n, coarse.witness_m, s(xn, xn, xm)};
    return out;
  }
  out.verdict = Verdict::Inconclusive;
  return out;
}

SBoundednessVerdict is_s_bounded_prefix(const SMetric& s, const SequenceFamily& family,
                                        std::uint64_t n_max, Exec exec,
                                        std::uint64_t seed) {
  if (n_max < 2) throw UsageError("boundedness check needs n_max >= 2");
  if (family.finite_data() && n_max > family.data_limit())
    throw UsageError("scan range exceeds the data of an explicit-prefix family");

  // Geometric checkpoints; the running max is cumulative across them.
  std::vector<std::uint64_t> cps;
  for (std::uint64_t c = n_max; c >= 64 && cps.size() < 4; c /= 10) cps.push_back(c);
  if (cps.empty()) cps.push_back(n_max);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());

  SBoundednessVerdict out;
  double running = 0;
  PairWitness best{0, 0, 0};
  for (std::size_t i = 0; i < cps.size(); ++i) {
    std::uint64_t c = cps[i];
    auto pairs = kernels::sample_pairs(c, kCauchyWindow, kCauchyRandomPairs, seed + i);
    auto scan = kernels::scan_pairs(s, family, pairs, {}, c, exec);
    if (scan.max_value > running) {
      running = scan.max_value;
      best = PairWitness{scan.max_n, scan.max_m, scan.max_value};
    }
    out.running_max.emplace_back(c, running);
  }
  const double final_max = out.running_max.back().second;
  const double prev = out.running_max.size() >= 2
                          ? out.running_max[out.running_max.size() - 2].second
                          : final_max;
  const bool stable = final_max <= prev * 1.01 + kBoundarySlack;
  if (stable && !family.finite_data()) {
    out.verdict = Verdict::Holds;
    out.radius = final_max * (1 + 1e-6) + kBoundarySlack;
  } else if (family.finite_data()) {
    out.verdict = Verdict::Inconclusive;
    out.growth_witness = best;
  } else {
    out.verdict = Verdict::Fails;
    out.growth_witness = best;
  }
  return out;
}

std::vector<double> default_roughness_grid(const SMetric& s, const SequenceFamily& family,
                                           const Point& candidate, std::uint64_t n_probe) {
  std::uint64_t probe = std::min<std::uint64_t>(n_probe, 4096);
  if (family.finite_data()) probe = std::min(probe, family.data_limit());
  if (probe == 0) throw UsageError("roughness grid needs a non-empty probe prefix");
  auto dist = kernels::materialize_distances(s, family, candidate, probe, Exec::Serial);
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[(sorted.size() - 1) / 2];
  double scale = median > 0 ? median : 1.0;
  std::vector<double> grid;
  for (int e = -4; e <= 6; ++e) grid.push_back(scale * std::ldexp(1.0, e));
  return grid;
}

}  // namespace smetric
