#include "smetric/statistical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

namespace smetric {

Schedules Schedules::standard() { return {default_eps_schedule(), default_n_schedule()}; }

Schedules Schedules::smoke() { return {smoke_eps_schedule(), smoke_n_schedule()}; }

Schedules Schedules::standard_up_to(std::uint64_t n_max) {
  Schedules s = standard();
  std::erase_if(s.ns, [n_max](std::uint64_t n) { return n > n_max; });
  if (s.ns.empty() || s.ns.back() != n_max) s.ns.push_back(n_max);
  return s;
}

namespace {

struct StructuralDensity {
  double density = 0;
  std::string note;
};

/// Exact exceedance (or hit) density from the family's class partition.
/// Requires an exact partition: every class density certified, varying
/// classes of density zero.
std::optional<StructuralDensity> structural_density(const SMetric& s,
                                                    const SequenceFamily& family,
                                                    const Point& candidate,
                                                    double threshold, bool hit_mode) {
  const auto& st = family.structure();
  if (!st || !st->exact_partition()) return std::nullopt;
  StructuralDensity out;
  std::size_t in_classes = 0;
  for (const auto& cls : st->classes) {
    if (!cls.value) continue;  // varying class, exact density zero
    double d = s(*cls.value, *cls.value, candidate);
    bool in = hit_mode ? d < threshold : d >= threshold;
    if (in) {
      out.density += *cls.indices.exact_density();
      ++in_classes;
    }
  }
  std::ostringstream note;
  note << (hit_mode ? "hit" : "exceedance") << " classes: " << in_classes;
  if (!hit_mode && out.density == 0.0) note << "; exceedances confined to spike indices";
  out.note = note.str();
  return out;
}

std::uint64_t schedule_max(std::span<const std::uint64_t> ns) { return ns.back(); }

void check_data_limit(const SequenceFamily& family, std::uint64_t n_max) {
  if (family.finite_data() && n_max > family.data_limit())
    throw UsageError("schedule exceeds the data of an explicit-prefix family");
}

Verdict cap_for_finite_data(const SequenceFamily& family, Verdict v) {
  if (family.finite_data() && v == Verdict::Holds) return Verdict::Inconclusive;
  return v;
}

constexpr std::size_t kStCauchyCandidates = 64;

}  // namespace

std::vector<ExceedanceReport> analyze_exceedances(
    const SMetric& s, const SequenceFamily& family, const Point& candidate,
    std::span<const double> thresholds, std::span<const std::uint64_t> n_schedule,
    Exec exec, EvidenceMode mode) {
  validate_n_schedule(n_schedule);
  if (thresholds.empty()) throw UsageError("analyze_exceedances needs thresholds");
  check_data_limit(family, schedule_max(n_schedule));

  std::vector<std::optional<StructuralDensity>> structural(thresholds.size());
  bool all_structural = true;
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    structural[t] = structural_density(s, family, candidate, thresholds[t], false);
    if (!structural[t]) all_structural = false;
  }

  const bool scan_needed = mode == EvidenceMode::Full || !all_structural;
  kernels::ScanResult scan;
  if (scan_needed)
    scan = kernels::scan_exceedances(s, family, candidate, thresholds, n_schedule, exec);

  std::vector<ExceedanceReport> reports;
  reports.reserve(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    ExceedanceReport rep;
    rep.threshold = thresholds[t];
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    if (scan_needed) {
      const auto& stats = scan.per_threshold[t];
      for (std::size_t i = 0; i < n_schedule.size(); ++i)
        counts.emplace_back(n_schedule[i], stats.counts_at[i]);
      rep.first_exceedance = stats.first_exceedance;
      rep.last_exceedance = stats.last_exceedance;
      rep.total = stats.total;
    }
    std::optional<double> exact;
    std::string note = "prefix estimate";
    if (structural[t]) {
      exact = structural[t]->density;
      note = structural[t]->note;
    }
    rep.density = estimate_from_counts(std::move(counts), exact, std::move(note));
    reports.push_back(std::move(rep));
  }
  return reports;
}

StConvergenceVerdict st_converges(const SMetric& s, const SequenceFamily& family,
                                  const Point& candidate,
                                  std::span<const double> eps_schedule,
                                  std::span<const std::uint64_t> n_schedule, Exec exec,
                                  EvidenceMode mode) {
  validate_eps_schedule(eps_schedule);
  auto reports = analyze_exceedances(s, family, candidate, eps_schedule, n_schedule,
                                     exec, mode);
  StConvergenceVerdict out;
  out.candidate = candidate;
  out.roughness = 0;
  out.n_schedule.assign(n_schedule.begin(), n_schedule.end());
  bool all_zero = true, any_positive = false;
  for (std::size_t t = 0; t < reports.size(); ++t) {
    if (reports[t].density.verdict != DensityVerdict::Zero) all_zero = false;
    if (reports[t].density.verdict == DensityVerdict::Positive) any_positive = true;
    out.per_eps.push_back({eps_schedule[t], reports[t].density});
  }
  out.verdict = all_zero     ? Verdict::Holds
                : any_positive ? Verdict::Fails
                               : Verdict::Inconclusive;
  out.verdict = cap_for_finite_data(family, out.verdict);
  return out;
}

UniquenessReport st_limit_unique_check(const SMetric& s, const StConvergenceVerdict& a,
                                       const StConvergenceVerdict& b) {
  if (a.verdict != Verdict::Holds || b.verdict != Verdict::Holds)
    throw UsageError("uniqueness check needs two Holds verdicts");
  UniquenessReport rep;
  rep.tolerance = kUniquenessTolerance;
  rep.separation = s(a.candidate, a.candidate, b.candidate);
  rep.pass = rep.separation <= rep.tolerance;
  std::ostringstream d;
  d << "S-separation " << rep.separation << " vs tolerance " << rep.tolerance;
  rep.detail = d.str();
  return rep;
}

namespace {

/// Candidate witness indices for the statistical Cauchy check, best first.
std::vector<std::uint64_t> cauchy_witness_pool(const SMetric& s,
                                               const SequenceFamily& family,
                                               std::span<const double> eps_schedule,
                                               std::uint64_t n_max, Exec exec) {
  std::vector<std::uint64_t> pool;
  const auto& st = family.structure();
  if (st && st->exact_partition()) {
    for (const auto& cls : st->classes) {
      if (!cls.value) continue;
      if (*cls.indices.exact_density() == 0.0) continue;
      std::uint64_t k = cls.indices.prefix_count(n_max);
      if (k >= 1) pool.push_back(cls.indices.nth_element(k));
    }
    std::sort(pool.begin(), pool.end(), std::greater<>());
    if (!pool.empty()) return pool;
  }
  // Unstructured: walk back from the end collecting indices outside the
  // coarsest exceedance set around the prefix medoid.
  Point medoid = prefix_medoid(s, family, std::min<std::uint64_t>(n_max, 4096));
  auto dist = kernels::materialize_distances(s, family, medoid, n_max, exec);
  const double coarse = eps_schedule.front();
  for (std::uint64_t n = n_max; n >= 1 && pool.size() < kStCauchyCandidates; --n) {
    if (dist[static_cast<std::size_t>(n - 1)] < coarse) pool.push_back(n);
  }
  if (pool.empty()) pool.push_back(n_max);
  return pool;
}

}  // namespace

Point prefix_medoid(const SMetric& s, const SequenceFamily& family, std::uint64_t probe) {
  if (probe == 0) throw UsageError("medoid needs a non-empty probe prefix");
  check_data_limit(family, probe);
  std::vector<Point> sample;
  sample.reserve(static_cast<std::size_t>(probe));
  for (std::uint64_t n = 1; n <= probe; ++n) sample.push_back(family.at(n));
  // Candidate medoids on a stride so the scan stays quadratic-free.
  const std::size_t stride = std::max<std::size_t>(1, sample.size() / 256);
  double best_sum = -1;
  std::size_t best = 0;
  for (std::size_t c = 0; c < sample.size(); c += stride) {
    double sum = 0;
    for (const Point& p : sample) sum += s(p, p, sample[c]);
    if (best_sum < 0 || sum < best_sum) {
      best_sum = sum;
      best = c;
    }
  }
  return sample[best];
}

StCauchyVerdict st_cauchy(const SMetric& s, const SequenceFamily& family,
                          std::span<const double> eps_schedule,
                          std::span<const std::uint64_t> n_schedule, Exec exec) {
  validate_eps_schedule(eps_schedule);
  validate_n_schedule(n_schedule);
  const std::uint64_t n_max = schedule_max(n_schedule);
  check_data_limit(family, n_max);

  auto pool = cauchy_witness_pool(s, family, eps_schedule, n_max, exec);

  StCauchyVerdict out;
  out.per_eps.resize(eps_schedule.size());
  for (std::size_t t = 0; t < eps_schedule.size(); ++t) out.per_eps[t].eps = eps_schedule[t];
  std::vector<bool> covered(eps_schedule.size(), false);
  std::vector<bool> all_positive(eps_schedule.size(), true);

  for (std::uint64_t witness : pool) {
    if (std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) break;
    out.candidates_tried.push_back(witness);
    Point x_w = family.at(witness);
    auto reports = analyze_exceedances(s, family, x_w, eps_schedule, n_schedule, exec,
                                       EvidenceMode::StructuralFastPath);
    for (std::size_t t = 0; t < eps_schedule.size(); ++t) {
      const auto& density = reports[t].density;
      if (density.verdict != DensityVerdict::Positive) all_positive[t] = false;
      if (!covered[t]) {
        if (density.verdict == DensityVerdict::Zero) {
          covered[t] = true;
          out.per_eps[t].witness_index = witness;
          out.per_eps[t].density = density;
        } else if (out.per_eps[t].witness_index == 0 &&
                   out.per_eps[t].density.prefix_counts.empty() &&
                   !out.per_eps[t].density.exact) {
          out.per_eps[t].density = density;  // keep first evidence for the record
        }
      }
    }
  }

  bool all_covered = std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
  bool some_eps_all_positive = false;
  for (std::size_t t = 0; t < eps_schedule.size(); ++t)
    if (!covered[t] && all_positive[t]) some_eps_all_positive = true;

  out.verdict = all_covered              ? Verdict::Holds
                : some_eps_all_positive  ? Verdict::Fails
                                         : Verdict::Inconclusive;
  out.verdict = cap_for_finite_data(family, out.verdict);
  return out;
}

StBoundednessVerdict st_bounded(const SMetric& s, const SequenceFamily& family,
                                const Point& ref_point,
                                std::span<const std::uint64_t> n_schedule, Exec exec) {
  validate_n_schedule(n_schedule);
  const std::uint64_t n_max = schedule_max(n_schedule);
  check_data_limit(family, n_max);

  const std::uint64_t probe = std::min<std::uint64_t>(n_max, 4096);
  auto dist = kernels::materialize_distances(s, family, ref_point, probe, Exec::Serial);
  std::sort(dist.begin(), dist.end());
  const double median = dist[(dist.size() - 1) / 2];
  const double scale = median > 0 ? median : 1.0;

  std::vector<double> bounds;
  for (int j = 0; j <= 7; ++j) bounds.push_back(scale * std::ldexp(1.0, j));

  auto reports = analyze_exceedances(s, family, ref_point, bounds, n_schedule, exec,
                                     EvidenceMode::Full);

  StBoundednessVerdict out;
  out.ref_point = ref_point;
  for (std::size_t t = 0; t < bounds.size(); ++t)
    out.tried.emplace_back(bounds[t], reports[t].density);

  for (std::size_t t = 0; t < bounds.size(); ++t) {
    if (reports[t].density.verdict == DensityVerdict::Zero) {
      out.verdict = cap_for_finite_data(family, Verdict::Holds);
      out.bound = bounds[t];
      out.note = "first zero-density exceedance bound";
      return out;
    }
  }
  const auto ratios = reports.back().density.ratios();
  if (ratios.size() >= 2 && ratios.back() >= kPositiveFloor &&
      ratios.back() > ratios.front() + 1e-6) {
    out.verdict = Verdict::Fails;
    out.note = "tail escapes the largest bound with a growing exceedance ratio";
    return out;
  }
  out.verdict = Verdict::Inconclusive;
  out.note = "no zero-density bound below the grid ceiling";
  return out;
}

namespace {

struct Ladder {
  std::vector<std::uint64_t> levels;  // ladder points n_1 < n_2 < ...
};

/// Greedy accuracy ladder: n_k is past the last index where fewer than a
/// (1 - 2^-k) fraction of the prefix sits within 2^-k of the limit.
Ladder build_ladder(const std::vector<double>& dist, std::uint64_t n_max) {
  Ladder ladder;
  std::uint64_t prev = 0;
  for (int k = 1; k <= 30; ++k) {
    const double threshold = std::ldexp(1.0, -k);
    std::uint64_t bad = 0, last_violation = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      if (dist[static_cast<std::size_t>(n - 1)] >= threshold) ++bad;
      if ((bad << k) >= n) last_violation = n;
    }
    std::uint64_t nk = std::max(last_violation, prev + 1);
    if (nk > n_max / 2) break;
    ladder.levels.push_back(nk);
    prev = nk;
  }
  return ladder;
}

std::size_t level_of(const Ladder& ladder, std::uint64_t m) {
  // Number of ladder points strictly below m.
  return static_cast<std::size_t>(
      std::upper_bound(ladder.levels.begin(), ladder.levels.end(), m - 1) -
      ladder.levels.begin());
}

}  // namespace

SequenceFamily AlmostEverywhereModification::as_family(std::string name) const {
  // An explicit prefix, so downstream verdicts know the data stops at n_max.
  return SequenceFamily::explicit_prefix(std::move(name), modified_prefix);
}

AlmostEverywhereModification ae_modification(const SMetric& s,
                                             const SequenceFamily& family,
                                             const Point& st_limit, std::uint64_t n_max,
                                             Exec exec) {
  if (n_max < 10000) throw UsageError("modification needs a prefix of at least 10^4");
  check_data_limit(family, n_max);
  Schedules sched = Schedules::standard_up_to(n_max);
  auto gate = st_converges(s, family, st_limit, sched.eps, sched.ns, exec,
                           EvidenceMode::StructuralFastPath);
  if (gate.verdict != Verdict::Holds)
    throw UsageError("modification requires statistical convergence to the limit");

  auto dist = kernels::materialize_distances(s, family, st_limit, n_max, exec);
  Ladder ladder = build_ladder(dist, n_max);

  AlmostEverywhereModification out;
  out.ladder = ladder.levels;
  out.modified_prefix.reserve(static_cast<std::size_t>(n_max));
  std::vector<std::uint64_t> disagree;
  for (std::uint64_t m = 1; m <= n_max; ++m) {
    const double threshold = std::ldexp(1.0, -static_cast<int>(level_of(ladder, m)));
    if (dist[static_cast<std::size_t>(m - 1)] < threshold) {
      out.modified_prefix.push_back(family.at(m));
    } else {
      out.modified_prefix.push_back(st_limit);
      disagree.push_back(m);
    }
  }
  for (std::uint64_t n : sched.ns) {
    auto upper = std::upper_bound(disagree.begin(), disagree.end(), n);
    auto count = static_cast<double>(upper - disagree.begin());
    out.disagreement_ratios.emplace_back(n, count / static_cast<double>(n));
  }
  out.disagreement = IndexSet::explicit_list(std::move(disagree));
  return out;
}

std::vector<std::uint64_t> convergent_subsequence(const SMetric& s,
                                                  const SequenceFamily& family,
                                                  const Point& st_limit,
                                                  std::uint64_t n_max, Exec exec) {
  auto mod = ae_modification(s, family, st_limit, n_max, exec);
  auto disagree = mod.disagreement.members_up_to(n_max);
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(n_max) - disagree.size());
  std::size_t di = 0;
  for (std::uint64_t m = 1; m <= n_max; ++m) {
    if (di < disagree.size() && disagree[di] == m) {
      ++di;
      continue;
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace smetric
