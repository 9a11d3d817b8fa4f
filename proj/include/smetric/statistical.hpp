#pragma once

#include <cstdint>
#include <span>

#include "smetric/classical.hpp"
#include "smetric/verdicts.hpp"

namespace smetric {

/// Epsilon and prefix-length schedules used by the statistical layer.
struct Schedules {
  std::vector<double> eps;
  std::vector<std::uint64_t> ns;

  static Schedules standard();  // eps {1,...,1e-3}, ns {1e3,...,1e6}
  static Schedules smoke();     // eps {1, 0.1},     ns {1e3, 1e4}
  /// Standard schedule with every prefix length clipped to n_max.
  static Schedules standard_up_to(std::uint64_t n_max);
};

/// Whether analyses may skip the prefix scan once the family structure
/// yields an exact density for a threshold set. Full always scans.
enum class EvidenceMode { Full, StructuralFastPath };

struct ExceedanceReport {
  double threshold = 0;
  DensityEstimate density;
  std::uint64_t first_exceedance = 0;
  std::uint64_t last_exceedance = 0;
  std::uint64_t total = 0;
};

/// Density evidence for the sets {n : S(x_n, x_n, candidate) >= threshold},
/// one report per threshold. Structured families with an exact class
/// partition get exact densities (the spike classes must have density zero
/// to certify a Zero); everything else is estimated from one shared scan.
std::vector<ExceedanceReport> analyze_exceedances(
    const SMetric& s, const SequenceFamily& family, const Point& candidate,
    std::span<const double> thresholds, std::span<const std::uint64_t> n_schedule,
    Exec exec = Exec::Parallel, EvidenceMode mode = EvidenceMode::Full);

/// Statistical convergence to `candidate`: Holds when every epsilon's
/// exceedance set has a Zero density verdict, Fails when any is Positive.
StConvergenceVerdict st_converges(const SMetric& s, const SequenceFamily& family,
                                  const Point& candidate,
                                  std::span<const double> eps_schedule,
                                  std::span<const std::uint64_t> n_schedule,
                                  Exec exec = Exec::Parallel,
                                  EvidenceMode mode = EvidenceMode::Full);

struct UniquenessReport {
  bool pass = false;
  double separation = 0;
  double tolerance = 0;
  std::string detail;
};

inline constexpr double kUniquenessTolerance = 1e-6;

/// Two Holds verdicts for the same family must name candidates within
/// kUniquenessTolerance in S-distance. Throws UsageError unless both hold.
UniquenessReport st_limit_unique_check(const SMetric& s, const StConvergenceVerdict& a,
                                       const StConvergenceVerdict& b);

/// Statistical Cauchy check: hunts witness indices N with a Zero-density
/// exceedance set {n : S(x_n, x_n, x_N) >= eps}, preferring tail indices
/// outside the coarsest exceedance set (taken against a medoid reference,
/// or class representatives for structured families).
StCauchyVerdict st_cauchy(const SMetric& s, const SequenceFamily& family,
                          std::span<const double> eps_schedule,
                          std::span<const std::uint64_t> n_schedule,
                          Exec exec = Exec::Parallel);

/// Statistical boundedness around ref_point: escalates B over
/// {2^0, ..., 2^7} times the median prefix distance (scale 1 when the
/// median vanishes) and holds at the first Zero-density exceedance set.
/// Fails when no B works and the largest B keeps a growing tail.
StBoundednessVerdict st_bounded(const SMetric& s, const SequenceFamily& family,
                                const Point& ref_point,
                                std::span<const std::uint64_t> n_schedule,
                                Exec exec = Exec::Parallel);

/// Modification of x on a density-zero index set that upgrades statistical
/// convergence to ordinary convergence on the prefix. Ladder levels double
/// the accuracy: indices in (n_k, n_{k+1}] keep x_m only when
/// S(x_m, x_m, limit) < 2^-k, and the k = 0 rule applies from the start.
struct AlmostEverywhereModification {
  std::vector<Point> modified_prefix;  // y_1 .. y_n_max
  IndexSet disagreement = IndexSet::finite({});  // {m : y_m != x_m}, explicit
  std::vector<std::uint64_t> ladder;   // n_1 < n_2 < ...
  std::vector<std::pair<std::uint64_t, double>> disagreement_ratios;

  SequenceFamily as_family(std::string name) const;
};

/// Requires st_converges(s, family, st_limit) to hold on the clipped
/// standard schedule; throws UsageError otherwise.
AlmostEverywhereModification ae_modification(const SMetric& s,
                                             const SequenceFamily& family,
                                             const Point& st_limit, std::uint64_t n_max,
                                             Exec exec = Exec::Parallel);

/// Medoid of the first `probe` points under S, searched on a stride of the
/// prefix. Used as a reference point by the unstructured analyses.
Point prefix_medoid(const SMetric& s, const SequenceFamily& family, std::uint64_t probe);

/// Indices (<= n_max, increasing) of a subsequence converging to st_limit:
/// the complement of the ae_modification disagreement set.
std::vector<std::uint64_t> convergent_subsequence(const SMetric& s,
                                                  const SequenceFamily& family,
                                                  const Point& st_limit,
                                                  std::uint64_t n_max,
                                                  Exec exec = Exec::Parallel);

}  // namespace smetric
