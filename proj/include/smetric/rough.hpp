#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smetric/statistical.hpp"

namespace smetric {

/// Rough statistical convergence with degree r >= 0: the exceedance sets are
/// {n : S(x_n, x_n, candidate) >= r + eps}. r = 0 reduces to st_converges.
StConvergenceVerdict rough_st_converges(const SMetric& s, const SequenceFamily& family,
                                        const Point& candidate, double roughness,
                                        std::span<const double> eps_schedule,
                                        std::span<const std::uint64_t> n_schedule,
                                        Exec exec = Exec::Parallel,
                                        EvidenceMode mode = EvidenceMode::Full);

/// Axis-aligned box, lo <= hi componentwise.
struct Region {
  Point lo, hi;
};

struct GridOptions {
  /// Search box. Defaults to the bounding box of the bulk of the prefix
  /// (top 1% of distances to the medoid dropped), inflated by roughness + 1.
  std::optional<Region> region;
  /// Grid pitch. Defaults to max(roughness / 8, 0.05) and is coarsened
  /// automatically until the box fits in max_cells. An explicit step that
  /// exceeds max_cells throws UsageError instead.
  std::optional<double> step;
  bool prefer_exact_ball = true;
  std::size_t max_cells = std::size_t{1} << 18;
  EvidenceMode evidence = EvidenceMode::StructuralFastPath;
};

/// Estimate of the degree-r statistical limit set. When the family carries a
/// statistical limit that checks out, the set is reported exactly as the
/// closed ball of radius r around it (with a boundary sample in members).
/// Otherwise every grid cell of the search box is tested and members holds
/// the Holds cells. diameter_estimate is filled on both routes.
RoughLimitSet estimate_rough_limit_set(const SMetric& s, const SequenceFamily& family,
                                       double roughness, const GridOptions& options,
                                       const Schedules& schedules,
                                       Exec exec = Exec::Parallel);

/// Points just inside the sphere {y : S(y, y, center) = radius}, found by
/// bisection along deterministic directions (even angles in dim 2, seeded
/// unit vectors otherwise).
std::vector<Point> ball_boundary_sample(const SMetric& s, const Ball& ball,
                                        std::size_t count,
                                        std::uint64_t seed = default_seed());

/// Diameter sup S(y, y, z) over the ball, estimated from a boundary sample.
double ball_diameter(const SMetric& s, const Ball& ball, std::size_t directions = 512,
                     std::uint64_t seed = default_seed());

inline constexpr double kDiameterSlack = 1e-6;

struct DiamBoundReport {
  bool pass = false;
  double diameter = 0;
  double bound = 0;  // 3 * roughness + kDiameterSlack
};

/// The diameter of a degree-r limit set never exceeds 3r.
DiamBoundReport diam_bound_check(const RoughLimitSet& set);

struct ClosednessReport {
  bool pass = false;
  Point limit;  // Aitken extrapolation of the member sequence
  StConvergenceVerdict limit_verdict;
  std::vector<double> gaps;  // S-gaps between consecutive members
};

/// Closedness probe: `members` must be a sequence inside the limit set with
/// S-gaps non-increasing and final gap <= 1e-3 (UsageError otherwise, as for
/// any member that does not Hold). Passes when the extrapolated limit point
/// lands in the set as well.
ClosednessReport limit_set_closed_check(const SMetric& s, const SequenceFamily& family,
                                        double roughness, std::span<const Point> members,
                                        const Schedules& schedules,
                                        Exec exec = Exec::Parallel);

struct SubsequenceReport {
  bool pass = false;
  DensityEstimate subset_density;
  struct PerCandidate {
    Point candidate;
    Verdict full_verdict = Verdict::Inconclusive;
    Verdict sub_verdict = Verdict::Inconclusive;
  };
  std::vector<PerCandidate> per_candidate;
  std::uint64_t sub_length = 0;  // members of the subset within the schedule
};

/// Rough statistical limits survive restriction to a density-one index set.
/// `subset` must have density one (exact, or estimated Positive >= 0.99;
/// UsageError otherwise). The subsequence is the rule p -> x at the p-th
/// member of the subset, so it stays a total family and verdicts are not
/// capped. Passes when every candidate that Holds on the full sequence also
/// Holds on the subsequence.
SubsequenceReport subsequence_limitset_check(const SMetric& s,
                                             const SequenceFamily& family,
                                             std::span<const Point> candidates,
                                             double roughness, const IndexSet& subset,
                                             const Schedules& schedules,
                                             Exec exec = Exec::Parallel);

struct PerturbationReport {
  bool pass = false;
  Verdict base_verdict = Verdict::Inconclusive;
  Verdict perturbed_verdict = Verdict::Inconclusive;
  DecayKind decay = DecayKind::OneOverN;
};

/// Adding a decaying perturbation must not change the rough statistical
/// verdict at any candidate. Passes when the verdicts agree.
PerturbationReport perturbation_equivalence_check(const SMetric& s,
                                                  const SequenceFamily& family,
                                                  const Point& candidate,
                                                  double roughness, DecayKind decay,
                                                  const Schedules& schedules,
                                                  Exec exec = Exec::Parallel);

/// Statistical cluster point: every hit set {n : S(x_n, x_n, point) < eps}
/// has positive density. Holds when all hit densities are Positive, Fails
/// when any is Zero.
ClusterVerdict cluster_point_check(const SMetric& s, const SequenceFamily& family,
                                   const Point& point,
                                   std::span<const double> eps_schedule,
                                   std::span<const std::uint64_t> n_schedule,
                                   Exec exec = Exec::Parallel);

struct BallCoverReport {
  bool pass = false;
  double worst = 0;  // largest S(member, member, cluster point) seen
  double tolerance = 0;
  std::size_t pairs_checked = 0;
};

/// Every point of the degree-r limit set lies within r of every statistical
/// cluster point, with 1e-6 absolute slack for members that sit exactly on
/// the closed-ball boundary. Each cluster point must pass
/// cluster_point_check (UsageError otherwise).
BallCoverReport cluster_ball_cover_check(const SMetric& s, const SequenceFamily& family,
                                         const RoughLimitSet& set,
                                         std::span<const Point> cluster_points,
                                         const Schedules& schedules,
                                         Exec exec = Exec::Parallel);

struct BoundedEquivalenceReport {
  bool pass = false;
  StBoundednessVerdict bounded;
  /// Rough verdict at the boundedness reference and bound (Holds side).
  std::optional<StConvergenceVerdict> forward;
  /// Per roughness value, the number of Holds cells in the search sweep
  /// (Fails side).
  std::vector<std::pair<double, std::size_t>> backward_holds;
  bool limit_set_found = false;
  std::string note;
};

/// Statistical boundedness is equivalent to a non-empty degree-r limit set
/// for some r. Forward: a boundedness bound B certifies the reference point
/// as a degree-B rough limit. Backward: an unbounded family admits no rough
/// limit on a roughness sweep over a coarse candidate grid.
BoundedEquivalenceReport bounded_iff_nonempty_check(const SMetric& s,
                                                    const SequenceFamily& family,
                                                    const Schedules& schedules,
                                                    Exec exec = Exec::Parallel);

}  // namespace smetric
