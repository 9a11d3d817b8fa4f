#pragma once

#include <cstdint>
#include <span>

#include "smetric/kernels.hpp"
#include "smetric/verdicts.hpp"

namespace smetric {

using kernels::Exec;

inline constexpr std::uint64_t kCauchyWindow = 512;
inline constexpr std::size_t kCauchyRandomPairs = 10000;

/// Prefix convergence to `candidate`: Holds when, for every epsilon, the
/// last exceedance of S(x_n, x_n, candidate) >= eps leaves a clean tail of
/// at least n_max/16 indices; Fails when exceedances at the coarsest epsilon
/// recur into the last sixteenth of the prefix; Inconclusive otherwise.
ConvergenceVerdict is_convergent_prefix(const SMetric& s, const SequenceFamily& family,
                                        const Point& candidate,
                                        std::span<const double> eps_schedule,
                                        std::uint64_t n_max, Exec exec = Exec::Parallel);

/// Rough convergence with degree r >= 0: identical to is_convergent_prefix
/// with every threshold shifted to r + eps. r = 0 reduces to it exactly.
ConvergenceVerdict rough_limit_check(const SMetric& s, const SequenceFamily& family,
                                     const Point& candidate, double r,
                                     std::span<const double> eps_schedule,
                                     std::uint64_t n_max, Exec exec = Exec::Parallel);

/// Prefix Cauchy check over sampled pairs: all pairs from the trailing
/// window plus seeded long-range pairs.
CauchyVerdict is_cauchy_prefix(const SMetric& s, const SequenceFamily& family,
                               std::span<const double> eps_schedule, std::uint64_t n_max,
                               Exec exec = Exec::Parallel, std::uint64_t seed = default_seed());

/// Prefix S-boundedness: running pairwise max at geometric checkpoints.
/// Holds with radius = final max plus a margin when the max has stabilized
/// (final checkpoint grew by at most 1%); Fails with the growth witness pair
/// otherwise.
SBoundednessVerdict is_s_bounded_prefix(const SMetric& s, const SequenceFamily& family,
                                        std::uint64_t n_max, Exec exec = Exec::Parallel,
                                        std::uint64_t seed = default_seed());

/// Geometric grid {2^-4, ..., 2^6} scaled by the median of
/// S(x_n, x_n, candidate) over the first min(n_probe, 4096) indices
/// (scale 1 when the median vanishes).
std::vector<double> default_roughness_grid(const SMetric& s, const SequenceFamily& family,
                                           const Point& candidate,
                                           std::uint64_t n_probe = 4096);

}  // namespace smetric
