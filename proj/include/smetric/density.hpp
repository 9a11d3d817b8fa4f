#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smetric/index_set.hpp"

namespace smetric {

enum class DensityVerdict { Zero, Positive, Inconclusive };
std::string to_string(DensityVerdict v);

inline constexpr double kZeroFinalRatioFactor = 1e-2;
inline constexpr double kPositiveFitResidual = 1e-3;
inline constexpr double kPositiveFloor = 1e-2;
inline constexpr double kMonotoneSlack = 1e-12;

/// Least-squares fit of ratio(n) = limit + coeff / sqrt(n). The 1/sqrt(n)
/// basis matches the transient left by a zero-density spike set, so for
/// eventually-flat ratio curves the fitted limit is the stabilized value.
struct TrendFit {
  double limit = 0;
  double coeff = 0;
  double max_residual = 0;
  std::vector<double> fitted;
};

TrendFit fit_inverse_sqrt_trend(std::span<const std::uint64_t> ns,
                                std::span<const double> ratios);

/// Density evidence for one set: an exact value when the structure certifies
/// one, otherwise prefix counts at the scheduled lengths plus the fitted
/// trend, and the three-valued verdict derived from them.
struct DensityEstimate {
  std::optional<double> exact;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> prefix_counts;  // (n, count)
  std::vector<double> trend;  // fitted ratios, empty when no fit was made
  DensityVerdict verdict = DensityVerdict::Inconclusive;
  double positive_value = 0;  // meaningful when verdict == Positive
  std::string note;

  std::vector<double> ratios() const;
  double final_ratio() const;
};

/// Builds the verdict from counts and/or an exact density. The exact value
/// wins when present; otherwise ratios that shrink monotonically to below
/// kZeroFinalRatioFactor * (first + 1) give Zero, ratios whose trend fit
/// stabilizes (max residual <= kPositiveFitResidual) at a limit >=
/// kPositiveFloor give Positive, and anything else is Inconclusive.
DensityEstimate estimate_from_counts(
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts,
    std::optional<double> exact, std::string note);

void validate_n_schedule(std::span<const std::uint64_t> ns);
void validate_eps_schedule(std::span<const double> eps);

/// Natural density of `set` along the schedule (strictly increasing, at
/// least two entries, last >= 1000).
DensityEstimate natural_density(const IndexSet& set,
                                std::span<const std::uint64_t> n_schedule);

/// Subadditive upper-bound combination: Zero + Zero stays Zero, exact values
/// add (clamped to 1), anything else is Inconclusive.
DensityEstimate union_density_bound(const DensityEstimate& a, const DensityEstimate& b);

std::vector<std::uint64_t> default_n_schedule();  // {1e3, 1e4, 1e5, 1e6}
std::vector<std::uint64_t> smoke_n_schedule();    // {1e3, 1e4}
std::vector<double> default_eps_schedule();       // {1, 0.1, 0.01, 0.001}
std::vector<double> smoke_eps_schedule();         // {1, 0.1}

}  // namespace smetric
