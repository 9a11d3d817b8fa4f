#include "smetric/density.hpp"

#include <algorithm>
#include <cmath>

namespace smetric {

std::string to_string(DensityVerdict v) {
  switch (v) {
    case DensityVerdict::Zero: return "zero";
    case DensityVerdict::Positive: return "positive";
    case DensityVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

TrendFit fit_inverse_sqrt_trend(std::span<const std::uint64_t> ns,
                                std::span<const double> ratios) {
  if (ns.size() != ratios.size() || ns.size() < 2)
    throw UsageError("trend fit needs at least two (n, ratio) samples");
  const std::size_t k = ns.size();
  double mx = 0, my = 0;
  std::vector<double> xs(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = 1.0 / std::sqrt(static_cast<double>(ns[i]));
    mx += xs[i];
    my += ratios[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double cov = 0, var = 0;
  for (std::size_t i = 0; i < k; ++i) {
    cov += (xs[i] - mx) * (ratios[i] - my);
    var += (xs[i] - mx) * (xs[i] - mx);
  }
  TrendFit fit;
  fit.coeff = var > 0 ? cov / var : 0.0;
  fit.limit = my - fit.coeff * mx;
  fit.fitted.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    fit.fitted[i] = fit.limit + fit.coeff * xs[i];
    fit.max_residual = std::max(fit.max_residual, std::fabs(fit.fitted[i] - ratios[i]));
  }
  return fit;
}

std::vector<double> DensityEstimate::ratios() const {
  std::vector<double> out;
  out.reserve(prefix_counts.size());
  for (auto [n, c] : prefix_counts)
    out.push_back(static_cast<double>(c) / static_cast<double>(n));
  return out;
}

double DensityEstimate::final_ratio() const {
  if (prefix_counts.empty()) return 0;
  auto [n, c] = prefix_counts.back();
  return static_cast<double>(c) / static_cast<double>(n);
}

DensityEstimate estimate_from_counts(
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts,
    std::optional<double> exact, std::string note) {
  DensityEstimate est;
  est.prefix_counts = std::move(counts);
  est.exact = exact;
  est.note = std::move(note);
  if (exact) {
    if (*exact <= 1e-15) {
      est.verdict = DensityVerdict::Zero;
    } else {
      est.verdict = DensityVerdict::Positive;
      est.positive_value = *exact;
    }
    return est;
  }
  if (est.prefix_counts.size() < 2) return est;  // Inconclusive
  auto r = est.ratios();
  bool monotone = true;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] > r[i - 1] + kMonotoneSlack) monotone = false;
  if (monotone && r.back() < kZeroFinalRatioFactor * (r.front() + 1.0)) {
    est.verdict = DensityVerdict::Zero;
    return est;
  }
  std::vector<std::uint64_t> ns;
  ns.reserve(est.prefix_counts.size());
  for (auto [n, c] : est.prefix_counts) ns.push_back(n);
  TrendFit fit = fit_inverse_sqrt_trend(ns, r);
  est.trend = fit.fitted;
  double limit = std::clamp(fit.limit, 0.0, 1.0);
  if (fit.max_residual <= kPositiveFitResidual && limit >= kPositiveFloor) {
    est.verdict = DensityVerdict::Positive;
    est.positive_value = limit;
  }
  return est;
}

void validate_n_schedule(std::span<const std::uint64_t> ns) {
  if (ns.size() < 2) throw UsageError("n schedule needs at least two lengths");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw UsageError("n schedule entries must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1])
      throw UsageError("n schedule must be strictly increasing");
  }
  if (ns.back() < 1000) throw UsageError("n schedule must reach at least 1000");
}

void validate_eps_schedule(std::span<const double> eps) {
  if (eps.empty()) throw UsageError("epsilon schedule must be non-empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw UsageError("epsilon values must be positive");
    if (i > 0 && eps[i] >= eps[i - 1])
      throw UsageError("epsilon schedule must be strictly decreasing");
  }
}

DensityEstimate natural_density(const IndexSet& set,
                                std::span<const std::uint64_t> n_schedule) {
  validate_n_schedule(n_schedule);
  auto counts = set.prefix_counts(n_schedule);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  pairs.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    pairs.emplace_back(n_schedule[i], counts[i]);
  auto exact = set.exact_density();
  std::string note = exact ? "exact density from structure" : "prefix estimate";
  return estimate_from_counts(std::move(pairs), exact, std::move(note));
}

DensityEstimate union_density_bound(const DensityEstimate& a, const DensityEstimate& b) {
  DensityEstimate out;
  out.note = "subadditive bound";
  if (a.exact && b.exact) {
    out.exact = std::min(1.0, *a.exact + *b.exact);
    out.verdict = *out.exact <= 1e-15 ? DensityVerdict::Zero : DensityVerdict::Positive;
    if (out.verdict == DensityVerdict::Positive) out.positive_value = *out.exact;
    return out;
  }
  if (a.verdict == DensityVerdict::Zero && b.verdict == DensityVerdict::Zero) {
    out.verdict = DensityVerdict::Zero;
    return out;
  }
  out.verdict = DensityVerdict::Inconclusive;
  return out;
}

std::vector<std::uint64_t> default_n_schedule() { return {1000, 10000, 100000, 1000000}; }
std::vector<std::uint64_t> smoke_n_schedule() { return {1000, 10000}; }
std::vector<double> default_eps_schedule() { return {1.0, 0.1, 0.01, 0.001}; }
std::vector<double> smoke_eps_schedule() { return {1.0, 0.1}; }

}  // namespace smetric
