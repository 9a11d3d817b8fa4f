#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "smetric/point.hpp"
#include "smetric/sequence.hpp"
#include "smetric/smetric_space.hpp"

namespace smetric::kernels {

enum class Exec { Serial, Parallel };

/// Exceedance statistics for one threshold over a scanned prefix.
struct ThresholdStats {
  std::vector<std::uint64_t> counts_at;  // cumulative count at each checkpoint
  std::uint64_t first_exceedance = 0;    // 0 when the set is empty
  std::uint64_t last_exceedance = 0;
  std::uint64_t total = 0;
};

struct ScanResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<ThresholdStats> per_threshold;
  double max_value = 0;
  std::uint64_t argmax = 0;
};

/// Computes, in one pass over n = 1..checkpoints.back(), the exceedance
/// statistics of D(n) = S(x_n, x_n, candidate) against every threshold, plus
/// the maximum of D. Checkpoints must be strictly increasing.
///
/// The parallel path partitions the range into fixed-size blocks that do not
/// depend on the thread count and merges per-block integer counts in block
/// order, so its output is identical to the serial reference for any
/// schedule and any number of threads.
ScanResult scan_exceedances(const SMetric& s, const SequenceFamily& family,
                            const Point& candidate, std::span<const double> thresholds,
                            std::span<const std::uint64_t> checkpoints, Exec exec);

/// Straight-line single-loop reference for scan_exceedances.
ScanResult scan_exceedances_serial(const SMetric& s, const SequenceFamily& family,
                                   const Point& candidate,
                                   std::span<const double> thresholds,
                                   std::span<const std::uint64_t> checkpoints);

/// D(n) for n = 1..n_max as a materialized vector (D as above).
std::vector<double> materialize_distances(const SMetric& s, const SequenceFamily& family,
                                          const Point& candidate, std::uint64_t n_max,
                                          Exec exec);

/// Deterministic pair sample over [1, n_max]: every unordered pair of the
/// last `window` indices plus `n_random` seeded long-range pairs.
std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_pairs(std::uint64_t n_max,
                                                                  std::uint64_t window,
                                                                  std::size_t n_random,
                                                                  std::uint64_t seed);

struct PairThresholdStats {
  /// Largest min(n, m) over exceeding pairs; 0 when none exceed.
  std::uint64_t last_min_exceedance = 0;
  std::uint64_t count = 0;
  /// Exceeding pairs whose min(n, m) falls in the second half of the prefix.
  std::uint64_t late_count = 0;
  std::uint64_t witness_n = 0, witness_m = 0;  // pair realizing last_min_exceedance
};

struct PairScanResult {
  std::vector<PairThresholdStats> per_threshold;
  double max_value = 0;
  std::uint64_t max_n = 0, max_m = 0;
};

/// Evaluates S(x_n, x_n, x_m) over the pair sample against every threshold.
/// Same determinism contract as scan_exceedances.
PairScanResult scan_pairs(const SMetric& s, const SequenceFamily& family,
                          std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                          std::span<const double> thresholds, std::uint64_t n_max,
                          Exec exec);

PairScanResult scan_pairs_serial(const SMetric& s, const SequenceFamily& family,
                                 std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                 std::span<const double> thresholds, std::uint64_t n_max);

/// Maximum pairwise S(p, p, q) over a point cloud with the lexicographically
/// first maximizing pair. Parallel and serial paths agree exactly.
struct DiameterResult {
  double value = 0;
  std::size_t i = 0, j = 0;
};

DiameterResult pairwise_diameter(const SMetric& s, std::span<const Point> points, Exec exec);

int max_threads();

}  // namespace smetric::kernels
