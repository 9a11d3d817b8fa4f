#include "smetric/kernels.hpp"

#include <algorithm>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smetric/rng.hpp"

namespace smetric::kernels {

namespace {

constexpr std::uint64_t kBlockSize = 1 << 16;

void validate_checkpoints(std::span<const std::uint64_t> checkpoints) {
  if (checkpoints.empty()) throw UsageError("scan needs at least one checkpoint");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0) throw UsageError("checkpoints must be >= 1");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw UsageError("checkpoints must be strictly increasing");
  }
}

void prevalidate(const SMetric& s, const SequenceFamily& family, const Point& candidate,
                 std::uint64_t n_max) {
  if (family.finite_data() && n_max > family.data_limit())
    throw UsageError("scan range exceeds the data of an explicit-prefix family");
  (void)s(family.at(1), family.at(1), candidate);  // surfaces dimension errors early
}

/// Index of the segment (gap between checkpoints) containing n:
/// segment k covers (checkpoints[k-1], checkpoints[k]].
std::size_t segment_of(std::span<const std::uint64_t> checkpoints, std::uint64_t n) {
  return static_cast<std::size_t>(
      std::lower_bound(checkpoints.begin(), checkpoints.end(), n) - checkpoints.begin());
}

struct BlockAcc {
  // seg_counts[t * n_segments + seg] = exceedances of threshold t in this
  // block that fall inside segment seg.
  std::vector<std::uint64_t> seg_counts;
  std::vector<std::uint64_t> first, last;
  double max_value = -1;
  std::uint64_t argmax = 0;
  std::exception_ptr error;
};

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

ScanResult scan_exceedances_serial(const SMetric& s, const SequenceFamily& family,
                                   const Point& candidate,
                                   std::span<const double> thresholds,
                                   std::span<const std::uint64_t> checkpoints) {
  validate_checkpoints(checkpoints);
  const std::uint64_t n_max = checkpoints.back();
  prevalidate(s, family, candidate, n_max);

  ScanResult result;
  result.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  result.per_threshold.resize(thresholds.size());
  for (auto& stats : result.per_threshold) stats.counts_at.resize(checkpoints.size(), 0);
  result.max_value = -1;

  std::size_t cp = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    Point x = family.at(n);
    double d = s(x, x, candidate);
    if (d > result.max_value) {
      result.max_value = d;
      result.argmax = n;
    }
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (d >= thresholds[t]) {
        auto& stats = result.per_threshold[t];
        ++stats.total;
        if (stats.first_exceedance == 0) stats.first_exceedance = n;
        stats.last_exceedance = n;
      }
    }
    while (cp < checkpoints.size() && checkpoints[cp] == n) {
      for (std::size_t t = 0; t < thresholds.size(); ++t)
        result.per_threshold[t].counts_at[cp] = result.per_threshold[t].total;
      ++cp;
    }
  }
  if (result.max_value < 0) result.max_value = 0;
  return result;
}

ScanResult scan_exceedances(const SMetric& s, const SequenceFamily& family,
                            const Point& candidate, std::span<const double> thresholds,
                            std::span<const std::uint64_t> checkpoints, Exec exec) {
  if (exec == Exec::Serial)
    return scan_exceedances_serial(s, family, candidate, thresholds, checkpoints);

  validate_checkpoints(checkpoints);
  const std::uint64_t n_max = checkpoints.back();
  prevalidate(s, family, candidate, n_max);

  const std::size_t n_thresholds = thresholds.size();
  const std::size_t n_segments = checkpoints.size();
  const auto n_blocks =
      static_cast<std::size_t>((n_max + kBlockSize - 1) / kBlockSize);
  std::vector<BlockAcc> blocks(n_blocks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(n_blocks); ++bi) {
    BlockAcc& acc = blocks[static_cast<std::size_t>(bi)];
    try {
      acc.seg_counts.assign(n_thresholds * n_segments, 0);
      acc.first.assign(n_thresholds, 0);
      acc.last.assign(n_thresholds, 0);
      const std::uint64_t lo = static_cast<std::uint64_t>(bi) * kBlockSize + 1;
      const std::uint64_t hi = std::min(n_max, lo + kBlockSize - 1);
      std::size_t seg = segment_of(checkpoints, lo);
      for (std::uint64_t n = lo; n <= hi; ++n) {
        while (checkpoints[seg] < n) ++seg;
        Point x = family.at(n);
        double d = s(x, x, candidate);
        if (d > acc.max_value) {
          acc.max_value = d;
          acc.argmax = n;
        }
        for (std::size_t t = 0; t < n_thresholds; ++t) {
          if (d >= thresholds[t]) {
            ++acc.seg_counts[t * n_segments + seg];
            if (acc.first[t] == 0) acc.first[t] = n;
            acc.last[t] = n;
          }
        }
      }
    } catch (...) {
      acc.error = std::current_exception();
    }
  }

  for (const BlockAcc& acc : blocks)
    if (acc.error) std::rethrow_exception(acc.error);

  ScanResult result;
  result.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  result.per_threshold.resize(n_thresholds);
  result.max_value = -1;
  for (const BlockAcc& acc : blocks) {
    if (acc.max_value > result.max_value) {
      result.max_value = acc.max_value;
      result.argmax = acc.argmax;
    }
  }
  if (result.max_value < 0) result.max_value = 0;
  for (std::size_t t = 0; t < n_thresholds; ++t) {
    auto& stats = result.per_threshold[t];
    stats.counts_at.resize(n_segments, 0);
    std::uint64_t running = 0;
    for (std::size_t seg = 0; seg < n_segments; ++seg) {
      std::uint64_t seg_total = 0;
      for (const BlockAcc& acc : blocks) seg_total += acc.seg_counts[t * n_segments + seg];
      running += seg_total;
      stats.counts_at[seg] = running;
    }
    stats.total = running;
    for (const BlockAcc& acc : blocks) {
      if (acc.first[t] != 0) {
        stats.first_exceedance = acc.first[t];
        break;
      }
    }
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      if (it->last[t] != 0) {
        stats.last_exceedance = it->last[t];
        break;
      }
    }
  }
  return result;
}

std::vector<double> materialize_distances(const SMetric& s, const SequenceFamily& family,
                                          const Point& candidate, std::uint64_t n_max,
                                          Exec exec) {
  if (n_max == 0) throw UsageError("prefix length must be >= 1");
  prevalidate(s, family, candidate, n_max);
  std::vector<double> out(static_cast<std::size_t>(n_max));
  if (exec == Exec::Serial) {
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      Point x = family.at(n);
      out[static_cast<std::size_t>(n - 1)] = s(x, x, candidate);
    }
    return out;
  }
  const auto n_blocks = static_cast<std::size_t>((n_max + kBlockSize - 1) / kBlockSize);
  std::vector<std::exception_ptr> errors(n_blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(n_blocks); ++bi) {
    try {
      const std::uint64_t lo = static_cast<std::uint64_t>(bi) * kBlockSize + 1;
      const std::uint64_t hi = std::min(n_max, lo + kBlockSize - 1);
      for (std::uint64_t n = lo; n <= hi; ++n) {
        Point x = family.at(n);
        out[static_cast<std::size_t>(n - 1)] = s(x, x, candidate);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(bi)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_pairs(std::uint64_t n_max,
                                                                  std::uint64_t window,
                                                                  std::size_t n_random,
                                                                  std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  if (n_max < 2) return pairs;
  const std::uint64_t w = std::min(window, n_max);
  const std::uint64_t lo = n_max - w + 1;
  pairs.reserve(static_cast<std::size_t>(w * (w - 1) / 2) + n_random);
  for (std::uint64_t i = lo; i <= n_max; ++i)
    for (std::uint64_t j = i + 1; j <= n_max; ++j) pairs.emplace_back(i, j);
  SplitMix64 rng(seed);
  for (std::size_t k = 0; k < n_random; ++k) {
    std::uint64_t a = 1 + rng.below(n_max);
    std::uint64_t b = 1 + rng.below(n_max);
    if (a == b) b = a % n_max + 1;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return pairs;
}

PairScanResult scan_pairs_serial(const SMetric& s, const SequenceFamily& family,
                                 std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                                 std::span<const double> thresholds, std::uint64_t n_max) {
  PairScanResult result;
  result.per_threshold.resize(thresholds.size());
  result.max_value = -1;
  for (const auto& [n, m] : pairs) {
    Point xn = family.at(n);
    Point xm = family.at(m);
    double d = s(xn, xn, xm);
    if (d > result.max_value) {
      result.max_value = d;
      result.max_n = n;
      result.max_m = m;
    }
    const std::uint64_t mn = std::min(n, m);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      if (d >= thresholds[t]) {
        auto& stats = result.per_threshold[t];
        ++stats.count;
        if (2 * mn >= n_max) ++stats.late_count;
        if (mn > stats.last_min_exceedance) {
          stats.last_min_exceedance = mn;
          stats.witness_n = n;
          stats.witness_m = m;
        }
      }
    }
  }
  if (result.max_value < 0) result.max_value = 0;
  return result;
}

PairScanResult scan_pairs(const SMetric& s, const SequenceFamily& family,
                          std::span<const std::pair<std::uint64_t, std::uint64_t>> pairs,
                          std::span<const double> thresholds, std::uint64_t n_max,
                          Exec exec) {
  if (exec == Exec::Serial || pairs.empty())
    return scan_pairs_serial(s, family, pairs, thresholds, n_max);

  constexpr std::size_t kPairBlock = 4096;
  const std::size_t n_blocks = (pairs.size() + kPairBlock - 1) / kPairBlock;
  std::vector<PairScanResult> partial(n_blocks);
  std::vector<std::exception_ptr> errors(n_blocks);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(n_blocks); ++bi) {
    try {
      const std::size_t lo = static_cast<std::size_t>(bi) * kPairBlock;
      const std::size_t hi = std::min(pairs.size(), lo + kPairBlock);
      partial[static_cast<std::size_t>(bi)] =
          scan_pairs_serial(s, family, pairs.subspan(lo, hi - lo), thresholds, n_max);
    } catch (...) {
      errors[static_cast<std::size_t>(bi)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PairScanResult result;
  result.per_threshold.resize(thresholds.size());
  result.max_value = -1;
  for (const PairScanResult& p : partial) {
    if (p.max_value > result.max_value) {
      result.max_value = p.max_value;
      result.max_n = p.max_n;
      result.max_m = p.max_m;
    }
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      auto& stats = result.per_threshold[t];
      const auto& ps = p.per_threshold[t];
      stats.count += ps.count;
      stats.late_count += ps.late_count;
      if (ps.last_min_exceedance > stats.last_min_exceedance) {
        stats.last_min_exceedance = ps.last_min_exceedance;
        stats.witness_n = ps.witness_n;
        stats.witness_m = ps.witness_m;
      }
    }
  }
  if (result.max_value < 0) result.max_value = 0;
  return result;
}

DiameterResult pairwise_diameter(const SMetric& s, std::span<const Point> points, Exec exec) {
  DiameterResult result;
  if (points.size() < 2) return result;
  const std::size_t m = points.size();
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i + 1 < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double d = s(points[i], points[i], points[j]);
        if (d > result.value) {
          result.value = d;
          result.i = i;
          result.j = j;
        }
      }
    }
    return result;
  }
  std::vector<DiameterResult> rows(m);
  std::vector<std::exception_ptr> errors(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(m); ++ii) {
    try {
      auto i = static_cast<std::size_t>(ii);
      DiameterResult& best = rows[i];
      for (std::size_t j = i + 1; j < m; ++j) {
        double d = s(points[i], points[i], points[j]);
        if (d > best.value) {
          best.value = d;
          best.i = i;
          best.j = j;
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(ii)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const DiameterResult& row : rows) {
    if (row.value > result.value) result = row;
  }
  return result;
}

}  // namespace smetric::kernels
