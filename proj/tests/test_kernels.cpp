#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "smetric/kernels.hpp"

using namespace smetric;
using kernels::Exec;

namespace {

const SMetric& space() {
  static SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  return s;
}

// Brute-force reference: one S evaluation per index, no blocking, no merge.
struct BruteStats {
  std::vector<std::uint64_t> counts_at;
  std::uint64_t first = 0, last = 0, total = 0;
};

std::vector<BruteStats> brute_scan(const SequenceFamily& fam, const Point& cand,
                                   const std::vector<double>& thresholds,
                                   const std::vector<std::uint64_t>& checkpoints) {
  std::vector<BruteStats> out(thresholds.size());
  for (auto& b : out) b.counts_at.assign(checkpoints.size(), 0);
  for (std::uint64_t n = 1; n <= checkpoints.back(); ++n) {
    double d = space()(fam.at(n), fam.at(n), cand);
    for (std::size_t t = 0; t < thresholds.size(); ++t)
      if (d >= thresholds[t]) {
        if (out[t].first == 0) out[t].first = n;
        out[t].last = n;
        ++out[t].total;
        for (std::size_t c = 0; c < checkpoints.size(); ++c)
          if (n <= checkpoints[c]) ++out[t].counts_at[c];
      }
  }
  return out;
}

bool equal_results(const kernels::ScanResult& a, const kernels::ScanResult& b) {
  if (a.checkpoints != b.checkpoints) return false;
  if (a.max_value != b.max_value || a.argmax != b.argmax) return false;
  if (a.per_threshold.size() != b.per_threshold.size()) return false;
  for (std::size_t t = 0; t < a.per_threshold.size(); ++t) {
    const auto& x = a.per_threshold[t];
    const auto& y = b.per_threshold[t];
    if (x.counts_at != y.counts_at || x.first_exceedance != y.first_exceedance ||
        x.last_exceedance != y.last_exceedance || x.total != y.total)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("exceedance scan matches the brute-force loop") {
  SequenceFamily fam = square_spike_family();
  Point origin{0.0, 0.0};
  std::vector<double> thresholds = {1.0, 0.1};
  std::vector<std::uint64_t> checkpoints = {100, 1000, 20000};

  auto brute = brute_scan(fam, origin, thresholds, checkpoints);
  auto scan = kernels::scan_exceedances(space(), fam, origin, thresholds, checkpoints,
                                        Exec::Parallel);

  REQUIRE(scan.per_threshold.size() == 2);
  for (std::size_t t = 0; t < 2; ++t) {
    CHECK(scan.per_threshold[t].counts_at == brute[t].counts_at);
    CHECK(scan.per_threshold[t].first_exceedance == brute[t].first);
    CHECK(scan.per_threshold[t].last_exceedance == brute[t].last);
    CHECK(scan.per_threshold[t].total == brute[t].total);
  }
  // Spikes are the only exceedances; the max sits on the largest square.
  CHECK(scan.argmax == 19881);  // 141^2
  CHECK(scan.max_value == doctest::Approx(2.0 * std::sqrt(2.0) * 141).epsilon(1e-12));
  CHECK(scan.per_threshold[0].counts_at.back() == 141);
}

TEST_CASE("serial and parallel scans agree bit for bit") {
  std::vector<double> thresholds = {2.0, 1.0, 0.5, 0.01};
  std::vector<std::uint64_t> checkpoints = {1000, 10000, 100000, 300000};
  Point cand{0.1, -0.2};
  for (const char* expr :
       {"example3_1", "example4_1", "perturb(example3_1; 1/n)", "drift(1,0)",
        "periodic((0,0),(3,4))", "reciprocal(1,1; 1,0)"}) {
    SequenceFamily fam = parse_family(expr);
    auto serial =
        kernels::scan_exceedances_serial(space(), fam, cand, thresholds, checkpoints);
    auto parallel = kernels::scan_exceedances(space(), fam, cand, thresholds,
                                              checkpoints, Exec::Parallel);
    auto forced_serial = kernels::scan_exceedances(space(), fam, cand, thresholds,
                                                   checkpoints, Exec::Serial);
    CHECK(equal_results(serial, parallel));
    CHECK(equal_results(serial, forced_serial));
  }
}

TEST_CASE("block boundaries do not leak into the results") {
  // Checkpoints straddling the internal block size exercise the merge path.
  SequenceFamily fam = parse_family("perturb(periodic((0,0),(3,4)); 1/n)");
  std::vector<double> thresholds = {5.0};
  std::vector<std::uint64_t> checkpoints = {65535, 65536, 65537, 131073};
  auto serial =
      kernels::scan_exceedances_serial(space(), fam, Point{0.0, 0.0}, thresholds, checkpoints);
  auto parallel = kernels::scan_exceedances(space(), fam, Point{0.0, 0.0}, thresholds,
                                            checkpoints, Exec::Parallel);
  CHECK(equal_results(serial, parallel));
  CHECK(serial.checkpoints == std::vector<std::uint64_t>{65535, 65536, 65537, 131073});
}

TEST_CASE("materialized distances equal pointwise evaluation") {
  SequenceFamily fam = parse_family("reciprocal(0,0; 0,1)");
  Point cand{0.0, 0.0};
  auto dist = kernels::materialize_distances(space(), fam, cand, 500, Exec::Parallel);
  REQUIRE(dist.size() == 500);
  for (std::uint64_t n = 1; n <= 500; ++n)
    CHECK(dist[n - 1] == space()(fam.at(n), fam.at(n), cand));
  CHECK(dist[0] == doctest::Approx(2.0));  // x_1 = (0,1), distance 2*1
}

TEST_CASE("pair sampling is deterministic and covers the tail window") {
  auto pairs = kernels::sample_pairs(10000, 16, 100, 42);
  auto again = kernels::sample_pairs(10000, 16, 100, 42);
  CHECK(pairs == again);
  auto other = kernels::sample_pairs(10000, 16, 100, 43);
  CHECK(pairs != other);

  // All 16*15/2 tail pairs are present, ordered, in range.
  std::size_t tail = 0;
  for (auto [n, m] : pairs) {
    CHECK(n < m);
    CHECK(n >= 1);
    CHECK(m <= 10000);
    if (n > 10000 - 16) ++tail;
  }
  CHECK(tail >= 16 * 15 / 2);
  CHECK(pairs.size() >= 16 * 15 / 2);
  CHECK(pairs.size() <= 16 * 15 / 2 + 100);
}

TEST_CASE("pair scan agrees across execution modes and with direct evaluation") {
  std::vector<double> thresholds = {1.0, 0.25};
  for (const char* expr : {"example3_1", "reciprocal(1,1; 1,0)", "drift(1,0)"}) {
    SequenceFamily fam = parse_family(expr);
    auto pairs = kernels::sample_pairs(50000, 64, 500, default_seed());
    auto serial = kernels::scan_pairs_serial(space(), fam, pairs, thresholds, 50000);
    auto parallel =
        kernels::scan_pairs(space(), fam, pairs, thresholds, 50000, Exec::Parallel);

    REQUIRE(serial.per_threshold.size() == parallel.per_threshold.size());
    for (std::size_t t = 0; t < serial.per_threshold.size(); ++t) {
      const auto& a = serial.per_threshold[t];
      const auto& b = parallel.per_threshold[t];
      CHECK(a.last_min_exceedance == b.last_min_exceedance);
      CHECK(a.count == b.count);
      CHECK(a.late_count == b.late_count);
      CHECK(a.witness_n == b.witness_n);
      CHECK(a.witness_m == b.witness_m);
    }
    CHECK(serial.max_value == parallel.max_value);
    CHECK(serial.max_n == parallel.max_n);
    CHECK(serial.max_m == parallel.max_m);

    // Count oracle by direct evaluation.
    std::uint64_t direct = 0;
    for (auto [n, m] : pairs)
      if (space()(fam.at(n), fam.at(n), fam.at(m)) >= thresholds[0]) ++direct;
    CHECK(serial.per_threshold[0].count == direct);
  }
}

TEST_CASE("pairwise diameter matches the quadratic oracle") {
  std::vector<Point> pts;
  for (int i = 0; i < 123; ++i)
    pts.push_back(Point{std::cos(0.37 * i) * (i % 7), std::sin(0.51 * i) * (i % 5)});

  double best = -1;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double v = space()(pts[i], pts[i], pts[j]);
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }

  auto serial = kernels::pairwise_diameter(space(), pts, Exec::Serial);
  auto parallel = kernels::pairwise_diameter(space(), pts, Exec::Parallel);
  CHECK(serial.value == best);
  CHECK(serial.i == bi);
  CHECK(serial.j == bj);
  CHECK(parallel.value == serial.value);
  CHECK(parallel.i == serial.i);
  CHECK(parallel.j == serial.j);
}

TEST_CASE("thread count is at least one") { CHECK(kernels::max_threads() >= 1); }
