#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "smetric/classical.hpp"

using namespace smetric;

namespace {

const SMetric& space() {
  static SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  return s;
}

bool is_square(std::uint64_t n) {
  std::uint64_t k = std::uint64_t(std::sqrt(double(n)));
  for (std::uint64_t c = k > 0 ? k - 1 : 0; c <= k + 1; ++c)
    if (c * c == n) return true;
  return false;
}

const std::vector<double> kEps = {1.0, 0.1, 0.01, 0.001};

}  // namespace

TEST_CASE("constant families converge to their value") {
  SequenceFamily fam = parse_family("constant(3,-1)");
  auto v = is_convergent_prefix(space(), fam, Point{3.0, -1.0}, kEps, 10000);
  CHECK(v.verdict == Verdict::Holds);
  CHECK(v.n_max == 10000);
  CHECK(v.roughness == 0.0);
  for (const EpsEvidence& e : v.per_eps) {
    CHECK(e.exceedance_count == 0);
    CHECK(e.last_exceedance == 0);
  }
  // Far from the value the check fails at every epsilon.
  auto far = is_convergent_prefix(space(), fam, Point{0.0, 0.0}, kEps, 10000);
  CHECK(far.verdict == Verdict::Fails);
}

TEST_CASE("reciprocal families converge with a settling witness") {
  SequenceFamily fam = parse_family("reciprocal(1,1; 1,0)");
  auto v = is_convergent_prefix(space(), fam, Point{1.0, 1.0}, kEps, 1000000);
  CHECK(v.verdict == Verdict::Holds);
  // Distances are 2/n, so the eps = 0.001 exceedances stop at 2000; the
  // boundary sample sits one rounding away from eps, hence the 1999 case.
  REQUIRE(v.per_eps.size() == 4);
  CHECK(v.per_eps[3].eps == 0.001);
  CHECK(v.per_eps[3].last_exceedance >= 1999);
  CHECK(v.per_eps[3].last_exceedance <= 2000);
  CHECK(v.per_eps[0].last_exceedance == 2);
  CHECK(v.witness.find("settle") != std::string::npos);
}

TEST_CASE("square spikes break prefix convergence with a square witness") {
  SequenceFamily fam = parse_family("example3_1");
  auto v = is_convergent_prefix(space(), fam, Point{0.0, 0.0}, kEps, 1000000);
  CHECK(v.verdict == Verdict::Fails);
  // Every late exceedance is a spike index.
  bool saw_square_witness = false;
  for (const EpsEvidence& e : v.per_eps)
    if (e.last_exceedance != 0) {
      CHECK(is_square(e.last_exceedance));
      saw_square_witness = true;
    }
  CHECK(saw_square_witness);
  CHECK(v.per_eps[0].last_exceedance == 1000000);  // 1000^2
}

TEST_CASE("rough limit check shifts every threshold by r") {
  SequenceFamily fam = parse_family("reciprocal(1,1; 1,0)");
  Point center{1.0, 1.0};

  auto base = is_convergent_prefix(space(), fam, center, kEps, 10000);
  auto r0 = rough_limit_check(space(), fam, center, 0.0, kEps, 10000);
  CHECK(base.verdict == r0.verdict);
  REQUIRE(base.per_eps.size() == r0.per_eps.size());
  for (std::size_t i = 0; i < base.per_eps.size(); ++i)
    CHECK(base.per_eps[i].exceedance_count == r0.per_eps[i].exceedance_count);

  // r = 2 absorbs the whole 2/n tail except n = 1 at fine eps.
  auto r2 = rough_limit_check(space(), fam, center, 2.0, kEps, 10000);
  CHECK(r2.verdict == Verdict::Holds);
  CHECK(r2.roughness == 2.0);
  CHECK(r2.per_eps[0].exceedance_count == 0);   // 2/n >= 3 never
  CHECK(r2.per_eps[3].exceedance_count == 0);   // 2/n >= 2.001 never
  CHECK_THROWS_AS(rough_limit_check(space(), fam, center, -1.0, kEps, 10000),
                  DomainError);
}

TEST_CASE("parity spikes are not rough convergent for any grid roughness") {
  SequenceFamily fam = parse_family("example4_1");
  for (const Point& cand : {Point{0.0, 0.0}, Point{1.0, 1.0}}) {
    auto grid = default_roughness_grid(space(), fam, cand);
    REQUIRE_FALSE(grid.empty());
    for (double r : grid) {
      auto v = rough_limit_check(space(), fam, cand, r, kEps, 100000);
      CHECK(v.verdict == Verdict::Fails);
    }
  }
}

TEST_CASE("a single late exceedance is inconclusive") {
  SequenceFamily fam =
      spike_on_family(IndexSet::finite({9990}), Point{50.0, 0.0}, Point{0.0, 0.0});
  auto v = is_convergent_prefix(space(), fam, Point{0.0, 0.0}, kEps, 10000);
  CHECK(v.verdict == Verdict::Inconclusive);
}

TEST_CASE("explicit prefixes never certify convergence") {
  std::vector<Point> data(2000, Point{1.0, 1.0});
  SequenceFamily fam = SequenceFamily::explicit_prefix("observed", std::move(data));
  auto v = is_convergent_prefix(space(), fam, Point{1.0, 1.0}, kEps, 2000);
  CHECK(v.verdict == Verdict::Inconclusive);
  CHECK(v.witness.find("explicit-prefix") != std::string::npos);
}

TEST_CASE("cauchy check on convergent and divergent families") {
  auto conv = is_cauchy_prefix(space(), parse_family("reciprocal(1,1; 1,0)"), kEps, 100000);
  CHECK(conv.verdict == Verdict::Holds);

  auto con = is_cauchy_prefix(space(), parse_family("constant(3,-1)"), kEps, 100000);
  CHECK(con.verdict == Verdict::Holds);
  for (const PairEpsEvidence& e : con.per_eps) CHECK(e.exceedance_count == 0);

  auto drift = is_cauchy_prefix(space(), parse_family("drift(1,0)"), kEps, 100000);
  CHECK(drift.verdict == Verdict::Fails);
  REQUIRE(drift.witness.has_value());
  CHECK(drift.witness->value >= 1.0);

  auto spikes = is_cauchy_prefix(space(), parse_family("example3_1"), kEps, 1000000);
  CHECK(spikes.verdict == Verdict::Fails);
}

TEST_CASE("periodic families are not cauchy") {
  auto v = is_cauchy_prefix(space(), parse_family("periodic((0,0),(3,4))"), kEps, 100000);
  CHECK(v.verdict == Verdict::Fails);
  // The witness pair straddles the two values, so its S value is 2*5.
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->value == doctest::Approx(10.0));
}

TEST_CASE("boundedness holds with a stable radius on tame families") {
  auto con = is_s_bounded_prefix(space(), parse_family("constant(3,-1)"), 100000);
  CHECK(con.verdict == Verdict::Holds);
  CHECK(con.radius <= 1e-6);

  auto per = is_s_bounded_prefix(space(), parse_family("periodic((0,0),(3,4))"), 100000);
  CHECK(per.verdict == Verdict::Holds);
  CHECK(per.radius >= 10.0);
  CHECK(per.radius <= 10.1);
  REQUIRE_FALSE(per.running_max.empty());
  for (std::size_t i = 1; i < per.running_max.size(); ++i) {
    CHECK(per.running_max[i - 1].first < per.running_max[i].first);
    CHECK(per.running_max[i - 1].second <= per.running_max[i].second);
  }
  CHECK(per.running_max.back().second == doctest::Approx(10.0));
}

TEST_CASE("square spikes are unbounded with a square growth witness") {
  auto v = is_s_bounded_prefix(space(), parse_family("example3_1"), 1000000);
  CHECK(v.verdict == Verdict::Fails);
  REQUIRE(v.growth_witness.has_value());
  CHECK((is_square(v.growth_witness->n) || is_square(v.growth_witness->m)));
  CHECK(v.growth_witness->value > 1000.0);

  auto drift = is_s_bounded_prefix(space(), parse_family("drift(1,0)"), 100000);
  CHECK(drift.verdict == Verdict::Fails);
}

TEST_CASE("roughness grid scales with the prefix median") {
  SequenceFamily fam = parse_family("periodic((0,0),(3,4))");
  // From (5,5) the two period values sit at distances 10*sqrt(2) and 2*sqrt(5),
  // so the median is 2*sqrt(5) and the top rung is 64 times that.
  auto grid = default_roughness_grid(space(), fam, Point{5.0, 5.0});
  REQUIRE_FALSE(grid.empty());
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i - 1] < grid[i]);
  CHECK(grid.front() <= 1.0);
  CHECK(grid.back() >= 100.0);
  CHECK(grid.back() == doctest::Approx(64.0 * 2.0 * std::sqrt(5.0)));
  // A degenerate probe (every distance zero) falls back to unit scale.
  auto flat = default_roughness_grid(space(), parse_family("constant(1,2)"),
                                     Point{1.0, 2.0});
  CHECK(flat.back() == 64.0);
  CHECK(flat.front() == 0.0625);
}
