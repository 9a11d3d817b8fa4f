#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "smetric/smetric_space.hpp"

using namespace smetric;

TEST_CASE("point construction and validation") {
  Point p{3.0, -4.0};
  CHECK(p.dim() == 2);
  CHECK(p[0] == 3.0);
  CHECK(p[1] == -4.0);
  CHECK(p == Point{3.0, -4.0});
  CHECK_FALSE(p == Point{3.0, -4.0, 0.0});
  CHECK(Point::zero(3) == Point{0.0, 0.0, 0.0});

  CHECK_THROWS_AS(Point(Point::Storage{}), DomainError);
  CHECK_THROWS_AS(Point{std::nan("")}, DomainError);
  CHECK_THROWS_AS(Point{std::numeric_limits<double>::infinity()}, DomainError);
  CHECK_THROWS_AS(Point::zero(0), DomainError);
  CHECK_THROWS_AS((Point{1.0} + Point{1.0, 2.0}), DimensionError);
}

TEST_CASE("point arithmetic and norms match hand values") {
  Point a{3.0, -4.0};
  CHECK(norm_l1(a) == 7.0);
  CHECK(norm_l2(a) == 5.0);
  CHECK(norm_linf(a) == 4.0);
  CHECK(norm_value(NormKind::Euclidean, a) == 5.0);
  CHECK(norm_value(NormKind::Taxicab, a) == 7.0);
  CHECK(norm_value(NormKind::Max, a) == 4.0);

  CHECK(a - Point{1.0, 1.0} == Point{2.0, -5.0});
  CHECK(a + Point{1.0, 1.0} == Point{4.0, -3.0});
  CHECK(2.0 * a == Point{6.0, -8.0});
  CHECK(to_string(Point{1.0, 2.5}) == "(1, 2.5)");
}

TEST_CASE("norm_sum evaluations match the direct formulas") {
  SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  Point origin{0.0, 0.0};
  Point ones{1.0, 1.0};

  // Identity triple.
  CHECK(s(ones, ones, ones) == 0.0);

  // x = y = (1,1), z = origin: both legs have length sqrt(2).
  CHECK(s(ones, ones, origin) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s(ones, ones, origin) == doctest::Approx(2.8284271).epsilon(1e-7));

  // x = y = (k,k): the value is 2*sqrt(k^2 + k^2) by the leg formula.
  for (double k : {1.0, 2.0, 3.0, 10.0}) {
    Point kk{k, k};
    double oracle = 2.0 * std::sqrt(k * k + k * k);
    CHECK(s(kk, kk, origin) == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(s(Point{3.0, 3.0}, Point{3.0, 3.0}, origin) ==
        doctest::Approx(8.4852814).epsilon(1e-7));

  // Distinct x, y: legs add, 5 + 13.
  CHECK(s(Point{3.0, 4.0}, Point{5.0, 12.0}, origin) == doctest::Approx(18.0));

  SMetric taxi = SMetric::norm_sum(NormKind::Taxicab);
  CHECK(taxi(Point{1.0, 0.0}, Point{0.0, 1.0}, origin) == 2.0);
  CHECK(taxi(Point{1.0, 2.0}, Point{1.0, 2.0}, origin) == 6.0);

  SMetric mx = SMetric::norm_sum(NormKind::Max);
  CHECK(mx(Point{1.0, 2.0}, Point{3.0, 1.0}, origin) == 5.0);

  CHECK(s.kind() == SMetricKind::NormSum);
  CHECK(s.name() == "norm_sum(euclidean)");
}

TEST_CASE("metric_sum agrees with norm_sum for the same norm") {
  SMetric ns = SMetric::norm_sum(NormKind::Euclidean);
  SMetric ms = SMetric::metric_sum(NormKind::Euclidean);
  CHECK(ms.kind() == SMetricKind::MetricSum);
  for (const Quadruple& q : random_quadruples(2, 200, -10.0, 10.0, 1))
    CHECK(ns(q.x, q.y, q.z) == ms(q.x, q.y, q.z));
}

TEST_CASE("metric_sum accepts a caller-supplied metric") {
  SMetric discrete = SMetric::metric_sum("discrete_sum", [](const Point& a, const Point& b) {
    return a == b ? 0.0 : 1.0;
  });
  Point p{0.0, 0.0}, q{1.0, 0.0};
  CHECK(discrete(p, p, p) == 0.0);
  CHECK(discrete(p, p, q) == 2.0);
  CHECK(discrete(p, q, q) == 1.0);
  AxiomReport rep = check_axioms(discrete, random_quadruples(2, 500, -2.0, 2.0, 3));
  CHECK(rep.pass());
}

TEST_CASE("evaluator guards") {
  SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  CHECK_THROWS_AS(s(Point{1.0}, Point{1.0, 2.0}, Point{1.0}), DimensionError);
  CHECK_THROWS_AS(s(Point{1.0, 2.0}, Point{1.0, 2.0}, Point{1.0}), DimensionError);

  SMetric bad = SMetric::custom("nan_everywhere", [](const Point&, const Point&, const Point&) {
    return std::nan("");
  });
  CHECK_THROWS_AS(bad(Point{0.0}, Point{0.0}, Point{0.0}), DomainError);
}

TEST_CASE("symmetry defect is tiny for well-formed spaces") {
  auto sample = random_quadruples(2, 2000, -10.0, 10.0, 7);
  for (NormKind norm : {NormKind::Euclidean, NormKind::Taxicab, NormKind::Max}) {
    SMetric s = SMetric::norm_sum(norm);
    double worst = 0;
    for (const Quadruple& q : sample)
      worst = std::max(worst, symmetry_defect(s, q.x, q.y));
    CHECK(worst <= kSymmetryTolerance);
  }

  // A signed term breaks the S(x,x,y) = S(y,y,x) identity.
  SMetric skew = SMetric::custom("skewed", [](const Point& x, const Point& y, const Point& z) {
    return norm_l2(x - z) + norm_l2(y - z) + 0.5 * (x[0] - z[0]);
  });
  CHECK(symmetry_defect(skew, Point{1.0, 0.0}, Point{0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("balls respect the closed flag") {
  SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  Point c{0.0, 0.0};
  Point on_boundary{0.5, 0.0};  // S = 2 * 0.5 = 1 exactly
  Ball closed{c, 1.0, true};
  Ball open{c, 1.0, false};

  CHECK(ball_contains(closed, s, on_boundary));
  CHECK_FALSE(ball_contains(open, s, on_boundary));
  CHECK(ball_contains(open, s, Point{0.49, 0.0}));
  CHECK_FALSE(ball_contains(closed, s, Point{0.51, 0.0}));
  CHECK(ball_contains(closed, s, c));

  // The closed test allows the documented boundary slack.
  Point just_outside{0.5 + 2e-10, 0.0};
  CHECK(ball_contains(closed, s, just_outside));

  Ball negative{c, -1.0, true};
  CHECK_THROWS_AS(ball_contains(negative, s, c), DomainError);
}

TEST_CASE("axiom checker passes all built-in spaces") {
  auto sample = random_quadruples(2, 2000, -10.0, 10.0, default_seed());
  for (const SMetric& s : {SMetric::norm_sum(NormKind::Euclidean),
                           SMetric::norm_sum(NormKind::Taxicab),
                           SMetric::norm_sum(NormKind::Max),
                           SMetric::metric_sum(NormKind::Euclidean)}) {
    AxiomReport rep = check_axioms(s, sample);
    CHECK(rep.pass());
    CHECK(rep.samples_checked == 2000);
    CHECK(rep.violations.empty());
    CHECK(rep.worst_slack >= 0.0);
  }
  CHECK_THROWS_AS(check_axioms(SMetric(), {}), UsageError);
}

TEST_CASE("axiom checker flags a spec that collapses to zero off the diagonal") {
  // Any triple whose legs sum below the cutoff evaluates to 0, so distinct
  // triples with S = 0 show up throughout a random sample.
  SMetric deadzone =
      SMetric::custom("deadzone_norm_sum", [](const Point& x, const Point& y, const Point& z) {
        double v = norm_l2(x - z) + norm_l2(y - z) - 10.0;
        return v > 0 ? v : 0.0;
      });
  AxiomReport rep = check_axioms(deadzone, random_quadruples(2, 2000, -10.0, 10.0, 42));
  CHECK_FALSE(rep.pass());
  REQUIRE_FALSE(rep.violations.empty());
  bool saw_zero_iff = false;
  for (const AxiomViolation& v : rep.violations)
    if (v.condition == AxiomCondition::ZeroIffEqual) {
      saw_zero_iff = true;
      CHECK(v.detail == "S zero on a distinct triple");
    }
  CHECK(saw_zero_iff);
}

TEST_CASE("axiom checker flags nonzero values on equal triples") {
  SMetric shifted =
      SMetric::custom("norm_sum_plus_one", [](const Point& x, const Point& y, const Point& z) {
        return norm_l2(x - z) + norm_l2(y - z) + 1.0;
      });
  Point p{1.0, 2.0};
  AxiomReport rep = check_axioms(shifted, {Quadruple{p, p, p, p}});
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].condition == AxiomCondition::ZeroIffEqual);
  CHECK(rep.violations[0].detail == "S nonzero on an equal triple");
}

TEST_CASE("axiom checker flags negative values") {
  SMetric signed_spec =
      SMetric::custom("signed_first_coord", [](const Point& x, const Point&, const Point& z) {
        return x[0] - z[0];
      });
  AxiomReport rep = check_axioms(signed_spec, random_quadruples(2, 200, -10.0, 10.0, 5));
  CHECK_FALSE(rep.pass());
  bool saw_negative = false;
  for (const AxiomViolation& v : rep.violations)
    if (v.condition == AxiomCondition::Nonnegativity) saw_negative = true;
  CHECK(saw_negative);
  CHECK(rep.worst_slack < 0.0);
}

TEST_CASE("axiom checker flags a triangle violation") {
  // Squaring the leg sum breaks subadditivity: x = y = (1,0), z = origin,
  // a = midpoint gives lhs 4 against rhs 3.
  SMetric squared =
      SMetric::custom("norm_sum_squared", [](const Point& x, const Point& y, const Point& z) {
        double v = norm_l2(x - z) + norm_l2(y - z);
        return v * v;
      });
  Quadruple q{Point{1.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 0.0}, Point{0.5, 0.0}};
  AxiomReport rep = check_axioms(squared, {q});
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].condition == AxiomCondition::TriangleInequality);
  CHECK(rep.violations[0].lhs == doctest::Approx(4.0));
  CHECK(rep.violations[0].rhs == doctest::Approx(3.0));
}

TEST_CASE("random quadruples are deterministic in the seed") {
  auto a = random_quadruples(2, 50, -1.0, 1.0, 9);
  auto b = random_quadruples(2, 50, -1.0, 1.0, 9);
  auto c = random_quadruples(2, 50, -1.0, 1.0, 10);
  REQUIRE(a.size() == 50);
  bool all_equal = true, any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal = all_equal && a[i].x == b[i].x && a[i].y == b[i].y && a[i].z == b[i].z &&
                a[i].a == b[i].a;
    any_differs = any_differs || !(a[i].x == c[i].x);
  }
  CHECK(all_equal);
  CHECK(any_differs);
  for (const Quadruple& q : a)
    for (const Point* p : {&q.x, &q.y, &q.z, &q.a}) {
      CHECK((*p)[0] >= -1.0);
      CHECK((*p)[0] <= 1.0);
    }
  CHECK_THROWS_AS(random_quadruples(0, 10, 0.0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(random_quadruples(2, 10, 1.0, 1.0, 1), UsageError);
}

TEST_CASE("default seed reads the environment variable") {
  unsetenv("SMETRIC_SEED");
  CHECK(default_seed() == 42);
  setenv("SMETRIC_SEED", "7", 1);
  CHECK(default_seed() == 7);
  setenv("SMETRIC_SEED", "not-a-number", 1);
  CHECK(default_seed() == 42);
  unsetenv("SMETRIC_SEED");
}
