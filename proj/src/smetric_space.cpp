#include "smetric/smetric_space.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

#include "smetric/rng.hpp"

namespace smetric {

std::string to_string(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < p.dim(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ")";
  return os.str();
}

double norm_value(NormKind norm, const Point& p) {
  switch (norm) {
    case NormKind::Euclidean: return norm_l2(p);
    case NormKind::Taxicab: return norm_l1(p);
    case NormKind::Max: return norm_linf(p);
  }
  throw DomainError("unknown norm kind");
}

std::string to_string(NormKind norm) {
  switch (norm) {
    case NormKind::Euclidean: return "euclidean";
    case NormKind::Taxicab: return "taxicab";
    case NormKind::Max: return "max";
  }
  return "?";
}

SMetric::SMetric(std::string name, SMetricKind kind, Evaluator eval)
    : name_(std::move(name)), kind_(kind), eval_(std::move(eval)) {}

SMetric::SMetric() : SMetric(norm_sum(NormKind::Euclidean)) {}

SMetric SMetric::norm_sum(NormKind norm) {
  return SMetric("norm_sum(" + smetric::to_string(norm) + ")", SMetricKind::NormSum,
                 [norm](const Point& x, const Point& y, const Point& z) {
                   return norm_value(norm, x - z) + norm_value(norm, y - z);
                 });
}

SMetric SMetric::metric_sum(NormKind norm) {
  return SMetric("metric_sum(" + smetric::to_string(norm) + ")", SMetricKind::MetricSum,
                 [norm](const Point& x, const Point& y, const Point& z) {
                   return norm_value(norm, x - z) + norm_value(norm, y - z);
                 });
}

SMetric SMetric::metric_sum(std::string name, Metric d) {
  auto dm = std::move(d);
  return SMetric(std::move(name), SMetricKind::MetricSum,
                 [dm](const Point& x, const Point& y, const Point& z) {
                   return dm(x, z) + dm(y, z);
                 });
}

SMetric SMetric::custom(std::string name, Evaluator s) {
  return SMetric(std::move(name), SMetricKind::Custom, std::move(s));
}

double SMetric::operator()(const Point& x, const Point& y, const Point& z) const {
  require_same_dim(x, y);
  require_same_dim(x, z);
  double v = eval_(x, y, z);
  if (!std::isfinite(v))
    throw DomainError("S-metric evaluator produced a non-finite value on " +
                      smetric::to_string(x) + ", " + smetric::to_string(y) + ", " +
                      smetric::to_string(z));
  return v;
}

double symmetry_defect(const SMetric& s, const Point& x, const Point& y) {
  return std::fabs(s(x, x, y) - s(y, y, x));
}

bool ball_contains(const Ball& ball, const SMetric& s, const Point& y) {
  if (ball.radius < 0) throw DomainError("ball radius must be >= 0");
  double v = s(y, y, ball.center);
  return ball.closed ? v <= ball.radius + kBoundarySlack : v < ball.radius;
}

std::string to_string(AxiomCondition c) {
  switch (c) {
    case AxiomCondition::Nonnegativity: return "nonnegativity";
    case AxiomCondition::ZeroIffEqual: return "zero-iff-equal";
    case AxiomCondition::TriangleInequality: return "triangle-inequality";
  }
  return "?";
}

namespace {

bool near_equal(const Point& a, const Point& b, double tol) {
  if (a.dim() != b.dim()) return false;
  for (int i = 0; i < a.dim(); ++i)
    if (std::fabs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

AxiomReport check_axioms(const SMetric& s, const std::vector<Quadruple>& sample) {
  if (sample.empty()) throw UsageError("check_axioms needs a non-empty sample");
  AxiomReport report;
  report.samples_checked = sample.size();
  report.worst_slack = kAxiomTolerance;
  auto note = [&](AxiomCondition c, std::size_t i, double lhs, double rhs,
                  std::string detail) {
    report.violations.push_back({c, i, lhs, rhs, std::move(detail)});
  };
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const Quadruple& q = sample[i];
    double sxyz = s(q.x, q.y, q.z);
    if (sxyz < -kAxiomTolerance)
      note(AxiomCondition::Nonnegativity, i, sxyz, 0.0, "S(x,y,z) < 0");
    report.worst_slack = std::min(report.worst_slack, sxyz + kAxiomTolerance);

    bool all_equal = near_equal(q.x, q.y, kAxiomTolerance) &&
                     near_equal(q.y, q.z, kAxiomTolerance);
    if (all_equal && std::fabs(sxyz) > kAxiomTolerance)
      note(AxiomCondition::ZeroIffEqual, i, std::fabs(sxyz), kAxiomTolerance,
           "S nonzero on an equal triple");
    if (!all_equal && std::fabs(sxyz) <= kAxiomTolerance)
      note(AxiomCondition::ZeroIffEqual, i, std::fabs(sxyz), kAxiomTolerance,
           "S zero on a distinct triple");

    double rhs = s(q.x, q.x, q.a) + s(q.y, q.y, q.a) + s(q.z, q.z, q.a);
    if (sxyz > rhs + kAxiomTolerance)
      note(AxiomCondition::TriangleInequality, i, sxyz, rhs,
           "S(x,y,z) > S(x,x,a)+S(y,y,a)+S(z,z,a)");
    report.worst_slack = std::min(report.worst_slack, rhs + kAxiomTolerance - sxyz);
  }
  return report;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SMETRIC_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
  }
  return 42;
}

std::vector<Quadruple> random_quadruples(int dim, std::size_t count, double lo,
                                         double hi, std::uint64_t seed) {
  if (dim < 1) throw DomainError("point dimension must be >= 1");
  if (hi <= lo) throw UsageError("random_quadruples needs lo < hi");
  SplitMix64 rng(seed);
  auto draw = [&] {
    Point::Storage c;
    c.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) c.push_back(rng.uniform(lo, hi));
    return Point(std::move(c));
  };
  std::vector<Quadruple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Quadruple q;
    q.x = draw();
    q.y = draw();
    q.z = draw();
    q.a = draw();
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace smetric
