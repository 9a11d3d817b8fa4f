#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smetric/point.hpp"

namespace smetric {

enum class NormKind { Euclidean, Taxicab, Max };

enum class SMetricKind { NormSum, MetricSum, Custom };

double norm_value(NormKind norm, const Point& p);
std::string to_string(NormKind norm);

/// A named S-metric: a total evaluator S(x,y,z) on triples of equal-dimension
/// points. NormSum is S(x,y,z) = ||x-z|| + ||y-z||; MetricSum is
/// S(x,y,z) = d(x,z) + d(y,z) for a supplied metric d. Custom evaluators are
/// taken as-is, so check_axioms can report violations in deliberately broken
/// ones; a Custom spec is expected to pass check_axioms before being used by
/// the analysis layers.
class SMetric {
 public:
  using Evaluator = std::function<double(const Point&, const Point&, const Point&)>;
  using Metric = std::function<double(const Point&, const Point&)>;

  /// Default-constructs the Euclidean NormSum space.
  SMetric();

  static SMetric norm_sum(NormKind norm);
  static SMetric metric_sum(NormKind norm);
  static SMetric metric_sum(std::string name, Metric d);
  static SMetric custom(std::string name, Evaluator s);

  const std::string& name() const { return name_; }
  SMetricKind kind() const { return kind_; }

  /// Evaluates S(x,y,z). Throws DimensionError on mixed dimensions and
  /// DomainError if the evaluator produces a non-finite value.
  double operator()(const Point& x, const Point& y, const Point& z) const;

 private:
  SMetric(std::string name, SMetricKind kind, Evaluator eval);

  std::string name_;
  SMetricKind kind_;
  Evaluator eval_;
};

inline double eval_s(const SMetric& s, const Point& x, const Point& y, const Point& z) {
  return s(x, y, z);
}

/// |S(x,x,y) - S(y,y,x)|. Zero in exact arithmetic for any S satisfying the
/// S-metric conditions; the numerical budget for well-formed specs is
/// kSymmetryTolerance.
double symmetry_defect(const SMetric& s, const Point& x, const Point& y);

inline constexpr double kAxiomTolerance = 1e-9;
inline constexpr double kSymmetryTolerance = 2e-9;
inline constexpr double kBoundarySlack = 1e-9;

/// Ball around `center`: {y : S(y,y,center) < radius} when open,
/// {y : S(y,y,center) <= radius + kBoundarySlack} when closed.
struct Ball {
  Point center;
  double radius = 0;
  bool closed = true;
};

bool ball_contains(const Ball& ball, const SMetric& s, const Point& y);

struct Quadruple {
  Point x, y, z, a;
};

enum class AxiomCondition { Nonnegativity, ZeroIffEqual, TriangleInequality };
std::string to_string(AxiomCondition c);

struct AxiomViolation {
  AxiomCondition condition;
  std::size_t sample_index;
  double lhs;
  double rhs;
  std::string detail;
};

struct AxiomReport {
  std::size_t samples_checked = 0;
  /// Smallest slack (rhs + tolerance - lhs) seen over all inequality checks;
  /// negative values correspond to violations.
  double worst_slack = 0;
  std::vector<AxiomViolation> violations;
  bool pass() const { return violations.empty(); }
};

/// Checks the three S-metric conditions on the sample within kAxiomTolerance.
/// Throws UsageError on an empty sample.
AxiomReport check_axioms(const SMetric& s, const std::vector<Quadruple>& sample);

/// Seed used by every randomized helper: the SMETRIC_SEED environment
/// variable when set to an unsigned integer, 42 otherwise.
std::uint64_t default_seed();

/// Deterministic sample of quadruples with coordinates uniform in [lo, hi].
std::vector<Quadruple> random_quadruples(int dim, std::size_t count, double lo,
                                         double hi, std::uint64_t seed);

}  // namespace smetric
