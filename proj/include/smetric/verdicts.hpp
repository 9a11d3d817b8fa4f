#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smetric/density.hpp"
#include "smetric/point.hpp"
#include "smetric/smetric_space.hpp"

namespace smetric {

/// Three-valued outcome. Holds and Fails are committed claims backed by the
/// evidence carried alongside; Inconclusive means the scanned prefix cannot
/// distinguish.
enum class Verdict { Holds, Fails, Inconclusive };
std::string to_string(Verdict v);

/// Evidence for one epsilon of a prefix convergence check.
struct EpsEvidence {
  double eps = 0;
  std::uint64_t exceedance_count = 0;
  std::uint64_t first_exceedance = 0;  // 0 when no exceedance
  std::uint64_t last_exceedance = 0;
  std::uint64_t late_count = 0;  // exceedances in the second half of the prefix
};

struct ConvergenceVerdict {
  Verdict verdict = Verdict::Inconclusive;
  Point candidate;
  double roughness = 0;
  std::uint64_t n_max = 0;
  std::vector<EpsEvidence> per_eps;
  std::string witness;
};

struct PairWitness {
  std::uint64_t n = 0, m = 0;
  double value = 0;
};

struct PairEpsEvidence {
  double eps = 0;
  std::uint64_t exceedance_count = 0;
  std::uint64_t last_min_exceedance = 0;
  std::uint64_t late_count = 0;
  std::optional<PairWitness> witness;
};

struct CauchyVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t n_max = 0;
  std::vector<PairEpsEvidence> per_eps;
  std::optional<PairWitness> witness;
};

struct SBoundednessVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double radius = 0;  // meaningful when Holds
  std::vector<std::pair<std::uint64_t, double>> running_max;  // (checkpoint, max)
  std::optional<PairWitness> growth_witness;
};

struct EpsDensity {
  double eps = 0;
  DensityEstimate density;
};

struct StConvergenceVerdict {
  Verdict verdict = Verdict::Inconclusive;
  Point candidate;
  double roughness = 0;
  std::vector<EpsDensity> per_eps;
  std::vector<std::uint64_t> n_schedule;
};

struct StCauchyWitness {
  double eps = 0;
  std::uint64_t witness_index = 0;  // 0 when no witness worked
  DensityEstimate density;          // density for the recorded witness
};

struct StCauchyVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<StCauchyWitness> per_eps;
  std::vector<std::uint64_t> candidates_tried;
};

struct StBoundednessVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double bound = 0;  // first Zero-density bound when Holds
  Point ref_point;
  std::vector<std::pair<double, DensityEstimate>> tried;
  std::string note;
};

struct ClusterVerdict {
  Verdict verdict = Verdict::Inconclusive;
  Point point;
  std::vector<EpsDensity> per_eps;  // densities of the hit sets {S < eps}
};

/// A rough limit set estimate: either a certified closed ball around a
/// statistical limit, or the Holds cells of a finite grid search.
struct RoughLimitSet {
  double roughness = 0;

  struct ExactBall {
    Ball ball;
    Point certified_limit;
  };
  struct GridCell {
    Point point;
    Verdict verdict = Verdict::Inconclusive;
  };

  std::optional<ExactBall> exact_ball;
  std::vector<GridCell> grid;   // every evaluated cell (sampled route)
  std::vector<Point> members;   // Holds points; boundary sample for a ball
  double diameter_estimate = 0;
};

}  // namespace smetric
