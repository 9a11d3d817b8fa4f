#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smetric/index_set.hpp"
#include "smetric/point.hpp"
#include "smetric/smetric_space.hpp"

namespace smetric {

/// One stratum of a sequence family: the indices it occupies and, when the
/// family is constant there, the value it takes. A class without a value is
/// "varying" (its values depend on n); analysis layers only trust a layout
/// whose varying classes have exact density zero.
struct ValueClass {
  IndexSet indices;
  std::optional<Point> value;
};

struct FamilyStructure {
  /// Disjoint classes covering all of n >= 1 when non-empty.
  std::vector<ValueClass> classes;
  std::optional<Point> known_st_limit;

  /// Union of the varying classes; finite empty set when all classes are
  /// constant.
  IndexSet spike_set() const;
  std::vector<Point> base_values() const;
  /// True when every class has an exact density, the densities sum to 1 and
  /// every varying class has density zero.
  bool exact_partition() const;
};

/// A sequence x_1, x_2, ... given by a total rule, with optional structural
/// metadata used for exact density arguments.
class SequenceFamily {
 public:
  using Rule = std::function<Point(std::uint64_t)>;

  SequenceFamily(std::string name, int dim, Rule rule);

  SequenceFamily&& with_structure(FamilyStructure structure) &&;

  /// Family backed only by finitely many observed points; verdicts over it
  /// are capped below Holds by the analysis layers.
  static SequenceFamily explicit_prefix(std::string name, std::vector<Point> data);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  /// x_n for n >= 1. Throws UsageError for n == 0 and for n beyond the data
  /// of an explicit-prefix family.
  Point at(std::uint64_t n) const;

  const std::optional<FamilyStructure>& structure() const { return structure_; }
  bool finite_data() const { return data_limit_ != 0; }
  std::uint64_t data_limit() const { return data_limit_; }

 private:
  std::string name_;
  int dim_;
  Rule rule_;
  std::optional<FamilyStructure> structure_;
  std::uint64_t data_limit_ = 0;
};

/// Spikes (k,k) at n = k^2, the origin elsewhere. Statistically convergent
/// to the origin but neither convergent nor bounded.
SequenceFamily square_spike_family();

/// Spikes (k,k) at n = k^2; (0,0) on even non-squares, (1,1) on odd
/// non-squares. Rough-statistically convergent for r >= 2*sqrt(2) but not
/// rough convergent for any r.
SequenceFamily parity_spike_family();

enum class DecayKind { OneOverN, OneOverNSquared, GeometricHalf };
double decay_value(DecayKind decay, std::uint64_t n);
std::string to_string(DecayKind decay);

SequenceFamily constant_family(Point value);
/// x_n = center + direction / n.
SequenceFamily reciprocal_family(Point center, Point direction);
/// x_n = spike_value on `spikes`, base elsewhere.
SequenceFamily spike_on_family(IndexSet spikes, Point spike_value, Point base);
/// x_n cycles through `values` by n mod values.size().
SequenceFamily periodic_family(std::vector<Point> values);
/// x_n = n * step. Unbounded drift probe.
SequenceFamily drift_family(Point step);
/// x_n = base(n) + decay(n) * e_1.
SequenceFamily perturbed_family(SequenceFamily base, DecayKind decay);

/// {n : S(x_n, x_n, candidate) >= threshold} as a predicate-backed set.
IndexSet exceedance_set(const SMetric& s, const SequenceFamily& family,
                        const Point& candidate, double threshold);

/// Parses the family grammar used by config files:
///   example3_1 | example4_1 | constant(x,y,...) | reciprocal(c...; d...)
///   | spike_on(<set>; spike...; base...) | periodic((x,y),(x,y),...)
///   | drift(x,y,...) | perturb(<family>; 1/n | 1/n^2 | 2^-n)
/// Throws UsageError on an unknown kind, ConfigError on malformed syntax.
SequenceFamily parse_family(std::string_view text);

}  // namespace smetric
