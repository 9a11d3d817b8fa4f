#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smetric/report.hpp"
#include "smetric/rough.hpp"

namespace smetric {

enum class VerifyScale { Smoke, Full };

enum class PropertyStatus { Pass, Fail, Skip };
std::string to_string(PropertyStatus s);

/// One line of the verification battery: the property name, whether it held,
/// and the worst-case margin (or failure detail) observed.
struct PropertyResult {
  std::string name;
  PropertyStatus status = PropertyStatus::Fail;
  std::string detail;
};

struct VerifyOptions {
  VerifyScale scale = VerifyScale::Smoke;
  Exec exec = Exec::Parallel;
  std::uint64_t seed = default_seed();
  /// Adds a deliberately broken Custom space to the axiom roster. Its axiom
  /// check is expected to fail and its downstream battery to be skipped.
  bool with_broken_space = false;
};

/// Expressions of the built-in family zoo (parse_family grammar).
const std::vector<std::string>& family_zoo();

/// Runs the whole invariant battery over the zoo in a fixed order. Property
/// errors are caught and reported as failures, never thrown.
std::vector<PropertyResult> run_verification(const VerifyOptions& options);

/// "[pass] name  detail" lines, one per property.
std::string property_lines(std::span<const PropertyResult> results);

/// CSV rows: analysis = property name, verdict holds/fails (skip maps to
/// inconclusive), evidence = detail, n = largest prefix length of the scale.
std::vector<ReportRow> rows_from(std::span<const PropertyResult> results,
                                 std::uint64_t n_max);

}  // namespace smetric
