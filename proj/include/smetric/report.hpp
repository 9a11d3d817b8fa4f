#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smetric/verdicts.hpp"

namespace smetric {

inline constexpr std::string_view kCsvHeader =
    "analysis,sequence,candidate,r,epsilon,n,ratio,verdict,evidence";

/// One output cell. Optional fields serialize as empty CSV fields and JSON
/// nulls. `verdict` is the overall verdict of the analysis, repeated on every
/// row so each line is self-contained.
struct ReportRow {
  std::string analysis;
  std::string sequence;
  std::string candidate;
  std::optional<double> r;
  std::optional<double> epsilon;
  std::uint64_t n = 0;
  std::optional<double> ratio;  // in [0, 1] when present
  std::string verdict;          // holds | fails | inconclusive
  std::string evidence;
};

/// 9 significant digits, decimal point, no locale surprises.
std::string format_number(double v);

/// "(a, b)" with format_number coordinates.
std::string format_candidate(const Point& p);

/// Header plus one line per row, LF endings, RFC 4180 quoting.
std::string to_csv(std::span<const ReportRow> rows);

/// Array of objects keyed like the CSV columns; missing optionals are null.
std::string to_json(std::span<const ReportRow> rows);

// Builders. One row per (epsilon or bound, n) cell; estimates without prefix
// counts collapse to a single row at the last scheduled n carrying the exact
// density as the ratio.
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const ConvergenceVerdict& v);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const CauchyVerdict& v);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const SBoundednessVerdict& v);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StConvergenceVerdict& v);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StCauchyVerdict& v,
                                 std::span<const std::uint64_t> n_schedule);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StBoundednessVerdict& v,
                                 std::span<const std::uint64_t> n_schedule);
std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const ClusterVerdict& v,
                                 std::span<const std::uint64_t> n_schedule);

/// Member points of a rough limit set plus one trailing summary row.
std::vector<ReportRow> rows_from(std::string sequence, const RoughLimitSet& set,
                                 std::uint64_t n_max);

/// Density-estimate rows (used by the `density` subcommand): one row per
/// scheduled n. Decisive estimates (Zero or Positive) map to verdict "holds";
/// the density verdict itself is spelled out in the evidence column.
std::vector<ReportRow> rows_from(std::string analysis, std::string set_name,
                                 const DensityEstimate& est);

}  // namespace smetric
