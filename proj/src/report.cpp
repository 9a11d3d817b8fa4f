#include "smetric/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace smetric {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_candidate(const Point& p) {
  std::string out = "(";
  for (int i = 0; i < p.dim(); ++i) {
    if (i) out += ", ";
    out += format_number(p[i]);
  }
  out += ")";
  return out;
}

namespace {

/// RFC 4180: quote when the field holds a comma, a quote or a line break;
/// embedded quotes are doubled.
std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

/// Shared shape of every builder: fixed columns plus per-row fields.
struct RowShape {
  std::string analysis, sequence, candidate, verdict;
  std::optional<double> r;
};

ReportRow make_row(const RowShape& shape, std::optional<double> epsilon,
                   std::uint64_t n, std::optional<double> ratio,
                   std::string evidence) {
  ReportRow row;
  row.analysis = shape.analysis;
  row.sequence = shape.sequence;
  row.candidate = shape.candidate;
  row.r = shape.r;
  row.epsilon = epsilon;
  row.n = n;
  row.ratio = ratio;
  row.verdict = shape.verdict;
  row.evidence = std::move(evidence);
  return row;
}

std::string density_note(const DensityEstimate& est) {
  std::string out = est.note;
  if (!out.empty()) out += "; ";
  out += "density=" + to_string(est.verdict);
  if (est.exact) out += " exact=" + format_number(*est.exact);
  if (est.verdict == DensityVerdict::Positive)
    out += " value=" + format_number(est.positive_value);
  return out;
}

/// One row per prefix count; estimates without counts become a single
/// exact-density row at `fallback_n`.
void append_estimate_rows(std::vector<ReportRow>& rows, const RowShape& shape,
                          std::optional<double> epsilon,
                          const DensityEstimate& est, std::uint64_t fallback_n,
                          const std::string& extra) {
  std::string note = density_note(est);
  if (!extra.empty()) note += "; " + extra;
  if (est.prefix_counts.empty()) {
    std::optional<double> ratio;
    if (est.exact) ratio = *est.exact;
    rows.push_back(make_row(shape, epsilon, fallback_n, ratio, note));
    return;
  }
  for (const auto& [n, count] : est.prefix_counts)
    rows.push_back(make_row(shape, epsilon, n,
                            n ? std::optional<double>(static_cast<double>(count) / n)
                              : std::nullopt,
                            note));
}

}  // namespace

std::string to_csv(std::span<const ReportRow> rows) {
  std::string out(kCsvHeader);
  out += "\n";
  for (const ReportRow& row : rows) {
    out += csv_field(row.analysis);
    out += ",";
    out += csv_field(row.sequence);
    out += ",";
    out += csv_field(row.candidate);
    out += ",";
    out += opt_field(row.r);
    out += ",";
    out += opt_field(row.epsilon);
    out += ",";
    out += std::to_string(row.n);
    out += ",";
    out += opt_field(row.ratio);
    out += ",";
    out += csv_field(row.verdict);
    out += ",";
    out += csv_field(row.evidence);
    out += "\n";
  }
  return out;
}

std::string to_json(std::span<const ReportRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ReportRow& row : rows) {
    nlohmann::ordered_json obj;
    obj["analysis"] = row.analysis;
    obj["sequence"] = row.sequence;
    obj["candidate"] = row.candidate.empty() ? nlohmann::ordered_json(nullptr)
                                              : nlohmann::ordered_json(row.candidate);
    obj["r"] = row.r ? nlohmann::ordered_json(*row.r) : nullptr;
    obj["epsilon"] = row.epsilon ? nlohmann::ordered_json(*row.epsilon) : nullptr;
    obj["n"] = row.n;
    obj["ratio"] = row.ratio ? nlohmann::ordered_json(*row.ratio) : nullptr;
    obj["verdict"] = row.verdict;
    obj["evidence"] = row.evidence;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const ConvergenceVerdict& v) {
  RowShape shape{std::move(analysis), std::move(sequence),
                 format_candidate(v.candidate), to_string(v.verdict),
                 v.roughness > 0 ? std::optional<double>(v.roughness) : std::nullopt};
  std::vector<ReportRow> rows;
  for (const EpsEvidence& e : v.per_eps) {
    std::ostringstream ev;
    ev << "exceedances=" << e.exceedance_count << " first=" << e.first_exceedance
       << " last=" << e.last_exceedance << " late=" << e.late_count;
    if (!v.witness.empty()) ev << "; " << v.witness;
    std::optional<double> ratio;
    if (v.n_max) ratio = static_cast<double>(e.exceedance_count) / v.n_max;
    rows.push_back(make_row(shape, e.eps, v.n_max, ratio, ev.str()));
  }
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const CauchyVerdict& v) {
  RowShape shape{std::move(analysis), std::move(sequence), "",
                 to_string(v.verdict), std::nullopt};
  std::vector<ReportRow> rows;
  for (const PairEpsEvidence& e : v.per_eps) {
    std::ostringstream ev;
    ev << "pair exceedances=" << e.exceedance_count
       << " last_min=" << e.last_min_exceedance << " late=" << e.late_count;
    if (e.witness)
      ev << "; pair n=" << e.witness->n << " m=" << e.witness->m
         << " S=" << format_number(e.witness->value);
    rows.push_back(make_row(shape, e.eps, v.n_max, std::nullopt, ev.str()));
  }
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const SBoundednessVerdict& v) {
  RowShape shape{std::move(analysis), std::move(sequence), "",
                 to_string(v.verdict), std::nullopt};
  std::vector<ReportRow> rows;
  for (const auto& [n, running] : v.running_max) {
    std::ostringstream ev;
    ev << "running_max=" << format_number(running);
    if (v.verdict == Verdict::Holds) ev << " bound=" << format_number(v.radius);
    if (v.growth_witness)
      ev << "; growth pair n=" << v.growth_witness->n << " m=" << v.growth_witness->m
         << " S=" << format_number(v.growth_witness->value);
    rows.push_back(make_row(shape, std::nullopt, n, std::nullopt, ev.str()));
  }
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StConvergenceVerdict& v) {
  RowShape shape{std::move(analysis), std::move(sequence),
                 format_candidate(v.candidate), to_string(v.verdict),
                 v.roughness > 0 ? std::optional<double>(v.roughness) : std::nullopt};
  std::vector<ReportRow> rows;
  const std::uint64_t fallback = v.n_schedule.empty() ? 0 : v.n_schedule.back();
  for (const EpsDensity& e : v.per_eps)
    append_estimate_rows(rows, shape, e.eps, e.density, fallback, "");
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StCauchyVerdict& v,
                                 std::span<const std::uint64_t> n_schedule) {
  RowShape shape{std::move(analysis), std::move(sequence), "",
                 to_string(v.verdict), std::nullopt};
  std::vector<ReportRow> rows;
  const std::uint64_t fallback = n_schedule.empty() ? 0 : n_schedule.back();
  std::string tried = "pivots tried=" + std::to_string(v.candidates_tried.size());
  for (const StCauchyWitness& w : v.per_eps) {
    std::string extra = tried;
    if (w.witness_index) extra += " pivot n=" + std::to_string(w.witness_index);
    append_estimate_rows(rows, shape, w.eps, w.density, fallback, extra);
  }
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const StBoundednessVerdict& v,
                                 std::span<const std::uint64_t> n_schedule) {
  RowShape shape{std::move(analysis), std::move(sequence),
                 format_candidate(v.ref_point), to_string(v.verdict), std::nullopt};
  std::vector<ReportRow> rows;
  const std::uint64_t fallback = n_schedule.empty() ? 0 : n_schedule.back();
  for (const auto& [bound, est] : v.tried) {
    std::string extra;
    if (v.verdict == Verdict::Holds && bound == v.bound) extra = "certified bound";
    if (!v.note.empty()) extra += (extra.empty() ? "" : "; ") + v.note;
    // The tested bound takes the epsilon slot: the analysis is an exceedance
    // density at threshold `bound`.
    append_estimate_rows(rows, shape, bound, est, fallback, extra);
  }
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string sequence,
                                 const ClusterVerdict& v,
                                 std::span<const std::uint64_t> n_schedule) {
  RowShape shape{std::move(analysis), std::move(sequence),
                 format_candidate(v.point), to_string(v.verdict), std::nullopt};
  std::vector<ReportRow> rows;
  const std::uint64_t fallback = n_schedule.empty() ? 0 : n_schedule.back();
  for (const EpsDensity& e : v.per_eps)
    append_estimate_rows(rows, shape, e.eps, e.density, fallback, "hit-set ratio");
  return rows;
}

std::vector<ReportRow> rows_from(std::string sequence, const RoughLimitSet& set,
                                 std::uint64_t n_max) {
  RowShape shape{"limitset", std::move(sequence), "", "holds",
                 std::optional<double>(set.roughness)};
  std::vector<ReportRow> rows;
  const bool ball = set.exact_ball.has_value();
  if (ball) {
    RowShape center = shape;
    center.candidate = format_candidate(set.exact_ball->certified_limit);
    rows.push_back(make_row(center, std::nullopt, n_max, std::nullopt,
                            "certified statistical limit; members sample the ball boundary"));
  }
  for (const Point& m : set.members) {
    RowShape member = shape;
    member.candidate = format_candidate(m);
    rows.push_back(make_row(member, std::nullopt, n_max, std::nullopt,
                            ball ? "ball boundary sample" : "grid cell"));
  }
  std::ostringstream ev;
  ev << "members=" << set.members.size()
     << " diameter_estimate=" << format_number(set.diameter_estimate)
     << " route=" << (ball ? "ball" : "grid");
  rows.push_back(make_row(shape, std::nullopt, n_max, std::nullopt, ev.str()));
  return rows;
}

std::vector<ReportRow> rows_from(std::string analysis, std::string set_name,
                                 const DensityEstimate& est) {
  RowShape shape{std::move(analysis), std::move(set_name), "",
                 est.verdict == DensityVerdict::Inconclusive ? "inconclusive" : "holds",
                 std::nullopt};
  std::vector<ReportRow> rows;
  append_estimate_rows(rows, shape, std::nullopt, est, 0, "");
  return rows;
}

}  // namespace smetric
