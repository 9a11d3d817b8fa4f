#include "smetric/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace smetric {

const std::vector<std::string> kAnalysisKinds = {
    "convergence",  "cauchy",        "boundedness",
    "st_convergence", "st_cauchy",   "st_boundedness",
    "rough_st_convergence", "cluster"};

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Trimmed tokens; an empty token is a syntax error.
std::vector<std::string_view> split_list(std::string_view s, char sep, int line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      auto tok = trim(s.substr(start, i - start));
      if (tok.empty()) throw ConfigError("empty list entry", line);
      out.push_back(tok);
      start = i + 1;
    }
  }
  return out;
}

double parse_double(std::string_view tok, int line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ConfigError("expected a number, got '" + std::string(tok) + "'", line);
  return v;
}

std::uint64_t parse_u64(std::string_view tok, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ConfigError("expected a positive integer, got '" + std::string(tok) + "'", line);
  return v;
}

Point parse_point_at(std::string_view text, int line) {
  auto t = trim(text);
  if (t.size() < 3 || t.front() != '(' || t.back() != ')')
    throw ConfigError("expected a point like (a, b), got '" + std::string(t) + "'", line);
  t = t.substr(1, t.size() - 2);
  Point::Storage coords;
  for (auto tok : split_list(t, ',', line)) coords.push_back(parse_double(tok, line));
  return Point(std::move(coords));
}

std::vector<Point> parse_points(std::string_view text, int line) {
  std::vector<Point> out;
  for (auto tok : split_list(text, ';', line)) out.push_back(parse_point_at(tok, line));
  return out;
}

template <typename Fn>
auto rethrow_at(int line, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(e.line > 0 ? std::string(e.what()) : e.what(), line);
  } catch (const Error& e) {
    throw ConfigError(e.what(), line);
  }
}

struct Parser {
  RunConfig config;
  std::string section;
  int section_line = 0;
  bool seen_space = false, seen_sequence = false, seen_output = false;

  AnalysisSpec* analysis() { return &config.analyses.back(); }

  void section_header(std::string_view name, int line) {
    if (name == "analysis") {
      config.analyses.emplace_back();
      analysis()->config_line = line;
    } else if (name == "space") {
      if (seen_space) throw ConfigError("duplicate [space] section", line);
      seen_space = true;
    } else if (name == "sequence") {
      if (seen_sequence) throw ConfigError("duplicate [sequence] section", line);
      seen_sequence = true;
    } else if (name == "output") {
      if (seen_output) throw ConfigError("duplicate [output] section", line);
      seen_output = true;
    } else if (name == "limitset") {
      if (config.limitset) throw ConfigError("duplicate [limitset] section", line);
      config.limitset.emplace();
      config.limitset->config_line = line;
    } else {
      throw ConfigError("unknown section [" + std::string(name) + "]", line);
    }
    section = std::string(name);
    section_line = line;
  }

  void space_key(std::string_view key, std::string_view value, int line) {
    if (key == "kind") {
      if (value == "norm_sum") config.space.kind = SMetricKind::NormSum;
      else if (value == "metric_sum") config.space.kind = SMetricKind::MetricSum;
      else throw ConfigError("unknown space kind '" + std::string(value) +
                             "' (norm_sum | metric_sum)", line);
    } else if (key == "norm") {
      if (value == "euclidean") config.space.norm = NormKind::Euclidean;
      else if (value == "taxicab") config.space.norm = NormKind::Taxicab;
      else if (value == "max") config.space.norm = NormKind::Max;
      else throw ConfigError("unknown norm '" + std::string(value) +
                             "' (euclidean | taxicab | max)", line);
    } else if (key == "dim") {
      auto d = parse_u64(value, line);
      if (d < 1 || d > 64) throw ConfigError("dim must be in [1, 64]", line);
      config.space.dim = static_cast<int>(d);
    } else {
      throw ConfigError("unknown [space] key '" + std::string(key) + "'", line);
    }
  }

  void sequence_key(std::string_view key, std::string_view value, int line) {
    if (key != "family")
      throw ConfigError("unknown [sequence] key '" + std::string(key) + "'", line);
    // Parse now so malformed expressions surface with this line number.
    rethrow_at(line, [&] { return parse_family(value); });
    config.family_expr = std::string(value);
    config.family_line = line;
  }

  void analysis_key(std::string_view key, std::string_view value, int line) {
    AnalysisSpec* a = analysis();
    if (key == "type") {
      if (std::find(kAnalysisKinds.begin(), kAnalysisKinds.end(), value) ==
          kAnalysisKinds.end())
        throw ConfigError("unknown analysis kind '" + std::string(value) + "'", line);
      a->type = std::string(value);
    } else if (key == "candidates") {
      a->candidates = parse_points(value, line);
      a->candidates_line = line;
    } else if (key == "r") {
      for (auto tok : split_list(value, ',', line)) {
        double r = parse_double(tok, line);
        if (r < 0) throw ConfigError("roughness degrees must be >= 0", line);
        a->rs.push_back(r);
      }
    } else if (key == "eps") {
      for (auto tok : split_list(value, ',', line)) a->eps.push_back(parse_double(tok, line));
      rethrow_at(line, [&] { validate_eps_schedule(a->eps); });
    } else if (key == "ns") {
      for (auto tok : split_list(value, ',', line)) a->ns.push_back(parse_u64(tok, line));
      rethrow_at(line, [&] { validate_n_schedule(a->ns); });
    } else if (key == "schedule") {
      if (value != "standard" && value != "smoke")
        throw ConfigError("unknown schedule '" + std::string(value) +
                          "' (standard | smoke)", line);
      a->schedule = std::string(value);
    } else {
      throw ConfigError("unknown [analysis] key '" + std::string(key) + "'", line);
    }
  }

  void output_key(std::string_view key, std::string_view value, int line) {
    if (key == "format") {
      if (value != "csv" && value != "json")
        throw ConfigError("unknown format '" + std::string(value) + "' (csv | json)", line);
      config.output.format = std::string(value);
    } else if (key == "path") {
      config.output.path = std::string(value);
    } else {
      throw ConfigError("unknown [output] key '" + std::string(key) + "'", line);
    }
  }

  void limitset_key(std::string_view key, std::string_view value, int line) {
    LimitSetSpec* l = &*config.limitset;
    if (key == "r") {
      l->r = parse_double(value, line);
      if (l->r < 0) throw ConfigError("roughness degrees must be >= 0", line);
    } else if (key == "step") {
      double st = parse_double(value, line);
      if (!(st > 0)) throw ConfigError("step must be > 0", line);
      l->step = st;
    } else if (key == "region") {
      auto corners = parse_points(value, line);
      if (corners.size() != 2)
        throw ConfigError("region needs two corner points '(lo); (hi)'", line);
      l->region = Region{corners[0], corners[1]};
    } else if (key == "eps") {
      for (auto tok : split_list(value, ',', line)) l->eps.push_back(parse_double(tok, line));
      rethrow_at(line, [&] { validate_eps_schedule(l->eps); });
    } else if (key == "ns") {
      for (auto tok : split_list(value, ',', line)) l->ns.push_back(parse_u64(tok, line));
      rethrow_at(line, [&] { validate_n_schedule(l->ns); });
    } else if (key == "schedule") {
      if (value != "standard" && value != "smoke")
        throw ConfigError("unknown schedule '" + std::string(value) +
                          "' (standard | smoke)", line);
      l->schedule = std::string(value);
    } else {
      throw ConfigError("unknown [limitset] key '" + std::string(key) + "'", line);
    }
  }

  void key_value(std::string_view key, std::string_view value, int line) {
    if (section.empty())
      throw ConfigError("key '" + std::string(key) + "' outside any section", line);
    if (section == "space") space_key(key, value, line);
    else if (section == "sequence") sequence_key(key, value, line);
    else if (section == "analysis") analysis_key(key, value, line);
    else if (section == "output") output_key(key, value, line);
    else limitset_key(key, value, line);
  }

  void finalize() {
    if (config.family_expr.empty())
      throw ConfigError("missing [sequence] family", seen_sequence ? section_line : 0);
    for (const AnalysisSpec& a : config.analyses) {
      if (a.type.empty())
        throw ConfigError("[analysis] block without a type", a.config_line);
      const bool needs_candidates = a.type == "convergence" ||
                                    a.type == "st_convergence" ||
                                    a.type == "rough_st_convergence" ||
                                    a.type == "cluster";
      if (needs_candidates && a.candidates.empty())
        throw ConfigError(a.type + " needs candidate points", a.config_line);
      if (a.type == "rough_st_convergence" && a.rs.empty())
        throw ConfigError("rough_st_convergence needs r values", a.config_line);
      for (const Point& p : a.candidates)
        if (p.dim() != config.space.dim)
          throw ConfigError("candidate dimension " + std::to_string(p.dim()) +
                                " does not match space dim " +
                                std::to_string(config.space.dim),
                            a.candidates_line);
    }
    if (config.limitset && config.limitset->region) {
      const Region& reg = *config.limitset->region;
      if (reg.lo.dim() != config.space.dim || reg.hi.dim() != config.space.dim)
        throw ConfigError("region dimension does not match space dim",
                          config.limitset->config_line);
    }
  }
};

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  Parser p;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    auto t = trim(raw);
    if (t.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("unterminated section header", line);
      p.section_header(trim(t.substr(1, t.size() - 2)), line);
    } else {
      auto eq = t.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("expected 'key = value'", line);
      auto key = trim(t.substr(0, eq));
      auto value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", line);
      p.key_value(key, value, line);
    }
    if (end == text.size()) break;
  }
  p.finalize();
  return p.config;
}

SMetric build_space(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SMetricKind::NormSum: return SMetric::norm_sum(spec.norm);
    case SMetricKind::MetricSum: return SMetric::metric_sum(spec.norm);
    case SMetricKind::Custom: break;
  }
  throw UsageError("custom spaces cannot be built from a config");
}

Point parse_point(std::string_view text) { return parse_point_at(text, 0); }

namespace {

Schedules resolve(std::string_view name, const std::vector<double>& eps,
                  const std::vector<std::uint64_t>& ns) {
  Schedules out = name == "smoke" ? Schedules::smoke() : Schedules::standard();
  if (!eps.empty()) out.eps = eps;
  if (!ns.empty()) out.ns = ns;
  return out;
}

}  // namespace

Schedules resolve_schedules(const AnalysisSpec& spec) {
  return resolve(spec.schedule, spec.eps, spec.ns);
}

Schedules resolve_schedules(const LimitSetSpec& spec) {
  return resolve(spec.schedule, spec.eps, spec.ns);
}

void validate_dimensions(const RunConfig& config, const SequenceFamily& family) {
  if (family.dim() != config.space.dim)
    throw ConfigError("family dimension " + std::to_string(family.dim()) +
                          " does not match space dim " + std::to_string(config.space.dim),
                      config.family_line);
}

}  // namespace smetric
