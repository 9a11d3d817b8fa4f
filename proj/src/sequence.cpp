#include "smetric/sequence.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

namespace smetric {

namespace {

bool is_perfect_square(std::uint64_t n, std::uint64_t* root) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))) + 2;
  while (r > 0 && r * r > n) --r;
  if (r * r == n) {
    if (root) *root = r;
    return true;
  }
  return false;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string fmt_coords(const Point& p) {
  std::string out;
  for (int i = 0; i < p.dim(); ++i) {
    if (i) out += ",";
    out += fmt_num(p[i]);
  }
  return out;
}

IndexSet all_indices() { return IndexSet::complement(IndexSet::finite({})); }

}  // namespace

IndexSet FamilyStructure::spike_set() const {
  std::optional<IndexSet> acc;
  for (const auto& cls : classes) {
    if (cls.value) continue;
    acc = acc ? IndexSet::set_union(*acc, cls.indices) : cls.indices;
  }
  return acc ? *acc : IndexSet::finite({});
}

std::vector<Point> FamilyStructure::base_values() const {
  std::vector<Point> out;
  for (const auto& cls : classes)
    if (cls.value) out.push_back(*cls.value);
  return out;
}

bool FamilyStructure::exact_partition() const {
  if (classes.empty()) return false;
  double total = 0;
  for (const auto& cls : classes) {
    auto d = cls.indices.exact_density();
    if (!d) return false;
    if (!cls.value && *d != 0.0) return false;
    total += *d;
  }
  return std::fabs(total - 1.0) <= 1e-9;
}

SequenceFamily::SequenceFamily(std::string name, int dim, Rule rule)
    : name_(std::move(name)), dim_(dim), rule_(std::move(rule)) {
  if (dim_ < 1) throw DomainError("sequence dimension must be >= 1");
  if (!rule_) throw UsageError("sequence family needs a rule");
}

SequenceFamily&& SequenceFamily::with_structure(FamilyStructure structure) && {
  structure_ = std::move(structure);
  return std::move(*this);
}

SequenceFamily SequenceFamily::explicit_prefix(std::string name, std::vector<Point> data) {
  if (data.empty()) throw UsageError("explicit prefix needs at least one point");
  int dim = data.front().dim();
  for (const Point& p : data) require_same_dim(p, data.front());
  auto shared = std::make_shared<std::vector<Point>>(std::move(data));
  SequenceFamily fam(std::move(name), dim,
                     [shared](std::uint64_t n) { return (*shared)[n - 1]; });
  fam.data_limit_ = shared->size();
  return fam;
}

Point SequenceFamily::at(std::uint64_t n) const {
  if (n == 0) throw UsageError("sequences are indexed from n = 1");
  if (data_limit_ != 0 && n > data_limit_)
    throw UsageError("index beyond the data of an explicit-prefix family");
  return rule_(n);
}

SequenceFamily square_spike_family() {
  SequenceFamily fam("example3_1", 2, [](std::uint64_t n) {
    std::uint64_t k = 0;
    if (is_perfect_square(n, &k)) {
      double v = static_cast<double>(k);
      return Point{v, v};
    }
    return Point{0.0, 0.0};
  });
  FamilyStructure st;
  st.classes.push_back({IndexSet::squares(), std::nullopt});
  st.classes.push_back({IndexSet::complement(IndexSet::squares()), Point{0.0, 0.0}});
  st.known_st_limit = Point{0.0, 0.0};
  return std::move(fam).with_structure(std::move(st));
}

SequenceFamily parity_spike_family() {
  SequenceFamily fam("example4_1", 2, [](std::uint64_t n) {
    std::uint64_t k = 0;
    if (is_perfect_square(n, &k)) {
      double v = static_cast<double>(k);
      return Point{v, v};
    }
    if (n % 2 == 0) return Point{0.0, 0.0};
    return Point{1.0, 1.0};
  });
  IndexSet nonsquare = IndexSet::complement(IndexSet::squares());
  FamilyStructure st;
  st.classes.push_back({IndexSet::squares(), std::nullopt});
  st.classes.push_back(
      {IndexSet::set_intersection(IndexSet::residue(2, 0), nonsquare), Point{0.0, 0.0}});
  st.classes.push_back(
      {IndexSet::set_intersection(IndexSet::residue(2, 1), nonsquare), Point{1.0, 1.0}});
  return std::move(fam).with_structure(std::move(st));
}

double decay_value(DecayKind decay, std::uint64_t n) {
  switch (decay) {
    case DecayKind::OneOverN:
      return 1.0 / static_cast<double>(n);
    case DecayKind::OneOverNSquared:
      return 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    case DecayKind::GeometricHalf:
      return n > 1100 ? 0.0 : std::ldexp(1.0, -static_cast<int>(n));
  }
  throw DomainError("unknown decay kind");
}

std::string to_string(DecayKind decay) {
  switch (decay) {
    case DecayKind::OneOverN: return "1/n";
    case DecayKind::OneOverNSquared: return "1/n^2";
    case DecayKind::GeometricHalf: return "2^-n";
  }
  return "?";
}

SequenceFamily constant_family(Point value) {
  Point v = value;
  SequenceFamily fam("constant(" + fmt_coords(v) + ")", v.dim(),
                     [v](std::uint64_t) { return v; });
  FamilyStructure st;
  st.classes.push_back({all_indices(), value});
  st.known_st_limit = value;
  return std::move(fam).with_structure(std::move(st));
}

SequenceFamily reciprocal_family(Point center, Point direction) {
  require_same_dim(center, direction);
  Point c = center, d = direction;
  SequenceFamily fam(
      "reciprocal(" + fmt_coords(c) + "; " + fmt_coords(d) + ")", c.dim(),
      [c, d](std::uint64_t n) { return c + (1.0 / static_cast<double>(n)) * d; });
  FamilyStructure st;
  st.known_st_limit = center;
  return std::move(fam).with_structure(std::move(st));
}

SequenceFamily spike_on_family(IndexSet spikes, Point spike_value, Point base) {
  require_same_dim(spike_value, base);
  IndexSet s = spikes;
  Point sv = spike_value, b = base;
  SequenceFamily fam(
      "spike_on(" + spikes.to_string() + "; " + fmt_coords(sv) + "; " + fmt_coords(b) + ")",
      base.dim(),
      [s, sv, b](std::uint64_t n) { return s.contains(n) ? sv : b; });
  FamilyStructure st;
  st.classes.push_back({spikes, spike_value});
  st.classes.push_back({IndexSet::complement(spikes), base});
  auto d = spikes.exact_density();
  if (d && *d == 0.0) st.known_st_limit = base;
  return std::move(fam).with_structure(std::move(st));
}

SequenceFamily periodic_family(std::vector<Point> values) {
  if (values.empty()) throw UsageError("periodic family needs at least one value");
  for (const Point& p : values) require_same_dim(p, values.front());
  auto period = static_cast<std::uint64_t>(values.size());
  auto shared = std::make_shared<std::vector<Point>>(std::move(values));
  std::string name = "periodic(";
  for (std::size_t i = 0; i < shared->size(); ++i) {
    if (i) name += ",";
    name += "(" + fmt_coords((*shared)[i]) + ")";
  }
  name += ")";
  SequenceFamily fam(std::move(name), shared->front().dim(),
                     [shared, period](std::uint64_t n) {
                       return (*shared)[static_cast<std::size_t>((n - 1) % period)];
                     });
  FamilyStructure st;
  for (std::uint64_t r = 0; r < period; ++r) {
    std::size_t value_index = static_cast<std::size_t>((r + period - 1) % period);
    st.classes.push_back({IndexSet::residue(period, r), (*shared)[value_index]});
  }
  if (period == 1) st.known_st_limit = shared->front();
  return std::move(fam).with_structure(std::move(st));
}

SequenceFamily drift_family(Point step) {
  Point s = step;
  return SequenceFamily("drift(" + fmt_coords(s) + ")", s.dim(),
                        [s](std::uint64_t n) { return static_cast<double>(n) * s; });
}

SequenceFamily perturbed_family(SequenceFamily base, DecayKind decay) {
  auto shared = std::make_shared<SequenceFamily>(std::move(base));
  std::string name = "perturb(" + shared->name() + "; " + to_string(decay) + ")";
  int dim = shared->dim();
  SequenceFamily fam(std::move(name), dim, [shared, decay, dim](std::uint64_t n) {
    Point p = shared->at(n);
    Point::Storage c;
    c.reserve(static_cast<std::size_t>(dim));
    c.push_back(p[0] + decay_value(decay, n));
    for (int i = 1; i < dim; ++i) c.push_back(p[i]);
    return Point(std::move(c));
  });
  return fam;
}

IndexSet exceedance_set(const SMetric& s, const SequenceFamily& family,
                        const Point& candidate, double threshold) {
  if (!(threshold > 0)) throw UsageError("exceedance threshold must be positive");
  SMetric spec = s;
  SequenceFamily fam = family;
  Point cand = candidate;
  std::string label = "exceedance(" + family.name() + "; " + fmt_coords(candidate) +
                      "; " + fmt_num(threshold) + ")";
  return IndexSet::threshold_exceedance(
      label, [spec, fam, cand, threshold](std::uint64_t n) {
        return spec(fam.at(n), fam.at(n), cand) >= threshold;
      });
}

namespace {

struct FamilyParser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("sequence: " + msg + " at position " + std::to_string(pos + 1));
  }

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected a family name");
    return std::string(text.substr(start, pos - start));
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '-' ||
            text[pos] == '+' || text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
      ++pos;
    if (pos == start) fail("expected a number");
    try {
      return std::stod(std::string(text.substr(start, pos - start)));
    } catch (const std::exception&) {
      fail("malformed number");
    }
  }

  Point point_list() {
    Point::Storage c;
    c.push_back(number());
    while (eat(',')) c.push_back(number());
    return Point(std::move(c));
  }

  /// Reads raw text up to the next top-level ';' or ')'.
  std::string_view raw_until_separator() {
    skip_ws();
    int depth = 0;
    std::size_t start = pos;
    while (pos < text.size()) {
      char ch = text[pos];
      if (ch == '(') ++depth;
      if (ch == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (ch == ';' && depth == 0) break;
      ++pos;
    }
    return text.substr(start, pos - start);
  }

  DecayKind decay() {
    std::string_view raw = raw_until_separator();
    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t'))
      raw.remove_suffix(1);
    if (raw == "1/n") return DecayKind::OneOverN;
    if (raw == "1/n^2") return DecayKind::OneOverNSquared;
    if (raw == "2^-n") return DecayKind::GeometricHalf;
    fail("unknown decay rule '" + std::string(raw) + "'");
  }

  SequenceFamily parse_family_expr() {
    std::string name = ident();
    if (name == "example3_1") return square_spike_family();
    if (name == "example4_1") return parity_spike_family();
    if (name == "constant") {
      expect('(');
      Point v = point_list();
      expect(')');
      return constant_family(std::move(v));
    }
    if (name == "reciprocal") {
      expect('(');
      Point c = point_list();
      expect(';');
      Point d = point_list();
      expect(')');
      return reciprocal_family(std::move(c), std::move(d));
    }
    if (name == "spike_on") {
      expect('(');
      IndexSet set = parse_index_set(raw_until_separator());
      expect(';');
      Point spike = point_list();
      expect(';');
      Point base = point_list();
      expect(')');
      return spike_on_family(std::move(set), std::move(spike), std::move(base));
    }
    if (name == "periodic") {
      expect('(');
      std::vector<Point> values;
      do {
        expect('(');
        values.push_back(point_list());
        expect(')');
      } while (eat(','));
      expect(')');
      return periodic_family(std::move(values));
    }
    if (name == "drift") {
      expect('(');
      Point s = point_list();
      expect(')');
      return drift_family(std::move(s));
    }
    if (name == "perturb") {
      expect('(');
      SequenceFamily base = parse_family_expr();
      expect(';');
      DecayKind d = decay();
      expect(')');
      return perturbed_family(std::move(base), d);
    }
    throw UsageError("unknown sequence family kind '" + name + "'");
  }

  SequenceFamily run() {
    // Dimension clashes between points of one expression are config mistakes,
    // so they surface with a position like every other grammar error.
    try {
      SequenceFamily fam = parse_family_expr();
      skip_ws();
      if (pos != text.size()) fail("trailing input");
      return fam;
    } catch (const DimensionError& e) {
      fail(e.what());
    }
  }
};

}  // namespace

SequenceFamily parse_family(std::string_view text) {
  FamilyParser p{text};
  return p.run();
}

}  // namespace smetric
