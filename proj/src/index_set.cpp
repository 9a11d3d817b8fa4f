#include "smetric/index_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace smetric {

struct IndexSet::Node {
  Kind kind;
  std::vector<std::uint64_t> members;                  // Finite, Explicit
  std::uint64_t modulus = 0, remainder = 0;            // Residue
  unsigned degree = 0;                                 // PolynomialImage
  std::shared_ptr<const Node> a, b;                    // Complement (a), Union, Intersection
  std::string label;                                   // ThresholdExceedance
  std::function<bool(std::uint64_t)> predicate;        // ThresholdExceedance
};

namespace {

using Node = IndexSet::Node;
using Kind = IndexSet::Kind;

/// True when base^d > n, computed without overflow.
bool ipow_exceeds(std::uint64_t base, unsigned d, std::uint64_t n) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < d; ++i) {
    if (base != 0 && r > n / base) return true;
    r *= base;
  }
  return r > n;
}

std::uint64_t kth_root_floor(std::uint64_t n, unsigned d) {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / d)) + 2;
  while (r > 0 && ipow_exceeds(r, d, n)) --r;
  while (!ipow_exceeds(r + 1, d, n)) ++r;
  return r;
}

std::uint64_t residue_count(std::uint64_t modulus, std::uint64_t remainder, std::uint64_t n) {
  if (remainder == 0) return n / modulus;
  return n >= remainder ? (n - remainder) / modulus + 1 : 0;
}

bool node_contains(const Node& s, std::uint64_t n);
std::uint64_t node_count(const Node& s, std::uint64_t n);
std::uint64_t intersection_count(const Node& a, const Node& b, std::uint64_t n);

bool node_contains(const Node& s, std::uint64_t n) {
  switch (s.kind) {
    case Kind::Finite:
    case Kind::Explicit:
      return std::binary_search(s.members.begin(), s.members.end(), n);
    case Kind::Residue:
      return n % s.modulus == s.remainder;
    case Kind::PolynomialImage: {
      std::uint64_t r = kth_root_floor(n, s.degree);
      std::uint64_t v = 1;
      for (unsigned i = 0; i < s.degree; ++i) v *= r;
      return v == n;
    }
    case Kind::Complement:
      return !node_contains(*s.a, n);
    case Kind::Union:
      return node_contains(*s.a, n) || node_contains(*s.b, n);
    case Kind::Intersection:
      return node_contains(*s.a, n) && node_contains(*s.b, n);
    case Kind::ThresholdExceedance:
      return s.predicate(n);
  }
  throw DomainError("unknown index set kind");
}

bool is_simple(const Node& s) {
  return s.kind == Kind::Finite || s.kind == Kind::Explicit ||
         s.kind == Kind::Residue || s.kind == Kind::PolynomialImage;
}

std::uint64_t enumerate_intersection(const Node& a, const Node& b, std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t i = 1; i <= n; ++i)
    if (node_contains(a, i) && node_contains(b, i)) ++c;
  return c;
}

/// Count of {i <= n : i in a and i in b} using structure where available.
std::uint64_t intersection_count(const Node& a, const Node& b, std::uint64_t n) {
  if (a.kind == Kind::Finite || a.kind == Kind::Explicit) {
    std::uint64_t c = 0;
    for (std::uint64_t m : a.members) {
      if (m > n) break;
      if (node_contains(b, m)) ++c;
    }
    return c;
  }
  if (b.kind == Kind::Finite || b.kind == Kind::Explicit)
    return intersection_count(b, a, n);
  if (a.kind == Kind::PolynomialImage) {
    std::uint64_t c = 0;
    for (std::uint64_t k = 1; !ipow_exceeds(k, a.degree, n); ++k) {
      std::uint64_t v = 1;
      for (unsigned i = 0; i < a.degree; ++i) v *= k;
      if (node_contains(b, v)) ++c;
    }
    return c;
  }
  if (b.kind == Kind::PolynomialImage) return intersection_count(b, a, n);
  if (a.kind == Kind::Residue && b.kind == Kind::Residue) {
    std::uint64_t g = std::gcd(a.modulus, b.modulus);
    if (a.remainder % g != b.remainder % g) return 0;
    // Combined residue via CRT stepping; moduli in practice are small.
    std::uint64_t l = a.modulus / g * b.modulus;
    std::uint64_t r = a.remainder;
    while (r % b.modulus != b.remainder) r += a.modulus;
    return residue_count(l, r % l, n);
  }
  if (a.kind == Kind::Complement)
    return node_count(b, n) - intersection_count(*a.a, b, n);
  if (b.kind == Kind::Complement)
    return node_count(a, n) - intersection_count(*b.a, a, n);
  return enumerate_intersection(a, b, n);
}

std::uint64_t node_count(const Node& s, std::uint64_t n) {
  switch (s.kind) {
    case Kind::Finite:
    case Kind::Explicit: {
      auto it = std::upper_bound(s.members.begin(), s.members.end(), n);
      return static_cast<std::uint64_t>(it - s.members.begin());
    }
    case Kind::Residue:
      return residue_count(s.modulus, s.remainder, n);
    case Kind::PolynomialImage:
      return kth_root_floor(n, s.degree);
    case Kind::Complement:
      return n - node_count(*s.a, n);
    case Kind::Union:
      return node_count(*s.a, n) + node_count(*s.b, n) - intersection_count(*s.a, *s.b, n);
    case Kind::Intersection:
      return intersection_count(*s.a, *s.b, n);
    case Kind::ThresholdExceedance: {
      std::uint64_t c = 0;
      for (std::uint64_t i = 1; i <= n; ++i)
        if (s.predicate(i)) ++c;
      return c;
    }
  }
  throw DomainError("unknown index set kind");
}

bool has_predicate(const Node& s) {
  if (s.kind == Kind::ThresholdExceedance) return true;
  if (s.a && has_predicate(*s.a)) return true;
  if (s.b && has_predicate(*s.b)) return true;
  return false;
}

std::optional<double> node_density(const Node& s);

std::optional<double> intersection_density(const Node& a, const Node& b) {
  auto da = node_density(a);
  auto db = node_density(b);
  if ((da && *da == 0.0) || (db && *db == 0.0)) return 0.0;
  if (a.kind == Kind::Residue && b.kind == Kind::Residue) {
    std::uint64_t g = std::gcd(a.modulus, b.modulus);
    if (a.remainder % g != b.remainder % g) return 0.0;
    return 1.0 / static_cast<double>(a.modulus / g * b.modulus);
  }
  // A set of density 1 intersects any set with exact density without
  // changing it: the discarded part sits inside a zero-density complement.
  if (da && *da == 1.0 && db) return db;
  if (db && *db == 1.0 && da) return da;
  return std::nullopt;
}

std::optional<double> node_density(const Node& s) {
  switch (s.kind) {
    case Kind::Finite:
      return 0.0;
    case Kind::Explicit:
      return std::nullopt;
    case Kind::Residue:
      return 1.0 / static_cast<double>(s.modulus);
    case Kind::PolynomialImage:
      return 0.0;
    case Kind::Complement: {
      auto d = node_density(*s.a);
      if (d) return 1.0 - *d;
      return std::nullopt;
    }
    case Kind::Union: {
      auto da = node_density(*s.a);
      auto db = node_density(*s.b);
      auto di = intersection_density(*s.a, *s.b);
      if (da && db && di) return std::clamp(*da + *db - *di, 0.0, 1.0);
      return std::nullopt;
    }
    case Kind::Intersection:
      return intersection_density(*s.a, *s.b);
    case Kind::ThresholdExceedance:
      return std::nullopt;
  }
  throw DomainError("unknown index set kind");
}

std::string node_string(const Node& s) {
  std::ostringstream os;
  switch (s.kind) {
    case Kind::Finite:
    case Kind::Explicit: {
      os << (s.kind == Kind::Finite ? "finite(" : "explicit(");
      for (std::size_t i = 0; i < s.members.size(); ++i) {
        if (i) os << ",";
        os << s.members[i];
      }
      os << ")";
      return os.str();
    }
    case Kind::Residue:
      os << "residue(" << s.modulus << "," << s.remainder << ")";
      return os.str();
    case Kind::PolynomialImage:
      if (s.degree == 2) return "squares";
      if (s.degree == 3) return "cubes";
      os << "power(" << s.degree << ")";
      return os.str();
    case Kind::Complement:
      return "complement(" + node_string(*s.a) + ")";
    case Kind::Union:
      return "union(" + node_string(*s.a) + "," + node_string(*s.b) + ")";
    case Kind::Intersection:
      return "intersect(" + node_string(*s.a) + "," + node_string(*s.b) + ")";
    case Kind::ThresholdExceedance:
      return s.label;
  }
  return "?";
}

std::vector<std::uint64_t> checked_members(std::vector<std::uint64_t> members,
                                           const char* what) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i] < 1)
      throw UsageError(std::string(what) + " members must be >= 1");
    if (i > 0 && members[i] <= members[i - 1])
      throw UsageError(std::string(what) + " members must be strictly increasing");
  }
  return members;
}

}  // namespace

IndexSet IndexSet::finite(std::vector<std::uint64_t> members) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Finite;
  node->members = checked_members(std::move(members), "finite set");
  return IndexSet(node);
}

IndexSet IndexSet::explicit_list(std::vector<std::uint64_t> members) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Explicit;
  node->members = checked_members(std::move(members), "explicit list");
  return IndexSet(node);
}

IndexSet IndexSet::residue(std::uint64_t modulus, std::uint64_t remainder) {
  if (modulus < 1) throw UsageError("residue modulus must be >= 1");
  if (remainder >= modulus) throw UsageError("residue remainder must be < modulus");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Residue;
  node->modulus = modulus;
  node->remainder = remainder;
  return IndexSet(node);
}

IndexSet IndexSet::polynomial_image(unsigned degree) {
  if (degree < 2) throw UsageError("polynomial image degree must be >= 2");
  auto node = std::make_shared<Node>();
  node->kind = Kind::PolynomialImage;
  node->degree = degree;
  return IndexSet(node);
}

IndexSet IndexSet::complement(IndexSet inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Complement;
  node->a = inner.node_;
  return IndexSet(node);
}

IndexSet IndexSet::set_union(IndexSet a, IndexSet b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Union;
  node->a = a.node_;
  node->b = b.node_;
  return IndexSet(node);
}

IndexSet IndexSet::set_intersection(IndexSet a, IndexSet b) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Intersection;
  node->a = a.node_;
  node->b = b.node_;
  return IndexSet(node);
}

IndexSet IndexSet::threshold_exceedance(std::string label,
                                        std::function<bool(std::uint64_t)> predicate) {
  if (!predicate) throw UsageError("threshold exceedance needs a predicate");
  auto node = std::make_shared<Node>();
  node->kind = Kind::ThresholdExceedance;
  node->label = std::move(label);
  node->predicate = std::move(predicate);
  return IndexSet(node);
}

IndexSet::Kind IndexSet::kind() const { return node_->kind; }

bool IndexSet::contains(std::uint64_t n) const {
  if (n == 0) throw UsageError("index sets live on n >= 1");
  return node_contains(*node_, n);
}

std::uint64_t IndexSet::prefix_count(std::uint64_t n) const {
  if (n == 0) return 0;
  return node_count(*node_, n);
}

std::vector<std::uint64_t> IndexSet::prefix_counts(
    std::span<const std::uint64_t> ns) const {
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw UsageError("prefix lengths must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1])
      throw UsageError("prefix lengths must be strictly increasing");
  }
  std::vector<std::uint64_t> out;
  out.reserve(ns.size());
  if (!has_predicate(*node_)) {
    for (std::uint64_t n : ns) out.push_back(node_count(*node_, n));
    return out;
  }
  // One enumeration pass shared by all checkpoints.
  std::uint64_t running = 0;
  std::size_t next = 0;
  for (std::uint64_t i = 1; next < ns.size(); ++i) {
    if (node_contains(*node_, i)) ++running;
    while (next < ns.size() && ns[next] == i) {
      out.push_back(running);
      ++next;
    }
  }
  return out;
}

std::optional<double> IndexSet::exact_density() const { return node_density(*node_); }

std::uint64_t IndexSet::nth_element(std::uint64_t k) const {
  if (k == 0) throw UsageError("nth_element is 1-based");
  const Node& s = *node_;
  if (s.kind == Kind::Finite || s.kind == Kind::Explicit) {
    if (k > s.members.size()) throw UsageError("set has fewer members than requested");
    return s.members[k - 1];
  }
  std::uint64_t hi = 1;
  const std::uint64_t cap = std::uint64_t(1) << 40;
  while (node_count(s, hi) < k) {
    if (hi >= cap) throw UsageError("nth_element found no witness below 2^40");
    hi *= 2;
  }
  std::uint64_t lo = 1;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (node_count(s, mid) >= k)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

std::vector<std::uint64_t> IndexSet::members_up_to(std::uint64_t n) const {
  std::vector<std::uint64_t> out;
  const Node& s = *node_;
  if (s.kind == Kind::Finite || s.kind == Kind::Explicit) {
    for (std::uint64_t m : s.members) {
      if (m > n) break;
      out.push_back(m);
    }
    return out;
  }
  for (std::uint64_t i = 1; i <= n; ++i)
    if (node_contains(s, i)) out.push_back(i);
  return out;
}

std::string IndexSet::to_string() const { return node_string(*node_); }

namespace {

struct SetParser {
  std::string_view text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("index set: " + msg + " at position " + std::to_string(pos + 1));
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
    if (pos == start) fail("expected a set name");
    return std::string(text.substr(start, pos - start));
  }

  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected an integer");
    std::uint64_t v = 0;
    for (std::size_t i = start; i < pos; ++i) v = v * 10 + (text[i] - '0');
    return v;
  }

  std::vector<std::uint64_t> number_list() {
    std::vector<std::uint64_t> out;
    skip_ws();
    if (pos < text.size() && text[pos] == ')') return out;
    out.push_back(number());
    while (eat(',')) out.push_back(number());
    return out;
  }

  IndexSet parse_set() {
    std::string name = ident();
    if (name == "squares") return IndexSet::squares();
    if (name == "cubes") return IndexSet::cubes();
    if (name == "power") {
      expect('(');
      std::uint64_t d = number();
      expect(')');
      return IndexSet::polynomial_image(static_cast<unsigned>(d));
    }
    if (name == "residue") {
      expect('(');
      std::uint64_t m = number();
      expect(',');
      std::uint64_t a = number();
      expect(')');
      return IndexSet::residue(m, a);
    }
    if (name == "finite" || name == "explicit") {
      expect('(');
      auto members = number_list();
      expect(')');
      return name == "finite" ? IndexSet::finite(std::move(members))
                              : IndexSet::explicit_list(std::move(members));
    }
    if (name == "complement") {
      expect('(');
      IndexSet inner = parse_set();
      expect(')');
      return IndexSet::complement(std::move(inner));
    }
    if (name == "union" || name == "intersect") {
      expect('(');
      IndexSet a = parse_set();
      expect(',');
      IndexSet b = parse_set();
      expect(')');
      return name == "union" ? IndexSet::set_union(std::move(a), std::move(b))
                             : IndexSet::set_intersection(std::move(a), std::move(b));
    }
    fail("unknown set constructor '" + name + "'");
  }

  IndexSet run() {
    IndexSet s = parse_set();
    skip_ws();
    if (pos != text.size()) fail("trailing input");
    return s;
  }
};

}  // namespace

IndexSet parse_index_set(std::string_view text) {
  SetParser p{text};
  try {
    return p.run();
  } catch (const UsageError& e) {
    throw ConfigError(std::string("index set: ") + e.what());
  }
}

}  // namespace smetric
