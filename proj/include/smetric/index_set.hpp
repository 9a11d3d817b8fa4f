#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smetric/error.hpp"

namespace smetric {

/// An immutable subset of the positive integers, built from structured
/// constructors so that membership, prefix counts and (where possible) exact
/// natural densities follow from the structure instead of enumeration.
///
/// Structured kinds (Finite, Residue, PolynomialImage and the closures of
/// those under Complement/Union/Intersection) answer prefix_count in closed
/// form. ThresholdExceedance wraps an arbitrary predicate and always counts
/// by enumeration; by design it never reports an exact density, even when the
/// predicate happens to be structured.
class IndexSet {
 public:
  enum class Kind {
    Explicit,
    Finite,
    Residue,
    PolynomialImage,
    Complement,
    Union,
    Intersection,
    ThresholdExceedance,
  };

  /// Finite set given by its members, strictly increasing, all >= 1.
  static IndexSet finite(std::vector<std::uint64_t> members);
  /// Explicit list of members, strictly increasing; semantically an
  /// enumeration prefix of an otherwise unknown set, so it has no density.
  static IndexSet explicit_list(std::vector<std::uint64_t> members);
  /// {n >= 1 : n mod modulus == remainder}, remainder in [0, modulus).
  static IndexSet residue(std::uint64_t modulus, std::uint64_t remainder);
  /// {k^degree : k >= 1} for degree >= 2.
  static IndexSet polynomial_image(unsigned degree);
  static IndexSet squares() { return polynomial_image(2); }
  static IndexSet cubes() { return polynomial_image(3); }
  static IndexSet complement(IndexSet inner);
  static IndexSet set_union(IndexSet a, IndexSet b);
  static IndexSet set_intersection(IndexSet a, IndexSet b);
  /// Predicate-backed set; `label` is used by to_string only.
  static IndexSet threshold_exceedance(std::string label,
                                       std::function<bool(std::uint64_t)> predicate);

  Kind kind() const;

  /// Membership of n >= 1. Throws UsageError for n == 0.
  bool contains(std::uint64_t n) const;

  /// |set ∩ [1, n]|.
  std::uint64_t prefix_count(std::uint64_t n) const;

  /// Batched prefix counts for a strictly increasing list of n values.
  /// Predicate-backed sets are enumerated in a single pass.
  std::vector<std::uint64_t> prefix_counts(std::span<const std::uint64_t> ns) const;

  /// Exact natural density when the structure certifies one.
  std::optional<double> exact_density() const;

  /// k-th smallest member (k >= 1). Throws UsageError when the set is proven
  /// to have fewer than k members.
  std::uint64_t nth_element(std::uint64_t k) const;

  /// Members <= n in increasing order.
  std::vector<std::uint64_t> members_up_to(std::uint64_t n) const;

  std::string to_string() const;

  struct Node;  // opaque; defined in index_set.cpp

 private:
  explicit IndexSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the textual grammar used by config files and the CLI:
///   squares | cubes | residue(m,a) | finite(a,b,...) | explicit(a,b,...)
///   | union(A,B) | intersect(A,B) | complement(A)
/// Throws ConfigError with a character position on malformed input.
IndexSet parse_index_set(std::string_view text);

}  // namespace smetric
