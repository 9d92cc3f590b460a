#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace gridshield {

enum class ComponentKind : unsigned char { branch = 0, generator = 1 };

/// An attackable/protectable grid element. Branch and generator ids live in
/// separate namespaces, so identity is the (kind, id) pair. The canonical
/// order puts every branch before every generator, then compares ids as
/// byte strings.
struct ComponentRef {
  ComponentKind kind = ComponentKind::branch;
  std::string id;

  auto operator<=>(const ComponentRef&) const = default;
  bool operator==(const ComponentRef&) const = default;
};

std::string to_string(const ComponentRef& ref);

/// A set of branches and ICT generators. Used both for attack vectors and
/// for protected sets.
struct ComponentSet {
  std::set<std::string> branches;
  std::set<std::string> generators;

  std::size_t size() const { return branches.size() + generators.size(); }
  bool empty() const { return branches.empty() && generators.empty(); }
  bool contains(const ComponentRef& ref) const;
  void insert(const ComponentRef& ref);

  /// Members in canonical order.
  std::vector<ComponentRef> sorted() const;

  /// True if the sets share at least one component.
  bool intersects(const ComponentSet& other) const;
  bool is_subset_of(const ComponentSet& other) const;

  bool operator==(const ComponentSet&) const = default;
};

using AttackVector = ComponentSet;

ComponentSet make_component_set(const std::vector<ComponentRef>& refs);

/// Lexicographic comparison of the sorted member tuples.
std::strong_ordering lex_compare(const ComponentSet& a, const ComponentSet& b);

std::string to_string(const ComponentSet& set);

}  // namespace gridshield
