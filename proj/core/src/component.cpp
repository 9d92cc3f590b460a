#include "gridshield/component.hpp"

#include <algorithm>

namespace gridshield {

std::string to_string(const ComponentRef& ref) {
  return (ref.kind == ComponentKind::branch ? "branch:" : "generator:") + ref.id;
}

bool ComponentSet::contains(const ComponentRef& ref) const {
  const auto& ids = ref.kind == ComponentKind::branch ? branches : generators;
  return ids.contains(ref.id);
}

void ComponentSet::insert(const ComponentRef& ref) {
  (ref.kind == ComponentKind::branch ? branches : generators).insert(ref.id);
}

std::vector<ComponentRef> ComponentSet::sorted() const {
  std::vector<ComponentRef> out;
  out.reserve(size());
  for (const auto& id : branches) out.push_back({ComponentKind::branch, id});
  for (const auto& id : generators) out.push_back({ComponentKind::generator, id});
  return out;
}

namespace {

bool sets_intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i; else ++j;
  }
  return false;
}

}  // namespace

bool ComponentSet::intersects(const ComponentSet& other) const {
  return sets_intersect(branches, other.branches) ||
         sets_intersect(generators, other.generators);
}

bool ComponentSet::is_subset_of(const ComponentSet& other) const {
  return std::includes(other.branches.begin(), other.branches.end(),
                       branches.begin(), branches.end()) &&
         std::includes(other.generators.begin(), other.generators.end(),
                       generators.begin(), generators.end());
}

ComponentSet make_component_set(const std::vector<ComponentRef>& refs) {
  ComponentSet set;
  for (const auto& r : refs) set.insert(r);
  return set;
}

std::strong_ordering lex_compare(const ComponentSet& a, const ComponentSet& b) {
  const auto sa = a.sorted();
  const auto sb = b.sorted();
  return std::lexicographical_compare_three_way(sa.begin(), sa.end(), sb.begin(), sb.end());
}

std::string to_string(const ComponentSet& set) {
  std::string out = "{";
  bool first = true;
  for (const auto& ref : set.sorted()) {
    if (!first) out += ", ";
    out += to_string(ref);
    first = false;
  }
  return out + "}";
}

}  // namespace gridshield
