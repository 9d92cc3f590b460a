#include "gridshield/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gridshield/errors.hpp"
#include "json_util.hpp"

namespace gridshield {

using detail::json;

namespace {

template <typename T>
std::optional<std::size_t> find_by_id(const std::vector<T>& items, std::string_view id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return i;
  }
  return std::nullopt;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::optional<std::size_t> GridCase::find_bus(std::string_view id) const {
  return find_by_id(buses, id);
}
std::optional<std::size_t> GridCase::find_branch(std::string_view id) const {
  return find_by_id(branches, id);
}
std::optional<std::size_t> GridCase::find_generator(std::string_view id) const {
  return find_by_id(generators, id);
}

double GridCase::total_demand_mw() const {
  double total = 0.0;
  for (const auto& b : buses) total += b.demand_mw;
  return total;
}

std::vector<ComponentRef> GridCase::attackable_components() const {
  std::vector<ComponentRef> out;
  for (const auto& br : branches) {
    if (br.attackable && br.in_service) out.push_back({ComponentKind::branch, br.id});
  }
  for (const auto& g : generators) {
    if (g.ict_controlled) out.push_back({ComponentKind::generator, g.id});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(const Diagnostic& d) {
  return d.component + ": " + d.message;
}

std::vector<Diagnostic> validate(const GridCase& grid) {
  std::vector<Diagnostic> out;
  auto add = [&out](Diagnostic::Kind k, std::string comp, std::string msg) {
    out.push_back({k, std::move(comp), std::move(msg)});
  };

  if (grid.buses.empty()) add(Diagnostic::Kind::domain, "grid " + grid.name, "grid has no buses");

  std::set<std::string> bus_ids;
  for (const auto& b : grid.buses) {
    const std::string tag = "bus " + b.id;
    if (!bus_ids.insert(b.id).second) add(Diagnostic::Kind::duplicate, tag, "duplicate id");
    if (!finite_nonneg(b.demand_mw))
      add(Diagnostic::Kind::domain, tag, "demand_mw must be finite and >= 0");
  }

  std::set<std::string> branch_ids;
  for (const auto& br : grid.branches) {
    const std::string tag = "branch " + br.id;
    if (!branch_ids.insert(br.id).second) add(Diagnostic::Kind::duplicate, tag, "duplicate id");
    if (!bus_ids.contains(br.from_bus))
      add(Diagnostic::Kind::reference, tag, "unknown from bus '" + br.from_bus + "'");
    if (!bus_ids.contains(br.to_bus))
      add(Diagnostic::Kind::reference, tag, "unknown to bus '" + br.to_bus + "'");
    if (br.from_bus == br.to_bus)
      add(Diagnostic::Kind::domain, tag, "from and to bus are identical");
    if (!finite_pos(br.susceptance))
      add(Diagnostic::Kind::domain, tag, "susceptance must be finite and > 0");
    if (!finite_pos(br.flow_limit_mw))
      add(Diagnostic::Kind::domain, tag, "flow_limit_mw must be finite and > 0");
  }

  std::set<std::string> gen_ids;
  for (const auto& g : grid.generators) {
    const std::string tag = "generator " + g.id;
    if (!gen_ids.insert(g.id).second) add(Diagnostic::Kind::duplicate, tag, "duplicate id");
    if (!bus_ids.contains(g.bus))
      add(Diagnostic::Kind::reference, tag, "unknown bus '" + g.bus + "'");
    if (!finite_nonneg(g.p_max_mw))
      add(Diagnostic::Kind::domain, tag, "p_max_mw must be finite and >= 0");
  }

  if (!grid.buses.empty() && !bus_ids.contains(grid.reference_bus))
    add(Diagnostic::Kind::reference, "grid " + grid.name,
        "unknown reference bus '" + grid.reference_bus + "'");
  return out;
}

GridCase parse_grid(std::string_view text) {
  const json doc = detail::parse_json(text, "grid");
  if (!doc.is_object()) detail::field_error("grid", "expected a JSON object");

  GridCase grid;
  grid.name = detail::as_string(detail::require(doc, "name", "grid"), "grid.name");
  grid.reference_bus =
      detail::as_id(detail::require(doc, "reference_bus", "grid"), "grid.reference_bus");
  if (auto it = doc.find("configuration_label"); it != doc.end())
    grid.configuration_label = detail::as_string(*it, "grid.configuration_label");

  const auto& buses = detail::as_array(detail::require(doc, "buses", "grid"), "grid.buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string p = "buses[" + std::to_string(i) + "]";
    Bus b;
    b.id = detail::as_id(detail::require(buses[i], "id", p), p + ".id");
    b.demand_mw = detail::as_number(detail::require(buses[i], "demand_mw", p), p + ".demand_mw");
    grid.buses.push_back(std::move(b));
  }

  const auto& branches =
      detail::as_array(detail::require(doc, "branches", "grid"), "grid.branches");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string p = "branches[" + std::to_string(i) + "]";
    const auto& o = branches[i];
    Branch br;
    br.id = detail::as_id(detail::require(o, "id", p), p + ".id");
    br.from_bus = detail::as_id(detail::require(o, "from", p), p + ".from");
    br.to_bus = detail::as_id(detail::require(o, "to", p), p + ".to");
    br.susceptance = detail::as_number(detail::require(o, "susceptance", p), p + ".susceptance");
    br.flow_limit_mw =
        detail::as_number(detail::require(o, "flow_limit_mw", p), p + ".flow_limit_mw");
    br.attackable = detail::as_bool(detail::require(o, "attackable", p), p + ".attackable");
    br.in_service = detail::as_bool(detail::require(o, "in_service", p), p + ".in_service");
    grid.branches.push_back(std::move(br));
  }

  const auto& gens =
      detail::as_array(detail::require(doc, "generators", "grid"), "grid.generators");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string p = "generators[" + std::to_string(i) + "]";
    const auto& o = gens[i];
    Generator g;
    g.id = detail::as_id(detail::require(o, "id", p), p + ".id");
    g.bus = detail::as_id(detail::require(o, "bus", p), p + ".bus");
    g.p_max_mw = detail::as_number(detail::require(o, "p_max_mw", p), p + ".p_max_mw");
    g.ict_controlled =
        detail::as_bool(detail::require(o, "ict_controlled", p), p + ".ict_controlled");
    grid.generators.push_back(std::move(g));
  }

  const auto diags = validate(grid);
  if (!diags.empty()) {
    // Report the first reference problem if any, otherwise the first problem.
    auto it = std::find_if(diags.begin(), diags.end(), [](const Diagnostic& d) {
      return d.kind == Diagnostic::Kind::reference;
    });
    const Diagnostic& d = it != diags.end() ? *it : diags.front();
    std::string msg = "grid '" + grid.name + "': " + to_string(d);
    if (diags.size() > 1) msg += " (+" + std::to_string(diags.size() - 1) + " more)";
    throw InputError(d.kind == Diagnostic::Kind::reference ? InputError::Kind::reference
                                                           : InputError::Kind::domain,
                     msg);
  }
  return grid;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError(InputError::Kind::syntax, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GridCase load_grid(const std::filesystem::path& path) {
  return parse_grid(read_text_file(path));
}

std::string serialize_grid(const GridCase& grid) {
  json doc = json::object();
  doc["name"] = grid.name;
  doc["configuration_label"] = grid.configuration_label;
  doc["reference_bus"] = grid.reference_bus;
  doc["buses"] = json::array();
  for (const auto& b : grid.buses)
    doc["buses"].push_back({{"id", b.id}, {"demand_mw", b.demand_mw}});
  doc["branches"] = json::array();
  for (const auto& br : grid.branches) {
    doc["branches"].push_back({{"id", br.id},
                               {"from", br.from_bus},
                               {"to", br.to_bus},
                               {"susceptance", br.susceptance},
                               {"flow_limit_mw", br.flow_limit_mw},
                               {"attackable", br.attackable},
                               {"in_service", br.in_service}});
  }
  doc["generators"] = json::array();
  for (const auto& g : grid.generators) {
    doc["generators"].push_back({{"id", g.id},
                                 {"bus", g.bus},
                                 {"p_max_mw", g.p_max_mw},
                                 {"ict_controlled", g.ict_controlled}});
  }
  return doc.dump(2) + "\n";
}

ConfigurationOverride parse_override(std::string_view text) {
  const json doc = detail::parse_json(text, "configuration");
  if (!doc.is_object()) detail::field_error("configuration", "expected a JSON object");

  ConfigurationOverride ov;
  ov.label = detail::as_string(detail::require(doc, "label", "configuration"), "configuration.label");

  auto read_map = [&doc](const char* key, auto& target, auto convert) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    const std::string path = std::string("configuration.") + key;
    if (!it->is_object()) detail::field_error(path, "expected an object");
    for (const auto& [id, value] : it->items()) target[id] = convert(value, path + "." + id);
  };
  read_map("load_scale", ov.load_scale, detail::as_number);
  read_map("generation_scale", ov.generation_scale, detail::as_number);
  read_map("switch_states", ov.switch_states, detail::as_bool);
  return ov;
}

ConfigurationOverride load_override(const std::filesystem::path& path) {
  return parse_override(read_text_file(path));
}

std::string serialize_override(const ConfigurationOverride& ov) {
  json doc = json::object();
  doc["label"] = ov.label;
  doc["load_scale"] = ov.load_scale;
  doc["generation_scale"] = ov.generation_scale;
  doc["switch_states"] = ov.switch_states;
  return doc.dump(2) + "\n";
}

GridCase apply_configuration(const GridCase& grid, const ConfigurationOverride& ov) {
  GridCase out = grid;
  out.configuration_label = ov.label;

  for (const auto& [id, factor] : ov.load_scale) {
    auto idx = grid.find_bus(id);
    if (!idx) throw InputError(InputError::Kind::reference, "load_scale: unknown bus '" + id + "'");
    if (!finite_nonneg(factor))
      throw InputError(InputError::Kind::domain, "load_scale: bus '" + id + "' factor must be >= 0");
    out.buses[*idx].demand_mw *= factor;
  }
  for (const auto& [id, factor] : ov.generation_scale) {
    auto idx = grid.find_generator(id);
    if (!idx)
      throw InputError(InputError::Kind::reference,
                       "generation_scale: unknown generator '" + id + "'");
    if (!finite_nonneg(factor))
      throw InputError(InputError::Kind::domain,
                       "generation_scale: generator '" + id + "' factor must be >= 0");
    out.generators[*idx].p_max_mw *= factor;
  }
  for (const auto& [id, closed] : ov.switch_states) {
    auto idx = grid.find_branch(id);
    if (!idx)
      throw InputError(InputError::Kind::reference, "switch_states: unknown branch '" + id + "'");
    out.branches[*idx].in_service = closed;
  }
  return out;
}

}  // namespace gridshield
