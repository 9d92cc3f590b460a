#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridshield/component.hpp"

namespace gridshield {

struct Bus {
  std::string id;
  double demand_mw = 0.0;

  bool operator==(const Bus&) const = default;
};

/// A line or transformer. Susceptance is pre-folded so that
/// susceptance * (theta_from - theta_to) is a flow in MW.
struct Branch {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double susceptance = 0.0;
  double flow_limit_mw = 0.0;
  bool attackable = true;
  bool in_service = true;

  bool operator==(const Branch&) const = default;
};

/// Minimum output is always zero.
struct Generator {
  std::string id;
  std::string bus;
  double p_max_mw = 0.0;
  bool ict_controlled = false;

  bool operator==(const Generator&) const = default;
};

struct GridCase {
  std::string name;
  std::string configuration_label = "standard";
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  std::string reference_bus;

  bool operator==(const GridCase&) const = default;

  std::optional<std::size_t> find_bus(std::string_view id) const;
  std::optional<std::size_t> find_branch(std::string_view id) const;
  std::optional<std::size_t> find_generator(std::string_view id) const;

  double total_demand_mw() const;

  /// In-service attackable branches followed by ICT generators, in
  /// canonical component order. Open branches are excluded.
  std::vector<ComponentRef> attackable_components() const;
};

struct Diagnostic {
  enum class Kind { duplicate, reference, domain };

  Kind kind;
  std::string component;  // e.g. "branch L4_5"
  std::string message;
};

std::string to_string(const Diagnostic& d);

/// Checks every GridCase invariant; one entry per violation.
std::vector<Diagnostic> validate(const GridCase& grid);

/// Parses the JSON grid schema. Throws InputError (syntax with line/column
/// or field path, reference for unknown ids, domain for bad values).
GridCase parse_grid(std::string_view text);
GridCase load_grid(const std::filesystem::path& path);
std::string serialize_grid(const GridCase& grid);

struct ConfigurationOverride {
  std::string label;
  std::map<std::string, double> load_scale;        // bus id -> factor
  std::map<std::string, double> generation_scale;  // generator id -> factor
  std::map<std::string, bool> switch_states;       // branch id -> in service

  bool operator==(const ConfigurationOverride&) const = default;
};

ConfigurationOverride parse_override(std::string_view text);
ConfigurationOverride load_override(const std::filesystem::path& path);
std::string serialize_override(const ConfigurationOverride& override_);

/// Returns a scaled/switched copy labelled with override_.label. Throws
/// InputError::reference for ids missing from the grid and
/// InputError::domain for negative factors.
GridCase apply_configuration(const GridCase& grid, const ConfigurationOverride& override_);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gridshield
