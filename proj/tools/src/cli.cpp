#include "gridshield/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridshield/cas.hpp"
#include "gridshield/cli/report.hpp"
#include "gridshield/dcopf.hpp"
#include "gridshield/errors.hpp"
#include "gridshield/grid_model.hpp"
#include "gridshield/oracle.hpp"
#include "gridshield/parallel.hpp"
#include "gridshield/protect.hpp"

namespace gridshield::cli {
namespace {

namespace fs = std::filesystem;

struct EnumerateArgs {
  std::string grid;
  std::vector<std::string> configs;
  int zmax = 0;
  std::string max_scenarios = "500";
  double min_lost_load = 0.0;
  std::string dump_dispatch;
};

struct ProtectArgs {
  std::string budgets;
  std::string format = "json";
  int alternatives = 0;
  std::string tie_break = "extended";
  std::string plan_dir;
  bool no_timings = false;
};

struct Common {
  std::string out;
  unsigned jobs = 0;
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream file(p, std::ios::binary);
  if (!file) throw InputError(InputError::Kind::reference, "cannot write " + path);
  file << text;
  if (!file) throw InputError(InputError::Kind::reference, "failed writing " + path);
}

StopRule parse_stop(const EnumerateArgs& a) {
  StopRule stop;
  if (a.max_scenarios == "unbounded") {
    stop.max_scenarios.reset();
  } else {
    std::size_t pos = 0;
    long long n = -1;
    try {
      n = std::stoll(a.max_scenarios, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != a.max_scenarios.size() || n < 0)
      throw InputError(InputError::Kind::domain,
                       "--max-scenarios must be a non-negative integer or 'unbounded'");
    stop.max_scenarios = static_cast<std::size_t>(n);
  }
  if (!(a.min_lost_load >= 0.0))
    throw InputError(InputError::Kind::domain, "--min-lost-load must be non-negative");
  stop.min_lost_load_mw = a.min_lost_load;
  return stop;
}

std::vector<GridCase> load_cases(const std::string& grid_path,
                                 const std::vector<std::string>& configs) {
  const GridCase base = load_grid(grid_path);
  if (configs.empty()) return {base};
  std::vector<GridCase> cases;
  for (const auto& c : configs) cases.push_back(apply_configuration(base, load_override(c)));
  return cases;
}

std::string dispatch_dump(const std::vector<GridCase>& cases,
                          const std::vector<CasList>& lists) {
  using nlohmann::json;
  json doc = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    json entry = {{"configuration", cases[i].configuration_label}, {"scenarios", json::array()}};
    for (const auto& rec : lists[i].records) {
      json scen = json::parse(dispatch_to_json(solve_dcopf(cases[i], rec.components)));
      scen["rank"] = rec.rank;
      scen["components"] = to_string(rec.components);
      entry["scenarios"].push_back(std::move(scen));
    }
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

CasList run_enumerate(const EnumerateArgs& a, unsigned jobs) {
  const StopRule stop = parse_stop(a);
  const auto cases = load_cases(a.grid, a.configs);
  std::vector<CasList> lists;
  for (const auto& g : cases) lists.push_back(enumerate_cas(g, a.zmax, stop, jobs));
  if (!a.dump_dispatch.empty()) write_output(a.dump_dispatch, dispatch_dump(cases, lists), std::cout);
  if (lists.size() == 1) return lists.front();
  return merge_cas_lists(lists);
}

TieBreak parse_tie_break(const std::string& s) {
  return s == "paper" ? TieBreak::paper : TieBreak::extended;
}

void run_protect(const CasList& cas, const ProtectArgs& a, const Common& c, std::ostream& out) {
  const std::vector<int> budgets = parse_budgets(a.budgets);
  if (a.alternatives < 0)
    throw InputError(InputError::Kind::domain, "--alternatives must be non-negative");
  if (cas.records.empty())
    throw InputError(InputError::Kind::domain, "CAS list is empty; nothing to protect against");
  const TieBreak tb = parse_tie_break(a.tie_break);

  std::vector<ProtectionPlan> plans(budgets.size());
  std::vector<std::vector<ProtectionPlan>> alts(budgets.size());
  std::vector<double> runtimes(budgets.size(), 0.0);
  parallel_for(budgets.size(), c.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.alternatives > 0) {
      alts[i] = enumerate_optimal_protections(cas, budgets[i],
                                              static_cast<std::size_t>(a.alternatives) + 1, tb);
      plans[i] = alts[i].front();
      alts[i].erase(alts[i].begin());
    } else {
      plans[i] = optimal_protection(cas, budgets[i], tb);
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (!a.no_timings) runtimes[i] = dt.count();
  });

  if (!a.plan_dir.empty()) {
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      const fs::path p = fs::path(a.plan_dir) / ("plan_x" + std::to_string(budgets[i]) + ".json");
      write_output(p.string(), plan_to_json(plans[i], alts[i]), out);
    }
  }

  const SweepReport report = compute_metrics(cas, plans, runtimes);
  write_output(c.out, a.format == "csv" ? report_to_csv(report) : report_to_json(report), out);
}

void add_enumerate_options(CLI::App* sub, EnumerateArgs& e) {
  sub->add_option("--grid", e.grid, "Grid case JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("--config", e.configs, "Configuration override file (repeatable)")
      ->check(CLI::ExistingFile);
  sub->add_option("--zmax", e.zmax, "Attack budget")->required();
  sub->add_option("--max-scenarios", e.max_scenarios,
                  "Scenario cap, or 'unbounded'")->capture_default_str();
  sub->add_option("--min-lost-load", e.min_lost_load, "Stop below this lost load (MW)")
      ->capture_default_str();
  sub->add_option("--dump-dispatch", e.dump_dispatch,
                  "Write the dispatch of every listed scenario to this file");
}

void add_protect_options(CLI::App* sub, ProtectArgs& p) {
  sub->add_option("--budgets", p.budgets, "Protection budgets, e.g. 1..5 or 0,2,4")->required();
  sub->add_option("--format", p.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--alternatives", p.alternatives,
                  "Also list up to N equally good plans per budget");
  sub->add_option("--tie-break", p.tie_break, "Tie-break order among optimal plans")
      ->check(CLI::IsMember({"paper", "extended"}))->capture_default_str();
  sub->add_option("--plan-dir", p.plan_dir, "Write one plan JSON per budget here");
  sub->add_flag("--no-timings", p.no_timings, "Report runtime_s as 0 for reproducible output");
}

void add_common_options(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--jobs", c.jobs, "Worker threads (0: all cores)")->capture_default_str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical attack scenario enumeration and protection planning for power grids",
               "gridshield"};
  app.require_subcommand(1);

  Common common;
  EnumerateArgs en;
  ProtectArgs pr;

  auto* enumerate = app.add_subcommand("enumerate", "Rank critical attack scenarios");
  add_enumerate_options(enumerate, en);
  add_common_options(enumerate, common);

  std::vector<std::string> cas_files;
  auto* protect = app.add_subcommand("protect", "Optimal protection plans for a budget sweep");
  protect->add_option("--cas", cas_files, "CAS list file (repeatable; merged)")
      ->required()->check(CLI::ExistingFile);
  add_protect_options(protect, pr);
  add_common_options(protect, common);

  std::string cas_out;
  auto* sweep = app.add_subcommand("sweep", "Enumerate and protect in one pass");
  add_enumerate_options(sweep, en);
  add_protect_options(sweep, pr);
  add_common_options(sweep, common);
  sweep->add_option("--cas-out", cas_out, "Also write the CAS list here");

  std::string oracle_grid, oracle_config;
  int xmax = 0, oracle_zmax = 0;
  auto* oracle = app.add_subcommand("oracle", "Brute-force trilevel reference solution");
  oracle->add_option("--grid", oracle_grid, "Grid case JSON file")
      ->required()->check(CLI::ExistingFile);
  oracle->add_option("--config", oracle_config, "Configuration override file")
      ->check(CLI::ExistingFile);
  oracle->add_option("--xmax", xmax, "Protection budget")->required();
  oracle->add_option("--zmax", oracle_zmax, "Attack budget")->required();
  add_common_options(oracle, common);

  std::string v_grid;
  std::vector<std::string> v_configs, v_cas;
  auto* validate_cmd = app.add_subcommand("validate", "Check input files");
  validate_cmd->add_option("--grid", v_grid, "Grid case JSON file")->check(CLI::ExistingFile);
  validate_cmd->add_option("--config", v_configs, "Configuration override file (repeatable)")
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--cas", v_cas, "CAS list file (repeatable)")
      ->check(CLI::ExistingFile);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(std::move(rest));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kInputError;
  }

  if (enumerate->parsed()) {
    write_output(common.out, cas_list_to_json(run_enumerate(en, common.jobs)), out);
  } else if (protect->parsed()) {
    std::vector<CasList> lists;
    for (const auto& f : cas_files) lists.push_back(load_cas_list(f));
    const CasList cas = lists.size() == 1 ? lists.front() : merge_cas_lists(lists);
    run_protect(cas, pr, common, out);
  } else if (sweep->parsed()) {
    const CasList cas = run_enumerate(en, common.jobs);
    if (!cas_out.empty()) write_output(cas_out, cas_list_to_json(cas), out);
    run_protect(cas, pr, common, out);
  } else if (oracle->parsed()) {
    GridCase grid = load_grid(oracle_grid);
    if (!oracle_config.empty()) grid = apply_configuration(grid, load_override(oracle_config));
    const auto result = brute_force_trilevel(grid, xmax, oracle_zmax, common.jobs);
    write_output(common.out, trilevel_to_json(result, xmax, oracle_zmax), out);
  } else if (validate_cmd->parsed()) {
    if (v_grid.empty() && v_cas.empty())
      throw InputError(InputError::Kind::domain, "validate needs --grid or --cas");
    if (!v_configs.empty() && v_grid.empty())
      throw InputError(InputError::Kind::domain, "--config needs --grid");
    if (!v_grid.empty()) {
      for (const auto& g : load_cases(v_grid, v_configs)) {
        out << "grid " << g.name << " [" << g.configuration_label << "]: ok, " << g.buses.size()
            << " buses, " << g.branches.size() << " branches, " << g.generators.size()
            << " generators, " << g.attackable_components().size() << " attackable\n";
      }
    }
    for (const auto& f : v_cas) {
      const CasList cas = load_cas_list(f);
      out << "cas " << f << ": ok, " << cas.records.size() << " records, z_max " << cas.z_max
          << (cas.complete ? ", complete\n" : ", truncated\n");
    }
  }
  return kSuccess;
}

}  // namespace

std::vector<int> parse_budgets(const std::string& text) {
  std::vector<int> budgets;
  const auto bad = [&] {
    return InputError(InputError::Kind::domain, "invalid budget list '" + text + "'");
  };
  const auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = -1;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos != s.size() || v < 0) throw bad();
    return v;
  };
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      budgets.push_back(to_int(item));
      continue;
    }
    const int lo = to_int(item.substr(0, dots));
    const int hi = to_int(item.substr(dots + 2));
    if (hi < lo) throw bad();
    for (int b = lo; b <= hi; ++b) budgets.push_back(b);
  }
  if (budgets.empty()) throw bad();
  return budgets;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const GuardError& e) {
    err << "refused: " << e.what() << '\n';
    return kGuardRefusal;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverError;
  } catch (const ExhaustedError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kSolverError;
  }
}

}  // namespace gridshield::cli
