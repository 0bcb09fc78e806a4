#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "schwadapt/acceptance.hpp"
#include "schwadapt/runner.hpp"

namespace fs = std::filesystem;
using namespace schwadapt;

namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_volumes(const std::string& text) {
  std::vector<int> out;
  for (const auto& field : split_csv(text)) {
    auto dots = field.find("..");
    if (dots != std::string::npos) {
      int lo = std::stoi(field.substr(0, dots));
      int hi = std::stoi(field.substr(dots + 2));
      for (int l = lo; l <= hi; ++l) out.push_back(l);
    } else {
      out.push_back(std::stoi(field));
    }
  }
  return out;
}

int cmd_run(const std::string& config_path, const nlohmann::json& overrides) {
  ExperimentSpec spec;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << '\n';
      return 2;
    }
    nlohmann::json j;
    in >> j;
    spec = spec_from_json(j);
  }
  nlohmann::json merged = spec_to_json(spec);
  merged.update(overrides);
  spec = spec_from_json(merged);

  auto outcomes = run_experiments(spec);
  int failures = 0;
  for (const auto& out : outcomes) {
    if (out.ok) {
      std::cout << "ok   " << out.file << '\n';
    } else {
      ++failures;
      std::cout << "FAIL " << pool_label(out.config.pool) << '/'
                << preset_label(out.config.preset) << "/L" << out.config.sites
                << ": " << out.error << '\n';
    }
  }
  std::cout << outcomes.size() - failures << '/' << outcomes.size()
            << " runs completed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive variational ground-state preparation for the lattice "
               "Schwinger model"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a batch of ADAPT runs");
  std::string config_path, pools_arg, presets_arg, volumes_arg, reference_arg,
      out_dir;
  double epsilon = -1.0;
  int max_iterations = -1, budget_cnot = -1, jobs = -1;
  long budget_fevals = -1;
  uint64_t seed = 0;
  bool no_tetris = false, t_relax = false, z_swap = false, all_d = false,
       split_surf = false, mean_field_ref = false, allow_large = false;
  run->add_option("--config", config_path, "JSON experiment spec");
  run->add_option("--pools", pools_arg, "comma list, e.g. xQZ,xxZ,tile_Q");
  run->add_option("--presets", presets_arg, "comma list from {A,B,C}");
  run->add_option("--L", volumes_arg, "volumes, e.g. 2..5 or 3,5");
  run->add_option("--reference", reference_arg,
                  "staggered_vacuum | trs_breaking_psi1 | trs_preserving_psi2");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--epsilon", epsilon, "gradient convergence threshold");
  run->add_option("--max-iterations", max_iterations, "outer iteration cap");
  run->add_option("--budget-cnot", budget_cnot, "CNOT-depth budget");
  run->add_option("--budget-fevals", budget_fevals, "function-evaluation budget");
  run->add_option("--jobs", jobs, "parallel runs");
  run->add_option("--seed", seed, "tie-break seed");
  run->add_flag("--no-tetris", no_tetris, "disable disjoint batching");
  run->add_flag("--t-relax", t_relax, "add T-even partners to the pool");
  run->add_flag("--z-surface-swap", z_swap, "Z-retaining surfaces in LQx/Lxx");
  run->add_flag("--all-distances", all_d, "admit even endpoint separations");
  run->add_flag("--split-surfaces", split_surf, "separate left/right surfaces");
  run->add_flag("--mean-field-reference", mean_field_ref,
                "start from the mean-field state");
  run->add_flag("--allow-large", allow_large, "enable L >= 8 volumes");

  // tables
  auto* tables = app.add_subcommand("tables", "emit plot-ready CSV tables");
  std::string runs_dir, figure_arg, tables_out;
  long budget_override = -1;
  tables->add_option("--runs", runs_dir, "directory of trajectory JSON files")
      ->required();
  tables->add_option("--figure", figure_arg,
                     "fig3|fig4|fig5|fig7a|fig7b|fig9|fig10|fig11|fig12")
      ->required();
  tables->add_option("--out", tables_out, "output directory (default: runs dir)");
  tables->add_option("--budget", budget_override, "override the budget cut");

  // verify
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  std::string only_arg;
  verify->add_option("--only", only_arg, "comma list of criterion ids");

  // pool
  auto* pool_cmd = app.add_subcommand("pool", "operator pool utilities");
  auto* pool_dump = pool_cmd->add_subcommand("dump", "write a pool file");
  std::string pool_id_arg = "xQZ", pool_out, pool_preset = "C";
  int pool_sites = 3;
  bool pd_t_relax = false, pd_z_swap = false, pd_all_d = false,
       pd_split_surf = false;
  pool_dump->add_option("--id", pool_id_arg, "pool id")->required();
  pool_dump->add_option("--L", pool_sites, "volume")->required();
  pool_dump->add_option("--preset", pool_preset, "seed preset for tiled pools");
  pool_dump->add_option("--out", pool_out, "output file (default: stdout)");
  pool_dump->add_flag("--t-relax", pd_t_relax);
  pool_dump->add_flag("--z-surface-swap", pd_z_swap);
  pool_dump->add_flag("--all-distances", pd_all_d);
  pool_dump->add_flag("--split-surfaces", pd_split_surf);

  // exactdiag
  auto* exact = app.add_subcommand("exactdiag", "exact ground-state energy");
  std::string ed_preset = "A", ed_method = "auto", ed_dump_h;
  int ed_sites = 2;
  exact->add_option("--preset", ed_preset, "A|B|C")->required();
  exact->add_option("--L", ed_sites, "volume")->required();
  exact->add_option("--method", ed_method, "auto|dense|lanczos");
  exact->add_option("--dump-h", ed_dump_h, "write the Hamiltonian term file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      nlohmann::json overrides;
      if (!pools_arg.empty()) {
        overrides["pools"] = split_csv(pools_arg);
      }
      if (!presets_arg.empty()) overrides["presets"] = split_csv(presets_arg);
      if (!volumes_arg.empty()) overrides["L"] = parse_volumes(volumes_arg);
      if (!reference_arg.empty()) overrides["reference"] = reference_arg;
      if (!out_dir.empty()) overrides["output_dir"] = out_dir;
      if (epsilon > 0) overrides["epsilon"] = epsilon;
      if (max_iterations > 0) overrides["max_iterations"] = max_iterations;
      if (budget_cnot >= 0) overrides["cnot_depth_budget"] = budget_cnot;
      if (budget_fevals >= 0) overrides["feval_budget"] = budget_fevals;
      if (jobs > 0) overrides["jobs"] = jobs;
      if (run->count("--seed")) overrides["seed"] = seed;
      if (no_tetris) overrides["tetris"] = false;
      if (mean_field_ref) overrides["mean_field_reference"] = true;
      if (allow_large) overrides["allow_large"] = true;
      PoolOptions opts;
      opts.t_relax = t_relax;
      opts.z_surface_swap = z_swap;
      opts.all_distances = all_d;
      opts.split_surfaces = split_surf;
      if (t_relax || z_swap || all_d || split_surf)
        overrides["pool_options"] = opts.summary();
      return cmd_run(config_path, overrides);
    }
    if (tables->parsed()) {
      std::vector<Trajectory> trajectories;
      for (const auto& entry : fs::directory_iterator(runs_dir)) {
        if (entry.path().extension() != ".json") continue;
        if (entry.path().filename() == "e0_cache.json") continue;
        trajectories.push_back(load_trajectory(entry.path().string()));
      }
      if (trajectories.empty()) {
        std::cerr << "no trajectories in " << runs_dir << '\n';
        return 2;
      }
      std::sort(trajectories.begin(), trajectories.end(),
                [](const Trajectory& a, const Trajectory& b) {
                  return trajectory_filename(a.config) <
                         trajectory_filename(b.config);
                });
      FigureClass fc = figure_class_from_label(figure_arg);
      std::optional<long> budget;
      if (budget_override >= 0) budget = budget_override;
      std::string csv = emit_table(trajectories, fc, budget);
      fs::path dir = tables_out.empty() ? fs::path(runs_dir) : fs::path(tables_out);
      fs::create_directories(dir);
      fs::path file = dir / (figure_arg + ".csv");
      std::ofstream out(file);
      out << csv;
      std::cout << "wrote " << file.string() << '\n';
      return 0;
    }
    if (verify->parsed()) {
      std::vector<int> only;
      for (const auto& s : split_csv(only_arg)) only.push_back(std::stoi(s));
      return print_acceptance(only, std::cout);
    }
    if (pool_cmd->parsed() && pool_dump->parsed()) {
      PoolOptions opts;
      opts.t_relax = pd_t_relax;
      opts.z_surface_swap = pd_z_swap;
      opts.all_distances = pd_all_d;
      opts.split_surfaces = pd_split_surf;
      TileSeedConfig seed_cfg;
      seed_cfg.preset = preset_from_label(pool_preset);
      OperatorPool pool =
          build_pool(pool_id_from_label(pool_id_arg), pool_sites, opts, seed_cfg);
      std::string text = pool_to_text(pool);
      if (pool_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(pool_out);
        out << text;
        std::cout << "wrote " << pool_out << " (" << pool.size()
                  << " operators)\n";
      }
      return 0;
    }
    if (exact->parsed()) {
      ModelParams params = preset_params(preset_from_label(ed_preset), ed_sites);
      if (!ed_dump_h.empty()) {
        std::ofstream out(ed_dump_h);
        out << to_text(build_hamiltonian(params));
        std::cout << "wrote " << ed_dump_h << '\n';
      }
      GroundStateMethod method;
      if (ed_method == "dense") method = GroundStateMethod::dense;
      else if (ed_method == "lanczos") method = GroundStateMethod::lanczos;
      else method = 2 * ed_sites <= 12 ? GroundStateMethod::dense
                                       : GroundStateMethod::lanczos;
      GroundStateResult gs = ground_state(build_hamiltonian(params), method);
      const PauliSum q = charge_operator(ed_sites);
      std::cout << "preset " << ed_preset << " L=" << ed_sites
                << " method=" << (method == GroundStateMethod::dense ? "dense" : "lanczos")
                << "\nE0 = " << std::setprecision(15) << gs.energy
                << "\nresidual = " << gs.residual
                << "\n<Q> = " << expectation(gs.state, q) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
