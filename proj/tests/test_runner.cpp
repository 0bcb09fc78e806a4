#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "schwadapt/runner.hpp"

namespace fs = std::filesystem;
using namespace schwadapt;

namespace {

ExperimentSpec small_spec(const std::string& dir) {
  ExperimentSpec spec;
  spec.pools = {PoolId::xQZ};
  spec.presets = {Preset::A};
  spec.volumes = {2};
  spec.output_dir = dir;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("experiment spec JSON round trip") {
  ExperimentSpec spec;
  spec.pools = {PoolId::xQZ, PoolId::tile_Q};
  spec.presets = {Preset::A, Preset::C};
  spec.volumes = {2, 3, 4};
  spec.epsilon = 5e-4;
  spec.tetris = false;
  spec.cnot_depth_budget = 1500;
  spec.seed = 11;
  ExperimentSpec back = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(back).dump() == spec_to_json(spec).dump());
  CHECK(back.pools.size() == 2);
  CHECK(back.cnot_depth_budget.has_value());
}

TEST_CASE("batch runs write trajectories and reuse the E0 cache") {
  const std::string dir = "/tmp/schwadapt_test_runs";
  fs::remove_all(dir);
  ExperimentSpec spec = small_spec(dir);
  spec.pools = {PoolId::xQZ, PoolId::xxZ};

  auto outcomes = run_experiments(spec);
  REQUIRE(outcomes.size() == 2);
  for (const auto& out : outcomes) {
    CHECK(out.ok);
    CHECK(fs::exists(out.file));
  }
  CHECK(fs::exists(dir + "/e0_cache.json"));
  nlohmann::json cache;
  std::ifstream(dir + "/e0_cache.json") >> cache;
  CHECK(cache.size() == 1);  // one (preset, L) pair shared by both pools

  // reruns are byte-identical
  std::string before = slurp(outcomes[0].file);
  auto again = run_experiments(spec);
  CHECK(slurp(again[0].file) == before);

  // trajectories load back and replay
  Trajectory t = load_trajectory(outcomes[0].file);
  CHECK(t.config.pool == PoolId::xQZ);
  CHECK(t.e0_method == "dense");
  fs::remove_all(dir);
}

TEST_CASE("large volumes need the opt-in flag") {
  const std::string dir = "/tmp/schwadapt_test_runs_large";
  fs::remove_all(dir);
  ExperimentSpec spec = small_spec(dir);
  spec.volumes = {8};
  auto outcomes = run_experiments(spec);
  REQUIRE(outcomes.size() == 1);
  CHECK_FALSE(outcomes[0].ok);
  CHECK(outcomes[0].error.find("allow_large") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("per-run failures are isolated") {
  const std::string dir = "/tmp/schwadapt_test_runs_iso";
  fs::remove_all(dir);
  ExperimentSpec spec = small_spec(dir);
  spec.pools = {PoolId::xQZ};
  spec.volumes = {8, 2};  // first fails (allow_large), second succeeds
  auto outcomes = run_experiments(spec);
  REQUIRE(outcomes.size() == 2);
  CHECK_FALSE(outcomes[0].ok);
  CHECK(outcomes[1].ok);
  fs::remove_all(dir);
}

TEST_CASE("figure tables") {
  const std::string dir = "/tmp/schwadapt_test_runs_tables";
  fs::remove_all(dir);
  ExperimentSpec spec = small_spec(dir);
  spec.volumes = {2, 3};
  auto outcomes = run_experiments(spec);
  std::vector<Trajectory> trajectories;
  for (const auto& out : outcomes) trajectories.push_back(load_trajectory(out.file));

  std::string fig3 = emit_table(trajectories, FigureClass::fig3);
  CHECK(fig3.rfind("pool_id,preset,L,iteration,energy_density_error,"
                   "surface_selected\n", 0) == 0);
  // the error column of each run never increases
  {
    std::istringstream is(fig3);
    std::string line;
    std::getline(is, line);
    double prev = 1e300;
    std::string prev_run;
    while (std::getline(is, line)) {
      auto c1 = line.find(',');
      auto run_id = line.substr(0, line.find(',', line.find(',', c1 + 1) + 1));
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      double err = std::stod(cells[4]);
      if (run_id == prev_run) CHECK(err <= prev + 1e-10);
      prev = err;
      prev_run = run_id;
    }
  }
  CHECK(emit_table(trajectories, FigureClass::fig4)
            .find("charge_mean") != std::string::npos);
  CHECK(emit_table(trajectories, FigureClass::fig5)
            .find("cnot_depth") != std::string::npos);
  CHECK(emit_table(trajectories, FigureClass::fig9)
            .find("delta_t") != std::string::npos);
  std::string fig7a = emit_table(trajectories, FigureClass::fig7a);
  CHECK(fig7a.find("cnot_depth_budget") != std::string::npos);
  std::string fig7b = emit_table(trajectories, FigureClass::fig7b, 40);
  CHECK(fig7b.find(",40,") != std::string::npos);
  CHECK(emit_table(trajectories, FigureClass::fig11)
            .find("infidelity") != std::string::npos);

  // the infidelity classes fail loudly when the metric was not tracked
  Trajectory untracked = trajectories[0];
  for (auto& r : untracked.iterations) r.infidelity = -1.0;
  CHECK_THROWS(emit_table({untracked}, FigureClass::fig12));
  fs::remove_all(dir);
}

TEST_CASE("budget cuts pick the last compliant iteration") {
  Trajectory t;
  for (int k = 0; k <= 4; ++k) {
    IterationRecord r;
    r.iteration = k;
    r.cnot_depth = 10 * k;
    r.fevals = 7 * k;
    t.iterations.push_back(r);
  }
  auto depth = [](const IterationRecord& r) { return static_cast<long>(r.cnot_depth); };
  CHECK(budget_cut_iteration(t, depth, 25) == 2);
  CHECK(budget_cut_iteration(t, depth, 40) == 4);
  CHECK(budget_cut_iteration(t, depth, -5) == -1);
}

TEST_CASE("trajectory filenames encode the configuration") {
  AdaptConfig cfg;
  cfg.pool = PoolId::tile_L;
  cfg.preset = Preset::B;
  cfg.sites = 4;
  CHECK(trajectory_filename(cfg) == "tile_L_B_L4.json");
  cfg.pool_options.t_relax = true;
  cfg.reference = ReferenceKind::trs_breaking_psi1;
  CHECK(trajectory_filename(cfg) ==
        "tile_L_B_L4_trs_breaking_psi1_trelax.json");
}

TEST_CASE("figure class labels round trip") {
  for (const char* label : {"fig3", "fig4", "fig5", "fig7a", "fig7b", "fig9",
                            "fig10", "fig11", "fig12"})
    CHECK(figure_class_label(figure_class_from_label(label)) == label);
  CHECK_THROWS(figure_class_from_label("fig6"));
}
