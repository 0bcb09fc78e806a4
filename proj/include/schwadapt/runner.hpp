#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schwadapt/adapt.hpp"
#include "schwadapt/tiling.hpp"

namespace schwadapt {

/// Batch description: the run set is the Cartesian product of pools,
/// presets and volumes under shared options and seeds.
struct ExperimentSpec {
  std::vector<PoolId> pools{PoolId::xQZ};
  std::vector<Preset> presets{Preset::C};
  std::vector<int> volumes{2, 3};
  ReferenceKind reference = ReferenceKind::staggered_vacuum;
  bool mean_field_reference = false;
  PoolOptions pool_options;
  double epsilon = 1e-3;
  bool tetris = true;
  int max_iterations = 200;
  std::optional<int> cnot_depth_budget;
  std::optional<long> feval_budget;
  uint64_t seed = 0;
  uint64_t lanczos_seed = 20240811;
  int tile_seed_runs = 4;
  std::string output_dir = "runs";
  bool allow_large = false;  ///< opt-in for L >= 8 volumes
  int jobs = 1;
};

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

/// Exact ground-state results keyed by (preset, a, L, method); states are
/// memoized in-process, energies and residuals persisted to a JSON file
/// with write-once creation serialized behind a mutex.
class ExactCache {
 public:
  explicit ExactCache(std::string file_path);

  /// Full result including the state (computes and memoizes on miss).
  const GroundStateResult& get(Preset preset, double spacing, int sites,
                               uint64_t lanczos_seed);

  static std::string method_for(int sites) {
    return 2 * sites <= 10 ? "dense" : "lanczos";
  }

 private:
  void persist();

  std::string path_;
  std::mutex mutex_;
  std::map<std::string, GroundStateResult> memo_;
  nlohmann::json file_;
};

struct RunOutcome {
  AdaptConfig config;
  std::string file;  ///< trajectory path; empty when failed or skipped
  bool ok = false;
  std::string error;
};

std::string trajectory_filename(const AdaptConfig& config);

/// Executes the expanded run set; per-run failures are isolated and the
/// batch continues. Returns one outcome per expanded config.
std::vector<RunOutcome> run_experiments(const ExperimentSpec& spec);

enum class FigureClass { fig3, fig4, fig5, fig7a, fig7b, fig9, fig10, fig11, fig12 };
FigureClass figure_class_from_label(const std::string& label);
std::string figure_class_label(FigureClass f);

/// Index of the last iteration whose metric stays within the budget, or -1.
int budget_cut_iteration(const Trajectory& t,
                         const std::function<long(const IterationRecord&)>& metric,
                         long budget);

/// One CSV (with a header row) per figure class. The budget classes default
/// to the 1000-CNOT-depth and 100-evaluation cuts.
std::string emit_table(const std::vector<Trajectory>& trajectories,
                       FigureClass figure_class,
                       std::optional<long> budget = std::nullopt);

Trajectory load_trajectory(const std::string& path);
void save_trajectory(const Trajectory& t, const std::string& path);

}  // namespace schwadapt
