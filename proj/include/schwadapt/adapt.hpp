#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "schwadapt/model.hpp"
#include "schwadapt/pools.hpp"
#include "schwadapt/state.hpp"

namespace schwadapt {

inline constexpr const char* kVersion = "0.1.0";

struct AdaptConfig {
  PoolId pool = PoolId::xQZ;
  PoolOptions pool_options;
  Preset preset = Preset::A;
  int sites = 2;
  double spacing = 1.0;
  ReferenceKind reference = ReferenceKind::staggered_vacuum;
  bool mean_field_reference = false;  ///< start from the mean-field state
  double epsilon = 1e-3;              ///< gradient convergence threshold
  bool tetris = true;
  int max_iterations = 200;
  std::optional<int> cnot_depth_budget;
  std::optional<long> feval_budget;
  uint64_t tie_break_seed = 0;  ///< 0: serialization order only, no shuffling
  uint64_t lanczos_seed = 20240811;
  double bfgs_grad_tol = 1e-6;
  bool track_infidelity = true;
};

struct SelectedOp {
  int op_index = -1;
  double gradient = 0.0;
};

struct IterationRecord {
  int iteration = 0;  ///< 0 is the reference-state row
  double energy = 0.0;
  double energy_density_error = 0.0;
  double max_pool_gradient = 0.0;  ///< largest |G| at this iteration's screen
  std::vector<SelectedOp> selected;
  double charge_mean = 0.0;
  double charge_variance = 0.0;
  double delta_t_value = 0.0;
  long cnot_count = 0;
  int cnot_depth = 0;
  long rz_count = 0;
  long fevals = 0;
  long gevals = 0;
  bool surface_selected = false;
  bool t_even_selected = false;
  double infidelity = -1.0;  ///< 1 - |<psi|gs>|^2; negative when not tracked
};

struct AnsatzStepRecord {
  int iteration = 0;
  int op_index = -1;
  double theta = 0.0;  ///< final optimized angle
  double gradient_at_selection = 0.0;
  std::string op_text;  ///< serialized generator, makes replay self-contained
  OperatorKind kind = OperatorKind::local;
  bool t_even = false;
};

enum class Termination { converged, max_iterations, cnot_budget, feval_budget };
std::string termination_label(Termination t);
Termination termination_from_label(const std::string& label);

struct Trajectory {
  std::string version = kVersion;
  AdaptConfig config;
  size_t pool_size = 0;
  double e0 = 0.0;
  std::string e0_method;
  std::vector<IterationRecord> iterations;
  std::vector<AnsatzStepRecord> steps;
  Termination termination = Termination::converged;
  double final_energy = 0.0;
};

/// Pool gradient of every operator against a frozen state, in pool order.
/// Evaluations fan out to a small worker set; results are deterministic.
std::vector<SelectedOp> screen_gradients(const Statevector& state,
                                         const OperatorPool& pool,
                                         const PauliSum& hamiltonian);

/// Orders by |G| descending with the serialization-ascending tie-break;
/// a non-null RNG shuffles within exact-tie groups instead.
std::vector<SelectedOp> sort_scored(std::vector<SelectedOp> scored,
                                    const OperatorPool& pool,
                                    std::mt19937_64* tie_rng = nullptr);

/// Greedy disjoint-support batch of operators with |G| >= epsilon; with
/// tetris = false only the top operator is returned.
std::vector<SelectedOp> tetris_select(const std::vector<SelectedOp>& sorted,
                                      const OperatorPool& pool, double epsilon,
                                      bool tetris = true);

/// The full adaptive loop. `exact` short-circuits the ground-state solve
/// (used by the batch runner's cache); when null it is computed here.
Trajectory run_adapt(const AdaptConfig& config, const OperatorPool& pool,
                     const GroundStateResult* exact = nullptr);

/// Rebuilds the final state from the recorded steps and reference.
Statevector replay(const Trajectory& trajectory);

nlohmann::json config_to_json(const AdaptConfig& config);
AdaptConfig config_from_json(const nlohmann::json& j);
nlohmann::json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace schwadapt
