#include "schwadapt/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "schwadapt/diagnostics.hpp"
#include "schwadapt/optimizer.hpp"
#include "schwadapt/resources.hpp"

namespace schwadapt {

std::string termination_label(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::cnot_budget: return "cnot_budget";
    default: return "feval_budget";
  }
}

Termination termination_from_label(const std::string& label) {
  if (label == "converged") return Termination::converged;
  if (label == "max_iterations") return Termination::max_iterations;
  if (label == "cnot_budget") return Termination::cnot_budget;
  if (label == "feval_budget") return Termination::feval_budget;
  throw std::invalid_argument("unknown termination label: " + label);
}

std::vector<SelectedOp> screen_gradients(const Statevector& state,
                                         const OperatorPool& pool,
                                         const PauliSum& hamiltonian) {
  const Statevector h_psi = apply(hamiltonian, state);
  std::vector<SelectedOp> scored(pool.operators.size());
  auto worker = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
      scored[i] = {static_cast<int>(i),
                   pool_gradient_cached(h_psi, pool.operators[i].op, state)};
  };
  const size_t count = pool.operators.size();
  unsigned hw = std::thread::hardware_concurrency();
  if (count >= 32 && hw > 1) {
    unsigned workers = std::min<unsigned>(hw, 8);
    std::vector<std::thread> threads;
    size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      size_t begin = w * chunk, end = std::min(count, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(worker, begin, end);
    }
    for (auto& t : threads) t.join();
  } else {
    worker(0, count);
  }
  return scored;
}

std::vector<SelectedOp> sort_scored(std::vector<SelectedOp> scored,
                                    const OperatorPool& pool,
                                    std::mt19937_64* tie_rng) {
  std::sort(scored.begin(), scored.end(),
            [&](const SelectedOp& a, const SelectedOp& b) {
              double ga = std::abs(a.gradient), gb = std::abs(b.gradient);
              if (ga != gb) return ga > gb;
              return pool.operators[a.op_index].serialization <
                     pool.operators[b.op_index].serialization;
            });
  if (!tie_rng) return scored;
  // Fisher-Yates within groups of (near-)degenerate |G|.
  size_t start = 0;
  while (start < scored.size()) {
    size_t end = start + 1;
    double g0 = std::abs(scored[start].gradient);
    while (end < scored.size() &&
           std::abs(std::abs(scored[end].gradient) - g0) <=
               1e-12 * std::max(1.0, g0))
      ++end;
    for (size_t i = end - start; i > 1; --i) {
      size_t j = start + static_cast<size_t>((*tie_rng)() % i);
      std::swap(scored[start + i - 1], scored[j]);
    }
    start = end;
  }
  return scored;
}

namespace {

uint64_t op_support_mask(const PauliSum& op) {
  uint64_t mask = 0;
  for (const auto& t : op.terms()) mask |= t.string.support_mask();
  return mask;
}

}  // namespace

std::vector<SelectedOp> tetris_select(const std::vector<SelectedOp>& sorted,
                                      const OperatorPool& pool, double epsilon,
                                      bool tetris) {
  std::vector<SelectedOp> batch;
  uint64_t used = 0;
  for (const auto& cand : sorted) {
    if (std::abs(cand.gradient) < epsilon) break;
    uint64_t mask = op_support_mask(pool.operators[cand.op_index].op);
    if (used & mask) continue;
    batch.push_back(cand);
    used |= mask;
    if (!tetris) break;
  }
  return batch;
}

Trajectory run_adapt(const AdaptConfig& config, const OperatorPool& pool,
                     const GroundStateResult* exact) {
  if (pool.id != config.pool || pool.sites != config.sites)
    throw std::invalid_argument("run_adapt: pool does not match config");
  const ModelParams params =
      preset_params(config.preset, config.sites, config.spacing);
  const PauliSum h = build_hamiltonian(params);
  const PauliSum q = charge_operator(config.sites);
  const uint32_t n = params.num_qubits();

  GroundStateResult exact_local{0.0, Statevector(n), 0.0, 0};
  std::string e0_method;
  if (!exact) {
    GroundStateMethod method =
        n <= 10 ? GroundStateMethod::dense : GroundStateMethod::lanczos;
    exact_local = ground_state(h, method, config.lanczos_seed);
    exact = &exact_local;
    e0_method = method == GroundStateMethod::dense ? "dense" : "lanczos";
  } else {
    e0_method = "cached";
  }

  Statevector reference = config.mean_field_reference
                              ? mean_field(h, config.sites).state
                              : reference_state(config.sites, config.reference);

  Trajectory traj;
  traj.config = config;
  traj.pool_size = pool.operators.size();
  traj.e0 = exact->energy;
  traj.e0_method = e0_method;

  ObjectiveHandle handle(h, reference);
  std::vector<double> thetas;
  Statevector psi = reference;
  double energy = expectation(psi, h);

  std::mt19937_64 tie_rng(config.tie_break_seed);
  std::mt19937_64* rng = config.tie_break_seed != 0 ? &tie_rng : nullptr;

  auto make_record = [&](int iteration, double max_grad,
                         const std::vector<SelectedOp>& batch) {
    IterationRecord r;
    r.iteration = iteration;
    r.energy = energy;
    r.energy_density_error = energy_density_error(energy, exact->energy, config.sites);
    r.max_pool_gradient = max_grad;
    r.selected = batch;
    auto [qm, qv] = charge_moments(psi, q);
    r.charge_mean = qm;
    r.charge_variance = qv;
    r.delta_t_value = delta_t(psi);
    std::vector<std::pair<const PauliSum*, double>> circ_steps;
    for (size_t j = 0; j < traj.steps.size(); ++j)
      circ_steps.push_back({&handle.generators()[j], thetas[j]});
    ResourceSummary res = ansatz_resources(circ_steps);
    r.cnot_count = res.cnots;
    r.cnot_depth = res.depth;
    r.rz_count = res.rzs;
    r.fevals = handle.objective_calls();
    r.gevals = handle.gradient_calls();
    for (const auto& sel : batch) {
      const auto& op = pool.operators[sel.op_index];
      if (op.kind == OperatorKind::surface) r.surface_selected = true;
      if (!is_time_reversal_odd(op.op)) r.t_even_selected = true;
    }
    if (config.track_infidelity)
      r.infidelity = 1.0 - fidelity(psi, exact->state);
    return r;
  };

  auto scored = sort_scored(screen_gradients(psi, pool, h), pool, rng);
  double max_grad = scored.empty() ? 0.0 : std::abs(scored.front().gradient);
  traj.iterations.push_back(make_record(0, max_grad, {}));

  Termination term = Termination::max_iterations;
  for (int k = 1; k <= config.max_iterations; ++k) {
    if (max_grad < config.epsilon) {
      term = Termination::converged;
      break;
    }
    auto batch = tetris_select(scored, pool, config.epsilon, config.tetris);
    for (const auto& sel : batch) {
      const auto& op = pool.operators[sel.op_index];
      handle.append_step(op.op);
      thetas.push_back(0.0);
      traj.steps.push_back({k, sel.op_index, 0.0, sel.gradient,
                            serialize(op.op), op.kind,
                            !is_time_reversal_odd(op.op)});
    }
    MinimizeOptions mopts;
    mopts.grad_tol = config.bfgs_grad_tol;
    MinimizeResult mr;
    try {
      mr = minimize(handle, thetas, mopts);
    } catch (const std::exception& e) {
      throw std::runtime_error("inner optimizer failed at iteration " +
                               std::to_string(k) + ": " + e.what());
    }
    thetas = mr.thetas;
    psi = handle.state_at(thetas);
    energy = mr.energy;

    traj.iterations.push_back(make_record(k, max_grad, batch));
    const IterationRecord& rec = traj.iterations.back();
    if (config.cnot_depth_budget && rec.cnot_depth > *config.cnot_depth_budget) {
      term = Termination::cnot_budget;
      break;
    }
    if (config.feval_budget && rec.fevals > *config.feval_budget) {
      term = Termination::feval_budget;
      break;
    }
    if (k == config.max_iterations) break;  // max_iterations stands
    scored = sort_scored(screen_gradients(psi, pool, h), pool, rng);
    max_grad = scored.empty() ? 0.0 : std::abs(scored.front().gradient);
  }
  traj.termination = term;
  traj.final_energy = energy;
  for (size_t j = 0; j < traj.steps.size(); ++j) traj.steps[j].theta = thetas[j];
  return traj;
}

Statevector replay(const Trajectory& trajectory) {
  const AdaptConfig& config = trajectory.config;
  const uint32_t n = static_cast<uint32_t>(2 * config.sites);
  Statevector psi(n);
  if (config.mean_field_reference) {
    const ModelParams params =
        preset_params(config.preset, config.sites, config.spacing);
    psi = mean_field(build_hamiltonian(params), config.sites).state;
  } else {
    psi = reference_state(config.sites, config.reference);
  }
  for (const auto& step : trajectory.steps) {
    std::string text = step.op_text;
    for (auto& ch : text)
      if (ch == ';') ch = '\n';
    PauliSum op = sum_from_text(text, n);
    psi = apply_pauli_exponential(psi, op, step.theta);
  }
  return psi;
}

nlohmann::json config_to_json(const AdaptConfig& c) {
  nlohmann::json j;
  j["pool"] = pool_label(c.pool);
  j["pool_options"] = c.pool_options.summary();
  j["preset"] = preset_label(c.preset);
  j["L"] = c.sites;
  j["spacing"] = c.spacing;
  j["reference"] = reference_kind_label(c.reference);
  j["mean_field_reference"] = c.mean_field_reference;
  j["epsilon"] = c.epsilon;
  j["tetris"] = c.tetris;
  j["max_iterations"] = c.max_iterations;
  j["cnot_depth_budget"] =
      c.cnot_depth_budget ? nlohmann::json(*c.cnot_depth_budget) : nlohmann::json();
  j["feval_budget"] =
      c.feval_budget ? nlohmann::json(*c.feval_budget) : nlohmann::json();
  j["tie_break_seed"] = c.tie_break_seed;
  j["lanczos_seed"] = c.lanczos_seed;
  j["bfgs_grad_tol"] = c.bfgs_grad_tol;
  j["track_infidelity"] = c.track_infidelity;
  return j;
}

AdaptConfig config_from_json(const nlohmann::json& j) {
  AdaptConfig c;
  c.pool = pool_id_from_label(j.at("pool").get<std::string>());
  c.pool_options = PoolOptions::from_summary(j.at("pool_options").get<std::string>());
  c.preset = preset_from_label(j.at("preset").get<std::string>());
  c.sites = j.at("L").get<int>();
  c.spacing = j.value("spacing", 1.0);
  c.reference = reference_kind_from_label(j.at("reference").get<std::string>());
  c.mean_field_reference = j.value("mean_field_reference", false);
  c.epsilon = j.at("epsilon").get<double>();
  c.tetris = j.at("tetris").get<bool>();
  c.max_iterations = j.at("max_iterations").get<int>();
  if (j.contains("cnot_depth_budget") && !j["cnot_depth_budget"].is_null())
    c.cnot_depth_budget = j["cnot_depth_budget"].get<int>();
  if (j.contains("feval_budget") && !j["feval_budget"].is_null())
    c.feval_budget = j["feval_budget"].get<long>();
  c.tie_break_seed = j.value("tie_break_seed", uint64_t{0});
  c.lanczos_seed = j.value("lanczos_seed", uint64_t{20240811});
  c.bfgs_grad_tol = j.value("bfgs_grad_tol", 1e-6);
  c.track_infidelity = j.value("track_infidelity", true);
  return c;
}

nlohmann::json trajectory_to_json(const Trajectory& t) {
  nlohmann::json j;
  j["version"] = t.version;
  j["config"] = config_to_json(t.config);
  j["pool_size"] = t.pool_size;
  j["e0"] = t.e0;
  j["e0_method"] = t.e0_method;
  j["termination"] = termination_label(t.termination);
  j["final_energy"] = t.final_energy;
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& r : t.iterations) {
    nlohmann::json ji;
    ji["iteration"] = r.iteration;
    ji["energy"] = r.energy;
    ji["energy_density_error"] = r.energy_density_error;
    ji["max_pool_gradient"] = r.max_pool_gradient;
    nlohmann::json sel = nlohmann::json::array();
    for (const auto& s : r.selected)
      sel.push_back({{"op", s.op_index}, {"grad", s.gradient}});
    ji["selected"] = sel;
    ji["charge_mean"] = r.charge_mean;
    ji["charge_variance"] = r.charge_variance;
    ji["delta_t"] = r.delta_t_value;
    ji["cnot_count"] = r.cnot_count;
    ji["cnot_depth"] = r.cnot_depth;
    ji["rz_count"] = r.rz_count;
    ji["fevals"] = r.fevals;
    ji["gevals"] = r.gevals;
    ji["surface_selected"] = r.surface_selected;
    ji["t_even_selected"] = r.t_even_selected;
    if (r.infidelity >= 0.0) ji["infidelity"] = r.infidelity;
    iters.push_back(ji);
  }
  j["iterations"] = iters;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"iteration", s.iteration},
                     {"op_index", s.op_index},
                     {"theta", s.theta},
                     {"gradient_at_selection", s.gradient_at_selection},
                     {"op", s.op_text},
                     {"kind", kind_label(s.kind)},
                     {"t_even", s.t_even}});
  }
  j["steps"] = steps;
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.version = j.at("version").get<std::string>();
  t.config = config_from_json(j.at("config"));
  t.pool_size = j.at("pool_size").get<size_t>();
  t.e0 = j.at("e0").get<double>();
  t.e0_method = j.at("e0_method").get<std::string>();
  t.termination = termination_from_label(j.at("termination").get<std::string>());
  t.final_energy = j.at("final_energy").get<double>();
  for (const auto& ji : j.at("iterations")) {
    IterationRecord r;
    r.iteration = ji.at("iteration").get<int>();
    r.energy = ji.at("energy").get<double>();
    r.energy_density_error = ji.at("energy_density_error").get<double>();
    r.max_pool_gradient = ji.at("max_pool_gradient").get<double>();
    for (const auto& s : ji.at("selected"))
      r.selected.push_back({s.at("op").get<int>(), s.at("grad").get<double>()});
    r.charge_mean = ji.at("charge_mean").get<double>();
    r.charge_variance = ji.at("charge_variance").get<double>();
    r.delta_t_value = ji.at("delta_t").get<double>();
    r.cnot_count = ji.at("cnot_count").get<long>();
    r.cnot_depth = ji.at("cnot_depth").get<int>();
    r.rz_count = ji.at("rz_count").get<long>();
    r.fevals = ji.at("fevals").get<long>();
    r.gevals = ji.at("gevals").get<long>();
    r.surface_selected = ji.at("surface_selected").get<bool>();
    r.t_even_selected = ji.at("t_even_selected").get<bool>();
    r.infidelity = ji.value("infidelity", -1.0);
    t.iterations.push_back(r);
  }
  for (const auto& js : j.at("steps")) {
    AnsatzStepRecord s;
    s.iteration = js.at("iteration").get<int>();
    s.op_index = js.at("op_index").get<int>();
    s.theta = js.at("theta").get<double>();
    s.gradient_at_selection = js.at("gradient_at_selection").get<double>();
    s.op_text = js.at("op").get<std::string>();
    std::string kind = js.at("kind").get<std::string>();
    s.kind = kind == "volume" ? OperatorKind::volume
             : kind == "surface" ? OperatorKind::surface
                                 : OperatorKind::local;
    s.t_even = js.at("t_even").get<bool>();
    t.steps.push_back(s);
  }
  return t;
}

}  // namespace schwadapt
