#include "schwadapt/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace schwadapt {

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  nlohmann::json pools = nlohmann::json::array();
  for (auto p : spec.pools) pools.push_back(pool_label(p));
  j["pools"] = pools;
  nlohmann::json presets = nlohmann::json::array();
  for (auto p : spec.presets) presets.push_back(preset_label(p));
  j["presets"] = presets;
  j["L"] = spec.volumes;
  j["reference"] = reference_kind_label(spec.reference);
  j["mean_field_reference"] = spec.mean_field_reference;
  j["pool_options"] = spec.pool_options.summary();
  j["epsilon"] = spec.epsilon;
  j["tetris"] = spec.tetris;
  j["max_iterations"] = spec.max_iterations;
  j["cnot_depth_budget"] = spec.cnot_depth_budget
                               ? nlohmann::json(*spec.cnot_depth_budget)
                               : nlohmann::json();
  j["feval_budget"] =
      spec.feval_budget ? nlohmann::json(*spec.feval_budget) : nlohmann::json();
  j["seed"] = spec.seed;
  j["lanczos_seed"] = spec.lanczos_seed;
  j["tile_seed_runs"] = spec.tile_seed_runs;
  j["output_dir"] = spec.output_dir;
  j["allow_large"] = spec.allow_large;
  j["jobs"] = spec.jobs;
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("pools")) {
    spec.pools.clear();
    for (const auto& p : j["pools"])
      spec.pools.push_back(pool_id_from_label(p.get<std::string>()));
  }
  if (j.contains("presets")) {
    spec.presets.clear();
    for (const auto& p : j["presets"])
      spec.presets.push_back(preset_from_label(p.get<std::string>()));
  }
  if (j.contains("L")) spec.volumes = j["L"].get<std::vector<int>>();
  if (j.contains("reference"))
    spec.reference = reference_kind_from_label(j["reference"].get<std::string>());
  spec.mean_field_reference = j.value("mean_field_reference", false);
  if (j.contains("pool_options"))
    spec.pool_options = PoolOptions::from_summary(j["pool_options"].get<std::string>());
  spec.epsilon = j.value("epsilon", 1e-3);
  spec.tetris = j.value("tetris", true);
  spec.max_iterations = j.value("max_iterations", 200);
  if (j.contains("cnot_depth_budget") && !j["cnot_depth_budget"].is_null())
    spec.cnot_depth_budget = j["cnot_depth_budget"].get<int>();
  if (j.contains("feval_budget") && !j["feval_budget"].is_null())
    spec.feval_budget = j["feval_budget"].get<long>();
  spec.seed = j.value("seed", uint64_t{0});
  spec.lanczos_seed = j.value("lanczos_seed", uint64_t{20240811});
  spec.tile_seed_runs = j.value("tile_seed_runs", 4);
  spec.output_dir = j.value("output_dir", std::string("runs"));
  spec.allow_large = j.value("allow_large", false);
  spec.jobs = j.value("jobs", 1);
  return spec;
}

ExactCache::ExactCache(std::string file_path) : path_(std::move(file_path)) {
  std::ifstream in(path_);
  if (in) {
    try {
      in >> file_;
    } catch (const std::exception&) {
      file_ = nlohmann::json::object();
    }
  }
  if (!file_.is_object()) file_ = nlohmann::json::object();
}

const GroundStateResult& ExactCache::get(Preset preset, double spacing,
                                         int sites, uint64_t lanczos_seed) {
  std::ostringstream key;
  key << preset_label(preset) << "|a=" << spacing << "|L=" << sites
      << "|" << method_for(sites);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = memo_.find(key.str());
  if (it != memo_.end()) return it->second;

  const ModelParams params = preset_params(preset, sites, spacing);
  GroundStateMethod method = 2 * sites <= 10 ? GroundStateMethod::dense
                                             : GroundStateMethod::lanczos;
  GroundStateResult result =
      ground_state(build_hamiltonian(params), method, lanczos_seed);
  auto [pos, inserted] = memo_.emplace(key.str(), std::move(result));
  if (!file_.contains(key.str())) {
    file_[key.str()] = {{"energy", pos->second.energy},
                        {"residual", pos->second.residual},
                        {"method", method_for(sites)}};
    persist();
  }
  return pos->second;
}

void ExactCache::persist() {
  if (path_.empty()) return;
  std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp);
    out << file_.dump(2) << '\n';
  }
  fs::rename(tmp, path_);
}

std::string trajectory_filename(const AdaptConfig& config) {
  std::ostringstream os;
  os << pool_label(config.pool) << '_' << preset_label(config.preset) << "_L"
     << config.sites;
  if (config.reference != ReferenceKind::staggered_vacuum)
    os << '_' << reference_kind_label(config.reference);
  if (config.mean_field_reference) os << "_mfref";
  if (config.pool_options.t_relax) os << "_trelax";
  if (config.pool_options.z_surface_swap) os << "_zswap";
  if (config.pool_options.all_distances) os << "_alld";
  if (config.pool_options.split_surfaces) os << "_splitsurf";
  if (!config.tetris) os << "_notetris";
  os << ".json";
  return os.str();
}

void save_trajectory(const Trajectory& t, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << trajectory_to_json(t).dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return trajectory_from_json(j);
}

std::vector<RunOutcome> run_experiments(const ExperimentSpec& spec) {
  fs::create_directories(spec.output_dir);
  ExactCache cache((fs::path(spec.output_dir) / "e0_cache.json").string());

  std::vector<AdaptConfig> configs;
  std::vector<std::string> skips;
  for (PoolId pool : spec.pools)
    for (Preset preset : spec.presets)
      for (int sites : spec.volumes) {
        AdaptConfig c;
        c.pool = pool;
        c.pool_options = spec.pool_options;
        c.preset = preset;
        c.sites = sites;
        c.reference = spec.reference;
        c.mean_field_reference = spec.mean_field_reference;
        c.epsilon = spec.epsilon;
        c.tetris = spec.tetris;
        c.max_iterations = spec.max_iterations;
        c.cnot_depth_budget = spec.cnot_depth_budget;
        c.feval_budget = spec.feval_budget;
        c.tie_break_seed = spec.seed;
        c.lanczos_seed = spec.lanczos_seed;
        configs.push_back(c);
      }

  std::vector<RunOutcome> outcomes(configs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      RunOutcome& out = outcomes[i];
      out.config = configs[i];
      try {
        const AdaptConfig& c = configs[i];
        if (c.sites >= 8 && !spec.allow_large)
          throw std::runtime_error(
              "L >= 8 requires allow_large (long-running volume)");
        TileSeedConfig seed_cfg;
        seed_cfg.preset = c.preset;
        seed_cfg.runs = spec.tile_seed_runs;
        seed_cfg.base_seed = spec.seed + 1;
        OperatorPool pool = build_pool(c.pool, c.sites, c.pool_options, seed_cfg);
        const GroundStateResult& exact =
            cache.get(c.preset, c.spacing, c.sites, c.lanczos_seed);
        Trajectory traj = run_adapt(c, pool, &exact);
        traj.e0_method = ExactCache::method_for(c.sites);
        std::string path =
            (fs::path(spec.output_dir) / trajectory_filename(c)).string();
        save_trajectory(traj, path);
        out.file = path;
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };

  int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return outcomes;
}

FigureClass figure_class_from_label(const std::string& label) {
  static const std::map<std::string, FigureClass> table = {
      {"fig3", FigureClass::fig3},   {"fig4", FigureClass::fig4},
      {"fig5", FigureClass::fig5},   {"fig7a", FigureClass::fig7a},
      {"fig7b", FigureClass::fig7b}, {"fig9", FigureClass::fig9},
      {"fig10", FigureClass::fig10}, {"fig11", FigureClass::fig11},
      {"fig12", FigureClass::fig12}};
  auto it = table.find(label);
  if (it == table.end())
    throw std::invalid_argument("unknown figure class: " + label);
  return it->second;
}

std::string figure_class_label(FigureClass f) {
  switch (f) {
    case FigureClass::fig3: return "fig3";
    case FigureClass::fig4: return "fig4";
    case FigureClass::fig5: return "fig5";
    case FigureClass::fig7a: return "fig7a";
    case FigureClass::fig7b: return "fig7b";
    case FigureClass::fig9: return "fig9";
    case FigureClass::fig10: return "fig10";
    case FigureClass::fig11: return "fig11";
    default: return "fig12";
  }
}

int budget_cut_iteration(const Trajectory& t,
                         const std::function<long(const IterationRecord&)>& metric,
                         long budget) {
  int last = -1;
  for (const auto& r : t.iterations)
    if (metric(r) <= budget) last = r.iteration;
  return last;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const IterationRecord* record_at(const Trajectory& t, int iteration) {
  for (const auto& r : t.iterations)
    if (r.iteration == iteration) return &r;
  return nullptr;
}

}  // namespace

std::string emit_table(const std::vector<Trajectory>& trajectories,
                       FigureClass figure_class, std::optional<long> budget) {
  std::ostringstream os;
  auto id_prefix = [](const Trajectory& t) {
    return pool_label(t.config.pool) + "," + preset_label(t.config.preset) +
           "," + std::to_string(t.config.sites);
  };
  switch (figure_class) {
    case FigureClass::fig3:
    case FigureClass::fig10: {
      os << "pool_id,preset,L,iteration,energy_density_error,surface_selected\n";
      for (const auto& t : trajectories)
        for (const auto& r : t.iterations)
          os << id_prefix(t) << ',' << r.iteration << ','
             << fmt(r.energy_density_error) << ',' << (r.surface_selected ? 1 : 0)
             << '\n';
      break;
    }
    case FigureClass::fig4: {
      os << "pool_id,preset,L,iteration,energy_density_error,max_grad,"
            "charge_mean,charge_var\n";
      for (const auto& t : trajectories)
        for (const auto& r : t.iterations)
          os << id_prefix(t) << ',' << r.iteration << ','
             << fmt(r.energy_density_error) << ',' << fmt(r.max_pool_gradient)
             << ',' << fmt(r.charge_mean) << ',' << fmt(r.charge_variance) << '\n';
      break;
    }
    case FigureClass::fig5: {
      os << "pool_id,preset,L,iteration,cnot_depth,cnot_count,"
            "energy_density_error\n";
      for (const auto& t : trajectories)
        for (const auto& r : t.iterations)
          os << id_prefix(t) << ',' << r.iteration << ',' << r.cnot_depth << ','
             << r.cnot_count << ',' << fmt(r.energy_density_error) << '\n';
      break;
    }
    case FigureClass::fig7a:
    case FigureClass::fig7b: {
      const bool cnot = figure_class == FigureClass::fig7a;
      const long b = budget.value_or(cnot ? 1000 : 100);
      os << "pool_id,preset,L," << (cnot ? "cnot_depth_budget" : "feval_budget")
         << ",cut_iteration,energy_density_error\n";
      for (const auto& t : trajectories) {
        int cut = budget_cut_iteration(
            t,
            [&](const IterationRecord& r) {
              return cnot ? static_cast<long>(r.cnot_depth) : r.fevals;
            },
            b);
        const IterationRecord* r = cut >= 0 ? record_at(t, cut) : nullptr;
        os << id_prefix(t) << ',' << b << ',' << cut << ','
           << (r ? fmt(r->energy_density_error) : "nan") << '\n';
      }
      break;
    }
    case FigureClass::fig9: {
      os << "pool_id,preset,L,reference,iteration,delta_t,t_even_selected\n";
      for (const auto& t : trajectories)
        for (const auto& r : t.iterations)
          os << id_prefix(t) << ','
             << reference_kind_label(t.config.reference) << ',' << r.iteration
             << ',' << fmt(r.delta_t_value) << ',' << (r.t_even_selected ? 1 : 0)
             << '\n';
      break;
    }
    case FigureClass::fig11:
    case FigureClass::fig12: {
      os << "pool_id,preset,L,iteration,energy_density_error,infidelity\n";
      for (const auto& t : trajectories)
        for (const auto& r : t.iterations) {
          if (r.infidelity < 0.0)
            throw std::runtime_error(
                "figure class requires the infidelity metric, absent from " +
                pool_label(t.config.pool));
          os << id_prefix(t) << ',' << r.iteration << ','
             << fmt(r.energy_density_error) << ',' << fmt(r.infidelity) << '\n';
        }
      break;
    }
  }
  return os.str();
}

}  // namespace schwadapt
