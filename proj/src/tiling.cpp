#include "schwadapt/tiling.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <sstream>

#include "schwadapt/adapt.hpp"

namespace schwadapt {

OperatorPool full_odd_y_pauli_pool(int tile_sites) {
  const uint32_t n = static_cast<uint32_t>(2 * tile_sites);
  std::vector<Tile> strings;
  for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
    for (uint64_t z = 0; z < (uint64_t{1} << n); ++z) {
      PauliString s(n, x, z);
      if (s.y_count() % 2 == 1) strings.push_back({s, -1, -1});
    }
  return tile_pool(strings, tile_sites);
}

namespace {

std::string seed_config_key(const TileSeedConfig& c) {
  std::ostringstream os;
  os << preset_label(c.preset) << '|' << c.tile_sites << '|' << c.runs << '|'
     << c.base_seed << '|' << c.epsilon << '|' << c.tetris << '|'
     << c.max_iterations;
  return os.str();
}

std::mutex g_tile_cache_mutex;
std::map<std::string, std::vector<Tile>> g_tile_cache;

}  // namespace

std::vector<Tile> select_tiles(const TileSeedConfig& config) {
  if (config.runs < 1)
    throw std::invalid_argument("select_tiles: at least one seed run required");
  const std::string key = seed_config_key(config);
  {
    std::lock_guard<std::mutex> lock(g_tile_cache_mutex);
    auto it = g_tile_cache.find(key);
    if (it != g_tile_cache.end()) return it->second;
  }

  OperatorPool seed_pool = full_odd_y_pauli_pool(config.tile_sites);
  std::vector<Tile> tiles;
  std::map<std::pair<uint64_t, uint64_t>, bool> seen;
  for (int run = 0; run < config.runs; ++run) {
    AdaptConfig ac;
    ac.pool = PoolId::tile_pauli;
    ac.preset = config.preset;
    ac.sites = config.tile_sites;
    ac.epsilon = config.epsilon;
    ac.tetris = config.tetris;
    ac.max_iterations = config.max_iterations;
    ac.tie_break_seed = config.base_seed + static_cast<uint64_t>(run);
    ac.track_infidelity = false;
    Trajectory traj = run_adapt(ac, seed_pool);
    for (const auto& step : traj.steps) {
      const PauliSum& op = seed_pool.operators[step.op_index].op;
      PauliString s = op.terms().front().string;
      // Left-align: the canonical representative of the translate class.
      int shift = std::countr_zero(s.support_mask());
      s = PauliString(s.n, s.x_mask >> shift, s.z_mask >> shift);
      if (seen.emplace(std::pair{s.x_mask, s.z_mask}, true).second)
        tiles.push_back({s, run, step.iteration});
    }
  }
  if (tiles.empty())
    throw std::runtime_error("select_tiles: seed runs selected no operators");
  std::sort(tiles.begin(), tiles.end(), [](const Tile& a, const Tile& b) {
    return a.string.letters() < b.string.letters();
  });

  std::lock_guard<std::mutex> lock(g_tile_cache_mutex);
  g_tile_cache.emplace(key, tiles);
  return tiles;
}

OperatorPool build_pool(PoolId id, int sites, const PoolOptions& options,
                        const TileSeedConfig& seed_config) {
  if (is_topdown(id)) return build_topdown_pool(id, sites, options);
  std::vector<Tile> tiles = select_tiles(seed_config);
  OperatorPool pool(id == PoolId::tile_pauli ? tile_pool(tiles, sites)
                    : id == PoolId::tile_Q
                        ? synthesize_charge_conserving(tiles, sites)
                        : tile_translation_invariant(tiles, sites));
  pool.options = options;
  return pool;
}

}  // namespace schwadapt
