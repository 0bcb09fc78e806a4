#pragma once

#include <vector>

#include "schwadapt/model.hpp"
#include "schwadapt/pools.hpp"

namespace schwadapt {

struct TileSeedConfig {
  Preset preset = Preset::C;
  int tile_sites = 2;   ///< L_tile
  int runs = 4;         ///< independent seed runs with distinct tie seeds
  uint64_t base_seed = 1;
  double epsilon = 1e-3;
  bool tetris = true;
  int max_iterations = 100;
};

/// The seed pool: every Pauli string on 2*L_tile qubits with an odd number
/// of Y letters (T-even strings are never selected from a real reference,
/// so filtering them is selection-neutral).
OperatorPool full_odd_y_pauli_pool(int tile_sites);

/// Runs ADAPT on the small instance once per seed and returns the
/// deduplicated chosen strings with provenance, in canonical letter order.
/// Results are memoized per configuration within the process.
std::vector<Tile> select_tiles(const TileSeedConfig& config = {});

/// Builds any of the eleven pools; the tiled family triggers seed runs.
OperatorPool build_pool(PoolId id, int sites, const PoolOptions& options = {},
                        const TileSeedConfig& seed_config = {});

}  // namespace schwadapt
