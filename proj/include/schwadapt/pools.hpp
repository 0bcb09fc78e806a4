#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schwadapt/pauli.hpp"

namespace schwadapt {

/// The eleven pools. Top-down ids read (translation, charge, Z-string) with
/// 'x' marking a relaxed property; the tiled family is built bottom-up.
enum class PoolId {
  LQZ, LQx, LxZ, Lxx, xQZ, xQx, xxZ, xxx,
  tile_pauli, tile_Q, tile_L
};

PoolId pool_id_from_label(const std::string& label);
std::string pool_label(PoolId id);
bool is_topdown(PoolId id);
bool is_tiled(PoolId id);

enum class OperatorKind { volume, surface, local };
std::string kind_label(OperatorKind k);

struct PoolOperator {
  PauliSum op;
  OperatorKind kind = OperatorKind::local;
  int distance = 0;  ///< endpoint separation; 0 for tiled operators
  int offset = 0;    ///< start site for local ops, parity label for tiled sums
  bool cp_symmetric = false;
  std::string serialization;  ///< canonical text, the deterministic tie-break key
};

struct PoolOptions {
  bool all_distances = false;   ///< admit even d as well (default: odd only)
  bool split_surfaces = false;  ///< separate left/right surfaces, no CP pairing
  bool z_surface_swap = false;  ///< LQx/Lxx surfaces keep their Z strings
  bool t_relax = false;         ///< add (XZ..ZX + YZ..ZY)/2 partners (xQZ/xQx)

  std::string summary() const;
  static PoolOptions from_summary(const std::string& text);
};

/// A tile selected on the small seed instance, with provenance.
struct Tile {
  PauliString string;  ///< acts on 2*L_tile qubits
  int seed_run = 0;
  int adapt_step = 0;
};

struct OperatorPool {
  PoolId id = PoolId::xQZ;
  int sites = 0;  ///< L
  PoolOptions options;
  std::vector<PoolOperator> operators;
  std::vector<Tile> tiles;  ///< provenance for the tiled family

  size_t size() const { return operators.size(); }
};

/// G_d(i) = (X_i Z...Z Y_{i+d} - Y_i Z...Z X_{i+d})/2; with_z = false omits
/// the interior Z string. Hermitian, time-reversal-odd, charge-conserving.
PauliSum generator(int i, int d, bool with_z, int sites);

/// Charge-conserving T-even partner (X_i Z...Z X_{i+d} + Y_i Z...Z Y_{i+d})/2.
PauliSum generator_t_even(int i, int d, bool with_z, int sites);

/// The eight top-down pools (volume/surface construction for the
/// translation-invariant family, per-site generators otherwise).
OperatorPool build_topdown_pool(PoolId id, int sites, const PoolOptions& options = {});

/// Embeds every tile at every offset (the boxplus pool).
OperatorPool tile_pool(const std::vector<Tile>& tiles, int sites);

/// Charge-conserving tile combinations: within each mutually commuting
/// same-window group, an orthonormal basis of {c : [sum_j c_j T_j, Q] = 0}.
OperatorPool synthesize_charge_conserving(const std::vector<Tile>& tiles, int sites);

/// Translation-invariant tile sums: per tile and parity p in {1 = odd,
/// 2 = even}, a volume sum over every second offset while the tile fits, and
/// a surface pairing of the outermost tiles of that parity.
OperatorPool tile_translation_invariant(const std::vector<Tile>& tiles, int sites);

/// CP conjugation sign that makes G_d(0) + s G_d(2L-1-d) CP-symmetric,
/// determined by dense conjugation at small L and cached per d parity.
int cp_surface_sign(int distance);

std::string pool_to_text(const OperatorPool& pool);
OperatorPool pool_from_text(const std::string& text);

}  // namespace schwadapt
