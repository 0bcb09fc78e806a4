#pragma once

#include <string>

#include <Eigen/Dense>

#include "schwadapt/pauli.hpp"
#include "schwadapt/state.hpp"

namespace schwadapt {

/// Lattice parameters; L physical sites map to n = 2L staggered-site qubits.
struct ModelParams {
  int sites = 2;          ///< L
  double spacing = 1.0;   ///< a
  double bare_mass = 0.5; ///< m0
  double coupling = 0.3;  ///< g

  uint32_t num_qubits() const { return static_cast<uint32_t>(2 * sites); }
};

enum class Preset { A, B, C };

Preset preset_from_label(const std::string& label);
std::string preset_label(Preset p);

/// (m0, g) parameter points: A = (0.5, 0.3), B = (0.1, 0.8), C = (0.1, 0.3),
/// ordered by increasing correlation length A < B < C.
ModelParams preset_params(Preset p, int sites, double spacing = 1.0);

/// Hopping + staggered mass + expanded gauge term on 2L qubits, constant
/// (identity) part retained. Coefficients are purely real.
PauliSum build_hamiltonian(const ModelParams& p);

/// Total staggered charge Q = (1/2) sum_k (Z_k + (-1)^k); diagonal, integer
/// spectrum.
PauliSum charge_operator(int sites);

enum class ReferenceKind {
  staggered_vacuum,    ///< |10>^L
  trs_breaking_psi1,   ///< (|1010...> - i |..flip..>)/sqrt(2), complex
  trs_preserving_psi2  ///< (|1010...> - |..flip..>)/sqrt(2), real
};

ReferenceKind reference_kind_from_label(const std::string& label);
std::string reference_kind_label(ReferenceKind k);

/// Basis index of the staggered vacuum bitstring "1010...".
uint64_t staggered_vacuum_index(int sites);

/// All reference kinds have <Q> = 0. The psi1/psi2 excited string flips
/// qubits 3 and 4 of the vacuum pattern (requires L >= 3).
Statevector reference_state(int sites, ReferenceKind kind);

/// Site reflection j -> 2L-1-j composed with X on every qubit, as a dense
/// permutation unitary (oracle only, L <= 6). Maps the staggered vacuum to
/// itself with sign +1.
Eigen::MatrixXcd cp_unitary(int sites);

}  // namespace schwadapt
