#pragma once

#include <string>
#include <utility>

#include "schwadapt/model.hpp"
#include "schwadapt/pauli.hpp"
#include "schwadapt/state.hpp"

namespace schwadapt {

/// (E - E0) / L, the primary accuracy metric.
double energy_density_error(double energy, double exact_energy, int sites);

/// Time-reversal breaking parameter: the global phase is chosen in closed
/// form to minimize ||Im psi||_2, then ||Im psi'|| / ||Re psi'|| is returned
/// (+infinity when the real part vanishes identically).
double delta_t(const Statevector& psi);

struct MeanFieldResult {
  Statevector state;
  double energy = 0.0;
  bool converged = false;
  std::string method = "layered_single_excitation_vqe";
  int layers = 0;
};

/// Minimizes the energy over single-fermionic-excitation orbits of the
/// staggered vacuum: repeatedly appends the largest-gradient Z-string
/// generator and re-optimizes all angles until every such gradient is at
/// most `grad_tol`.
MeanFieldResult mean_field(const PauliSum& hamiltonian, int sites,
                           double grad_tol = 1e-8, int layer_cap = 500);

/// (<Q>, <Q^2> - <Q>^2) by diagonal accumulation; Q must be diagonal.
std::pair<double, double> charge_moments(const Statevector& psi, const PauliSum& q);

}  // namespace schwadapt
