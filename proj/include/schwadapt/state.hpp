#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "schwadapt/pauli.hpp"

namespace schwadapt {

/// Dense state over n qubits; amplitude index packs qubit q at bit q.
class Statevector {
 public:
  static constexpr uint32_t kMaxQubits = 24;

  explicit Statevector(uint32_t n_qubits);

  /// Computational basis state |bits> where bit q of `basis_index` is the
  /// occupation of qubit q.
  static Statevector basis_state(uint32_t n_qubits, uint64_t basis_index);

  uint32_t num_qubits() const { return n_; }
  size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::vector<cplx>& amplitudes() { return amps_; }
  cplx amplitude(uint64_t basis_index) const { return amps_[basis_index]; }

  double norm() const;
  void normalize();
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }

  /// Raw little-endian binary dump for debugging (n <= 16).
  void dump_amplitudes(const std::string& path) const;

 private:
  uint32_t n_;
  std::vector<cplx> amps_;
};

cplx inner_product(const Statevector& a, const Statevector& b);

/// out += coeff * P |psi>
void accumulate_pauli_apply(const PauliString& p, cplx coeff,
                            const Statevector& psi, Statevector& out);

Statevector apply(const PauliSum& s, const Statevector& psi);

enum class ExpMode {
  exact,    ///< closed form / commuting factorization / Krylov to 1e-12
  trotter1  ///< one first-order product step in canonical term order
};

/// exp(-i theta O) |psi> for Hermitian O.
Statevector apply_pauli_exponential(const Statevector& psi, const PauliSum& op,
                                    double theta, ExpMode mode = ExpMode::exact);

/// <psi| S |psi> for Hermitian S; the imaginary part must vanish to 1e-10.
double expectation(const Statevector& psi, const PauliSum& s);

/// dE/dtheta at theta = 0 for the extension exp(-i theta O)|psi>, evaluated
/// as 2 Im <H psi | O psi>. Sign pinned by finite differences, not by any
/// printed commutator ordering.
double pool_gradient(const Statevector& psi, const PauliSum& op, const PauliSum& h);

/// Same kernel reusing a precomputed H|psi> (gradient screening path).
double pool_gradient_cached(const Statevector& h_psi, const PauliSum& op,
                            const Statevector& psi);

enum class GroundStateMethod { dense, lanczos };

struct GroundStateResult {
  double energy = 0.0;
  Statevector state;
  double residual = 0.0;  ///< ||H psi - E psi||
  int iterations = 0;     ///< Lanczos matrix applications (0 for dense)
};

/// Lowest eigenpair of a Hermitian PauliSum. Dense uses LAPACK (n <= 14);
/// Lanczos is matrix-free with full reorthogonalization (n <= 24) and a
/// fixed-seed random real start vector.
GroundStateResult ground_state(const PauliSum& h, GroundStateMethod method,
                               uint64_t lanczos_seed = 20240811);

double fidelity(const Statevector& a, const Statevector& b);

}  // namespace schwadapt
