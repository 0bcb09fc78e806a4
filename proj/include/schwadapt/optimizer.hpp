#pragma once

#include <functional>
#include <vector>

#include "schwadapt/pauli.hpp"
#include "schwadapt/state.hpp"

namespace schwadapt {

/// The variational objective E(theta) = <psi(theta)| H |psi(theta)> with
/// |psi(theta)> = prod_j exp(-i theta_j O_j) |ref>, plus evaluation counters
/// that budget accounting depends on.
class ObjectiveHandle {
 public:
  ObjectiveHandle(PauliSum hamiltonian, Statevector reference);

  void append_step(PauliSum generator);
  size_t num_parameters() const { return ops_.size(); }
  const PauliSum& hamiltonian() const { return h_; }
  const Statevector& reference() const { return ref_; }
  const std::vector<PauliSum>& generators() const { return ops_; }

  /// One objective evaluation (increments the objective counter).
  double evaluate(const std::vector<double>& thetas);

  /// dE/dtheta_j for all j by a forward/backward two-sweep adjoint pass,
  /// O(k) operator applications total (increments the gradient counter).
  std::vector<double> analytic_gradient(const std::vector<double>& thetas);

  /// Fused pass sharing the forward sweep; increments both counters once.
  double evaluate_with_gradient(const std::vector<double>& thetas,
                                std::vector<double>& grad);

  /// State construction without touching the counters.
  Statevector state_at(const std::vector<double>& thetas) const;

  long objective_calls() const { return objective_calls_; }
  long gradient_calls() const { return gradient_calls_; }

 private:
  double gradient_sweep(const std::vector<double>& thetas,
                        std::vector<double>& grad) const;

  PauliSum h_;
  Statevector ref_;
  std::vector<PauliSum> ops_;
  long objective_calls_ = 0;
  long gradient_calls_ = 0;
};

struct MinimizeOptions {
  double grad_tol = 1e-6;  ///< infinity norm of the parameter gradient
  int max_iterations = 1000;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct MinimizeResult {
  std::vector<double> thetas;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

/// Objective evaluated together with its gradient (written into the second
/// argument).
using FusedObjective =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

/// BFGS with a strong Wolfe line search; returns the best-seen point.
MinimizeResult minimize(const FusedObjective& objective,
                        std::vector<double> theta0,
                        const MinimizeOptions& options = {});

MinimizeResult minimize(ObjectiveHandle& handle, std::vector<double> theta0,
                        const MinimizeOptions& options = {});

}  // namespace schwadapt
