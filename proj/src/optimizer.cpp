#include "schwadapt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace schwadapt {

ObjectiveHandle::ObjectiveHandle(PauliSum hamiltonian, Statevector reference)
    : h_(std::move(hamiltonian)), ref_(std::move(reference)) {
  if (h_.num_qubits() != ref_.num_qubits())
    throw DimensionError("ObjectiveHandle: Hamiltonian/reference size mismatch");
  if (!h_.is_hermitian())
    throw std::invalid_argument("ObjectiveHandle: Hamiltonian must be Hermitian");
}

void ObjectiveHandle::append_step(PauliSum generator) {
  if (generator.num_qubits() != ref_.num_qubits())
    throw DimensionError("ObjectiveHandle: generator size mismatch");
  ops_.push_back(std::move(generator));
}

Statevector ObjectiveHandle::state_at(const std::vector<double>& thetas) const {
  if (thetas.size() != ops_.size())
    throw DimensionError("ObjectiveHandle: theta vector has wrong length");
  Statevector psi = ref_;
  for (size_t j = 0; j < ops_.size(); ++j)
    psi = apply_pauli_exponential(psi, ops_[j], thetas[j]);
  return psi;
}

double ObjectiveHandle::evaluate(const std::vector<double>& thetas) {
  ++objective_calls_;
  return expectation(state_at(thetas), h_);
}

double ObjectiveHandle::gradient_sweep(const std::vector<double>& thetas,
                                       std::vector<double>& grad) const {
  if (thetas.size() != ops_.size())
    throw DimensionError("ObjectiveHandle: theta vector has wrong length");
  grad.assign(ops_.size(), 0.0);
  Statevector ket = state_at(thetas);
  Statevector bra = apply(h_, ket);
  const double energy = inner_product(ket, bra).real();
  // grad_j = 2 Im <lambda_j| O_j |psi_j>, with lambda_j and psi_j peeled off
  // in lockstep so the whole sweep costs O(k) operator applications.
  for (size_t j = ops_.size(); j-- > 0;) {
    Statevector o_ket = apply(ops_[j], ket);
    grad[j] = 2.0 * inner_product(bra, o_ket).imag();
    if (j > 0) {
      ket = apply_pauli_exponential(ket, ops_[j], -thetas[j]);
      bra = apply_pauli_exponential(bra, ops_[j], -thetas[j]);
    }
  }
  return energy;
}

std::vector<double> ObjectiveHandle::analytic_gradient(const std::vector<double>& thetas) {
  ++gradient_calls_;
  std::vector<double> grad;
  gradient_sweep(thetas, grad);
  return grad;
}

double ObjectiveHandle::evaluate_with_gradient(const std::vector<double>& thetas,
                                               std::vector<double>& grad) {
  ++objective_calls_;
  ++gradient_calls_;
  return gradient_sweep(thetas, grad);
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Probe {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;
  std::vector<double> x;
  std::vector<double> grad;
};

}  // namespace

MinimizeResult minimize(const FusedObjective& objective,
                        std::vector<double> theta0,
                        const MinimizeOptions& options) {
  const size_t dim = theta0.size();

  MinimizeResult result;
  std::vector<double> x = std::move(theta0);
  std::vector<double> g;
  double f = objective(x, g);
  result.thetas = x;
  result.energy = f;

  auto remember_best = [&](double fv, const std::vector<double>& xv) {
    if (fv < result.energy) {
      result.energy = fv;
      result.thetas = xv;
    }
  };

  if (inf_norm(g) <= options.grad_tol) {
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> h_inv(dim, std::vector<double>(dim, 0.0));
  for (size_t i = 0; i < dim; ++i) h_inv[i][i] = 1.0;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    std::vector<double> dir(dim, 0.0);
    for (size_t i = 0; i < dim; ++i)
      for (size_t j = 0; j < dim; ++j) dir[i] -= h_inv[i][j] * g[j];
    double slope0 = dot(g, dir);
    double dir_norm = std::sqrt(dot(dir, dir));
    double g_norm = std::sqrt(dot(g, g));
    if (slope0 >= 0.0 || dir_norm > 1e4 * std::max(1.0, g_norm)) {
      // Stale or blown-up curvature; restart from steepest descent.
      for (size_t i = 0; i < dim; ++i) {
        dir[i] = -g[i];
        for (size_t j = 0; j < dim; ++j) h_inv[i][j] = (i == j) ? 1.0 : 0.0;
      }
      slope0 = dot(g, dir);
    }

    const double c1 = options.wolfe_c1, c2 = options.wolfe_c2;
    auto probe = [&](double alpha) {
      Probe p;
      p.alpha = alpha;
      p.x.resize(dim);
      for (size_t i = 0; i < dim; ++i) p.x[i] = x[i] + alpha * dir[i];
      p.f = objective(p.x, p.grad);
      p.slope = dot(p.grad, dir);
      remember_best(p.f, p.x);
      return p;
    };

    // Strong Wolfe: bracketing phase, then bisection zoom.
    Probe start{0.0, f, slope0, x, g};
    Probe lo = start, hi;
    bool found = false, bracketed = false;
    Probe accepted;
    double alpha = 1.0;
    const double alpha_max = 64.0;
    Probe prev = start;
    for (int ls = 0; ls < 40; ++ls) {
      Probe p = probe(alpha);
      if (p.f > f + c1 * alpha * slope0 || (ls > 0 && p.f >= prev.f)) {
        lo = prev;
        hi = p;
        bracketed = true;
        break;
      }
      if (std::abs(p.slope) <= -c2 * slope0) {
        accepted = p;
        found = true;
        break;
      }
      if (p.slope >= 0.0) {
        lo = p;
        hi = prev;
        bracketed = true;
        break;
      }
      prev = p;
      if (alpha >= alpha_max) break;
      alpha = std::min(2.0 * alpha, alpha_max);
    }
    if (!found && bracketed) {
      for (int z = 0; z < 50; ++z) {
        double mid = 0.5 * (lo.alpha + hi.alpha);
        Probe p = probe(mid);
        if (p.f > f + c1 * mid * slope0 || p.f >= lo.f) {
          hi = p;
        } else {
          if (std::abs(p.slope) <= -c2 * slope0) {
            accepted = p;
            found = true;
            break;
          }
          if (p.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = p;
        }
        if (std::abs(hi.alpha - lo.alpha) < 1e-14) break;
      }
      if (!found && lo.alpha > 0.0 && lo.f < f) {
        accepted = lo;  // sufficient decrease without the curvature condition
        found = true;
      }
    }
    if (!found) {
      result.line_search_failed = true;
      return result;
    }

    std::vector<double> s(dim), yv(dim);
    for (size_t i = 0; i < dim; ++i) {
      s[i] = accepted.x[i] - x[i];
      yv[i] = accepted.grad[i] - g[i];
    }
    x = accepted.x;
    f = accepted.f;
    g = accepted.grad;

    if (inf_norm(g) <= options.grad_tol) {
      result.converged = true;
      remember_best(f, x);
      return result;
    }

    double sy = dot(s, yv);
    double sy_scale = std::sqrt(dot(s, s)) * std::sqrt(dot(yv, yv));
    if (sy > 1e-10 * std::max(1e-300, sy_scale)) {
      // Inverse BFGS update:
      // H <- H + (1 + r y'Hy) r s s' - r (s (Hy)' + (Hy) s'),  r = 1/(s'y).
      const double rho = 1.0 / sy;
      std::vector<double> hy(dim, 0.0);
      for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) hy[i] += h_inv[i][j] * yv[j];
      double yhy = dot(yv, hy);
      for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j)
          h_inv[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] -
                         rho * (s[i] * hy[j] + hy[i] * s[j]);
    }
  }
  return result;
}

MinimizeResult minimize(ObjectiveHandle& handle, std::vector<double> theta0,
                        const MinimizeOptions& options) {
  if (theta0.size() != handle.num_parameters())
    throw DimensionError("minimize: theta0 has wrong length");
  FusedObjective objective = [&handle](const std::vector<double>& x,
                                       std::vector<double>& grad) {
    return handle.evaluate_with_gradient(x, grad);
  };
  return minimize(objective, std::move(theta0), options);
}

}  // namespace schwadapt
