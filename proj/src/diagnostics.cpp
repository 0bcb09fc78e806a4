#include "schwadapt/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "schwadapt/optimizer.hpp"
#include "schwadapt/pools.hpp"

namespace schwadapt {

double energy_density_error(double energy, double exact_energy, int sites) {
  return (energy - exact_energy) / static_cast<double>(sites);
}

double delta_t(const Statevector& psi) {
  double a2 = 0.0, b2 = 0.0, ab = 0.0;
  for (const auto& amp : psi.amplitudes()) {
    a2 += amp.real() * amp.real();
    b2 += amp.imag() * amp.imag();
    ab += amp.real() * amp.imag();
  }
  // Minimize ||sin(phi) Re + cos(phi) Im||^2, the Rayleigh quotient of the
  // 2x2 Gram form [[a2, ab], [ab, b2]] over the unit circle.
  double s, c;
  if (ab == 0.0) {
    if (b2 <= a2) { s = 0.0; c = 1.0; }
    else { s = 1.0; c = 0.0; }
  } else {
    double lam = 0.5 * ((a2 + b2) - std::hypot(a2 - b2, 2.0 * ab));
    double vx = ab, vy = lam - a2;
    double nrm = std::hypot(vx, vy);
    s = vx / nrm;
    c = vy / nrm;
  }
  double im2 = 0.0, re2 = 0.0;
  for (const auto& amp : psi.amplitudes()) {
    double re = c * amp.real() - s * amp.imag();
    double im = c * amp.imag() + s * amp.real();
    re2 += re * re;
    im2 += im * im;
  }
  if (re2 == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(im2 / re2);
}

MeanFieldResult mean_field(const PauliSum& hamiltonian, int sites,
                           double grad_tol, int layer_cap) {
  PoolOptions options;
  options.all_distances = true;  // the full one-body orbit, every separation
  OperatorPool pool = build_topdown_pool(PoolId::xQZ, sites, options);

  ObjectiveHandle handle(hamiltonian,
                         reference_state(sites, ReferenceKind::staggered_vacuum));
  std::vector<double> thetas;
  MinimizeOptions mopts;
  mopts.grad_tol = std::min(1e-9, grad_tol * 0.1);

  MeanFieldResult result{handle.reference(), 0.0, false,
                         "layered_single_excitation_vqe", 0};
  result.energy = expectation(result.state, hamiltonian);

  for (int layer = 0; layer < layer_cap; ++layer) {
    Statevector h_psi = apply(hamiltonian, result.state);
    // Largest-gradient-first batch of every generator still above tolerance;
    // fresh parameters for all offending directions kill the slow tail of
    // one-generator coordinate descent.
    std::vector<std::pair<double, size_t>> offenders;
    for (size_t i = 0; i < pool.operators.size(); ++i) {
      double g = pool_gradient_cached(h_psi, pool.operators[i].op, result.state);
      if (std::abs(g) > grad_tol) offenders.push_back({std::abs(g), i});
    }
    if (offenders.empty()) {
      result.converged = true;
      return result;
    }
    std::sort(offenders.begin(), offenders.end(),
              [&](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return pool.operators[a.second].serialization <
                       pool.operators[b.second].serialization;
              });
    for (const auto& [mag, idx] : offenders) {
      handle.append_step(pool.operators[idx].op);
      thetas.push_back(0.0);
    }
    MinimizeResult mr = minimize(handle, thetas, mopts);
    thetas = mr.thetas;
    result.energy = mr.energy;
    result.state = handle.state_at(thetas);
    result.layers = layer + 1;
  }
  return result;  // converged stays false: layer cap exceeded
}

std::pair<double, double> charge_moments(const Statevector& psi, const PauliSum& q) {
  for (const auto& t : q.terms())
    if (t.string.x_mask != 0)
      throw std::invalid_argument("charge_moments: operator is not diagonal");
  auto terms = q.terms();
  double mean = 0.0, second = 0.0;
  const auto& amps = psi.amplitudes();
  for (size_t b = 0; b < amps.size(); ++b) {
    double p = std::norm(amps[b]);
    if (p == 0.0) continue;
    double value = 0.0;
    for (const auto& t : terms) {
      double v = t.coeff.real();
      value += (std::popcount(b & t.string.z_mask) & 1) ? -v : v;
    }
    mean += p * value;
    second += p * value * value;
  }
  return {mean, second - mean * mean};
}

}  // namespace schwadapt
