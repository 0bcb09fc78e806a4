#include "schwadapt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace schwadapt {

Preset preset_from_label(const std::string& label) {
  if (label == "A") return Preset::A;
  if (label == "B") return Preset::B;
  if (label == "C") return Preset::C;
  throw std::invalid_argument("unknown preset label: " + label);
}

std::string preset_label(Preset p) {
  switch (p) {
    case Preset::A: return "A";
    case Preset::B: return "B";
    default: return "C";
  }
}

ModelParams preset_params(Preset p, int sites, double spacing) {
  ModelParams mp;
  mp.sites = sites;
  mp.spacing = spacing;
  switch (p) {
    case Preset::A: mp.bare_mass = 0.5; mp.coupling = 0.3; break;
    case Preset::B: mp.bare_mass = 0.1; mp.coupling = 0.8; break;
    case Preset::C: mp.bare_mass = 0.1; mp.coupling = 0.3; break;
  }
  return mp;
}

PauliSum build_hamiltonian(const ModelParams& p) {
  if (p.sites < 1) throw std::invalid_argument("build_hamiltonian: L >= 1 required");
  if (p.spacing <= 0.0) throw std::invalid_argument("build_hamiltonian: a > 0 required");
  const uint32_t n = p.num_qubits();
  PauliSum h(n);

  // Hopping: (1/4a) sum_j (X_j X_{j+1} + Y_j Y_{j+1}).
  const double hop = 1.0 / (4.0 * p.spacing);
  for (uint32_t j = 0; j + 1 < n; ++j) {
    uint64_t pair = (uint64_t{3} << j);
    h.add(hop, PauliString(n, pair, 0));     // XX
    h.add(hop, PauliString(n, pair, pair));  // YY
  }

  // Staggered mass: (m0/2) sum_j (-1)^j Z_j.
  for (uint32_t j = 0; j < n; ++j) {
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    h.add(sgn * p.bare_mass / 2.0, PauliString(n, 0, uint64_t{1} << j));
  }

  // Gauge: (a g^2 / 8) sum_j (sum_{k<=j} (Z_k + (-1)^k))^2, fully expanded.
  const double gauge = p.spacing * p.coupling * p.coupling / 8.0;
  PauliSum partial(n);
  for (uint32_t j = 0; j + 1 < n; ++j) {
    partial.add(1.0, PauliString(n, 0, uint64_t{1} << j));
    partial.add(j % 2 == 0 ? 1.0 : -1.0, PauliString::identity(n));
    h.add((partial * partial) * gauge);
  }
  return h;
}

PauliSum charge_operator(int sites) {
  if (sites < 1) throw std::invalid_argument("charge_operator: L >= 1 required");
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  PauliSum q(n);
  for (uint32_t k = 0; k < n; ++k) {
    q.add(0.5, PauliString(n, 0, uint64_t{1} << k));
    q.add(k % 2 == 0 ? 0.5 : -0.5, PauliString::identity(n));
  }
  return q;
}

ReferenceKind reference_kind_from_label(const std::string& label) {
  if (label == "staggered_vacuum") return ReferenceKind::staggered_vacuum;
  if (label == "trs_breaking_psi1") return ReferenceKind::trs_breaking_psi1;
  if (label == "trs_preserving_psi2") return ReferenceKind::trs_preserving_psi2;
  throw std::invalid_argument("unknown reference kind: " + label);
}

std::string reference_kind_label(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::staggered_vacuum: return "staggered_vacuum";
    case ReferenceKind::trs_breaking_psi1: return "trs_breaking_psi1";
    default: return "trs_preserving_psi2";
  }
}

uint64_t staggered_vacuum_index(int sites) {
  uint64_t idx = 0;
  for (int j = 0; j < 2 * sites; j += 2) idx |= uint64_t{1} << j;
  return idx;
}

Statevector reference_state(int sites, ReferenceKind kind) {
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  const uint64_t vac = staggered_vacuum_index(sites);
  if (kind == ReferenceKind::staggered_vacuum)
    return Statevector::basis_state(n, vac);
  if (sites < 3)
    throw std::invalid_argument("psi1/psi2 reference states require L >= 3");
  const uint64_t flipped = vac ^ (uint64_t{1} << 3) ^ (uint64_t{1} << 4);
  Statevector psi(n);
  const double invsqrt2 = 1.0 / std::sqrt(2.0);
  psi.amplitudes()[vac] = invsqrt2;
  psi.amplitudes()[flipped] = kind == ReferenceKind::trs_breaking_psi1
                                  ? cplx{0.0, -invsqrt2}
                                  : cplx{-invsqrt2, 0.0};
  return psi;
}

Eigen::MatrixXcd cp_unitary(int sites) {
  if (sites > 6) throw CapacityError("cp_unitary: L <= 6 required");
  const uint32_t n = static_cast<uint32_t>(2 * sites);
  const size_t dim = size_t{1} << n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  for (size_t b = 0; b < dim; ++b) {
    size_t image = 0;
    for (uint32_t q = 0; q < n; ++q) {
      size_t bit = (b >> (n - 1 - q)) & 1;
      image |= (bit ^ 1) << q;
    }
    u(static_cast<Eigen::Index>(image), static_cast<Eigen::Index>(b)) = 1.0;
  }
  return u;
}

}  // namespace schwadapt
