#include "schwadapt/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace schwadapt {

namespace {

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_hermitian(const PauliSum& op, const char* what) {
  if (!op.is_hermitian())
    throw std::invalid_argument(std::string(what) + ": operator is not Hermitian");
}

}  // namespace

Statevector::Statevector(uint32_t n_qubits) : n_(n_qubits) {
  if (n_ > kMaxQubits) throw CapacityError("Statevector: qubit count over guard");
  amps_.assign(size_t{1} << n_, cplx{0.0});
}

Statevector Statevector::basis_state(uint32_t n_qubits, uint64_t basis_index) {
  Statevector psi(n_qubits);
  psi.amps_.at(basis_index) = 1.0;
  return psi;
}

double Statevector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void Statevector::normalize() {
  double nrm = norm();
  if (nrm == 0.0) throw std::domain_error("cannot normalize the zero vector");
  for (auto& a : amps_) a /= nrm;
}

void Statevector::dump_amplitudes(const std::string& path) const {
  if (n_ > 16) throw CapacityError("amplitude dump limited to n <= 16");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write("SVEC", 4);
  out.write(reinterpret_cast<const char*>(&n_), sizeof n_);
  out.write(reinterpret_cast<const char*>(amps_.data()),
            static_cast<std::streamsize>(amps_.size() * sizeof(cplx)));
}

cplx inner_product(const Statevector& a, const Statevector& b) {
  if (a.num_qubits() != b.num_qubits())
    throw DimensionError("inner_product: mismatched qubit counts");
  cplx s = 0.0;
  const auto& xa = a.amplitudes();
  const auto& xb = b.amplitudes();
  for (size_t i = 0; i < xa.size(); ++i) s += std::conj(xa[i]) * xb[i];
  return s;
}

void accumulate_pauli_apply(const PauliString& p, cplx coeff,
                            const Statevector& psi, Statevector& out) {
  const cplx global = coeff * i_power(p.y_count());
  const uint64_t x = p.x_mask, z = p.z_mask;
  const auto& in = psi.amplitudes();
  auto& acc = out.amplitudes();
  const size_t dim = in.size();
  for (size_t b = 0; b < dim; ++b) {
    cplx v = global * in[b];
    if (std::popcount(b & z) & 1) v = -v;
    acc[b ^ x] += v;
  }
}

Statevector apply(const PauliSum& s, const Statevector& psi) {
  if (s.num_qubits() != psi.num_qubits())
    throw DimensionError("apply: mismatched qubit counts");
  Statevector out(psi.num_qubits());
  for (const auto& t : s.terms())
    accumulate_pauli_apply(t.string, t.coeff, psi, out);
  return out;
}

namespace {

// exp(-i theta c P)|psi> = cos(c theta)|psi> - i sin(c theta) P|psi>.
Statevector apply_single_string_exp(const Statevector& psi, const PauliString& p,
                                    double c, double theta) {
  const double a = c * theta;
  if (p.is_identity()) {
    Statevector out = psi;
    const cplx phase{std::cos(a), -std::sin(a)};
    for (auto& amp : out.amplitudes()) amp *= phase;
    return out;
  }
  Statevector out = psi;
  const double ca = std::cos(a);
  for (auto& amp : out.amplitudes()) amp *= ca;
  accumulate_pauli_apply(p, cplx{0.0, -std::sin(a)}, psi, out);
  return out;
}

// One Krylov-subspace step of exp(-i theta O) for Hermitian O; returns false
// when the basis cap is reached before the tolerance (caller shrinks theta).
bool krylov_exp_step(const Statevector& psi, const PauliSum& op, double theta,
                     double tol, Statevector& result) {
  const size_t max_basis = std::min<size_t>(psi.dim(), 64);
  const double input_norm = psi.norm();
  if (input_norm == 0.0) {
    result = psi;
    return true;
  }
  std::vector<Statevector> basis;
  std::vector<double> alphas, betas;
  basis.push_back(psi);
  for (auto& a : basis.front().amplitudes()) a /= input_norm;
  Eigen::VectorXcd y;
  bool converged = false;
  for (size_t j = 0; j < max_basis; ++j) {
    Statevector w = apply(op, basis[j]);
    double alpha = inner_product(basis[j], w).real();
    alphas.push_back(alpha);
    {
      auto& wv = w.amplitudes();
      const auto& vj = basis[j].amplitudes();
      for (size_t i = 0; i < wv.size(); ++i) wv[i] -= alpha * vj[i];
      if (j > 0) {
        const auto& vp = basis[j - 1].amplitudes();
        const double b = betas.back();
        for (size_t i = 0; i < wv.size(); ++i) wv[i] -= b * vp[i];
      }
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) {
        cplx ov = inner_product(v, w);
        auto& wv = w.amplitudes();
        const auto& vv = v.amplitudes();
        for (size_t i = 0; i < wv.size(); ++i) wv[i] -= ov * vv[i];
      }
    double beta = w.norm();

    const size_t m = alphas.size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (size_t i = 0; i < m; ++i) {
      t(i, i) = alphas[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::VectorXcd rotated(m);
    for (size_t i = 0; i < m; ++i)
      rotated(i) = std::exp(cplx{0.0, -theta * es.eigenvalues()(i)}) *
                   es.eigenvectors()(0, i);
    y = es.eigenvectors().cast<cplx>() * rotated;

    if (beta <= 1e-14 || beta * std::abs(y(m - 1)) <= tol) {
      converged = true;
      break;
    }
    if (m == max_basis) break;
    betas.push_back(beta);
    for (auto& amp : w.amplitudes()) amp /= beta;
    basis.push_back(std::move(w));
  }
  if (!converged) return false;
  Statevector out(psi.num_qubits());
  auto& amps = out.amplitudes();
  for (size_t i = 0; i < basis.size() && i < static_cast<size_t>(y.size()); ++i) {
    const auto& v = basis[i].amplitudes();
    const cplx c = y(i) * input_norm;
    for (size_t b = 0; b < amps.size(); ++b) amps[b] += c * v[b];
  }
  result = std::move(out);
  return true;
}

// Splits theta into substeps small enough for the capped Krylov basis; the
// substep count only ever doubles, so the cost stays linear in |theta|.
Statevector apply_krylov_exp(const Statevector& psi, const PauliSum& op,
                             double theta, double tol) {
  const double scale = std::max(1.0, op.one_norm());
  uint64_t substeps =
      std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(std::abs(theta) * scale / 16.0)));
  for (; substeps <= (uint64_t{1} << 26); substeps *= 2) {
    const double dt = theta / static_cast<double>(substeps);
    const double step_tol = tol / static_cast<double>(substeps);
    Statevector current = psi;
    bool ok = true;
    for (uint64_t s = 0; s < substeps && ok; ++s) {
      Statevector next(psi.num_qubits());
      ok = krylov_exp_step(current, op, dt, step_tol, next);
      if (ok) current = std::move(next);
    }
    if (ok) return current;
  }
  throw std::runtime_error(
      "apply_pauli_exponential: Krylov tolerance not reached (theta=" +
      std::to_string(theta) + ")");
}

}  // namespace

Statevector apply_pauli_exponential(const Statevector& psi, const PauliSum& op,
                                    double theta, ExpMode mode) {
  if (op.num_qubits() != psi.num_qubits())
    throw DimensionError("apply_pauli_exponential: mismatched qubit counts");
  check_hermitian(op, "apply_pauli_exponential");
  if (op.empty() || theta == 0.0) return psi;

  auto terms = op.terms();
  if (mode == ExpMode::trotter1 || op.terms_mutually_commute()) {
    // For mutually commuting terms the factorization is exact; otherwise this
    // is the explicitly requested first-order product step.
    Statevector out = psi;
    for (const auto& t : terms)
      out = apply_single_string_exp(out, t.string, t.coeff.real(), theta);
    return out;
  }
  // Unitarity preserves the input norm (which is 1 for states but may be
  // anything for intermediate vectors in gradient sweeps).
  Statevector out = apply_krylov_exp(psi, op, theta, 1e-13);
  const double in_norm = psi.norm();
  if (in_norm > 0.0) {
    double ratio = out.norm() / in_norm;
    if (std::abs(ratio - 1.0) > 1e-9)
      throw std::runtime_error("apply_pauli_exponential: tolerance not reached");
    for (auto& a : out.amplitudes()) a /= ratio;
  }
  return out;
}

double expectation(const Statevector& psi, const PauliSum& s) {
  check_hermitian(s, "expectation");
  cplx e = inner_product(psi, apply(s, psi));
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, s.one_norm()))
    throw std::runtime_error("expectation: imaginary part above tolerance");
  return e.real();
}

double pool_gradient(const Statevector& psi, const PauliSum& op, const PauliSum& h) {
  Statevector h_psi = apply(h, psi);
  return pool_gradient_cached(h_psi, op, psi);
}

double pool_gradient_cached(const Statevector& h_psi, const PauliSum& op,
                            const Statevector& psi) {
  Statevector o_psi = apply(op, psi);
  return 2.0 * inner_product(h_psi, o_psi).imag();
}

namespace {

GroundStateResult dense_ground_state(const PauliSum& h) {
  if (h.num_qubits() > 14)
    throw CapacityError("ground_state(dense): qubit count over guard");
  const lapack_int dim = lapack_int{1} << h.num_qubits();
  lapack_int found = 0;
  std::vector<double> w(dim);
  std::vector<lapack_int> isuppz(2);
  GroundStateResult res{0.0, Statevector(h.num_qubits()), 0.0, 0};

  bool real_matrix = true;
  for (const auto& t : h.terms())
    if (t.string.y_count() & 1) real_matrix = false;

  if (real_matrix) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : h.terms()) {
      const uint64_t x = t.string.x_mask, z = t.string.z_mask;
      // i^{y_count} is +/-1 for even Y counts
      const double base =
          t.coeff.real() * ((t.string.y_count() % 4 == 0) ? 1.0 : -1.0);
      for (size_t b = 0; b < static_cast<size_t>(dim); ++b) {
        double v = (std::popcount(b & z) & 1) ? -base : base;
        m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) += v;
      }
    }
    Eigen::MatrixXd z(dim, 1);
    lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', dim, m.data(), dim, 0.0, 0.0, 1, 1,
        0.0, &found, w.data(), z.data(), dim, isuppz.data());
    if (info != 0 || found < 1)
      throw std::runtime_error("ground_state(dense): dsyevr failed");
    res.energy = w[0];
    for (lapack_int i = 0; i < dim; ++i) res.state.amplitudes()[i] = z(i, 0);
  } else {
    Eigen::MatrixXcd m = to_matrix(h);
    Eigen::MatrixXcd z(dim, 1);
    lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', dim, m.data(), dim, 0.0, 0.0, 1, 1,
        0.0, &found, w.data(), z.data(), dim, isuppz.data());
    if (info != 0 || found < 1)
      throw std::runtime_error("ground_state(dense): zheevr failed");
    res.energy = w[0];
    for (lapack_int i = 0; i < dim; ++i) res.state.amplitudes()[i] = z(i, 0);
  }
  res.state.normalize();
  Statevector hv = apply(h, res.state);
  double r2 = 0.0;
  for (size_t i = 0; i < hv.dim(); ++i)
    r2 += std::norm(hv.amplitudes()[i] - res.energy * res.state.amplitudes()[i]);
  res.residual = std::sqrt(r2);
  return res;
}

GroundStateResult lanczos_ground_state(const PauliSum& h, uint64_t seed) {
  const uint32_t n = h.num_qubits();
  const size_t dim = size_t{1} << n;
  const double scale = std::max(1.0, h.one_norm());
  const double tol = 1e-10 * scale;
  const size_t max_basis = std::min<size_t>(dim, 120);
  const int max_restarts = 60;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Statevector v0(n);
  for (auto& a : v0.amplitudes()) a = uni(rng);
  v0.normalize();

  GroundStateResult res{0.0, Statevector(n), 0.0, 0};
  int total_applies = 0;
  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<Statevector> basis{v0};
    std::vector<double> alphas, betas;
    Eigen::VectorXd ritz;
    for (size_t j = 0; j < max_basis; ++j) {
      Statevector w = apply(h, basis[j]);
      ++total_applies;
      double alpha = inner_product(basis[j], w).real();
      alphas.push_back(alpha);
      {
        auto& wv = w.amplitudes();
        const auto& vj = basis[j].amplitudes();
        for (size_t i = 0; i < dim; ++i) wv[i] -= alpha * vj[i];
        if (j > 0) {
          const auto& vp = basis[j - 1].amplitudes();
          const double b = betas.back();
          for (size_t i = 0; i < dim; ++i) wv[i] -= b * vp[i];
        }
      }
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : basis) {
          cplx ov = inner_product(v, w);
          auto& wv = w.amplitudes();
          const auto& vv = v.amplitudes();
          for (size_t i = 0; i < dim; ++i) wv[i] -= ov * vv[i];
        }
      double beta = w.norm();

      const size_t m = alphas.size();
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (size_t i = 0; i < m; ++i) {
        t(i, i) = alphas[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = betas[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      ritz = es.eigenvectors().col(0);
      res.energy = es.eigenvalues()(0);
      double est = (m < dim) ? beta * std::abs(ritz(m - 1)) : 0.0;
      if (est <= tol || beta <= 1e-14 || m == dim) break;
      if (m == max_basis) break;
      betas.push_back(beta);
      for (auto& a : w.amplitudes()) a /= beta;
      basis.push_back(std::move(w));
    }
    Statevector x(n);
    for (size_t i = 0; i < basis.size(); ++i) {
      const auto& v = basis[i].amplitudes();
      const double c = ritz(static_cast<Eigen::Index>(i));
      for (size_t b = 0; b < dim; ++b) x.amplitudes()[b] += c * v[b];
    }
    x.normalize();
    Statevector hx = apply(h, x);
    double e = inner_product(x, hx).real();
    double r2 = 0.0;
    for (size_t i = 0; i < dim; ++i)
      r2 += std::norm(hx.amplitudes()[i] - e * x.amplitudes()[i]);
    res.energy = e;
    res.state = std::move(x);
    res.residual = std::sqrt(r2);
    res.iterations = total_applies;
    if (res.residual <= tol) return res;
    v0 = res.state;
  }
  throw std::runtime_error("ground_state(lanczos): no convergence after restarts");
}

}  // namespace

GroundStateResult ground_state(const PauliSum& h, GroundStateMethod method,
                               uint64_t lanczos_seed) {
  check_hermitian(h, "ground_state");
  if (method == GroundStateMethod::dense) return dense_ground_state(h);
  return lanczos_ground_state(h, lanczos_seed);
}

double fidelity(const Statevector& a, const Statevector& b) {
  return std::norm(inner_product(a, b));
}

}  // namespace schwadapt
