#include <doctest.h>

#include <random>

#include "dense_reference.hpp"
#include "schwadapt/diagnostics.hpp"
#include "schwadapt/pools.hpp"

using namespace schwadapt;

TEST_CASE("energy density error") {
  CHECK(energy_density_error(-2.0, -2.0, 4) == 0.0);
  CHECK(energy_density_error(-1.0, -5.0, 4) == doctest::Approx(1.0));
}

TEST_CASE("delta_T on reference cases") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  Statevector real_psi(3);
  for (auto& a : real_psi.amplitudes()) a = uni(rng);
  real_psi.normalize();
  CHECK(delta_t(real_psi) == 0.0);

  // a global phase on a real state is removed up to roundoff
  for (double phi : {0.4, 1.7, -2.2}) {
    Statevector rotated = real_psi;
    cplx phase{std::cos(phi), std::sin(phi)};
    for (auto& a : rotated.amplitudes()) a *= phase;
    CHECK(delta_t(rotated) < 1e-14);
  }

  // psi1-type states have an isotropic Gram form: delta_T = 1
  Statevector psi1 = reference_state(4, ReferenceKind::trs_breaking_psi1);
  CHECK(delta_t(psi1) == doctest::Approx(1.0).epsilon(1e-12));

  // purely imaginary state: the optimal phase makes it real again
  Statevector imag_psi = real_psi;
  for (auto& a : imag_psi.amplitudes()) a *= cplx{0.0, 1.0};
  CHECK(delta_t(imag_psi) < 1e-14);
}

TEST_CASE("delta_T is invariant under real orthogonal rotations") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Statevector psi(2);
  for (auto& a : psi.amplitudes()) a = cplx{uni(rng), 0.4 * uni(rng)};
  psi.normalize();
  double base = delta_t(psi);

  Eigen::MatrixXd m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = uni(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  Statevector rotated(2);
  for (int i = 0; i < 4; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < 4; ++j) acc += q(i, j) * psi.amplitudes()[j];
    rotated.amplitudes()[i] = acc;
  }
  CHECK(delta_t(rotated) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("mean field is stationary under every one-body generator") {
  const int sites = 2;
  PauliSum h = build_hamiltonian(preset_params(Preset::A, sites));
  MeanFieldResult mf = mean_field(h, sites);
  CHECK(mf.converged);
  CHECK(mf.energy == doctest::Approx(expectation(mf.state, h)).epsilon(1e-12));

  GroundStateResult exact = ground_state(h, GroundStateMethod::dense);
  CHECK(mf.energy >= exact.energy - 1e-12);  // variational bound

  PoolOptions all_d;
  all_d.all_distances = true;
  OperatorPool pool = build_topdown_pool(PoolId::xQZ, sites, all_d);
  Statevector h_mf = apply(h, mf.state);
  for (const auto& op : pool.operators)
    CHECK(std::abs(pool_gradient_cached(h_mf, op.op, mf.state)) <= 1e-8);

  // deterministic: a second run lands on the same energy
  MeanFieldResult again = mean_field(h, sites);
  CHECK(again.energy == doctest::Approx(mf.energy).epsilon(1e-10));
}

TEST_CASE("charge moments") {
  PauliSum q = charge_operator(2);
  Statevector vac = reference_state(2, ReferenceKind::staggered_vacuum);
  auto [m0, v0] = charge_moments(vac, q);
  CHECK(m0 == 0.0);
  CHECK(v0 == 0.0);

  GroundStateResult gs =
      ground_state(build_hamiltonian(preset_params(Preset::B, 2)),
                   GroundStateMethod::dense);
  auto [mg, vg] = charge_moments(gs.state, q);
  CHECK(std::abs(mg) < 1e-10);
  CHECK(vg >= -1e-12);

  // equal superposition of Q = +2 and Q = -2 sectors: mean 0, variance 4
  Statevector cat(4);
  cat.amplitudes()[0b0000] = 1.0 / std::sqrt(2.0);  // empty: Q = +2
  cat.amplitudes()[0b1111] = 1.0 / std::sqrt(2.0);  // full: Q = -2
  auto [mc, vc] = charge_moments(cat, q);
  CHECK(mc == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(vc == doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS(charge_moments(vac, PauliSum::single(1.0, "XIII")));
}

TEST_CASE("variance vanishes exactly inside one charge sector") {
  PauliSum q = charge_operator(2);
  // superpose two Q=0 basis states: 1010 and 0110
  Statevector psi(4);
  psi.amplitudes()[0b0101] = std::sqrt(0.3);
  psi.amplitudes()[0b0110] = std::sqrt(0.7);
  auto [mean, var] = charge_moments(psi, q);
  CHECK(std::abs(mean) < 1e-14);
  CHECK(std::abs(var) < 1e-14);
}
