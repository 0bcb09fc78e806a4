#include <doctest.h>

#include <cstdio>
#include <random>

#include "dense_reference.hpp"
#include "schwadapt/model.hpp"
#include "schwadapt/pools.hpp"
#include "schwadapt/state.hpp"

using namespace schwadapt;

namespace {

Statevector rand_state(std::mt19937_64& rng, uint32_t n, bool real_only = false) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Statevector psi(n);
  for (auto& a : psi.amplitudes())
    a = real_only ? cplx{uni(rng), 0.0} : cplx{uni(rng), uni(rng)};
  psi.normalize();
  return psi;
}

double dense_diff(const Statevector& a, const Eigen::VectorXcd& b) {
  return (dense_ref::vector_of(a) - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("apply matches the dense oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 1 + rng() % 5;
    uint64_t mask = (uint64_t{1} << n) - 1;
    PauliSum s(n);
    for (int t = 0; t < 3; ++t)
      s.add(cplx{uni(rng), uni(rng)}, PauliString(n, rng() & mask, rng() & mask));
    Statevector psi = rand_state(rng, n);
    Statevector out = apply(s, psi);
    Eigen::VectorXcd expected = dense_ref::matrix_of(s) * dense_ref::vector_of(psi);
    CHECK(dense_diff(out, expected) < 1e-13);
  }
}

TEST_CASE("exponential basics") {
  Statevector zero = Statevector::basis_state(1, 0);
  PauliSum x = PauliSum::single(1.0, "X");

  Statevector same = apply_pauli_exponential(zero, x, 0.0);
  CHECK(dense_diff(same, dense_ref::vector_of(zero)) == 0.0);

  // exp(-i pi/2 X)|0> = -i|1>
  Statevector rot = apply_pauli_exponential(zero, x, M_PI / 2);
  CHECK(std::abs(rot.amplitude(1) - cplx{0.0, -1.0}) < 1e-14);
  CHECK(std::abs(rot.amplitude(0)) < 1e-14);

  PauliSum nonherm = PauliSum::single(cplx{0.0, 1.0}, "X");
  CHECK_THROWS(apply_pauli_exponential(zero, nonherm, 0.3));
}

TEST_CASE("multi-term exponentials match the dense matrix exponential") {
  std::mt19937_64 rng(37);
  // d = 3 volume at L = 3: mutually commuting terms; d = 1 volume: not.
  OperatorPool lqz = build_topdown_pool(PoolId::LQZ, 3);
  const PauliSum* vol_d1 = nullptr;
  const PauliSum* vol_d3 = nullptr;
  for (const auto& op : lqz.operators) {
    if (op.kind != OperatorKind::volume) continue;
    if (op.distance == 1) vol_d1 = &op.op;
    if (op.distance == 3) vol_d3 = &op.op;
  }
  REQUIRE(vol_d1 != nullptr);
  REQUIRE(vol_d3 != nullptr);
  CHECK_FALSE(vol_d1->terms_mutually_commute());
  CHECK(vol_d3->terms_mutually_commute());

  for (double theta : {0.17, -0.9, 2.5}) {
    for (const PauliSum* op : {vol_d1, vol_d3}) {
      Statevector psi = rand_state(rng, 6);
      Statevector out = apply_pauli_exponential(psi, *op, theta);
      Eigen::MatrixXcd u =
          dense_ref::expm_herm(dense_ref::matrix_of(*op), theta);
      CHECK(dense_diff(out, u * dense_ref::vector_of(psi)) < 1e-10);
      CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("trotter mode is the labeled first-order product") {
  std::mt19937_64 rng(41);
  OperatorPool lqz = build_topdown_pool(PoolId::LQZ, 2);
  const PauliSum* vol = nullptr;
  for (const auto& op : lqz.operators)
    if (op.kind == OperatorKind::volume && op.distance == 1) vol = &op.op;
  REQUIRE(vol != nullptr);
  Statevector psi = rand_state(rng, 4);
  const double theta = 0.8;
  Statevector trotter = apply_pauli_exponential(psi, *vol, theta, ExpMode::trotter1);
  // product over terms in canonical order
  Eigen::VectorXcd expected = dense_ref::vector_of(psi);
  for (const auto& t : vol->terms()) {
    PauliSum single = PauliSum::single(t.coeff, t.string);
    expected = dense_ref::expm_herm(dense_ref::matrix_of(single), theta) * expected;
  }
  CHECK(dense_diff(trotter, expected) < 1e-12);
  // and it differs from the exact action for non-commuting terms
  Statevector exact = apply_pauli_exponential(psi, *vol, theta, ExpMode::exact);
  CHECK(dense_diff(exact, expected) > 1e-4);
}

TEST_CASE("unitarity and composition") {
  std::mt19937_64 rng(43);
  PauliSum g(3);
  g.add(0.5, PauliString::from_letters("XZY"));
  for (double t1 : {0.3, -1.2}) {
    Statevector psi = rand_state(rng, 3);
    Statevector a = apply_pauli_exponential(psi, g, t1);
    CHECK(std::abs(a.norm() - 1.0) < 1e-13);
    Statevector b = apply_pauli_exponential(a, g, 0.7);
    Statevector c = apply_pauli_exponential(psi, g, t1 + 0.7);
    CHECK(dense_diff(b, dense_ref::vector_of(c)) < 1e-13);
  }
}

TEST_CASE("charge is conserved by Q-commuting generators") {
  std::mt19937_64 rng(47);
  const int sites = 3;
  PauliSum q = charge_operator(sites);
  PauliSum g = generator(1, 3, true, sites);
  REQUIRE(commutator(g, q).empty());
  Statevector psi = rand_state(rng, 6);
  double before = expectation(psi, q);
  Statevector evolved = apply_pauli_exponential(psi, g, 0.83);
  CHECK(std::abs(expectation(evolved, q) - before) < 1e-12);
}

TEST_CASE("time-reversal-odd generators preserve real wavefunctions") {
  std::mt19937_64 rng(53);
  const int sites = 3;
  Statevector psi = rand_state(rng, 6, /*real_only=*/true);
  // single-string and commuting-pair fast paths stay exactly real
  PauliSum g = generator(0, 3, true, sites);
  Statevector evolved = apply_pauli_exponential(psi, g, 0.77);
  for (const auto& a : evolved.amplitudes()) CHECK(a.imag() == 0.0);
  // the Krylov path stays real to tolerance
  OperatorPool lqz = build_topdown_pool(PoolId::LQZ, sites);
  const PauliSum* vol_d1 = nullptr;
  for (const auto& op : lqz.operators)
    if (op.kind == OperatorKind::volume && op.distance == 1) vol_d1 = &op.op;
  REQUIRE(vol_d1 != nullptr);
  Statevector krylov = apply_pauli_exponential(psi, *vol_d1, 0.77);
  for (const auto& a : krylov.amplitudes()) CHECK(std::abs(a.imag()) < 1e-12);
}

TEST_CASE("expectation values") {
  Statevector vac = reference_state(2, ReferenceKind::staggered_vacuum);
  CHECK(expectation(vac, charge_operator(2)) == 0.0);
  PauliSum h = build_hamiltonian(preset_params(Preset::A, 2));
  CHECK(expectation(vac, h) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(expectation(vac, PauliSum::identity(4)) == doctest::Approx(1.0));
  CHECK_THROWS(expectation(vac, PauliSum::single(cplx{0.0, 1.0}, "XIII")));
}

TEST_CASE("pool gradient is the energy derivative at zero") {
  // T-even operator on a real state: exactly zero
  std::mt19937_64 rng(59);
  Statevector real_psi = rand_state(rng, 2, true);
  PauliSum h2 = build_hamiltonian(preset_params(Preset::A, 1));
  PauliSum t_even(2);
  t_even.add(0.5, PauliString::from_letters("XX"));
  t_even.add(0.5, PauliString::from_letters("YY"));
  CHECK(pool_gradient(real_psi, t_even, h2) == 0.0);

  // operator commuting with H: zero
  CHECK(std::abs(pool_gradient(real_psi, h2, h2)) < 1e-13);

  // hopping generator on |10>: matches a central difference on the dense
  // energy scan
  Statevector ref = Statevector::basis_state(2, 0b01);
  PauliSum g(2);
  g.add(0.5, PauliString::from_letters("XY"));
  g.add(-0.5, PauliString::from_letters("YX"));
  double grad = pool_gradient(ref, g, h2);
  Eigen::MatrixXcd hm = dense_ref::matrix_of(h2), gm = dense_ref::matrix_of(g);
  Eigen::VectorXcd v = dense_ref::vector_of(ref);
  const double h_step = 1e-5;
  auto energy_at = [&](double theta) {
    Eigen::VectorXcd w = dense_ref::expm_herm(gm, theta) * v;
    return (w.adjoint() * hm * w)(0, 0).real();
  };
  double fd = (energy_at(h_step) - energy_at(-h_step)) / (2 * h_step);
  CHECK(grad == doctest::Approx(fd).epsilon(1e-8));
  CHECK(grad == doctest::Approx(1.0).epsilon(1e-8));  // known value
}

TEST_CASE("ground state solvers agree and sit in the zero-charge sector") {
  const double e0_l1_a = -0.7006917104060306;  // dense 4x4 eigensolve
  GroundStateResult d1 =
      ground_state(build_hamiltonian(preset_params(Preset::A, 1)),
                   GroundStateMethod::dense);
  CHECK(d1.energy == doctest::Approx(e0_l1_a).epsilon(1e-12));

  for (int sites : {2, 3}) {
    for (Preset preset : {Preset::A, Preset::B, Preset::C}) {
      PauliSum h = build_hamiltonian(preset_params(preset, sites));
      GroundStateResult dense = ground_state(h, GroundStateMethod::dense);
      GroundStateResult lanczos = ground_state(h, GroundStateMethod::lanczos);
      CHECK(std::abs(dense.energy - lanczos.energy) < 1e-10);
      CHECK(dense.residual < 1e-10 * std::max(1.0, h.one_norm()));
      CHECK(lanczos.residual < 1e-10 * std::max(1.0, h.one_norm()));
      CHECK(fidelity(dense.state, lanczos.state) > 1.0 - 1e-10);
      PauliSum q = charge_operator(sites);
      CHECK(std::abs(expectation(dense.state, q)) < 1e-10);
      CHECK(std::abs(expectation(lanczos.state, q)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(ground_state(PauliSum::identity(15), GroundStateMethod::dense),
                  CapacityError);
}

TEST_CASE("fidelity") {
  Statevector a = Statevector::basis_state(2, 1);
  Statevector b = Statevector::basis_state(2, 2);
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(a, b) == doctest::Approx(0.0));
}

TEST_CASE("statevector guards and amplitude dump") {
  CHECK_THROWS_AS(Statevector(25), CapacityError);
  Statevector psi = Statevector::basis_state(3, 5);
  std::string path = "/tmp/schwadapt_amp_dump.bin";
  psi.dump_amplitudes(path);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char magic[4];
  REQUIRE(std::fread(magic, 1, 4, f) == 4);
  CHECK(std::string(magic, 4) == "SVEC");
  std::fclose(f);
  std::remove(path.c_str());
  CHECK_THROWS_AS(Statevector(17).dump_amplitudes("/tmp/too_big.bin"),
                  CapacityError);
}

TEST_CASE("identity terms contribute a global phase to exponentials") {
  std::mt19937_64 rng(83);
  PauliSum op(2);
  op.add(0.7, PauliString::identity(2));
  op.add(0.5, PauliString::from_letters("XY"));
  REQUIRE(op.terms_mutually_commute());
  Statevector psi = rand_state(rng, 2);
  const double theta = 0.9;
  Statevector out = apply_pauli_exponential(psi, op, theta);
  Eigen::MatrixXcd u = dense_ref::expm_herm(dense_ref::matrix_of(op), theta);
  CHECK(dense_diff(out, u * dense_ref::vector_of(psi)) < 1e-13);
  CHECK(std::abs(out.norm() - 1.0) < 1e-13);
}

TEST_CASE("exponentials act linearly on unnormalized vectors") {
  // gradient sweeps evolve H|psi>, whose norm is far from one
  std::mt19937_64 rng(89);
  OperatorPool lqz = build_topdown_pool(PoolId::LQZ, 3);
  const PauliSum* vol_d1 = nullptr;
  for (const auto& op : lqz.operators)
    if (op.kind == OperatorKind::volume && op.distance == 1) vol_d1 = &op.op;
  REQUIRE(vol_d1 != nullptr);
  Statevector psi = rand_state(rng, 6);
  for (auto& a : psi.amplitudes()) a *= 3.7;
  Statevector out = apply_pauli_exponential(psi, *vol_d1, 0.6);
  Eigen::MatrixXcd u = dense_ref::expm_herm(dense_ref::matrix_of(*vol_d1), 0.6);
  CHECK(dense_diff(out, u * dense_ref::vector_of(psi)) < 1e-9);
  CHECK(out.norm() == doctest::Approx(psi.norm()).epsilon(1e-12));
}
