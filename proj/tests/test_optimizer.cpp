#include <doctest.h>

#include <cmath>
#include <random>

#include "schwadapt/model.hpp"
#include "schwadapt/optimizer.hpp"
#include "schwadapt/pools.hpp"

using namespace schwadapt;

namespace {

ObjectiveHandle make_handle(Preset preset, int sites) {
  return ObjectiveHandle(build_hamiltonian(preset_params(preset, sites)),
                         reference_state(sites, ReferenceKind::staggered_vacuum));
}

}  // namespace

TEST_CASE("zero angles reproduce the reference energy") {
  ObjectiveHandle handle = make_handle(Preset::A, 2);
  handle.append_step(generator(0, 1, true, 2));
  handle.append_step(generator(2, 1, true, 2));
  CHECK(handle.evaluate({0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(handle.objective_calls() == 1);
  CHECK_THROWS_AS(handle.evaluate({0.0}), DimensionError);
}

TEST_CASE("single coefficient-one string gives a 2pi-periodic energy") {
  ObjectiveHandle handle = make_handle(Preset::A, 1);
  PauliSum p(2);
  p.add(1.0, PauliString::from_letters("XY"));
  handle.append_step(p);
  for (double theta : {0.0, 0.4, 1.3, 2.9}) {
    double a = handle.evaluate({theta});
    double b = handle.evaluate({theta + 2 * M_PI});
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("commuting disjoint steps commute in the ansatz") {
  ObjectiveHandle ab = make_handle(Preset::B, 2);
  ab.append_step(generator(0, 1, true, 2));
  ab.append_step(generator(2, 1, true, 2));
  ObjectiveHandle ba = make_handle(Preset::B, 2);
  ba.append_step(generator(2, 1, true, 2));
  ba.append_step(generator(0, 1, true, 2));
  CHECK(ab.evaluate({0.3, -0.7}) == doctest::Approx(ba.evaluate({-0.7, 0.3})).epsilon(1e-12));
}

TEST_CASE("gradient components at zero equal the screening kernel") {
  ObjectiveHandle handle = make_handle(Preset::C, 3);
  std::vector<PauliSum> ops = {generator(0, 1, true, 3), generator(1, 3, true, 3),
                               generator(2, 1, true, 3)};
  for (const auto& op : ops) handle.append_step(op);
  std::vector<double> zeros(ops.size(), 0.0);
  auto grad = handle.analytic_gradient(zeros);
  const Statevector& ref = handle.reference();
  for (size_t j = 0; j < ops.size(); ++j)
    CHECK(grad[j] == pool_gradient(ref, ops[j], handle.hamiltonian()));
}

TEST_CASE("analytic gradient matches central finite differences") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> uni(-0.9, 0.9);
  ObjectiveHandle handle = make_handle(Preset::C, 3);
  OperatorPool pool = build_topdown_pool(PoolId::xQZ, 3);
  std::vector<double> thetas;
  for (int j = 0; j < 6; ++j) {
    handle.append_step(pool.operators[rng() % pool.size()].op);
    thetas.push_back(uni(rng));
  }
  auto grad = handle.analytic_gradient(thetas);
  const double h = 1e-5;
  for (size_t j = 0; j < thetas.size(); ++j) {
    auto tp = thetas, tm = thetas;
    tp[j] += h;
    tm[j] -= h;
    double fd = (handle.evaluate(tp) - handle.evaluate(tm)) / (2 * h);
    CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("fused evaluation is consistent and counts both calls") {
  ObjectiveHandle handle = make_handle(Preset::A, 2);
  handle.append_step(generator(0, 1, true, 2));
  std::vector<double> theta{0.37};
  std::vector<double> grad;
  long f0 = handle.objective_calls(), g0 = handle.gradient_calls();
  double e = handle.evaluate_with_gradient(theta, grad);
  CHECK(handle.objective_calls() == f0 + 1);
  CHECK(handle.gradient_calls() == g0 + 1);
  CHECK(e == doctest::Approx(handle.evaluate(theta)).epsilon(1e-13));
  CHECK(grad[0] == doctest::Approx(handle.analytic_gradient(theta)[0]).epsilon(1e-13));
}

TEST_CASE("minimize matches a golden-section scan on one parameter") {
  ObjectiveHandle handle = make_handle(Preset::A, 1);
  handle.append_step(generator(0, 1, true, 1));
  MinimizeResult res = minimize(handle, {0.0});
  CHECK(res.converged);

  // independent 1-D golden-section oracle
  ObjectiveHandle scan = make_handle(Preset::A, 1);
  scan.append_step(generator(0, 1, true, 1));
  auto f = [&](double t) { return scan.evaluate({t}); };
  double a = -M_PI, b = M_PI;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  while (b - a > 1e-10) {
    if (f(c) < f(d)) { b = d; d = c; c = b - gr * (b - a); }
    else { a = c; c = d; d = a + gr * (b - a); }
  }
  double theta_star = 0.5 * (a + b);
  CHECK(res.energy == doctest::Approx(f(theta_star)).epsilon(1e-8));
  CHECK(std::abs(res.thetas[0] - theta_star) < 1e-5);
}

TEST_CASE("an already-optimal start returns immediately") {
  ObjectiveHandle handle = make_handle(Preset::A, 1);
  handle.append_step(generator(0, 1, true, 1));
  MinimizeResult first = minimize(handle, {0.0});
  REQUIRE(first.converged);
  long f_before = handle.objective_calls();
  MinimizeResult again = minimize(handle, first.thetas);
  CHECK(again.converged);
  CHECK(again.iterations == 0);
  CHECK(handle.objective_calls() == f_before + 1);  // just the initial probe
}

TEST_CASE("BFGS solves a quadratic in about dim steps") {
  const int dim = 6;
  std::vector<double> center(dim), weight(dim);
  for (int i = 0; i < dim; ++i) {
    center[i] = 0.3 * i - 1.0;
    weight[i] = 1.0 + 0.5 * i;
  }
  FusedObjective quad = [&](const std::vector<double>& x, std::vector<double>& g) {
    g.assign(dim, 0.0);
    double f = 0.0;
    for (int i = 0; i < dim; ++i) {
      double d = x[i] - center[i];
      f += weight[i] * d * d;
      g[i] = 2.0 * weight[i] * d;
    }
    return f;
  };
  MinimizeResult res = minimize(quad, std::vector<double>(dim, 0.0));
  CHECK(res.converged);
  CHECK(res.iterations <= 4 * dim);  // allowance for the inexact search
  for (int i = 0; i < dim; ++i)
    CHECK(res.thetas[i] == doctest::Approx(center[i]).epsilon(1e-6));
}

TEST_CASE("the optimum never exceeds the starting energy") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> uni(-1.5, 1.5);
  ObjectiveHandle handle = make_handle(Preset::C, 2);
  OperatorPool pool = build_topdown_pool(PoolId::xxZ, 2);
  for (int j = 0; j < 4; ++j)
    handle.append_step(pool.operators[rng() % pool.size()].op);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> theta0 = {uni(rng), uni(rng), uni(rng), uni(rng)};
    double e0 = handle.evaluate(theta0);
    MinimizeResult res = minimize(handle, theta0);
    CHECK(res.energy <= e0 + 1e-12);
  }
}
