#include <doctest.h>

#include <random>

#include "dense_reference.hpp"
#include "schwadapt/pauli.hpp"

using namespace schwadapt;

namespace {

PauliString rand_string(std::mt19937_64& rng, uint32_t n) {
  uint64_t mask = (uint64_t{1} << n) - 1;
  return PauliString(n, rng() & mask, rng() & mask);
}

PauliSum rand_sum(std::mt19937_64& rng, uint32_t n, int terms) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  PauliSum s(n);
  for (int t = 0; t < terms; ++t)
    s.add(cplx{uni(rng), uni(rng)}, rand_string(rng, n));
  return s;
}

}  // namespace

TEST_CASE("string masks, weight, y count, support") {
  PauliString s = PauliString::from_letters("XZZY");
  CHECK(s.weight() == 4);
  CHECK(s.y_count() == 1);
  CHECK(s.support() == std::vector<uint32_t>{0, 1, 2, 3});
  CHECK(s.letters() == "XZZY");

  CHECK(PauliString::from_letters("IXYI").support() == std::vector<uint32_t>{1, 2});
  CHECK(PauliString::identity(5).support().empty());
  CHECK(PauliString::from_letters("IXYI").y_count() == 1);
  CHECK_THROWS_AS(PauliString(2, 0b100, 0), DimensionError);
}

TEST_CASE("single-qubit product table") {
  auto term = [](cplx c, const std::string& s) {
    return PauliTerm{c, PauliString::from_letters(s)};
  };
  // X*Y = iZ
  PauliTerm xy = multiply(term(1.0, "X"), term(1.0, "Y"));
  CHECK(xy.string == PauliString::from_letters("Z"));
  CHECK(xy.coeff == cplx{0.0, 1.0});
  // involution
  PauliTerm sq = multiply(term(1.0, "XX"), term(1.0, "XX"));
  CHECK(sq.string.is_identity());
  CHECK(sq.coeff == cplx{1.0, 0.0});
  // (X0 Z1)(Z0 Z1) = -i Y0
  PauliTerm p = multiply(term(1.0, "XZ"), term(1.0, "ZZ"));
  CHECK(p.string == PauliString::from_letters("YI"));
  CHECK(p.coeff == cplx{0.0, -1.0});
  CHECK_THROWS_AS(multiply(term(1.0, "X"), term(1.0, "XX")), DimensionError);
}

TEST_CASE("products match the dense oracle on random pairs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    uint32_t n = 1 + rng() % 6;
    PauliTerm a{1.0, rand_string(rng, n)}, b{1.0, rand_string(rng, n)};
    PauliTerm ab = multiply(a, b);
    Eigen::MatrixXcd lhs = dense_ref::kron_string(a.string.letters()) *
                           dense_ref::kron_string(b.string.letters());
    Eigen::MatrixXcd rhs = ab.coeff * dense_ref::kron_string(ab.string.letters());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
    // associativity
    PauliTerm c{1.0, rand_string(rng, n)};
    PauliTerm l = multiply(multiply(a, b), c);
    PauliTerm r = multiply(a, multiply(b, c));
    CHECK(l.string == r.string);
    CHECK(std::abs(l.coeff - r.coeff) < 1e-14);
  }
}

TEST_CASE("term merging and pruning") {
  PauliSum s(2);
  s.add(0.5, PauliString::from_letters("XY"));
  s.add(cplx{0.25, 0.0}, PauliString::from_letters("XY"));
  CHECK(s.size() == 1);
  CHECK(s.coefficient(PauliString::from_letters("XY")) == cplx{0.75, 0.0});
  s.add(-0.75, PauliString::from_letters("XY"));
  CHECK(s.empty());
}

TEST_CASE("commutator basics") {
  PauliSum x = PauliSum::single(1.0, "X");
  PauliSum y = PauliSum::single(1.0, "Y");
  PauliSum c = commutator(x, y);
  CHECK(c.size() == 1);
  CHECK(c.coefficient(PauliString::from_letters("Z")) == cplx{0.0, 2.0});

  PauliSum zz = PauliSum::single(1.0, "ZZ");
  CHECK(commutator(zz, zz).empty());
}

TEST_CASE("commutator matches dense oracle") {
  PauliSum a(2);
  a.add(1.0, PauliString::from_letters("XX"));
  a.add(1.0, PauliString::from_letters("YY"));
  PauliSum b = PauliSum::single(1.0, "ZI");
  Eigen::MatrixXcd ma = dense_ref::matrix_of(a), mb = dense_ref::matrix_of(b);
  Eigen::MatrixXcd expected = ma * mb - mb * ma;
  CHECK((dense_ref::matrix_of(commutator(a, b)) - expected).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("commutator antisymmetry and Jacobi identity, dense-checked") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 2 + rng() % 3;
    PauliSum a = rand_sum(rng, n, 3), b = rand_sum(rng, n, 3),
             c = rand_sum(rng, n, 2);
    PauliSum ab = commutator(a, b), ba = commutator(b, a);
    CHECK(dense_ref::matrix_of(ab + ba).cwiseAbs().maxCoeff() < 1e-12);
    PauliSum jacobi = commutator(a, commutator(b, c)) +
                      commutator(b, commutator(c, a)) +
                      commutator(c, commutator(a, b));
    CHECK(dense_ref::matrix_of(jacobi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("time-reversal parity classification") {
  PauliSum odd(2);
  odd.add(0.5, PauliString::from_letters("XY"));
  odd.add(-0.5, PauliString::from_letters("YX"));
  CHECK(is_time_reversal_odd(odd));

  PauliSum even(2);
  even.add(0.5, PauliString::from_letters("XX"));
  even.add(0.5, PauliString::from_letters("YY"));
  CHECK_FALSE(is_time_reversal_odd(even));

  CHECK(is_time_reversal_odd(PauliSum::single(1.0, "XZZY")));
}

TEST_CASE("odd-Y sums with real coefficients are purely imaginary Hermitian") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 2 + rng() % 3;
    PauliSum s(n);
    for (int t = 0; t < 6 || s.empty(); ++t) {
      PauliString str = rand_string(rng, n);
      if (str.y_count() % 2 == 1) s.add(uni(rng), str);
    }
    REQUIRE(is_time_reversal_odd(s));
    Eigen::MatrixXcd m = to_matrix(s);
    CHECK(m.real().cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("dense materialization") {
  Eigen::MatrixXcd z = to_matrix(PauliSum::single(1.0, "Z"));
  CHECK(z(0, 0) == cplx{1.0, 0.0});
  CHECK(z(1, 1) == cplx{-1.0, 0.0});
  CHECK(z(0, 1) == cplx{0.0, 0.0});

  Eigen::MatrixXcd x = to_matrix(PauliSum::single(1.0, "X"));
  CHECK(x(0, 1) == cplx{1.0, 0.0});
  CHECK(x(1, 0) == cplx{1.0, 0.0});

  PauliSum g(2);
  g.add(0.5, PauliString::from_letters("XY"));
  g.add(-0.5, PauliString::from_letters("YX"));
  Eigen::MatrixXcd m = to_matrix(g);
  CHECK((m + m.transpose()).cwiseAbs().maxCoeff() < 1e-14);  // antisymmetric
  CHECK(m.real().cwiseAbs().maxCoeff() < 1e-14);             // purely imaginary
  CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);    // Hermitian

  CHECK_THROWS_AS(to_matrix(PauliSum::identity(15)), CapacityError);
}

TEST_CASE("dense materialization matches the independent Kronecker oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    uint32_t n = 1 + rng() % 5;
    PauliSum s = rand_sum(rng, n, 4);
    CHECK((to_matrix(s) - dense_ref::matrix_of(s)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("hermiticity detection agrees with the dense conjugate transpose") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    uint32_t n = 1 + rng() % 4;
    bool real_coeffs = trial % 2 == 0;
    PauliSum s(n);
    for (int t = 0; t < 3; ++t)
      s.add(real_coeffs ? cplx{uni(rng), 0.0} : cplx{uni(rng), uni(rng)},
            rand_string(rng, n));
    if (s.empty()) continue;
    Eigen::MatrixXcd m = dense_ref::matrix_of(s);
    bool dense_hermitian = (m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12;
    CHECK(s.is_hermitian() == dense_hermitian);
  }
}

TEST_CASE("text serialization round trip") {
  PauliSum s(4);
  s.add(0.5, PauliString::from_letters("XZZY"));
  s.add(cplx{0.0, -0.25}, PauliString::from_letters("IIXI"));
  std::string text = to_text(s);
  CHECK(text.find("0.5 0 XZZY") != std::string::npos);
  PauliSum back = sum_from_text(text, 4);
  CHECK(back == s);
  CHECK(serialize(back) == serialize(s));
  CHECK_THROWS(sum_from_text("0.5 0 XZ", 4));
  CHECK_THROWS(sum_from_text("bogus line", 2));
}

TEST_CASE("embedding into a larger register") {
  PauliString t = PauliString::from_letters("XYZZ");
  CHECK(t.embedded(6, 1).letters() == "IXYZZI");
  CHECK_THROWS_AS(t.embedded(5, 3), DimensionError);
}
