#include "doctest.h"

#include "oracles.hpp"
#include "qmem/pauli.hpp"

using namespace qmem;

namespace {

Pauli monomial_from_index(std::uint32_t n, std::uint64_t masks, std::uint8_t phase) {
  Pauli p(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    if ((masks >> j) & 1u) p.set_x(j, true);
    if ((masks >> (n + j)) & 1u) p.set_z(j, true);
  }
  p.set_phase_pow(phase);
  return p;
}

}  // namespace

TEST_CASE("single-site products follow the cyclic rules") {
  const std::uint32_t n = 2;
  Pauli x = Pauli::single(n, 0, 'X');
  Pauli y = Pauli::single(n, 0, 'Y');
  Pauli z = Pauli::single(n, 0, 'Z');

  CHECK(multiply(x, y) == [&] { Pauli p = z; p.set_phase_pow(1); return p; }());
  CHECK(multiply(y, z) == [&] { Pauli p = x; p.set_phase_pow(1); return p; }());
  CHECK(multiply(z, x) == [&] { Pauli p = y; p.set_phase_pow((y.phase_pow() + 1) & 3); return p; }());
  CHECK(multiply(x, x).is_identity());
  CHECK(multiply(y, y).is_identity());
}

TEST_CASE("identity is neutral and adjoints invert") {
  auto rng = oracle::test_rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Pauli p = oracle::random_raw_monomial(6, rng);
    CHECK(multiply(Pauli::identity(6), p) == p);
    CHECK(multiply(p, Pauli::identity(6)) == p);
    CHECK(multiply(p, p.adjoint()).is_identity());
  }
}

TEST_CASE("multiply matches the literal Kronecker oracle exhaustively on 2 qubits") {
  const std::uint32_t n = 2;
  for (std::uint64_t ma = 0; ma < 16; ++ma) {
    for (std::uint64_t mb = 0; mb < 16; ++mb) {
      Pauli a = monomial_from_index(n, ma, static_cast<std::uint8_t>(ma % 4));
      Pauli b = monomial_from_index(n, mb, static_cast<std::uint8_t>(mb % 3));
      Pauli c = multiply(a, b);
      oracle::CMat prod = oracle::dense_kron(a) * oracle::dense_kron(b);
      CHECK((prod - oracle::dense_kron(c)).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
      CHECK(commutes(a, b) ==
            ((oracle::dense_kron(a) * oracle::dense_kron(b) -
              oracle::dense_kron(b) * oracle::dense_kron(a)).cwiseAbs().maxCoeff() < 1e-12));
    }
  }
}

TEST_CASE("anticommutation dichotomy") {
  auto rng = oracle::test_rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Pauli a = oracle::random_raw_monomial(8, rng);
    Pauli b = oracle::random_raw_monomial(8, rng);
    Pauli ab = multiply(a, b);
    Pauli ba = multiply(b, a);
    if (commutes(a, b)) {
      CHECK(ab == ba);
    } else {
      Pauli neg = ba;
      neg.set_phase_pow((ba.phase_pow() + 2) & 3);
      CHECK(ab == neg);
    }
  }
}

TEST_CASE("associativity") {
  auto rng = oracle::test_rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Pauli a = oracle::random_raw_monomial(7, rng);
    Pauli b = oracle::random_raw_monomial(7, rng);
    Pauli c = oracle::random_raw_monomial(7, rng);
    CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
  }
}

TEST_CASE("conjugate_sign is +1 exactly when the operators commute") {
  auto rng = oracle::test_rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Pauli q = oracle::random_raw_monomial(6, rng);
    std::uint32_t site = rng() % 6;
    char axis = "XYZ"[rng() % 3];
    Pauli u = Pauli::single(6, site, axis);
    int g = conjugate_sign(u, q);
    CHECK(g == (commutes(u, q) ? 1 : -1));
    // u q u^dagger = g q as dense matrices
    oracle::CMat lhs = oracle::dense_kron(u) * oracle::dense_kron(q) *
                       oracle::dense_kron(u).adjoint();
    oracle::CMat rhs = static_cast<double>(g) * oracle::dense_kron(q);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(conjugate_sign(Pauli::single(3, 0, 'X'), Pauli::identity(3)) == 1);
}

TEST_CASE("size mismatch raises a dimension error") {
  Pauli a(3), b(4);
  CHECK_THROWS_AS(multiply(a, b), std::invalid_argument);
  CHECK_THROWS_AS(commutes(a, b), std::invalid_argument);
}

TEST_CASE("string form round-trips and keeps 1-based sites") {
  Pauli p = Pauli::from_string(8, "X1 Z5 Y7");
  CHECK(p.x_bit(0));
  CHECK(p.z_bit(4));
  CHECK(p.x_bit(6));
  CHECK(p.z_bit(6));
  CHECK(p.str() == "X1 Z5 Y7");
  CHECK(Pauli::from_string(8, p.str()) == p);

  Pauli m = Pauli::from_string(4, "- Y2");
  CHECK(m.str() == "- Y2");
  CHECK(Pauli::from_string(4, m.str()) == m);
  CHECK(Pauli::from_string(2, "I").is_identity());
  CHECK(Pauli::identity(5).str() == "I");

  CHECK_THROWS_AS(Pauli::from_string(4, "X9"), std::invalid_argument);
  CHECK_THROWS_AS(Pauli::from_string(4, "Q1"), std::invalid_argument);
  CHECK_THROWS_AS(Pauli::from_string(4, "X1 Z1"), std::invalid_argument);
}

TEST_CASE("hermiticity bookkeeping") {
  CHECK(Pauli::single(2, 0, 'Y').hermitian());
  CHECK(Pauli::from_string(3, "X1 Y2 Z3").hermitian());
  Pauli p = Pauli::from_string(3, "i X1");
  CHECK(!p.hermitian());
  CHECK(p.adjoint().adjoint() == p);
}
