#include "doctest.h"

#include <set>

#include "oracles.hpp"
#include "qmem/model.hpp"

using namespace qmem;

namespace {

// GF(2) rank of the stabilizer symplectic matrix, independent of the
// model's internal solver.
std::uint32_t gf2_rank(const std::vector<Pauli>& ops) {
  std::uint32_t n = ops.front().n_qubits();
  std::vector<std::vector<int>> rows;
  for (const auto& p : ops) {
    std::vector<int> r(2 * n, 0);
    for (std::uint32_t j = 0; j < n; ++j) {
      r[j] = p.x_bit(j);
      r[n + j] = p.z_bit(j);
    }
    rows.push_back(r);
  }
  std::uint32_t rank = 0;
  for (std::uint32_t col = 0; col < 2 * n; ++col) {
    std::uint32_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::uint32_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][col])
        for (std::uint32_t c = 0; c < 2 * n; ++c) rows[r][c] ^= rows[rank][c];
    ++rank;
  }
  return rank;
}

void check_logical_algebra(const StabilizerModel& m, const Pauli& x, const Pauli& z) {
  CHECK(!commutes(x, z));
  for (const auto& s : m.stabilizers) {
    CHECK(commutes(x, s));
    CHECK(commutes(z, s));
  }
}

}  // namespace

TEST_CASE("ring construction") {
  CHECK_THROWS_AS(build_ising_ring(2), std::invalid_argument);

  auto m = build_ising_ring(4);
  CHECK(m.stabilizers.size() == 4);
  CHECK(m.constraints.size() == 1);
  CHECK(m.constraints[0].size() == 4);
  CHECK(m.independent_basis.size() == 3);

  // product over the constraint is the identity with phase +1
  Pauli prod = Pauli::identity(4);
  for (auto i : m.constraints[0]) prod = multiply(prod, m.stabilizers[i]);
  CHECK(prod.is_identity());

  check_logical_algebra(m, m.logical("X"), m.logical("Z"));
  // X Y = i Z on the encoded qubit
  Pauli xy = multiply(m.logical("X"), m.logical("Y"));
  Pauli iz = m.logical("Z");
  iz.set_phase_pow(1);
  CHECK(xy == iz);

  auto m3 = build_ising_ring(3);
  for (const auto& s : m3.stabilizers) CHECK(commutes(m3.logical("Z"), s));
}

TEST_CASE("torus construction") {
  CHECK_THROWS_AS(build_kitaev_torus(1), std::invalid_argument);

  for (std::uint32_t k : {2u, 3u}) {
    auto m = build_kitaev_torus(k);
    CHECK(m.n_qubits == 2 * k * k);
    CHECK(m.stabilizers.size() == 2 * k * k);
    CHECK(m.independent_basis.size() == m.n_qubits - 2);
    for (const auto& s : m.stabilizers) CHECK(s.support_size() == 4);
    for (const auto& q : m.logicals) CHECK(q.support_size() == k);

    // stars and plaquettes overlap on 0 or 2 sites
    auto stars = m.sector_stabilizers(Sector::Star);
    auto plaqs = m.sector_stabilizers(Sector::Plaquette);
    CHECK(stars.size() == k * k);
    CHECK(plaqs.size() == k * k);
    for (auto s : stars) {
      for (auto p : plaqs) {
        auto sup_s = m.stabilizers[s].support();
        auto sup_p = m.stabilizers[p].support();
        std::set<std::uint32_t> ss(sup_s.begin(), sup_s.end());
        int shared = 0;
        for (auto j : sup_p) shared += ss.count(j);
        CHECK((shared == 0 || shared == 2));
        CHECK(commutes(m.stabilizers[s], m.stabilizers[p]));
      }
    }

    check_logical_algebra(m, m.logical("X1"), m.logical("Z1"));
    check_logical_algebra(m, m.logical("X2"), m.logical("Z2"));
    CHECK(commutes(m.logical("X1"), m.logical("Z2")));
    CHECK(commutes(m.logical("X2"), m.logical("Z1")));
    CHECK(commutes(m.logical("X1"), m.logical("X2")));
    CHECK(commutes(m.logical("Z1"), m.logical("Z2")));
  }
}

TEST_CASE("joint +1 eigenspace dimension from GF(2) rank") {
  auto ising = build_ising_ring(6);
  CHECK(gf2_rank(ising.stabilizers) == 5);  // logical dim 2^{6-5} = 2
  auto kitaev = build_kitaev_torus(2);
  CHECK(gf2_rank(kitaev.stabilizers) == 6);  // logical dim 2^{8-6} = 4

  // projector trace before normalization equals the eigenspace dimension
  oracle::CMat raw_i = oracle::CMat::Identity(1 << 6, 1 << 6);
  for (const auto& s : ising.stabilizers)
    raw_i = raw_i * 0.5 * (oracle::CMat::Identity(1 << 6, 1 << 6) + oracle::dense_fast(s));
  CHECK(std::abs(raw_i.trace() - 2.0) < 1e-9);
  oracle::CMat raw_k = oracle::CMat::Identity(1 << 8, 1 << 8);
  for (const auto& s : kitaev.stabilizers)
    raw_k = raw_k * 0.5 * (oracle::CMat::Identity(1 << 8, 1 << 8) + oracle::dense_fast(s));
  CHECK(std::abs(raw_k.trace() - 4.0) < 1e-9);
}

TEST_CASE("ground expectations") {
  auto m = build_kitaev_torus(2);
  for (const auto& s : m.stabilizers) {
    auto e = ground_expectation(m, s);
    CHECK(e.reducible);
    CHECK(e.value == 1.0);
  }
  CHECK(ground_expectation(m, Pauli::identity(8)).value == 1.0);

  auto ising = build_ising_ring(5);
  auto ex = ground_expectation(ising, Pauli::single(5, 2, 'X'));
  CHECK(!ex.reducible);
  CHECK(ex.value == 0.0);

  // agreement with the dense symmetric ground state on random monomials
  auto rng = oracle::test_rng(5);
  oracle::CMat rho0 = oracle::dense_ground_state(ising);
  for (int trial = 0; trial < 60; ++trial) {
    Pauli p = oracle::random_monomial(5, rng);
    auto got = ground_expectation(ising, p);
    std::complex<double> want = (rho0 * oracle::dense_fast(p)).trace();
    CHECK(std::abs(got.value - want.real()) < 1e-12);
    CHECK(std::abs(want.imag()) < 1e-12);
  }
}

TEST_CASE("ground expectation of stabilizer products is exactly 1") {
  auto m = build_kitaev_torus(3);
  auto rng = oracle::test_rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    Pauli prod = Pauli::identity(m.n_qubits);
    for (std::uint32_t i = 0; i < m.stabilizers.size(); ++i)
      if (rng() & 1) prod = multiply(prod, m.stabilizers[i]);
    auto e = ground_expectation(m, prod);
    CHECK(e.reducible);
    CHECK(e.value == 1.0);
  }
}

TEST_CASE("gibbs expectations match dense traces") {
  auto rng = oracle::test_rng(29);
  for (double beta : {0.3, 1.0, 2.5}) {
    auto ising = build_ising_ring(6);
    oracle::CMat rho = oracle::dense_gibbs(ising, beta);
    for (int trial = 0; trial < 60; ++trial) {
      Pauli p = oracle::random_monomial(6, rng);
      double got = gibbs_expectation(ising, p, beta);
      std::complex<double> want = (rho * oracle::dense_fast(p)).trace();
      CHECK(std::abs(got - want.real()) < 1e-13);
      CHECK(std::abs(want.imag()) < 1e-13);
    }
  }
  auto kitaev = build_kitaev_torus(2);
  oracle::CMat rho = oracle::dense_gibbs(kitaev, 0.7);
  for (int trial = 0; trial < 60; ++trial) {
    Pauli p = oracle::random_monomial(8, rng);
    double got = gibbs_expectation(kitaev, p, 0.7);
    std::complex<double> want = (rho * oracle::dense_fast(p)).trace();
    CHECK(std::abs(got - want.real()) < 1e-13);
  }
}

TEST_CASE("gibbs expectation of a stabilizer rises monotonically to 1") {
  auto m = build_kitaev_torus(2);
  const Pauli& s = m.stabilizers[5];
  double prev = 0;
  for (double beta : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    double v = gibbs_expectation(m, s, beta);
    CHECK(v > prev);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gibbs expectation validates beta") {
  auto m = build_ising_ring(4);
  CHECK_THROWS_AS(gibbs_expectation(m, m.stabilizers[0], 0.0), std::domain_error);
  CHECK_THROWS_AS(gibbs_expectation(m, m.stabilizers[0], -1.0), std::domain_error);
}

TEST_CASE("weighted couplings flow through the Gibbs formula") {
  std::vector<double> w = {0.5, 1.5, 2.0, 1.0};
  auto m = build_ising_ring(4, w);
  oracle::CMat rho = oracle::dense_gibbs(m, 0.8);
  auto rng = oracle::test_rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    Pauli p = oracle::random_monomial(4, rng);
    double got = gibbs_expectation(m, p, 0.8);
    std::complex<double> want = (rho * oracle::dense_fast(p)).trace();
    CHECK(std::abs(got - want.real()) < 1e-13);
  }
}

TEST_CASE("syndrome energies") {
  auto ising = build_ising_ring(4);
  SyndromeState vac{{Sector::Bond}, {{0, 0, 0, 0}}};
  CHECK(hamiltonian_energy(ising, vac) == -4.0);

  SyndromeState two{{Sector::Bond}, {{1, 1, 0, 0}}};
  CHECK(hamiltonian_energy(ising, two) == 0.0);

  SyndromeState odd{{Sector::Bond}, {{1, 0, 0, 0}}};
  CHECK_THROWS_AS(hamiltonian_energy(ising, odd), std::invalid_argument);

  auto kitaev = build_kitaev_torus(2);
  SyndromeState k_state{{Sector::Star, Sector::Plaquette},
                        {{1, 1, 0, 0}, {0, 1, 1, 0}}};
  CHECK(hamiltonian_energy(kitaev, k_state) == -8.0 + 8.0);

  // the dense spectrum contains exactly the syndrome energies
  oracle::CMat h = oracle::dense_hamiltonian(ising);
  Eigen::SelfAdjointEigenSolver<oracle::CMat> es(h);
  std::set<long> levels;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    levels.insert(std::lround(es.eigenvalues()(i)));
  CHECK(levels == std::set<long>{-4, 0, 4});
}

TEST_CASE("model description export") {
  auto m = build_kitaev_torus(2);
  std::string json = m.describe_json();
  CHECK(json.find("\"kind\":\"kitaev\"") != std::string::npos);
  CHECK(json.find("\"n_qubits\":8") != std::string::npos);
  CHECK(json.find("\"logicals\"") != std::string::npos);
}
