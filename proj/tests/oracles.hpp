#pragma once

// Dense-matrix reference implementations used only by the test suites.
// Everything here is built from per-site 2x2 matrices and textbook
// formulas, independent of the symbolic Pauli path under test.

#include <Eigen/Dense>
#include <bit>
#include <complex>
#include <random>
#include <vector>

#include "qmem/davies.hpp"
#include "qmem/model.hpp"
#include "qmem/pauli.hpp"
#include "qmem/pauli_poly.hpp"

namespace oracle {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using qmem::Pauli;
using qmem::PauliPoly;
using qmem::StabilizerModel;

inline CMat site_matrix(bool x, bool z) {
  CMat m(2, 2);
  m.setZero();
  if (!x && !z) { m(0, 0) = 1; m(1, 1) = 1; }
  else if (x && !z) { m(0, 1) = 1; m(1, 0) = 1; }
  else if (!x && z) { m(0, 0) = 1; m(1, 1) = -1; }
  else { m(1, 0) = 1; m(0, 1) = -1; }  // X * Z
  return m;
}

// Literal Kronecker construction, qubit 0 = least significant basis bit.
inline CMat dense_kron(const Pauli& p) {
  const std::uint32_t n = p.n_qubits();
  CMat acc(1, 1);
  acc(0, 0) = p.phase();
  for (std::uint32_t j = n; j-- > 0;) {
    CMat s = site_matrix(p.x_bit(j), p.z_bit(j));
    CMat next(acc.rows() * 2, acc.cols() * 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        next.block(r * acc.rows(), c * acc.cols(), acc.rows(), acc.cols()) =
            s(r, c) * acc;
    acc = std::move(next);
  }
  return acc;
}

// Same operator through the signed-permutation closed form; O(2^n).
inline CMat dense_fast(const Pauli& p) {
  const std::uint32_t n = p.n_qubits();
  const std::uint64_t dim = std::uint64_t{1} << n;
  std::uint64_t xm = 0, zm = 0;
  for (std::uint32_t j = 0; j < n; ++j) {
    if (p.x_bit(j)) xm |= std::uint64_t{1} << j;
    if (p.z_bit(j)) zm |= std::uint64_t{1} << j;
  }
  CMat m = CMat::Zero(dim, dim);
  std::complex<double> ph = p.phase();
  for (std::uint64_t col = 0; col < dim; ++col) {
    double sign = (std::popcount(col & zm) & 1) ? -1.0 : 1.0;
    m(col ^ xm, col) = ph * sign;
  }
  return m;
}

inline CMat dense_poly(const PauliPoly& poly) {
  const std::uint64_t dim = std::uint64_t{1} << poly.n_qubits();
  CMat acc = CMat::Zero(dim, dim);
  for (const auto& [k, c] : poly.terms())
    acc += c * dense_fast(poly.to_pauli(k));
  return acc;
}

inline PauliPoly poly_from_dense(const CMat& m, std::uint32_t n) {
  PauliPoly out(n);
  const double dim = static_cast<double>(std::uint64_t{1} << n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    for (std::uint64_t z = 0; z < (std::uint64_t{1} << n); ++z) {
      Pauli p(n);
      for (std::uint32_t j = 0; j < n; ++j) {
        if ((x >> j) & 1u) p.set_x(j, true);
        if ((z >> j) & 1u) p.set_z(j, true);
      }
      std::complex<double> c = (dense_fast(p).adjoint() * m).trace() / dim;
      if (std::abs(c) > 0) out.add_term(PauliPoly::key_of(p), c);
    }
  }
  return out;
}

inline CMat dense_hamiltonian(const StabilizerModel& m) {
  const std::uint64_t dim = std::uint64_t{1} << m.n_qubits;
  CMat h = CMat::Zero(dim, dim);
  for (std::size_t k = 0; k < m.stabilizers.size(); ++k)
    h -= m.weights[k] * dense_fast(m.stabilizers[k]);
  return h;
}

// exp(-beta H)/Z from the commuting product formula.
inline CMat dense_gibbs(const StabilizerModel& m, double beta) {
  const std::uint64_t dim = std::uint64_t{1} << m.n_qubits;
  CMat rho = CMat::Identity(dim, dim);
  for (std::size_t k = 0; k < m.stabilizers.size(); ++k) {
    double J = m.weights[k];
    rho = rho * (std::cosh(beta * J) * CMat::Identity(dim, dim) +
                 std::sinh(beta * J) * dense_fast(m.stabilizers[k]));
  }
  rho /= rho.trace();
  return rho;
}

// Normalized projector onto the joint +1 eigenspace of all stabilizers.
inline CMat dense_ground_state(const StabilizerModel& m) {
  const std::uint64_t dim = std::uint64_t{1} << m.n_qubits;
  CMat p = CMat::Identity(dim, dim);
  for (const auto& s : m.stabilizers)
    p = p * 0.5 * (CMat::Identity(dim, dim) + dense_fast(s));
  p /= p.trace();
  return p;
}

struct DenseChannel {
  CMat op;      // S(omega)
  double rate;  // h(omega)
};

// Jump operators from the projection formulas, with dense arithmetic.
inline std::vector<DenseChannel> dense_channels(const StabilizerModel& m,
                                                const qmem::DaviesJumpSet& jumps,
                                                const qmem::SpectralFunction& h) {
  const std::uint64_t dim = std::uint64_t{1} << m.n_qubits;
  std::vector<DenseChannel> out;
  for (const auto& f : jumps.families) {
    CMat sa = dense_fast(m.stabilizers[f.stabs[0]]);
    CMat sb = dense_fast(m.stabilizers[f.stabs[1]]);
    CMat id = CMat::Identity(dim, dim);
    CMat p_minus = 0.25 * (id + sa) * (id + sb);
    CMat p_zero = 0.5 * (id - sa * sb);
    CMat u = dense_fast(Pauli::single(m.n_qubits, f.site, f.axis));
    CMat a = p_minus * u;
    out.push_back({a, h.at(f.omega)});                    // lowering
    out.push_back({a.adjoint(), h.at(-f.omega)});         // raising
    out.push_back({p_zero * u, h.at(0.0)});               // dephasing
  }
  return out;
}

// Textbook Heisenberg-picture generator:
//   L(X) = i[H, X] + sum_c rate_c (S_c^dag X S_c - (1/2){S_c^dag S_c, X}).
inline CMat dense_generator_apply(const CMat& h_sys,
                                  const std::vector<DenseChannel>& channels,
                                  const CMat& x, bool include_hamiltonian = true) {
  std::complex<double> i_unit(0, 1);
  CMat out = CMat::Zero(x.rows(), x.cols());
  if (include_hamiltonian) out = i_unit * (h_sys * x - x * h_sys);
  for (const auto& c : channels) {
    CMat sdag_s = c.op.adjoint() * c.op;
    out += c.rate * (c.op.adjoint() * x * c.op -
                     0.5 * (sdag_s * x + x * sdag_s));
  }
  return out;
}

// Dense commutant dimension: kernel of sum_a C_a^dag C_a on vectorized
// operator space, with C_a X = A_a X - X A_a.
inline std::int64_t dense_commutant_dimension(const std::vector<CMat>& ops) {
  const Eigen::Index d = ops.front().rows();
  const Eigen::Index dd = d * d;
  CMat acc = CMat::Zero(dd, dd);
  for (const auto& a : ops) {
    CMat c = CMat::Zero(dd, dd);
    // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X), column-major vec
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 0; k < d; ++k) {
          c(j * d + i, j * d + k) += a(i, k);
          c(j * d + i, k * d + i) -= a(j, k);
        }
    acc += c.adjoint() * c;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(acc);
  double scale = std::max(1.0, es.eigenvalues().maxCoeff());
  std::int64_t dim = 0;
  for (Eigen::Index i = 0; i < dd; ++i)
    if (es.eigenvalues()(i) < 1e-9 * scale) ++dim;
  return dim;
}

inline std::mt19937_64 test_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform over all monomials (masks set directly, any i^k phase); used by
// the algebra-vs-dense comparisons so the operands never pass through the
// multiply path under test.
inline Pauli random_raw_monomial(std::uint32_t n, std::mt19937_64& rng) {
  Pauli p(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    p.set_x(j, rng() & 1);
    p.set_z(j, rng() & 1);
  }
  p.set_phase_pow(static_cast<std::uint8_t>(rng() & 3));
  return p;
}

// Random Hermitian monomial: a tensor product of I/X/Y/Z with random sign.
inline Pauli random_monomial(std::uint32_t n, std::mt19937_64& rng) {
  Pauli p(n);
  std::uniform_int_distribution<int> axis(0, 3);
  for (std::uint32_t j = 0; j < n; ++j) {
    switch (axis(rng)) {
      case 1: p = qmem::multiply(p, Pauli::single(n, j, 'X')); break;
      case 2: p = qmem::multiply(p, Pauli::single(n, j, 'Y')); break;
      case 3: p = qmem::multiply(p, Pauli::single(n, j, 'Z')); break;
      default: break;
    }
  }
  if (rng() & 1) p.set_phase_pow((p.phase_pow() + 2) & 3);
  return p;
}

}  // namespace oracle
