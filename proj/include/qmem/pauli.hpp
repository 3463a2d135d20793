#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qmem {

// An N-qubit Pauli monomial in binary-symplectic form.
//
// The operator represented is  i^phase_pow * prod_j X_j^{x_j} Z_j^{z_j},
// with per-site X applied after Z (so the site pattern x=z=1 is XZ = -iY).
// Sites are 0-based internally; the text form ("X1 Z5 Y7") is 1-based.
class Pauli {
public:
  explicit Pauli(std::uint32_t n_qubits);

  static Pauli identity(std::uint32_t n_qubits);
  // axis is one of 'X', 'Y', 'Z'; site is 0-based.
  static Pauli single(std::uint32_t n_qubits, std::uint32_t site, char axis);
  // Parses "X1 Z5 Y7" with an optional leading phase token (+, -, i, -i).
  static Pauli from_string(std::uint32_t n_qubits, std::string_view text);

  std::uint32_t n_qubits() const { return n_; }
  std::uint32_t words() const { return static_cast<std::uint32_t>(x_.size()); }
  const std::vector<std::uint64_t>& x_mask() const { return x_; }
  const std::vector<std::uint64_t>& z_mask() const { return z_; }
  std::uint8_t phase_pow() const { return phase_pow_; }
  std::complex<double> phase() const;

  bool x_bit(std::uint32_t site) const;
  bool z_bit(std::uint32_t site) const;
  void set_x(std::uint32_t site, bool value);
  void set_z(std::uint32_t site, bool value);
  void set_phase_pow(std::uint8_t p) { phase_pow_ = p & 3u; }

  bool identity_mask() const;           // true iff both masks vanish
  bool is_identity() const;             // identity_mask and phase +1
  bool hermitian() const;
  Pauli adjoint() const;

  std::vector<std::uint32_t> support() const;  // 0-based sites, ascending
  std::uint32_t support_size() const;

  std::string str() const;

  bool operator==(const Pauli& other) const;
  bool operator!=(const Pauli& other) const { return !(*this == other); }

private:
  std::uint32_t n_;
  std::vector<std::uint64_t> x_, z_;
  std::uint8_t phase_pow_ = 0;  // exponent of i, 0..3

  friend Pauli multiply(const Pauli&, const Pauli&);
  friend bool commutes(const Pauli&, const Pauli&);
};

// Exact product a*b with phase tracking.
Pauli multiply(const Pauli& a, const Pauli& b);

// True iff a*b == b*a, from the parity of the symplectic overlap.
bool commutes(const Pauli& a, const Pauli& b);

// Sign g in  u q u^dagger = g q  for Pauli monomials; +1 iff commutes(u, q).
// The intended use is single-site Hermitian u (then u q u^dagger = u q u).
int conjugate_sign(const Pauli& u, const Pauli& q);

}  // namespace qmem
