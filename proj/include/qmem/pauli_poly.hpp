#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qmem/pauli.hpp"

namespace qmem {

// Complex linear combination of Pauli monomials, keyed by the bare mask
// pair with all i^k phases folded into the coefficients. Limited to
// n <= 32 qubits so a monomial key packs into one 64-bit word
// (key = x_mask | z_mask << 32).
//
// The coefficient convention is with respect to the canonical monomials
// X^x Z^z (phase +1). These are orthogonal under tr(A^dagger B)/2^n, so
// norm() below is the normalized Hilbert-Schmidt norm.
class PauliPoly {
public:
  static constexpr std::uint32_t kMaxQubits = 32;
  using Key = std::uint64_t;
  using Coeff = std::complex<double>;
  using Map = std::unordered_map<Key, Coeff>;

  explicit PauliPoly(std::uint32_t n_qubits);

  static PauliPoly from(const Pauli& p, Coeff scale = 1.0);
  static Key key_of(const Pauli& p);
  static Key make_key(std::uint32_t x, std::uint32_t z) {
    return static_cast<std::uint64_t>(x) | (static_cast<std::uint64_t>(z) << 32);
  }
  static std::uint32_t key_x(Key k) { return static_cast<std::uint32_t>(k); }
  static std::uint32_t key_z(Key k) { return static_cast<std::uint32_t>(k >> 32); }

  // Phase exponent (power of i) picked up when multiplying canonical
  // monomials: X^{x1}Z^{z1} X^{x2}Z^{z2} = i^{ph} X^{x1^x2} Z^{z1^z2}.
  static std::uint8_t mul_phase_pow(Key a, Key b) {
    std::uint32_t swaps = std::popcount(key_z(a) & key_x(b)) & 1u;
    return static_cast<std::uint8_t>(2 * swaps);
  }
  static bool keys_commute(Key a, Key b) {
    std::uint32_t s = (std::popcount(key_x(a) & key_z(b)) ^
                       std::popcount(key_z(a) & key_x(b))) & 1u;
    return s == 0;
  }

  std::uint32_t n_qubits() const { return n_; }
  const Map& terms() const { return terms_; }
  Map& terms() { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(Key k, Coeff c);
  void add_pauli(const Pauli& p, Coeff scale = 1.0);
  Coeff coeff(Key k) const;

  PauliPoly& operator+=(const PauliPoly& other);
  PauliPoly& operator-=(const PauliPoly& other);
  PauliPoly& operator*=(Coeff s);

  PauliPoly adjoint() const;
  double norm() const;      // sqrt(sum |c|^2)
  void drop_zeros();        // removes exact-zero coefficients
  void drop_below(double eps);

  // Union of sites touched by any monomial in the support.
  std::vector<std::uint32_t> support_sites() const;

  Pauli to_pauli(Key k) const;  // canonical monomial for a key

private:
  std::uint32_t n_;
  Map terms_;
};

PauliPoly multiply(const PauliPoly& a, const PauliPoly& b);
PauliPoly commutator(const PauliPoly& a, const PauliPoly& b);

// sum over matching monomials of conj(a_k) b_k; equals tr(A^dagger B)/2^n.
std::complex<double> hs_inner(const PauliPoly& a, const PauliPoly& b);
double hs_distance(const PauliPoly& a, const PauliPoly& b);

}  // namespace qmem
