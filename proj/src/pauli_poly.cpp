#include "qmem/pauli_poly.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qmem {

namespace {
constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
}

PauliPoly::PauliPoly(std::uint32_t n_qubits) : n_(n_qubits) {
  if (n_qubits == 0 || n_qubits > kMaxQubits)
    throw std::invalid_argument(
        "PauliPoly: supported qubit range is 1.." + std::to_string(kMaxQubits));
}

PauliPoly PauliPoly::from(const Pauli& p, Coeff scale) {
  PauliPoly out(p.n_qubits());
  out.add_pauli(p, scale);
  return out;
}

PauliPoly::Key PauliPoly::key_of(const Pauli& p) {
  if (p.n_qubits() > kMaxQubits)
    throw std::invalid_argument("PauliPoly::key_of: monomial exceeds " +
                                std::to_string(kMaxQubits) + " qubits");
  std::uint32_t x = static_cast<std::uint32_t>(p.x_mask()[0]);
  std::uint32_t z = static_cast<std::uint32_t>(p.z_mask()[0]);
  return make_key(x, z);
}

void PauliPoly::add_term(Key k, Coeff c) {
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coeff{0.0, 0.0}) terms_.erase(it);
  }
}

void PauliPoly::add_pauli(const Pauli& p, Coeff scale) {
  if (p.n_qubits() != n_)
    throw std::invalid_argument("PauliPoly::add_pauli: qubit count mismatch");
  add_term(key_of(p), scale * kIPow[p.phase_pow() & 3]);
}

PauliPoly::Coeff PauliPoly::coeff(Key k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? Coeff{0.0, 0.0} : it->second;
}

PauliPoly& PauliPoly::operator+=(const PauliPoly& other) {
  for (const auto& [k, c] : other.terms_) add_term(k, c);
  return *this;
}

PauliPoly& PauliPoly::operator-=(const PauliPoly& other) {
  for (const auto& [k, c] : other.terms_) add_term(k, -c);
  return *this;
}

PauliPoly& PauliPoly::operator*=(Coeff s) {
  if (s == Coeff{0.0, 0.0}) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

PauliPoly PauliPoly::adjoint() const {
  PauliPoly out(n_);
  out.terms_.reserve(terms_.size());
  for (const auto& [k, c] : terms_) {
    // (X^x Z^z)^dagger = (-1)^{|x&z|} X^x Z^z
    std::uint32_t y_parity = std::popcount(key_x(k) & key_z(k)) & 1u;
    Coeff cc = std::conj(c);
    out.terms_.emplace(k, y_parity ? -cc : cc);
  }
  return out;
}

double PauliPoly::norm() const {
  double acc = 0;
  for (const auto& [k, c] : terms_) acc += std::norm(c);
  return std::sqrt(acc);
}

void PauliPoly::drop_zeros() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == Coeff{0.0, 0.0}) it = terms_.erase(it);
    else ++it;
  }
}

void PauliPoly::drop_below(double eps) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < eps) it = terms_.erase(it);
    else ++it;
  }
}

std::vector<std::uint32_t> PauliPoly::support_sites() const {
  std::uint32_t acc = 0;
  for (const auto& [k, c] : terms_) acc |= key_x(k) | key_z(k);
  std::vector<std::uint32_t> sites;
  for (std::uint32_t j = 0; j < n_; ++j)
    if ((acc >> j) & 1u) sites.push_back(j);
  return sites;
}

Pauli PauliPoly::to_pauli(Key k) const {
  Pauli p(n_);
  for (std::uint32_t j = 0; j < n_; ++j) {
    if ((key_x(k) >> j) & 1u) p.set_x(j, true);
    if ((key_z(k) >> j) & 1u) p.set_z(j, true);
  }
  return p;
}

PauliPoly multiply(const PauliPoly& a, const PauliPoly& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("PauliPoly multiply: qubit count mismatch");
  PauliPoly out(a.n_qubits());
  out.terms().reserve(a.size() * b.size());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      std::uint8_t ph = PauliPoly::mul_phase_pow(ka, kb);
      out.add_term(ka ^ kb, ca * cb * kIPow[ph]);
    }
  }
  return out;
}

PauliPoly commutator(const PauliPoly& a, const PauliPoly& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("PauliPoly commutator: qubit count mismatch");
  PauliPoly out(a.n_qubits());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      if (PauliPoly::keys_commute(ka, kb)) continue;
      // anticommuting monomials: [A,B] = 2AB
      std::uint8_t ph = PauliPoly::mul_phase_pow(ka, kb);
      out.add_term(ka ^ kb, 2.0 * ca * cb * kIPow[ph]);
    }
  }
  return out;
}

std::complex<double> hs_inner(const PauliPoly& a, const PauliPoly& b) {
  const PauliPoly* small = &a;
  const PauliPoly* large = &b;
  bool swapped = false;
  if (small->size() > large->size()) {
    std::swap(small, large);
    swapped = true;
  }
  std::complex<double> acc = 0;
  for (const auto& [k, c] : small->terms()) {
    auto it = large->terms().find(k);
    if (it == large->terms().end()) continue;
    acc += swapped ? std::conj(it->second) * c : std::conj(c) * it->second;
  }
  return acc;
}

double hs_distance(const PauliPoly& a, const PauliPoly& b) {
  PauliPoly d = a;
  d -= b;
  return d.norm();
}

}  // namespace qmem
