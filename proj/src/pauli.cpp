#include "qmem/pauli.hpp"

#include <bit>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace qmem {

namespace {

std::uint32_t word_count(std::uint32_t n) { return (n + 63u) / 64u; }

std::uint32_t overlap_parity(const std::vector<std::uint64_t>& a,
                             const std::vector<std::uint64_t>& b) {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < a.size(); ++w) acc ^= a[w] & b[w];
  return static_cast<std::uint32_t>(std::popcount(acc) & 1);
}

std::uint64_t overlap_count(const std::vector<std::uint64_t>& a,
                            const std::vector<std::uint64_t>& b) {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < a.size(); ++w)
    acc += std::popcount(a[w] & b[w]);
  return acc;
}

void check_same_size(const Pauli& a, const Pauli& b, const char* op) {
  if (a.n_qubits() != b.n_qubits()) {
    std::ostringstream msg;
    msg << op << ": qubit count mismatch (" << a.n_qubits() << " vs "
        << b.n_qubits() << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Pauli::Pauli(std::uint32_t n_qubits)
    : n_(n_qubits), x_(word_count(n_qubits), 0), z_(word_count(n_qubits), 0) {
  if (n_qubits == 0) throw std::invalid_argument("Pauli: need at least 1 qubit");
}

Pauli Pauli::identity(std::uint32_t n_qubits) { return Pauli(n_qubits); }

Pauli Pauli::single(std::uint32_t n_qubits, std::uint32_t site, char axis) {
  Pauli p(n_qubits);
  if (site >= n_qubits) throw std::invalid_argument("Pauli::single: site out of range");
  switch (axis) {
    case 'X': p.set_x(site, true); break;
    case 'Z': p.set_z(site, true); break;
    case 'Y':
      p.set_x(site, true);
      p.set_z(site, true);
      p.phase_pow_ = 1;  // Y = i XZ
      break;
    default:
      throw std::invalid_argument("Pauli::single: axis must be X, Y or Z");
  }
  return p;
}

Pauli Pauli::from_string(std::uint32_t n_qubits, std::string_view text) {
  Pauli p(n_qubits);
  std::string s(text);
  std::istringstream in(s);
  std::string tok;
  bool first = true;
  while (in >> tok) {
    if (first) {
      first = false;
      if (tok == "+" || tok == "+1") continue;
      if (tok == "-" || tok == "-1") { p.phase_pow_ = 2; continue; }
      if (tok == "i" || tok == "+i") { p.phase_pow_ = 1; continue; }
      if (tok == "-i") { p.phase_pow_ = 3; continue; }
    }
    if (tok == "I") continue;
    char axis = tok[0];
    if (axis != 'X' && axis != 'Y' && axis != 'Z')
      throw std::invalid_argument("Pauli::from_string: bad token '" + tok + "'");
    std::uint32_t site_1based = 0;
    try {
      site_1based = static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("Pauli::from_string: bad site in '" + tok + "'");
    }
    if (site_1based == 0 || site_1based > n_qubits)
      throw std::invalid_argument("Pauli::from_string: site out of range in '" + tok + "'");
    std::uint32_t site = site_1based - 1;
    if (p.x_bit(site) || p.z_bit(site))
      throw std::invalid_argument("Pauli::from_string: repeated site in '" + tok + "'");
    Pauli factor = Pauli::single(n_qubits, site, axis);
    p = multiply(p, factor);
  }
  return p;
}

std::complex<double> Pauli::phase() const {
  static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[phase_pow_ & 3];
}

bool Pauli::x_bit(std::uint32_t site) const {
  return (x_[site >> 6] >> (site & 63u)) & 1u;
}

bool Pauli::z_bit(std::uint32_t site) const {
  return (z_[site >> 6] >> (site & 63u)) & 1u;
}

void Pauli::set_x(std::uint32_t site, bool value) {
  std::uint64_t bit = std::uint64_t{1} << (site & 63u);
  if (value) x_[site >> 6] |= bit; else x_[site >> 6] &= ~bit;
}

void Pauli::set_z(std::uint32_t site, bool value) {
  std::uint64_t bit = std::uint64_t{1} << (site & 63u);
  if (value) z_[site >> 6] |= bit; else z_[site >> 6] &= ~bit;
}

bool Pauli::identity_mask() const {
  for (std::size_t w = 0; w < x_.size(); ++w)
    if (x_[w] || z_[w]) return false;
  return true;
}

bool Pauli::is_identity() const { return identity_mask() && phase_pow_ == 0; }

bool Pauli::hermitian() const {
  // (X^x Z^z)^dagger = (-1)^{|x&z|} X^x Z^z, so the adjoint phase is
  // -phase + 2|x&z|  (mod 4); Hermitian iff it equals phase.
  std::uint32_t y_parity = static_cast<std::uint32_t>(overlap_count(x_, z_) & 1);
  std::uint8_t adj = static_cast<std::uint8_t>(((4 - phase_pow_) + 2 * y_parity) & 3);
  return adj == phase_pow_;
}

Pauli Pauli::adjoint() const {
  Pauli p = *this;
  std::uint32_t y_parity = static_cast<std::uint32_t>(overlap_count(x_, z_) & 1);
  p.phase_pow_ = static_cast<std::uint8_t>(((4 - phase_pow_) + 2 * y_parity) & 3);
  return p;
}

std::vector<std::uint32_t> Pauli::support() const {
  std::vector<std::uint32_t> sites;
  for (std::uint32_t j = 0; j < n_; ++j)
    if (x_bit(j) || z_bit(j)) sites.push_back(j);
  return sites;
}

std::uint32_t Pauli::support_size() const {
  std::uint64_t acc = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) acc += std::popcount(x_[w] | z_[w]);
  return static_cast<std::uint32_t>(acc);
}

std::string Pauli::str() const {
  // Display convention: print Y for the x=z=1 site pattern and fold the
  // bookkeeping i back out of the stored phase.
  std::uint64_t y_count = overlap_count(x_, z_);
  std::uint32_t display = static_cast<std::uint32_t>((phase_pow_ + 4 * y_count - y_count) % 4);
  // display = phase_pow - y_count mod 4 (each printed Y contributes one i)
  static const char* prefix[4] = {"", "i ", "- ", "-i "};
  std::string out = prefix[display];
  bool any = false;
  for (std::uint32_t j = 0; j < n_; ++j) {
    bool xb = x_bit(j), zb = z_bit(j);
    if (!xb && !zb) continue;
    if (any) out += ' ';
    any = true;
    out += xb ? (zb ? 'Y' : 'X') : 'Z';
    out += std::to_string(j + 1);
  }
  if (!any) out += 'I';
  return out;
}

bool Pauli::operator==(const Pauli& other) const {
  return n_ == other.n_ && phase_pow_ == other.phase_pow_ && x_ == other.x_ &&
         z_ == other.z_;
}

Pauli multiply(const Pauli& a, const Pauli& b) {
  check_same_size(a, b, "multiply");
  Pauli out(a.n_);
  // Moving Z^{z_a} across X^{x_b} gives (-1)^{|z_a & x_b|}.
  std::uint32_t swaps = overlap_parity(a.z_, b.x_);
  out.phase_pow_ = static_cast<std::uint8_t>((a.phase_pow_ + b.phase_pow_ + 2 * swaps) & 3);
  for (std::size_t w = 0; w < out.x_.size(); ++w) {
    out.x_[w] = a.x_[w] ^ b.x_[w];
    out.z_[w] = a.z_[w] ^ b.z_[w];
  }
  return out;
}

bool commutes(const Pauli& a, const Pauli& b) {
  check_same_size(a, b, "commutes");
  return (overlap_parity(a.x_, b.z_) ^ overlap_parity(a.z_, b.x_)) == 0;
}

int conjugate_sign(const Pauli& u, const Pauli& q) {
  return commutes(u, q) ? 1 : -1;
}

}  // namespace qmem
