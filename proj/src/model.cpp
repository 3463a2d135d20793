#include "qmem/model.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmem {

namespace {

void set_vec_bit(std::vector<std::uint64_t>& v, std::uint32_t bit) {
  v[bit >> 6] ^= std::uint64_t{1} << (bit & 63u);
}

bool get_vec_bit(const std::vector<std::uint64_t>& v, std::uint32_t bit) {
  return (v[bit >> 6] >> (bit & 63u)) & 1u;
}

bool vec_is_zero(const std::vector<std::uint64_t>& v) {
  for (auto w : v)
    if (w) return false;
  return true;
}

std::vector<std::uint64_t> symplectic_bits(const Pauli& p) {
  std::uint32_t n = p.n_qubits();
  std::uint32_t words = (2 * n + 63u) / 64u;
  std::vector<std::uint64_t> v(words, 0);
  for (std::uint32_t j = 0; j < n; ++j) {
    if (p.x_bit(j)) set_vec_bit(v, j);
    if (p.z_bit(j)) set_vec_bit(v, n + j);
  }
  return v;
}

}  // namespace

std::string sector_name(Sector s) {
  switch (s) {
    case Sector::Bond: return "bond";
    case Sector::Star: return "star";
    case Sector::Plaquette: return "plaquette";
  }
  return "?";
}

const Pauli& StabilizerModel::logical(std::string_view name) const {
  for (std::size_t i = 0; i < logicals.size(); ++i)
    if (logical_names[i] == name) return logicals[i];
  throw std::invalid_argument("StabilizerModel::logical: unknown name '" +
                              std::string(name) + "'");
}

std::vector<std::uint32_t> StabilizerModel::sector_stabilizers(Sector s) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < stabilizers.size(); ++i)
    if (stab_sector[i] == s) out.push_back(i);
  return out;
}

std::vector<Sector> StabilizerModel::sectors_present() const {
  if (kind == ModelKind::IsingRing) return {Sector::Bond};
  return {Sector::Star, Sector::Plaquette};
}

double StabilizerModel::sector_weight(Sector s) const {
  double w = -1;
  for (std::uint32_t i = 0; i < stabilizers.size(); ++i) {
    if (stab_sector[i] != s) continue;
    if (w < 0) w = weights[i];
    else if (weights[i] != w)
      throw std::invalid_argument(
          "sector_weight: non-uniform couplings in sector " + sector_name(s) +
          "; the bath construction needs a single transition frequency per sector");
  }
  if (w < 0) throw std::invalid_argument("sector_weight: empty sector");
  return w;
}

std::array<std::uint32_t, 2> StabilizerModel::toggled_stabilizers(
    std::uint32_t site, Sector sector) const {
  char axis = (sector == Sector::Star) ? 'Z' : 'X';
  Pauli flip = Pauli::single(n_qubits, site, axis);
  std::array<std::uint32_t, 2> out{};
  std::uint32_t found = 0;
  for (std::uint32_t i = 0; i < stabilizers.size(); ++i) {
    if (stab_sector[i] != sector) continue;
    if (!commutes(flip, stabilizers[i])) {
      if (found < 2) out[found] = i;
      ++found;
    }
  }
  if (found != 2)
    throw std::logic_error("toggled_stabilizers: site flip toggles " +
                           std::to_string(found) + " stabilizers, expected 2");
  return out;
}

void StabilizerModel::finalize() {
  if (stabilizers.size() != stab_sector.size() ||
      stabilizers.size() != weights.size())
    throw std::logic_error("StabilizerModel: inconsistent field sizes");
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("StabilizerModel: weights must be > 0");

  for (std::size_t i = 0; i < stabilizers.size(); ++i) {
    if (stabilizers[i].phase_pow() != 0)
      throw std::logic_error("StabilizerModel: stabilizers must carry phase +1");
    if (!multiply(stabilizers[i], stabilizers[i]).is_identity())
      throw std::logic_error("StabilizerModel: stabilizer does not square to identity");
    for (std::size_t j = i + 1; j < stabilizers.size(); ++j)
      if (!commutes(stabilizers[i], stabilizers[j]))
        throw std::logic_error("StabilizerModel: stabilizers must commute");
  }
  for (const auto& c : constraints) {
    Pauli prod = Pauli::identity(n_qubits);
    for (auto i : c) prod = multiply(prod, stabilizers.at(i));
    if (!prod.is_identity())
      throw std::logic_error("StabilizerModel: constraint product is not the identity");
  }
  for (const auto& q : logicals)
    for (const auto& s : stabilizers)
      if (!commutes(q, s))
        throw std::logic_error("StabilizerModel: logical fails to commute with a stabilizer");

  // Row-echelon form of the independent generators over GF(2), with
  // combination tracking so membership solves recover the subset.
  solver_ = Gf2Solver{};
  solver_.bits = 2 * n_qubits;
  solver_.words = (solver_.bits + 63u) / 64u;
  std::uint32_t m = static_cast<std::uint32_t>(independent_basis.size());
  std::uint32_t combo_words = (m + 63u) / 64u;
  for (std::uint32_t r = 0; r < m; ++r) {
    auto v = symplectic_bits(stabilizers.at(independent_basis[r]));
    std::vector<std::uint64_t> combo(combo_words, 0);
    set_vec_bit(combo, r);
    for (std::size_t e = 0; e < solver_.rows.size(); ++e) {
      if (get_vec_bit(v, solver_.pivots[e])) {
        for (std::uint32_t w = 0; w < solver_.words; ++w) v[w] ^= solver_.rows[e][w];
        for (std::uint32_t w = 0; w < combo_words; ++w) combo[w] ^= solver_.combos[e][w];
      }
    }
    if (vec_is_zero(v))
      throw std::logic_error("StabilizerModel: independent_basis is linearly dependent");
    std::uint32_t pivot = 0;
    while (!get_vec_bit(v, pivot)) ++pivot;
    // keep echelon rows fully reduced against the new pivot
    for (std::size_t e = 0; e < solver_.rows.size(); ++e) {
      if (get_vec_bit(solver_.rows[e], pivot)) {
        for (std::uint32_t w = 0; w < solver_.words; ++w) solver_.rows[e][w] ^= v[w];
        for (std::uint32_t w = 0; w < combo_words; ++w) solver_.combos[e][w] ^= combo[w];
      }
    }
    solver_.rows.push_back(std::move(v));
    solver_.combos.push_back(std::move(combo));
    solver_.pivots.push_back(pivot);
  }
}

std::optional<std::vector<std::uint32_t>> StabilizerModel::reduce_to_stabilizers(
    const Pauli& p) const {
  if (p.n_qubits() != n_qubits)
    throw std::invalid_argument("reduce_to_stabilizers: qubit count mismatch");
  auto v = symplectic_bits(p);
  std::uint32_t m = static_cast<std::uint32_t>(independent_basis.size());
  std::vector<std::uint64_t> combo((m + 63u) / 64u, 0);
  for (std::size_t e = 0; e < solver_.rows.size(); ++e) {
    if (get_vec_bit(v, solver_.pivots[e])) {
      for (std::uint32_t w = 0; w < solver_.words; ++w) v[w] ^= solver_.rows[e][w];
      for (std::size_t w = 0; w < combo.size(); ++w) combo[w] ^= solver_.combos[e][w];
    }
  }
  if (!vec_is_zero(v)) return std::nullopt;
  std::vector<std::uint32_t> subset;
  for (std::uint32_t r = 0; r < m; ++r)
    if (get_vec_bit(combo, r)) subset.push_back(r);
  return subset;
}

StabilizerModel build_ising_ring(std::uint32_t n_sites,
                                 const std::vector<double>& weights) {
  if (n_sites < 3)
    throw std::invalid_argument("build_ising_ring: need at least 3 sites");
  StabilizerModel m;
  m.kind = ModelKind::IsingRing;
  m.n_qubits = n_sites;
  m.size = n_sites;
  for (std::uint32_t j = 0; j < n_sites; ++j) {
    Pauli bond(n_sites);
    bond.set_z(j, true);
    bond.set_z((j + 1) % n_sites, true);
    m.stabilizers.push_back(bond);
    m.stab_sector.push_back(Sector::Bond);
  }
  if (weights.empty()) m.weights.assign(n_sites, 1.0);
  else if (weights.size() == n_sites) m.weights = weights;
  else throw std::invalid_argument("build_ising_ring: weights size mismatch");

  std::vector<std::uint32_t> all(n_sites);
  for (std::uint32_t j = 0; j < n_sites; ++j) all[j] = j;
  m.constraints.push_back(all);
  for (std::uint32_t j = 0; j + 1 < n_sites; ++j) m.independent_basis.push_back(j);

  Pauli lx(n_sites), ly(n_sites), lz(n_sites);
  for (std::uint32_t j = 0; j < n_sites; ++j) lx.set_x(j, true);
  ly = multiply(Pauli::single(n_sites, 0, 'Y'),
                [&] {
                  Pauli tail(n_sites);
                  for (std::uint32_t j = 1; j < n_sites; ++j) tail.set_x(j, true);
                  return tail;
                }());
  lz.set_z(0, true);
  m.logicals = {lx, ly, lz};
  m.logical_names = {"X", "Y", "Z"};
  m.finalize();
  return m;
}

std::uint32_t torus_edge(std::uint32_t k, std::uint32_t r, std::uint32_t c,
                         std::uint32_t o) {
  return ((r % k) * k + (c % k)) * 2 + o;
}

StabilizerModel build_kitaev_torus(std::uint32_t k,
                                   const std::vector<double>& star_weights,
                                   const std::vector<double>& plaquette_weights) {
  if (k < 2) throw std::invalid_argument("build_kitaev_torus: need K >= 2");
  StabilizerModel m;
  m.kind = ModelKind::KitaevTorus;
  m.size = k;
  m.n_qubits = 2 * k * k;
  const std::uint32_t n = m.n_qubits;
  const std::uint32_t kk = k * k;

  // Stars on vertices: the four edges meeting at (r, c).
  for (std::uint32_t r = 0; r < k; ++r) {
    for (std::uint32_t c = 0; c < k; ++c) {
      Pauli s(n);
      s.set_x(torus_edge(k, r, c, 0), true);
      s.set_x(torus_edge(k, r, c + k - 1, 0), true);
      s.set_x(torus_edge(k, r, c, 1), true);
      s.set_x(torus_edge(k, r + k - 1, c, 1), true);
      m.stabilizers.push_back(s);
      m.stab_sector.push_back(Sector::Star);
    }
  }
  // Plaquettes on faces: the four edges bounding the face at (r, c).
  for (std::uint32_t r = 0; r < k; ++r) {
    for (std::uint32_t c = 0; c < k; ++c) {
      Pauli p(n);
      p.set_z(torus_edge(k, r, c, 0), true);
      p.set_z(torus_edge(k, r + 1, c, 0), true);
      p.set_z(torus_edge(k, r, c, 1), true);
      p.set_z(torus_edge(k, r, c + 1, 1), true);
      m.stabilizers.push_back(p);
      m.stab_sector.push_back(Sector::Plaquette);
    }
  }

  m.weights.assign(2 * kk, 1.0);
  if (!star_weights.empty()) {
    if (star_weights.size() != kk)
      throw std::invalid_argument("build_kitaev_torus: star weights size mismatch");
    for (std::uint32_t i = 0; i < kk; ++i) m.weights[i] = star_weights[i];
  }
  if (!plaquette_weights.empty()) {
    if (plaquette_weights.size() != kk)
      throw std::invalid_argument("build_kitaev_torus: plaquette weights size mismatch");
    for (std::uint32_t i = 0; i < kk; ++i) m.weights[kk + i] = plaquette_weights[i];
  }

  std::vector<std::uint32_t> stars(kk), plaqs(kk);
  for (std::uint32_t i = 0; i < kk; ++i) { stars[i] = i; plaqs[i] = kk + i; }
  m.constraints = {stars, plaqs};
  for (std::uint32_t i = 0; i + 1 < kk; ++i) m.independent_basis.push_back(i);
  for (std::uint32_t i = 0; i + 1 < kk; ++i) m.independent_basis.push_back(kk + i);

  // Homologically nontrivial straight loops: Z-loops on the direct lattice,
  // X-loops on the dual lattice, crossing pairwise exactly once.
  Pauli z1(n), z2(n), x1(n), x2(n);
  for (std::uint32_t c = 0; c < k; ++c) z1.set_z(torus_edge(k, 0, c, 0), true);
  for (std::uint32_t r = 0; r < k; ++r) x1.set_x(torus_edge(k, r, 0, 0), true);
  for (std::uint32_t r = 0; r < k; ++r) z2.set_z(torus_edge(k, r, 0, 1), true);
  for (std::uint32_t c = 0; c < k; ++c) x2.set_x(torus_edge(k, 0, c, 1), true);
  m.logicals = {x1, z1, x2, z2};
  m.logical_names = {"X1", "Z1", "X2", "Z2"};
  m.finalize();
  return m;
}

namespace {

// Resolves p = i^phi * prod(subset of independent stabilizers) and returns
// i^phi, or nullopt when p's masks are outside the stabilizer group.
std::optional<std::complex<double>> reduction_phase(const StabilizerModel& m,
                                                    const Pauli& p,
                                                    std::vector<std::uint32_t>* subset_out) {
  auto subset = m.reduce_to_stabilizers(p);
  if (!subset) return std::nullopt;
  Pauli prod = Pauli::identity(m.n_qubits);
  for (auto r : *subset) prod = multiply(prod, m.stabilizers[m.independent_basis[r]]);
  std::uint8_t phi = static_cast<std::uint8_t>((p.phase_pow() + 4 - prod.phase_pow()) & 3);
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  if (subset_out) *subset_out = std::move(*subset);
  return ipow[phi];
}

}  // namespace

StabilizerExpectation ground_expectation(const StabilizerModel& m, const Pauli& p) {
  auto tr = ground_trace(m, p);
  StabilizerExpectation out;
  out.reducible = m.reduce_to_stabilizers(p).has_value();
  out.value = tr.real();
  return out;
}

std::complex<double> ground_trace(const StabilizerModel& m, const Pauli& p) {
  auto phi = reduction_phase(m, p, nullptr);
  if (!phi) return 0.0;
  return *phi;  // every stabilizer product has expectation 1
}

double constrained_sector_moment(const std::vector<double>& sector_weights,
                                 const std::vector<std::uint8_t>& in_subset,
                                 double beta) {
  // <prod_A s> = (prod_A t_i * prod_{A^c} 1 + prod_{A^c} t_i * prod_A 1)
  //              / (1 + prod t_i), with t_i = tanh(beta J_i),
  // after dividing the even-parity-projected sums by prod cosh(beta J_i).
  double prod_in = 1.0, prod_out = 1.0, prod_all = 1.0;
  for (std::size_t i = 0; i < sector_weights.size(); ++i) {
    double t = std::tanh(beta * sector_weights[i]);
    prod_all *= t;
    if (in_subset[i]) prod_in *= t;
    else prod_out *= t;
  }
  return (prod_in + prod_out) / (1.0 + prod_all);
}

std::complex<double> gibbs_trace(const StabilizerModel& m, const Pauli& p, double beta) {
  if (!(beta > 0)) throw std::domain_error("gibbs_trace: beta must be > 0");
  std::vector<std::uint32_t> subset;
  auto phi = reduction_phase(m, p, &subset);
  if (!phi) return 0.0;

  std::vector<std::uint8_t> member(m.stabilizers.size(), 0);
  for (auto r : subset) member[m.independent_basis[r]] = 1;

  double value = 1.0;
  for (Sector s : m.sectors_present()) {
    auto ids = m.sector_stabilizers(s);
    std::vector<double> w(ids.size());
    std::vector<std::uint8_t> in(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      w[i] = m.weights[ids[i]];
      in[i] = member[ids[i]];
    }
    value *= constrained_sector_moment(w, in, beta);
  }
  return *phi * value;
}

double gibbs_expectation(const StabilizerModel& m, const Pauli& p, double beta) {
  return gibbs_trace(m, p, beta).real();
}

double hamiltonian_energy(const StabilizerModel& m, const SyndromeState& syndrome) {
  auto expected = m.sectors_present();
  if (syndrome.sectors.size() != expected.size() ||
      syndrome.excited.size() != syndrome.sectors.size())
    throw std::invalid_argument("hamiltonian_energy: syndrome sectors do not match model");
  double energy = 0.0;
  for (std::size_t si = 0; si < syndrome.sectors.size(); ++si) {
    Sector s = syndrome.sectors[si];
    if (s != expected[si])
      throw std::invalid_argument("hamiltonian_energy: unexpected sector order");
    auto ids = m.sector_stabilizers(s);
    const auto& bits = syndrome.excited[si];
    if (bits.size() != ids.size())
      throw std::invalid_argument("hamiltonian_energy: syndrome size mismatch in sector " +
                                  sector_name(s));
    std::uint32_t parity = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      parity ^= bits[i] & 1u;
      energy += bits[i] ? m.weights[ids[i]] : -m.weights[ids[i]];
    }
    if (parity)
      throw std::invalid_argument(
          "hamiltonian_energy: odd excitation parity in sector " + sector_name(s) +
          "; excitations come in pairs on the ring/torus");
  }
  return energy;
}

std::string StabilizerModel::describe_json() const {
  std::ostringstream os;
  os << "{\"kind\":\"" << (kind == ModelKind::IsingRing ? "ising" : "kitaev")
     << "\",\"size\":" << size << ",\"n_qubits\":" << n_qubits
     << ",\"stabilizers\":[";
  for (std::size_t i = 0; i < stabilizers.size(); ++i) {
    if (i) os << ',';
    os << "{\"sector\":\"" << sector_name(stab_sector[i]) << "\",\"weight\":"
       << weights[i] << ",\"sites\":[";
    auto sup = stabilizers[i].support();
    for (std::size_t j = 0; j < sup.size(); ++j) {
      if (j) os << ',';
      os << sup[j];
    }
    os << "]}";
  }
  os << "],\"logicals\":[";
  for (std::size_t i = 0; i < logicals.size(); ++i) {
    if (i) os << ',';
    os << "{\"name\":\"" << logical_names[i] << "\",\"operator\":\""
       << logicals[i].str() << "\"}";
  }
  os << "],\"constraints\":[";
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < constraints[i].size(); ++j) {
      if (j) os << ',';
      os << constraints[i][j];
    }
    os << ']';
  }
  os << "],\"independent_basis\":[";
  for (std::size_t i = 0; i < independent_basis.size(); ++i) {
    if (i) os << ',';
    os << independent_basis[i];
  }
  os << "]}";
  return os.str();
}

}  // namespace qmem
