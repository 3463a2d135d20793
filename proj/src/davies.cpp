#include "qmem/davies.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qmem/rng.hpp"

namespace qmem {

namespace {
constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
constexpr std::complex<double> kI{0, 1};
}  // namespace

std::vector<double> DaviesJumpSet::frequencies() const {
  std::set<double> ws;
  for (const auto& f : families) ws.insert(f.omega);
  return std::vector<double>(ws.begin(), ws.end());
}

DaviesJumpSet build_jump_set(const StabilizerModel& m, Coupling coupling) {
  if (m.kind == ModelKind::IsingRing && coupling != Coupling::XOnly)
    throw std::invalid_argument(
        "build_jump_set: the ring model supports x-coupling only "
        "(z-type couplings commute with every bond)");
  DaviesJumpSet out;
  out.coupling = coupling;
  auto add_family = [&](std::uint32_t site, char axis, Sector sector) {
    JumpFamily f;
    f.site = site;
    f.axis = axis;
    f.sector = sector;
    f.stabs = m.toggled_stabilizers(site, sector);
    f.omega = 2.0 * (m.weights[f.stabs[0]] + m.weights[f.stabs[1]]);
    out.families.push_back(f);
  };
  Sector x_sector = (m.kind == ModelKind::IsingRing) ? Sector::Bond : Sector::Plaquette;
  for (std::uint32_t j = 0; j < m.n_qubits; ++j) {
    if (coupling != Coupling::ZOnly) add_family(j, 'X', x_sector);
    if (coupling != Coupling::XOnly) add_family(j, 'Z', Sector::Star);
  }
  return out;
}

namespace {

PauliPoly projection(const StabilizerModel& m, const JumpFamily& f, int sign_a,
                     int sign_b) {
  // (1 + sign_a S_a)(1 + sign_b S_b) / 4
  PauliPoly p(m.n_qubits);
  p.add_pauli(Pauli::identity(m.n_qubits), 0.25);
  p.add_pauli(m.stabilizers[f.stabs[0]], 0.25 * sign_a);
  p.add_pauli(m.stabilizers[f.stabs[1]], 0.25 * sign_b);
  p.add_pauli(multiply(m.stabilizers[f.stabs[0]], m.stabilizers[f.stabs[1]]),
              0.25 * sign_a * sign_b);
  return p;
}

}  // namespace

PauliPoly projection_minus(const StabilizerModel& m, const JumpFamily& f) {
  return projection(m, f, +1, +1);
}
PauliPoly projection_plus(const StabilizerModel& m, const JumpFamily& f) {
  return projection(m, f, -1, -1);
}
PauliPoly projection_zero(const StabilizerModel& m, const JumpFamily& f) {
  PauliPoly p(m.n_qubits);
  p.add_pauli(Pauli::identity(m.n_qubits), 0.5);
  p.add_pauli(multiply(m.stabilizers[f.stabs[0]], m.stabilizers[f.stabs[1]]), -0.5);
  return p;
}

PauliPoly lowering_op(const StabilizerModel& m, const JumpFamily& f) {
  PauliPoly u = PauliPoly::from(Pauli::single(m.n_qubits, f.site, f.axis));
  return multiply(projection_minus(m, f), u);
}

PauliPoly dephasing_op(const StabilizerModel& m, const JumpFamily& f) {
  PauliPoly u = PauliPoly::from(Pauli::single(m.n_qubits, f.site, f.axis));
  return multiply(projection_zero(m, f), u);
}

Lindbladian::Lindbladian(const StabilizerModel& m, const DaviesJumpSet& jumps,
                         const SpectralFunction& h)
    : model_(&m), beta_(h.beta()) {
  if (m.n_qubits > PauliPoly::kMaxQubits)
    throw std::invalid_argument(
        "Lindbladian: observable algebra supports at most " +
        std::to_string(PauliPoly::kMaxQubits) + " qubits");
  double rate_sum = 0;
  for (std::uint32_t k = 0; k < m.stabilizers.size(); ++k) {
    ham_.push_back({PauliPoly::key_of(m.stabilizers[k]), m.weights[k]});
    rate_sum += 2.0 * m.weights[k];
  }
  auto flatten = [](const PauliPoly& p) {
    std::vector<Term> out;
    out.reserve(p.size());
    for (const auto& [k, c] : p.terms()) out.push_back({k, c});
    return out;
  };
  for (const auto& f : jumps.families) {
    FamilyOps ops;
    ops.rate_down = h.at(f.omega);
    ops.rate_up = h.at(-f.omega);
    ops.rate_zero = h.at(0.0);
    PauliPoly a = lowering_op(m, f);
    PauliPoly adag = a.adjoint();
    PauliPoly a0 = dephasing_op(m, f);
    ops.a = flatten(a);
    ops.adag = flatten(adag);
    ops.a0 = flatten(a0);
    ops.adag_a = flatten(multiply(adag, a));
    ops.a_adag = flatten(multiply(a, adag));
    ops.a0_sq = flatten(multiply(a0, a0));
    rate_sum += 2.0 * (ops.rate_down + ops.rate_up + ops.rate_zero);
    fams_.push_back(std::move(ops));
  }
  step_scale_ = rate_sum;
}

PauliPoly Lindbladian::apply_hamiltonian(const PauliPoly& x) const {
  PauliPoly out(x.n_qubits());
  out.terms().reserve(x.size() * 4);
  for (const auto& [kp, c] : x.terms()) {
    for (const auto& t : ham_) {
      if (PauliPoly::keys_commute(t.key, kp)) continue;
      // i[-J S, P] = -2iJ * S P for anticommuting monomials
      std::uint8_t ph = PauliPoly::mul_phase_pow(t.key, kp);
      out.add_term(t.key ^ kp, c * (-2.0 * kI) * t.c * kIPow[ph]);
    }
  }
  return out;
}

void Lindbladian::accumulate_dissipative(PauliPoly::Key kp,
                                         std::complex<double> coeff,
                                         PauliPoly& out) const {
  auto channel = [&](const std::vector<Term>& s, const std::vector<Term>& sdag,
                     const std::vector<Term>& sdag_s, double rate) {
    if (rate == 0.0) return;
    // rate * ( S^dag P S - (1/2){S^dag S, P} )
    for (const auto& u : sdag) {
      std::uint8_t ph1 = PauliPoly::mul_phase_pow(u.key, kp);
      PauliPoly::Key ku_p = u.key ^ kp;
      for (const auto& v : s) {
        std::uint8_t ph = static_cast<std::uint8_t>(
            (ph1 + PauliPoly::mul_phase_pow(ku_p, v.key)) & 3);
        out.add_term(ku_p ^ v.key, rate * coeff * u.c * v.c * kIPow[ph]);
      }
    }
    for (const auto& w : sdag_s) {
      std::uint8_t phl = PauliPoly::mul_phase_pow(w.key, kp);
      out.add_term(w.key ^ kp, -0.5 * rate * coeff * w.c * kIPow[phl]);
      std::uint8_t phr = PauliPoly::mul_phase_pow(kp, w.key);
      out.add_term(kp ^ w.key, -0.5 * rate * coeff * w.c * kIPow[phr]);
    }
  };
  for (const auto& f : fams_) {
    channel(f.a, f.adag, f.adag_a, f.rate_down);
    channel(f.adag, f.a, f.a_adag, f.rate_up);
    channel(f.a0, f.a0, f.a0_sq, f.rate_zero);
  }
}

PauliPoly Lindbladian::apply_dissipative(const PauliPoly& x) const {
  PauliPoly out(x.n_qubits());
  out.terms().reserve(x.size() * 8);
  for (const auto& [kp, c] : x.terms()) accumulate_dissipative(kp, c, out);
  return out;
}

PauliPoly Lindbladian::apply(const PauliPoly& x) const {
  PauliPoly out = apply_hamiltonian(x);
  for (const auto& [kp, c] : x.terms()) accumulate_dissipative(kp, c, out);
  return out;
}

PauliPoly Lindbladian::propagate(const PauliPoly& x, double t, double rel_tol) const {
  if (t < 0) throw std::invalid_argument("propagate: t must be >= 0");
  if (t == 0 || x.empty()) return x;
  constexpr int kMaxOrder = 64;
  PauliPoly y = x;
  double remaining = t;
  double tau = std::min(t, 3.0 / std::max(step_scale_, 1e-12));
  while (remaining > 0) {
    double step = std::min(tau, remaining);
    PauliPoly term = y;
    PauliPoly next = y;
    int order = 0;
    bool converged = false;
    for (order = 1; order <= kMaxOrder; ++order) {
      term = apply(term);
      term *= step / order;
      next += term;
      if (order >= 2 && term.norm() <= rel_tol * std::max(next.norm(), 1e-300)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      tau *= 0.5;
      if (tau < 1e-12 * t) {
        std::ostringstream msg;
        msg << "propagate: series failed to converge (step " << step
            << ", order cap " << kMaxOrder << ", observable support "
            << y.size() << "); generator scale " << step_scale_;
        throw std::runtime_error(msg.str());
      }
      continue;
    }
    y = std::move(next);
    remaining -= step;
  }
  return y;
}

std::complex<double> gibbs_trace(const StabilizerModel& m, const PauliPoly& x,
                                 double beta) {
  std::complex<double> acc = 0;
  for (const auto& [k, c] : x.terms()) acc += c * gibbs_trace(m, x.to_pauli(k), beta);
  return acc;
}

std::complex<double> gibbs_inner(const StabilizerModel& m, const PauliPoly& a,
                                 const PauliPoly& b, double beta) {
  return gibbs_trace(m, multiply(a.adjoint(), b), beta);
}

DetailedBalanceReport check_detailed_balance(const Lindbladian& lind,
                                             std::size_t basis_limit,
                                             std::size_t n_pairs,
                                             std::uint64_t seed) {
  const StabilizerModel& m = lind.model();
  const std::uint32_t n = m.n_qubits;
  const std::uint64_t dim = std::uint64_t{1} << (2 * n);
  DetailedBalanceReport report;
  Rng rng(seed);

  auto residual_of = [&](PauliPoly::Key key) {
    PauliPoly x(n);
    x.add_term(key, 1.0);
    PauliPoly r = lind.apply_hamiltonian(lind.apply_dissipative(x));
    r -= lind.apply_dissipative(lind.apply_hamiltonian(x));
    return r.norm();
  };

  if (basis_limit == 0 || basis_limit >= dim) {
    for (std::uint64_t key = 0; key < dim; ++key) {
      std::uint64_t packed = (key & ((std::uint64_t{1} << n) - 1)) |
                             ((key >> n) << 32);
      report.commutation_residual =
          std::max(report.commutation_residual, residual_of(packed));
      ++report.basis_checked;
    }
  } else {
    for (std::size_t i = 0; i < basis_limit; ++i) {
      std::uint32_t x_mask = static_cast<std::uint32_t>(rng.next()) &
                             static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
      std::uint32_t z_mask = static_cast<std::uint32_t>(rng.next()) &
                             static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
      report.commutation_residual = std::max(
          report.commutation_residual, residual_of(PauliPoly::make_key(x_mask, z_mask)));
      ++report.basis_checked;
    }
  }

  auto random_observable = [&](std::size_t n_terms) {
    PauliPoly x(n);
    for (std::size_t i = 0; i < n_terms; ++i) {
      std::uint32_t xm = static_cast<std::uint32_t>(rng.next()) &
                         static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
      std::uint32_t zm = static_cast<std::uint32_t>(rng.next()) &
                         static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
      x.add_term(PauliPoly::make_key(xm, zm),
                 {rng.uniform() * 2 - 1, rng.uniform() * 2 - 1});
    }
    double nn = x.norm();
    if (nn > 0) x *= 1.0 / nn;
    return x;
  };
  for (std::size_t i = 0; i < n_pairs; ++i) {
    PauliPoly x = random_observable(24);
    PauliPoly y = random_observable(24);
    std::complex<double> lhs = gibbs_inner(m, y, lind.apply_dissipative(x), lind.beta());
    std::complex<double> rhs = gibbs_inner(m, lind.apply_dissipative(y), x, lind.beta());
    report.self_adjoint_asymmetry =
        std::max(report.self_adjoint_asymmetry, std::abs(lhs - rhs));
    ++report.pairs_checked;
  }
  return report;
}

namespace {

bool keys_anticommute(std::uint64_t a, std::uint64_t b) {
  return !PauliPoly::keys_commute(a, b);
}

}  // namespace

std::int64_t commutant_dimension(std::uint32_t n_qubits,
                                 const std::vector<Pauli>& couplings,
                                 const StabilizerModel* hamiltonian) {
  constexpr std::uint32_t kMaxN = 10;
  if (n_qubits > kMaxN)
    throw std::invalid_argument(
        "commutant_dimension: monomial-basis enumeration supports at most " +
        std::to_string(kMaxN) + " qubits");
  const std::uint64_t dim = std::uint64_t{1} << (2 * n_qubits);
  auto pack = [n_qubits](std::uint64_t idx) {
    return PauliPoly::make_key(
        static_cast<std::uint32_t>(idx & ((std::uint64_t{1} << n_qubits) - 1)),
        static_cast<std::uint32_t>(idx >> n_qubits));
  };
  std::vector<std::uint64_t> coupling_keys;
  for (const auto& u : couplings) {
    if (u.n_qubits() != n_qubits)
      throw std::invalid_argument("commutant_dimension: coupling size mismatch");
    coupling_keys.push_back(PauliPoly::key_of(u));
  }

  if (!hamiltonian) {
    std::int64_t count = 0;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      std::uint64_t key = pack(idx);
      bool ok = true;
      for (auto ck : coupling_keys)
        if (keys_anticommute(key, ck)) { ok = false; break; }
      count += ok;
    }
    return count;
  }

  const StabilizerModel& m = *hamiltonian;
  if (m.n_qubits != n_qubits)
    throw std::invalid_argument("commutant_dimension: Hamiltonian size mismatch");
  const std::uint32_t mi = static_cast<std::uint32_t>(m.independent_basis.size());
  if (mi > 20)
    throw std::invalid_argument("commutant_dimension: stabilizer group too large");
  const std::uint32_t group = 1u << mi;

  // Monomial keys of the independent generators and the coset translations.
  std::vector<std::uint64_t> gen_key(mi);
  for (std::uint32_t r = 0; r < mi; ++r)
    gen_key[r] = PauliPoly::key_of(m.stabilizers[m.independent_basis[r]]);
  std::vector<std::uint64_t> coset_key(group, 0);
  for (std::uint32_t g = 1; g < group; ++g) {
    std::uint32_t low = g & (~g + 1u);
    coset_key[g] = coset_key[g ^ low] ^ gen_key[std::countr_zero(low)];
  }

  // Independent-basis coordinates of every Hamiltonian term.
  std::vector<std::uint32_t> e_coord(m.stabilizers.size(), 0);
  for (std::uint32_t k = 0; k < m.stabilizers.size(); ++k) {
    auto subset = m.reduce_to_stabilizers(m.stabilizers[k]);
    if (!subset) throw std::logic_error("commutant_dimension: stabilizer outside its own group");
    for (auto r : *subset) e_coord[k] |= 1u << r;
  }

  // Coupling rows: (w_u)_r = <u, S_r> over the independent generators.
  std::vector<std::uint32_t> w_rows;
  for (auto ck : coupling_keys) {
    std::uint32_t w = 0;
    for (std::uint32_t r = 0; r < mi; ++r)
      if (keys_anticommute(ck, gen_key[r])) w |= 1u << r;
    w_rows.push_back(w);
  }

  std::vector<std::uint8_t> visited(dim, 0);
  std::int64_t total = 0;
  std::vector<std::uint32_t> canon_buf;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    std::uint64_t key0 = pack(idx);
    std::uint64_t unpack0 =
        (key0 & 0xffffffffULL) | ((key0 >> 32) << n_qubits);
    if (visited[unpack0]) continue;
    for (std::uint32_t g = 0; g < group; ++g) {
      std::uint64_t kg = key0 ^ coset_key[g];
      visited[(kg & 0xffffffffULL) | ((kg >> 32) << n_qubits)] = 1;
    }

    // Affine constraints g . w_u = b_u from the couplings.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;  // (w, b)
    bool feasible = true;
    for (std::size_t u = 0; u < coupling_keys.size(); ++u) {
      std::uint32_t w = w_rows[u];
      std::uint32_t b = keys_anticommute(coupling_keys[u], key0) ? 1u : 0u;
      for (auto& [rw, rb] : rows) {
        std::uint32_t pivot = rw & (~rw + 1u);
        if (w & pivot) { w ^= rw; b ^= rb; }
      }
      if (w == 0) {
        if (b) { feasible = false; break; }
        continue;
      }
      rows.emplace_back(w, b);
    }
    if (!feasible) continue;

    // Anticommuting Hamiltonian terms for this coset.
    std::vector<std::pair<std::uint32_t, double>> active;  // (e_k, J_k)
    for (std::uint32_t k = 0; k < m.stabilizers.size(); ++k)
      if (keys_anticommute(PauliPoly::key_of(m.stabilizers[k]), key0))
        active.emplace_back(e_coord[k], m.weights[k]);

    // Count classes y mod span{w_u} on which the commutator eigenvalue
    // sum_k J_k (-1)^{y.e_k} vanishes for every member.
    canon_buf.assign(group, 0);
    std::vector<std::uint8_t> all_zero(group, 1);
    std::vector<std::uint8_t> seen(group, 0);
    for (std::uint32_t y = 0; y < group; ++y) {
      double lambda = 0;
      for (const auto& [e, j] : active)
        lambda += (std::popcount(y & e) & 1) ? -j : j;
      bool zero = std::abs(lambda) < 1e-9;
      std::uint32_t canon = y;
      for (auto& [rw, rb] : rows) {
        std::uint32_t pivot = rw & (~rw + 1u);
        if (canon & pivot) canon ^= rw;
      }
      seen[canon] = 1;
      if (!zero) all_zero[canon] = 0;
    }
    for (std::uint32_t y = 0; y < group; ++y)
      if (seen[y] && all_zero[y]) ++total;
  }
  return total;
}

std::int64_t commutant_dimension(const StabilizerModel& m, Coupling coupling) {
  std::vector<Pauli> couplings;
  for (std::uint32_t j = 0; j < m.n_qubits; ++j) {
    if (coupling != Coupling::ZOnly) couplings.push_back(Pauli::single(m.n_qubits, j, 'X'));
    if (coupling != Coupling::XOnly) couplings.push_back(Pauli::single(m.n_qubits, j, 'Z'));
  }
  return commutant_dimension(m.n_qubits, couplings, &m);
}

std::vector<std::uint32_t> stabilizer_neighbourhood(
    const StabilizerModel& m, const std::vector<std::uint32_t>& sites) {
  std::set<std::uint32_t> inside(sites.begin(), sites.end());
  std::set<std::uint32_t> out(sites.begin(), sites.end());
  for (const auto& s : m.stabilizers) {
    auto sup = s.support();
    bool touches = std::any_of(sup.begin(), sup.end(),
                               [&](std::uint32_t j) { return inside.count(j) > 0; });
    if (touches) out.insert(sup.begin(), sup.end());
  }
  return std::vector<std::uint32_t>(out.begin(), out.end());
}

bool check_locality(const StabilizerModel& m, const Pauli& x, std::uint32_t k) {
  if (m.n_qubits > PauliPoly::kMaxQubits)
    throw std::invalid_argument("check_locality: model too large for symbolic expansion");
  auto region = stabilizer_neighbourhood(m, x.support());
  std::uint64_t region_mask = 0;
  for (auto j : region) region_mask |= std::uint64_t{1} << j;

  std::vector<std::pair<PauliPoly::Key, double>> ham;
  for (std::uint32_t i = 0; i < m.stabilizers.size(); ++i)
    ham.emplace_back(PauliPoly::key_of(m.stabilizers[i]), m.weights[i]);

  PauliPoly poly = PauliPoly::from(x);
  for (std::uint32_t level = 1; level <= k; ++level) {
    PauliPoly next(m.n_qubits);
    for (const auto& [kp, c] : poly.terms()) {
      for (const auto& [ks, j] : ham) {
        if (PauliPoly::keys_commute(ks, kp)) continue;
        std::uint8_t ph = PauliPoly::mul_phase_pow(ks, kp);
        // [-J S, P] = -2J S P for anticommuting monomials
        next.add_term(ks ^ kp, -2.0 * j * c * kIPow[ph]);
      }
    }
    poly = std::move(next);
    if (poly.empty()) return true;
    for (const auto& [kp, c] : poly.terms()) {
      std::uint64_t sites = PauliPoly::key_x(kp) | PauliPoly::key_z(kp);
      if (sites & ~region_mask) return false;
    }
  }
  return true;
}

}  // namespace qmem
