#include "qmem/reduced.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qmem {

SectorChain make_sector_chain(const StabilizerModel& m, Sector sector) {
  SectorChain chain;
  chain.sector = sector;
  chain.axis = (sector == Sector::Star) ? 'Z' : 'X';
  chain.stab_ids = m.sector_stabilizers(sector);
  chain.m = static_cast<std::uint32_t>(chain.stab_ids.size());
  if (chain.m < 2)
    throw std::invalid_argument("make_sector_chain: sector has fewer than 2 stabilizers");
  chain.coupling = m.sector_weight(sector);
  chain.omega = 4.0 * chain.coupling;
  std::vector<std::uint32_t> local(m.stabilizers.size(), 0);
  for (std::uint32_t i = 0; i < chain.m; ++i) local[chain.stab_ids[i]] = i;
  for (std::uint32_t j = 0; j < m.n_qubits; ++j) {
    auto pair = m.toggled_stabilizers(j, sector);
    chain.families.push_back({j, local[pair[0]], local[pair[1]]});
  }
  return chain;
}

bool ReducedGenerator::all_signs_positive() const {
  for (const auto& p : parts_)
    for (auto s : p.g)
      if (s < 0) return false;
  return true;
}

bool ReducedGenerator::excited(std::uint64_t idx, std::uint32_t part,
                               std::uint32_t i) const {
  const Part& p = parts_[part];
  std::uint64_t bits = (idx >> p.offset) & ((std::uint64_t{1} << p.bits) - 1);
  if (i < p.bits) return (bits >> i) & 1u;
  return std::popcount(bits) & 1u;  // parity-reconstructed last stabilizer
}

namespace {

// flip mask on the stored bits plus the rate-class bit positions
struct FamilyAction {
  std::uint64_t mask;       // xor on the packed index
  std::uint32_t a, b;       // sector-local positions (may equal m-1)
  std::uint32_t part;
  double g;
};

}  // namespace

std::vector<double> ReducedGenerator::apply(std::span<const double> f) const {
  const std::uint64_t n = n_states();
  if (f.size() != n) throw std::invalid_argument("ReducedGenerator::apply: size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    double acc = 0;
    double fi = f[idx];
    for (std::uint32_t pi = 0; pi < parts_.size(); ++pi) {
      const Part& p = parts_[pi];
      std::uint64_t bits = (idx >> p.offset) & ((std::uint64_t{1} << p.bits) - 1);
      bool parity = std::popcount(bits) & 1u;
      for (std::size_t fam = 0; fam < p.chain.families.size(); ++fam) {
        const auto& fm = p.chain.families[fam];
        bool ea = fm.a < p.bits ? ((bits >> fm.a) & 1u) : parity;
        bool eb = fm.b < p.bits ? ((bits >> fm.b) & 1u) : parity;
        double rate = p.rate_by_excited[static_cast<int>(ea) + static_cast<int>(eb)];
        if (rate == 0.0) continue;
        std::uint64_t mask = 0;
        if (fm.a < p.bits) mask |= std::uint64_t{1} << (p.offset + fm.a);
        if (fm.b < p.bits) mask |= std::uint64_t{1} << (p.offset + fm.b);
        acc += rate * (p.g[fam] * f[idx ^ mask] - fi);
      }
    }
    out[idx] = acc;
  }
  return out;
}

double ReducedGenerator::total_rate_bound() const {
  double r = 0;
  for (const auto& p : parts_)
    for (std::size_t fam = 0; fam < p.chain.families.size(); ++fam)
      r += std::max({p.rate_by_excited[0], p.rate_by_excited[1], p.rate_by_excited[2]});
  return r;
}

std::vector<double> ReducedGenerator::propagate(std::vector<double> f, double t,
                                                double tol) const {
  if (f.size() != n_states())
    throw std::invalid_argument("ReducedGenerator::propagate: size mismatch");
  if (t < 0) throw std::invalid_argument("ReducedGenerator::propagate: t must be >= 0");
  if (t == 0) return f;
  const double rate = std::max(total_rate_bound(), 1e-300);
  double remaining = t;
  while (remaining > 0) {
    double step = std::min(remaining, 500.0 / rate);
    double mu = rate * step;
    // e^{tL} = e^{-mu} sum_k mu^k/k! P^k with P = I + L/rate
    std::vector<double> acc(f.size(), 0.0);
    std::vector<double> term = f;
    double log_w = -mu;  // log of mu^k/k! e^{-mu}, k = 0
    double covered = 0;
    for (std::uint64_t k = 0;; ++k) {
      double w = std::exp(log_w);
      for (std::size_t i = 0; i < f.size(); ++i) acc[i] += w * term[i];
      covered += w;
      if (1.0 - covered <= tol && static_cast<double>(k) >= mu) break;
      if (k > 200 + 10 * mu)
        throw std::runtime_error("ReducedGenerator::propagate: series truncation failure");
      // term <- P term
      std::vector<double> lterm = apply(term);
      for (std::size_t i = 0; i < f.size(); ++i) term[i] += lterm[i] / rate;
      log_w += std::log(mu) - std::log(static_cast<double>(k) + 1.0);
    }
    f = std::move(acc);
    remaining -= step;
  }
  return f;
}

std::vector<double> ReducedGenerator::stationary() const {
  const std::uint64_t n = n_states();
  std::vector<double> pi(n, 1.0);
  for (std::uint32_t p = 0; p < parts_.size(); ++p) {
    const Part& part = parts_[p];
    double q = std::exp(-2.0 * beta_ * part.chain.coupling);  // weight per excitation
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      std::uint64_t bits = (idx >> part.offset) & ((std::uint64_t{1} << part.bits) - 1);
      std::uint32_t n_exc = std::popcount(bits);
      n_exc += std::popcount(bits) & 1u;  // parity bit
      pi[idx] *= std::pow(q, n_exc);
    }
  }
  double z = 0;
  for (double v : pi) z += v;
  for (double& v : pi) v /= z;
  return pi;
}

std::vector<double> ReducedGenerator::dress_vector(const DressSpec& dress) const {
  const std::uint64_t n = n_states();
  // per part: local membership mask over the m stabilizers
  std::vector<std::uint64_t> member(parts_.size(), 0);
  for (auto id : dress.stabilizer_ids) {
    bool found = false;
    for (std::uint32_t p = 0; p < parts_.size(); ++p) {
      const auto& ids = parts_[p].chain.stab_ids;
      auto it = std::find(ids.begin(), ids.end(), id);
      if (it != ids.end()) {
        member[p] ^= std::uint64_t{1} << (it - ids.begin());
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument(
          "dress_vector: stabilizer " + std::to_string(id) +
          " is outside the sectors of this generator");
  }
  std::vector<double> f(n, 1.0);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    int parity = 0;
    for (std::uint32_t p = 0; p < parts_.size(); ++p) {
      const Part& part = parts_[p];
      std::uint64_t bits = (idx >> part.offset) & ((std::uint64_t{1} << part.bits) - 1);
      std::uint64_t stored = member[p] & ((std::uint64_t{1} << part.bits) - 1);
      parity ^= std::popcount(bits & stored) & 1;
      if ((member[p] >> part.bits) & 1u)  // subset contains the parity stabilizer
        parity ^= std::popcount(bits) & 1;
    }
    f[idx] = parity ? -1.0 : 1.0;
  }
  return f;
}

std::vector<double> ReducedGenerator::basis_column(std::uint64_t j) const {
  std::vector<double> e(n_states(), 0.0);
  e[j] = 1.0;
  return apply(e);
}

ReducedGenerator build_reduced_generator(const StabilizerModel& m,
                                         const SpectralFunction& h, const Pauli& q,
                                         std::optional<std::vector<Sector>> sectors) {
  if (q.n_qubits() != m.n_qubits)
    throw std::invalid_argument("build_reduced_generator: qubit count mismatch");
  for (const auto& s : m.stabilizers)
    if (!commutes(q, s))
      throw std::invalid_argument(
          "build_reduced_generator: Q must commute with every stabilizer "
          "(a logical operator or the identity)");

  std::vector<Sector> chosen;
  if (sectors) chosen = *sectors;
  else chosen = m.sectors_present();

  ReducedGenerator gen;
  gen.model_ = &m;
  gen.beta_ = h.beta();
  std::uint32_t offset = 0;
  for (Sector s : chosen) {
    ReducedGenerator::Part part;
    part.chain = make_sector_chain(m, s);
    part.bits = part.chain.m - 1;
    part.offset = offset;
    offset += part.bits;
    part.rate_by_excited = {h.at(-part.chain.omega), h.at(0.0), h.at(part.chain.omega)};
    for (const auto& fam : part.chain.families) {
      Pauli flip = Pauli::single(m.n_qubits, fam.site, part.chain.axis);
      part.g.push_back(static_cast<std::int8_t>(conjugate_sign(flip, q)));
    }
    gen.parts_.push_back(std::move(part));
  }
  gen.state_bits_ = offset;
  if (offset > ReducedGenerator::kMaxStateBits) {
    std::ostringstream msg;
    msg << "build_reduced_generator: syndrome space needs " << offset
        << " bits, above the dense limit of " << ReducedGenerator::kMaxStateBits
        << "; use the kinetic Monte Carlo sampler for this size";
    throw std::length_error(msg.str());
  }
  return gen;
}

std::vector<Sector> minimal_sectors(const StabilizerModel& m, const Pauli& q,
                                    const DressSpec& dress) {
  std::set<Sector> keep;
  for (auto id : dress.stabilizer_ids) keep.insert(m.stab_sector.at(id));
  for (Sector s : m.sectors_present()) {
    if (keep.count(s)) continue;
    char axis = (s == Sector::Star) ? 'Z' : 'X';
    for (std::uint32_t j = 0; j < m.n_qubits; ++j) {
      if (conjugate_sign(Pauli::single(m.n_qubits, j, axis), q) < 0) {
        keep.insert(s);
        break;
      }
    }
  }
  if (keep.empty()) keep.insert(m.sectors_present().front());
  std::vector<Sector> out;
  for (Sector s : m.sectors_present())
    if (keep.count(s)) out.push_back(s);
  return out;
}

std::vector<double> propagate_reduced(const ReducedGenerator& gen,
                                      std::span<const double> f, double t, double tol) {
  return gen.propagate(std::vector<double>(f.begin(), f.end()), t, tol);
}

std::vector<double> autocorrelation(const StabilizerModel& m, const SpectralFunction& h,
                                    const Pauli& q, const DressSpec& dress,
                                    std::span<const double> times) {
  ReducedGenerator gen = build_reduced_generator(m, h, q, minimal_sectors(m, q, dress));
  std::vector<double> pi = gen.stationary();
  std::vector<double> f0 = gen.dress_vector(dress);
  std::vector<double> ft = f0;
  std::vector<double> out;
  double prev_t = 0;
  for (double t : times) {
    if (t < prev_t) throw std::invalid_argument("autocorrelation: times must be ascending");
    ft = gen.propagate(std::move(ft), t - prev_t);
    prev_t = t;
    double acc = 0;
    for (std::size_t i = 0; i < ft.size(); ++i) acc += pi[i] * ft[i] * f0[i];
    out.push_back(acc);
  }
  return out;
}

std::vector<double> geometric_grid(double t_lo, double t_hi, std::uint32_t per_decade) {
  if (!(t_lo > 0) || !(t_hi > t_lo) || per_decade == 0)
    throw std::invalid_argument("geometric_grid: bad parameters");
  std::vector<double> out;
  double step = std::pow(10.0, 1.0 / per_decade);
  for (double t = t_lo; t <= t_hi * (1 + 1e-12); t *= step) out.push_back(t);
  return out;
}

LifetimeFit fit_lifetime(std::span<const double> times, std::span<const double> values) {
  LifetimeFit fit;
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] >= 0.1 && values[i] <= 0.8) {
      ts.push_back(times[i]);
      ys.push_back(std::log(values[i]));
    }
  }
  fit.n_points = ts.size();
  if (ts.size() < 3) {
    fit.note = "fewer than 3 points in the [0.1, 0.8] window";
    return fit;
  }
  fit.t_lo = ts.front();
  fit.t_hi = ts.back();
  double n = static_cast<double>(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i]; sy += ys[i]; stt += ts[i] * ts[i]; sty += ts[i] * ys[i];
  }
  double denom = n * stt - st * st;
  if (denom <= 0) {
    fit.note = "degenerate time window";
    return fit;
  }
  double slope = (n * sty - st * sy) / denom;
  double intercept = (sy - slope * st) / n;
  double ss = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double r = ys[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  fit.log_residual = std::sqrt(ss / n);
  if (slope >= 0) {
    fit.note = "non-decaying window";
    return fit;
  }
  fit.tau = -1.0 / slope;
  fit.clean = fit.log_residual < 0.05;
  if (!fit.clean) fit.note = "log-linear residual above 0.05; decay is not a clean exponential";
  return fit;
}

LifetimeFit lifetime(const StabilizerModel& m, const SpectralFunction& h,
                     const Pauli& q, const DressSpec& dress,
                     const LifetimeOptions& opts) {
  ReducedGenerator gen = build_reduced_generator(m, h, q, minimal_sectors(m, q, dress));
  std::vector<double> pi = gen.stationary();
  std::vector<double> f0 = gen.dress_vector(dress);
  std::vector<double> ft = f0;
  std::vector<double> ts, cs;
  double step = std::pow(10.0, 1.0 / opts.points_per_decade);
  double prev_t = 0;
  for (double t = opts.t_start; t <= opts.t_max; t *= step) {
    ft = gen.propagate(std::move(ft), t - prev_t);
    prev_t = t;
    double acc = 0;
    for (std::size_t i = 0; i < ft.size(); ++i) acc += pi[i] * ft[i] * f0[i];
    ts.push_back(t);
    cs.push_back(acc);
    if (acc < 0.05) break;
  }
  return fit_lifetime(ts, cs);
}

}  // namespace qmem
