#include "qmem/kmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace qmem {

std::vector<std::uint8_t> sample_gibbs_syndrome(const StabilizerModel& m, Sector sector,
                                                double beta, Rng& rng) {
  if (beta < 0) throw std::domain_error("sample_gibbs_syndrome: beta must be >= 0");
  auto ids = m.sector_stabilizers(sector);
  std::vector<double> p_exc(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    p_exc[i] = 1.0 / (1.0 + std::exp(2.0 * beta * m.weights[ids[i]]));
  std::vector<std::uint8_t> bits(ids.size());
  while (true) {
    std::uint32_t parity = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      bits[i] = rng.bernoulli(p_exc[i]) ? 1 : 0;
      parity ^= bits[i];
    }
    if (!parity) return bits;  // rejection keeps the conditional law exact
  }
}

GillespieChain::GillespieChain(const ReducedGenerator& gen, const DressSpec& dress)
    : gen_(&gen) {
  const auto& parts = gen.parts();
  bits_.resize(parts.size());
  stab_site_lists_.resize(parts.size());
  dress_member_.assign(parts.size(), 0);
  for (auto id : dress.stabilizer_ids) {
    bool found = false;
    for (std::uint32_t p = 0; p < parts.size(); ++p) {
      const auto& ids = parts[p].chain.stab_ids;
      auto it = std::find(ids.begin(), ids.end(), id);
      if (it != ids.end()) {
        dress_member_[p] ^= std::uint64_t{1} << (it - ids.begin());
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("GillespieChain: dress stabilizer outside chain sectors");
  }
  for (std::uint32_t p = 0; p < parts.size(); ++p) {
    bits_[p].assign(parts[p].chain.m, 0);
    stab_site_lists_[p].resize(parts[p].chain.m);
    for (std::size_t fam = 0; fam < parts[p].chain.families.size(); ++fam) {
      const auto& f = parts[p].chain.families[fam];
      Site s;
      s.part = p;
      s.a = f.a;
      s.b = f.b;
      s.g = parts[p].g[fam];
      int overlap = static_cast<int>((dress_member_[p] >> f.a) & 1u) +
                    static_cast<int>((dress_member_[p] >> f.b) & 1u);
      s.f_toggle = (overlap % 2) ? -1.0 : 1.0;
      std::uint32_t site_id = static_cast<std::uint32_t>(sites_.size());
      sites_.push_back(s);
      stab_site_lists_[p][f.a].push_back(site_id);
      stab_site_lists_[p][f.b].push_back(site_id);
    }
  }
  site_rate_.assign(sites_.size(), 0.0);
  fenwick_.assign(sites_.size() + 1, 0.0);
  std::vector<std::vector<std::uint8_t>> vacuum;
  for (std::uint32_t p = 0; p < parts.size(); ++p)
    vacuum.emplace_back(parts[p].chain.m, 0);
  reset(vacuum);
}

double GillespieChain::rate_of(std::uint32_t site) const {
  const Site& s = sites_[site];
  int n_exc = bits_[s.part][s.a] + bits_[s.part][s.b];
  return gen_->parts()[s.part].rate_by_excited[n_exc];
}

void GillespieChain::set_rate(std::uint32_t site, double r) {
  double delta = r - site_rate_[site];
  if (delta == 0.0) return;
  site_rate_[site] = r;
  total_rate_ += delta;
  for (std::uint32_t i = site + 1; i < fenwick_.size(); i += i & (~i + 1u))
    fenwick_[i] += delta;
}

std::uint32_t GillespieChain::pick_site(double u) const {
  std::uint32_t pos = 0;
  std::uint32_t mask = 1;
  while ((mask << 1) < fenwick_.size()) mask <<= 1;
  for (; mask; mask >>= 1) {
    std::uint32_t next = pos + mask;
    if (next < fenwick_.size() && fenwick_[next] < u) {
      u -= fenwick_[next];
      pos = next;
    }
  }
  return std::min(pos, static_cast<std::uint32_t>(sites_.size() - 1));
}

void GillespieChain::rebuild_rates() {
  std::fill(fenwick_.begin(), fenwick_.end(), 0.0);
  std::fill(site_rate_.begin(), site_rate_.end(), 0.0);
  total_rate_ = 0;
  for (std::uint32_t s = 0; s < sites_.size(); ++s) set_rate(s, rate_of(s));
}

void GillespieChain::reset(const std::vector<std::vector<std::uint8_t>>& sector_bits) {
  if (sector_bits.size() != bits_.size())
    throw std::invalid_argument("GillespieChain::reset: wrong number of sectors");
  for (std::uint32_t p = 0; p < bits_.size(); ++p) {
    if (sector_bits[p].size() != bits_[p].size())
      throw std::invalid_argument("GillespieChain::reset: sector size mismatch");
    std::uint32_t parity = 0;
    for (auto b : sector_bits[p]) parity ^= b & 1u;
    if (parity) throw std::invalid_argument("GillespieChain::reset: odd excitation parity");
    bits_[p] = sector_bits[p];
  }
  sign_ = 1.0;
  f_val_ = 1.0;
  for (std::uint32_t p = 0; p < bits_.size(); ++p) {
    std::uint32_t par = 0;
    for (std::uint32_t i = 0; i < bits_[p].size(); ++i)
      if ((dress_member_[p] >> i) & 1u) par ^= bits_[p][i];
    if (par) f_val_ = -f_val_;
  }
  rebuild_rates();
  steps_since_rebuild_ = 0;
}

void GillespieChain::sample_initial(double beta, Rng& rng) {
  std::vector<std::vector<std::uint8_t>> drawn;
  for (const auto& part : gen_->parts()) {
    double p_exc = 1.0 / (1.0 + std::exp(2.0 * beta * part.chain.coupling));
    std::vector<std::uint8_t> bits(part.chain.m);
    while (true) {
      std::uint32_t parity = 0;
      for (auto& b : bits) {
        b = rng.bernoulli(p_exc) ? 1 : 0;
        parity ^= b;
      }
      if (!parity) break;
    }
    drawn.push_back(std::move(bits));
  }
  reset(drawn);
}

double GillespieChain::draw_wait(Rng& rng) const {
  if (total_rate_ <= 0) return std::numeric_limits<double>::infinity();
  return -std::log(rng.uniform_pos()) / total_rate_;
}

void GillespieChain::jump(Rng& rng) {
  double u = rng.uniform() * total_rate_;
  std::uint32_t site = pick_site(u);
  last_site_ = site;
  const Site& s = sites_[site];
  bits_[s.part][s.a] ^= 1;
  bits_[s.part][s.b] ^= 1;
  sign_ *= s.g;
  f_val_ *= s.f_toggle;
  for (auto other : stab_site_lists_[s.part][s.a]) set_rate(other, rate_of(other));
  for (auto other : stab_site_lists_[s.part][s.b]) set_rate(other, rate_of(other));
  if (++steps_since_rebuild_ >= (std::uint64_t{1} << 20)) {
    rebuild_rates();  // shed accumulated float drift
    steps_since_rebuild_ = 0;
  }
}

double GillespieChain::step(Rng& rng) {
  double dt = draw_wait(rng);
  if (std::isinf(dt)) return dt;
  jump(rng);
  return dt;
}

bool GillespieChain::excited(std::uint32_t part, std::uint32_t local) const {
  return bits_[part][local];
}

bool GillespieChain::parity_even() const {
  for (const auto& b : bits_) {
    std::uint32_t parity = 0;
    for (auto v : b) parity ^= v & 1u;
    if (parity) return false;
  }
  return true;
}

std::uint64_t GillespieChain::packed_state() const {
  std::uint64_t idx = 0;
  const auto& parts = gen_->parts();
  for (std::uint32_t p = 0; p < parts.size(); ++p)
    for (std::uint32_t i = 0; i < parts[p].bits; ++i)
      if (bits_[p][i]) idx |= std::uint64_t{1} << (parts[p].offset + i);
  return idx;
}

KmcResult run_autocorrelation(const StabilizerModel& m, const SpectralFunction& h,
                              const Pauli& q, const DressSpec& dress,
                              std::span<const double> times, std::uint32_t n_traj,
                              std::uint64_t seed, std::uint32_t threads) {
  if (n_traj < 100)
    throw std::invalid_argument("run_autocorrelation: need at least 100 trajectories");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1])
      throw std::invalid_argument("run_autocorrelation: times must be ascending");

  ReducedGenerator gen = build_reduced_generator(m, h, q, minimal_sectors(m, q, dress));
  const std::size_t n_times = times.size();
  std::vector<double> samples(static_cast<std::size_t>(n_traj) * n_times);
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> jumps(threads, 0);

  auto worker = [&](std::uint32_t tid, std::uint32_t lo, std::uint32_t hi) {
    GillespieChain chain(gen, dress);
    std::uint64_t local_jumps = 0;
    for (std::uint32_t traj = lo; traj < hi; ++traj) {
      Rng rng(seed, traj);
      chain.sample_initial(h.beta(), rng);
      double f0 = chain.dress_value();
      double t_now = 0;
      double jump_at = chain.draw_wait(rng);
      for (std::size_t k = 0; k < n_times; ++k) {
        while (jump_at <= times[k]) {
          chain.jump(rng);
          ++local_jumps;
          t_now = jump_at;
          jump_at = t_now + chain.draw_wait(rng);
        }
        samples[static_cast<std::size_t>(traj) * n_times + k] =
            chain.sign_weight() * chain.dress_value() * f0;
      }
    }
    jumps[tid] += local_jumps;
  };

  if (threads == 1) {
    worker(0, 0, n_traj);
  } else {
    std::vector<std::thread> pool;
    std::uint32_t chunk = (n_traj + threads - 1) / threads;
    for (std::uint32_t tid = 0; tid < threads; ++tid) {
      std::uint32_t lo = tid * chunk;
      std::uint32_t hi = std::min(n_traj, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, tid, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  KmcResult out;
  out.seed = seed;
  out.n_traj = n_traj;
  for (auto j : jumps) out.total_jumps += j;
  for (std::size_t k = 0; k < n_times; ++k) {
    double sum = 0, sumsq = 0;
    for (std::uint32_t traj = 0; traj < n_traj; ++traj) {
      double v = samples[static_cast<std::size_t>(traj) * n_times + k];
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / n_traj;
    double var = std::max(0.0, (sumsq - n_traj * mean * mean) / (n_traj - 1.0));
    out.curve.push_back({times[k], mean, std::sqrt(var / n_traj)});
  }
  return out;
}

}  // namespace qmem
