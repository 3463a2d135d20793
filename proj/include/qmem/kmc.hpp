#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qmem/model.hpp"
#include "qmem/reduced.hpp"
#include "qmem/rng.hpp"
#include "qmem/spectral.hpp"

namespace qmem {

// Exact sample of the constrained Gibbs law of one sector: independent
// excitation bits conditioned on even parity by rejection.
std::vector<std::uint8_t> sample_gibbs_syndrome(const StabilizerModel& m, Sector sector,
                                                double beta, Rng& rng);

struct KmcCurvePoint {
  double t = 0;
  double mean = 0;
  double std_error = 0;
};

struct KmcResult {
  std::vector<KmcCurvePoint> curve;
  std::uint64_t seed = 0;
  std::uint32_t n_traj = 0;
  std::uint64_t total_jumps = 0;
};

// Gillespie estimate of <exp(tL_Q) F_Q, F_Q>_beta. Simulates the unsigned
// chain and carries the sign weight prod g(j) over the jump sites; each
// trajectory owns stream (seed, index), so results are independent of the
// thread count and bit-identical under the same seed.
KmcResult run_autocorrelation(const StabilizerModel& m, const SpectralFunction& h,
                              const Pauli& q, const DressSpec& dress,
                              std::span<const double> times, std::uint32_t n_traj,
                              std::uint64_t seed, std::uint32_t threads = 1);

// Single continuous-time chain over the syndrome space of a
// ReducedGenerator, with a binary-indexed tree over per-site rates.
class GillespieChain {
public:
  GillespieChain(const ReducedGenerator& gen, const DressSpec& dress);

  void reset(const std::vector<std::vector<std::uint8_t>>& sector_bits);
  void sample_initial(double beta, Rng& rng);

  // waiting time to the next jump from the current state (inf if frozen)
  double draw_wait(Rng& rng) const;
  // selects and applies one jump
  void jump(Rng& rng);
  // draw_wait + jump
  double step(Rng& rng);

  double total_rate() const { return total_rate_; }
  std::uint32_t n_sites() const { return static_cast<std::uint32_t>(sites_.size()); }
  double site_rate(std::uint32_t site) const { return site_rate_[site]; }
  std::uint32_t last_site() const { return last_site_; }

  double sign_weight() const { return sign_; }
  double dress_value() const { return f_val_; }
  bool excited(std::uint32_t part, std::uint32_t local) const;
  bool parity_even() const;
  std::uint64_t packed_state() const;  // matches ReducedGenerator indexing

private:
  struct Site {
    std::uint32_t part;
    std::uint32_t a, b;   // sector-local toggled stabilizer positions
    double g;
    double f_toggle;      // -1 if the flip toggles F_Q
  };

  const ReducedGenerator* gen_;
  std::vector<Site> sites_;
  std::vector<std::vector<std::uint8_t>> bits_;  // full per-part syndrome
  std::vector<std::vector<std::vector<std::uint32_t>>> stab_site_lists_;
  std::vector<std::uint64_t> dress_member_;      // per part membership mask
  std::vector<double> site_rate_;
  std::vector<double> fenwick_;
  double total_rate_ = 0;
  double sign_ = 1, f_val_ = 1;
  std::uint32_t last_site_ = 0;
  std::uint64_t steps_since_rebuild_ = 0;

  double rate_of(std::uint32_t site) const;
  void set_rate(std::uint32_t site, double r);
  std::uint32_t pick_site(double u) const;
  void rebuild_rates();
};

}  // namespace qmem
