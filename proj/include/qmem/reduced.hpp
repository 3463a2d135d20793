#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmem/model.hpp"
#include "qmem/spectral.hpp"

namespace qmem {

// Classical chain data for one stabilizer sector: every single-site flip
// toggles exactly two stabilizers of the sector, with a rate set by how
// many of the two are currently excited (pair creation, hop, pair
// annihilation).
struct SectorChain {
  Sector sector;
  char axis;                      // flip operator axis ('X' or 'Z')
  std::uint32_t m = 0;            // stabilizers in the sector
  std::vector<std::uint32_t> stab_ids;  // global indices, size m
  struct Family {
    std::uint32_t site;
    std::uint32_t a, b;           // sector-local toggled stabilizer positions
  };
  std::vector<Family> families;   // one per lattice site
  double coupling = 1.0;          // uniform J of the sector
  double omega = 4.0;             // 2*(J + J)
};

SectorChain make_sector_chain(const StabilizerModel& m, Sector sector);

// Product F_Q = prod of the listed stabilizers (global indices); the empty
// list is the bare encoding F = 1.
struct DressSpec {
  std::vector<std::uint32_t> stabilizer_ids;
};

// Signed classical generator  (L F)(eta) = sum_j D_j(eta) (g_j F(flip_j eta) - F(eta))
// on the even-parity syndrome space of one or two sectors. States are
// indexed by the first (m-1) stabilizer bits of each part; the last bit is
// parity-reconstructed.
class ReducedGenerator {
public:
  struct Part {
    SectorChain chain;
    std::uint32_t bits = 0;       // m - 1
    std::uint32_t offset = 0;     // bit offset in the packed state index
    std::vector<std::int8_t> g;   // per family
    std::array<double, 3> rate_by_excited{};  // index = #excited of the pair
  };

  static constexpr std::uint32_t kMaxStateBits = 26;

  const std::vector<Part>& parts() const { return parts_; }
  std::uint64_t n_states() const { return std::uint64_t{1} << state_bits_; }
  std::uint32_t state_bits() const { return state_bits_; }
  double beta() const { return beta_; }
  bool all_signs_positive() const;

  // excitation bit of sector-local stabilizer i in part p (parity bit included)
  bool excited(std::uint64_t idx, std::uint32_t part, std::uint32_t i) const;

  std::vector<double> apply(std::span<const double> f) const;

  // exp(tL) f by uniformization; the truncation tail is bounded by tol in
  // sup norm, so contraction is preserved.
  std::vector<double> propagate(std::vector<double> f, double t, double tol = 1e-12) const;

  // Constrained Gibbs law on the packed state space.
  std::vector<double> stationary() const;

  // F = prod of stabilizers as a +/-1 function on the state space.
  std::vector<double> dress_vector(const DressSpec& dress) const;

  // dense column action, used for matrix-level comparisons in tests
  std::vector<double> basis_column(std::uint64_t j) const;

  double total_rate_bound() const;  // uniformization constant R

private:
  friend ReducedGenerator build_reduced_generator(const StabilizerModel&,
                                                  const SpectralFunction&,
                                                  const Pauli&,
                                                  std::optional<std::vector<Sector>>);
  const StabilizerModel* model_ = nullptr;
  std::vector<Part> parts_;
  std::uint32_t state_bits_ = 0;
  double beta_ = 0;
};

// Q must commute with every stabilizer (a logical operator or the
// identity). With no sector list the generator covers every sector the
// dynamics can act on (both sectors for the torus).
ReducedGenerator build_reduced_generator(
    const StabilizerModel& m, const SpectralFunction& h, const Pauli& q,
    std::optional<std::vector<Sector>> sectors = std::nullopt);

// Sectors genuinely needed to evolve Q F: the sectors F touches plus any
// sector whose flips pick up a -1 sign from Q.
std::vector<Sector> minimal_sectors(const StabilizerModel& m, const Pauli& q,
                                    const DressSpec& dress);

std::vector<double> propagate_reduced(const ReducedGenerator& gen,
                                      std::span<const double> f, double t,
                                      double tol = 1e-12);

// <exp(tL_Q) F_Q, F_Q> in the constrained Gibbs measure, one value per time.
std::vector<double> autocorrelation(const StabilizerModel& m, const SpectralFunction& h,
                                    const Pauli& q, const DressSpec& dress,
                                    std::span<const double> times);

struct LifetimeFit {
  double tau = 0;
  double log_residual = 0;  // rms residual of the log-linear fit
  double t_lo = 0, t_hi = 0;
  std::size_t n_points = 0;
  bool clean = false;
  std::string note;
};

// Least-squares exponential fit over the window where the curve sits in
// [0.1, 0.8] of its initial value.
LifetimeFit fit_lifetime(std::span<const double> times, std::span<const double> values);

struct LifetimeOptions {
  double t_start = 1e-2;
  double t_max = 1e6;
  std::uint32_t points_per_decade = 20;
};

LifetimeFit lifetime(const StabilizerModel& m, const SpectralFunction& h,
                     const Pauli& q, const DressSpec& dress,
                     const LifetimeOptions& opts = {});

std::vector<double> geometric_grid(double t_lo, double t_hi, std::uint32_t per_decade);

}  // namespace qmem
