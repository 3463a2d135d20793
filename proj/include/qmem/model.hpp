#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/pauli.hpp"

namespace qmem {

enum class ModelKind { IsingRing, KitaevTorus };
enum class Sector { Bond, Star, Plaquette };

std::string sector_name(Sector s);

// Excitation pattern over the stabilizers of one or two sectors.
// `excited[i]` is aligned with StabilizerModel::sector_stabilizers(sectors[i]).
struct SyndromeState {
  std::vector<Sector> sectors;
  std::vector<std::vector<std::uint8_t>> excited;
};

struct StabilizerExpectation {
  double value = 0.0;   // Re tr(state * monomial); 0 whenever not reducible
  bool reducible = false;
};

// Commuting-term Hamiltonian H = -sum_k J_k S_k on a ring or torus, with
// logical operators and an independent generating subset of the stabilizers.
class StabilizerModel {
public:
  ModelKind kind;
  std::uint32_t n_qubits = 0;
  std::uint32_t size = 0;  // N for the ring, K for the torus (N = 2K^2)

  std::vector<Pauli> stabilizers;       // all phase +1
  std::vector<Sector> stab_sector;      // sector of each stabilizer
  std::vector<double> weights;          // J_k > 0, default 1
  std::vector<std::vector<std::uint32_t>> constraints;  // product = identity
  std::vector<Pauli> logicals;
  std::vector<std::string> logical_names;
  std::vector<std::uint32_t> independent_basis;  // stabilizer indices

  const Pauli& logical(std::string_view name) const;
  std::vector<std::uint32_t> sector_stabilizers(Sector s) const;
  std::vector<Sector> sectors_present() const;
  // Sector-uniform coupling weight; throws if the sector's weights differ.
  double sector_weight(Sector s) const;

  // The two stabilizers of `sector` toggled by a single-site flip at `site`
  // (the stabilizers of that sector anticommuting with the flip operator).
  std::array<std::uint32_t, 2> toggled_stabilizers(std::uint32_t site, Sector sector) const;

  // Writes p's mask pattern as a product over the independent basis, if
  // possible. Returns the chosen subset (indices into independent_basis).
  std::optional<std::vector<std::uint32_t>> reduce_to_stabilizers(const Pauli& p) const;

  std::string describe_json() const;

  // --- internal solver state, built once at construction ---
  struct Gf2Solver {
    std::uint32_t bits = 0;   // 2 * n_qubits
    std::uint32_t words = 0;
    std::vector<std::vector<std::uint64_t>> rows;   // row-echelon rows
    std::vector<std::vector<std::uint64_t>> combos; // generator combination per row
    std::vector<std::uint32_t> pivots;
  };
  const Gf2Solver& solver() const { return solver_; }
  void finalize();  // validates invariants and builds the solver

private:
  Gf2Solver solver_;
};

StabilizerModel build_ising_ring(std::uint32_t n_sites,
                                 const std::vector<double>& weights = {});
StabilizerModel build_kitaev_torus(std::uint32_t k,
                                   const std::vector<double>& star_weights = {},
                                   const std::vector<double>& plaquette_weights = {});

// Edge indexing on the K x K torus: id(r, c, o) = (r*K + c)*2 + o with
// o = 0 horizontal, o = 1 vertical; all indices 0-based, periodic.
std::uint32_t torus_edge(std::uint32_t k, std::uint32_t r, std::uint32_t c, std::uint32_t o);

// Expectation in the zero-temperature state that assigns +1 to every
// stabilizer and 0 to every logical direction.
StabilizerExpectation ground_expectation(const StabilizerModel& m, const Pauli& p);

// Exact finite-volume Gibbs expectation Re tr(rho_beta p) via the
// constrained product measure over stabilizer eigenvalues.
double gibbs_expectation(const StabilizerModel& m, const Pauli& p, double beta);

// Full complex trace tr(rho_beta p); gibbs_expectation is its real part.
std::complex<double> gibbs_trace(const StabilizerModel& m, const Pauli& p, double beta);
std::complex<double> ground_trace(const StabilizerModel& m, const Pauli& p);

// Energy of a syndrome under H = -sum J_k S_k; throws on parity violation.
double hamiltonian_energy(const StabilizerModel& m, const SyndromeState& syndrome);

// <prod_{i in A} s_i> in the product measure over M +/-1 variables with
// weights exp(beta J_i s_i), conditioned on even total excitation parity.
double constrained_sector_moment(const std::vector<double>& sector_weights,
                                 const std::vector<std::uint8_t>& in_subset,
                                 double beta);

}  // namespace qmem
