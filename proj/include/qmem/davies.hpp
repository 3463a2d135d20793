#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qmem/model.hpp"
#include "qmem/pauli_poly.hpp"
#include "qmem/spectral.hpp"

namespace qmem {

enum class Coupling { XOnly, ZOnly, Both };

// One coupling family: a single-site operator together with the pair of
// stabilizers it anticommutes with and the resulting transition frequency.
struct JumpFamily {
  std::uint32_t site;
  char axis;                       // 'X' or 'Z'
  Sector sector;                   // sector of the toggled stabilizers
  std::array<std::uint32_t, 2> stabs;  // global stabilizer indices
  double omega;                    // 2*(J_a + J_b)
};

struct DaviesJumpSet {
  Coupling coupling;
  std::vector<JumpFamily> families;
  std::vector<double> frequencies() const;  // distinct positive omegas
};

DaviesJumpSet build_jump_set(const StabilizerModel& m, Coupling coupling);

// Symbolic pieces of a family, as polynomials over Pauli monomials:
// lowering = P^- u = u P^+, dephasing = P^0 u, projections P^{+,-,0}.
PauliPoly lowering_op(const StabilizerModel& m, const JumpFamily& f);
PauliPoly dephasing_op(const StabilizerModel& m, const JumpFamily& f);
PauliPoly projection_minus(const StabilizerModel& m, const JumpFamily& f);
PauliPoly projection_plus(const StabilizerModel& m, const JumpFamily& f);
PauliPoly projection_zero(const StabilizerModel& m, const JumpFamily& f);

// Weak-coupling generator in the Heisenberg picture,
//   L(X) = i[H, X] + (1/2) sum_{families, omega} h(omega)
//          (S^dag(omega) [X, S(omega)] + [S^dag(omega), X] S(omega)),
// applied term-by-term in the Pauli monomial basis.
class Lindbladian {
public:
  Lindbladian(const StabilizerModel& m, const DaviesJumpSet& jumps,
              const SpectralFunction& h);

  const StabilizerModel& model() const { return *model_; }
  double beta() const { return beta_; }

  PauliPoly apply(const PauliPoly& x) const;             // full generator
  PauliPoly apply_hamiltonian(const PauliPoly& x) const; // i[H, x]
  PauliPoly apply_dissipative(const PauliPoly& x) const;

  // exp(tL)(x) by scaled Taylor summation; rel_tol is per step.
  PauliPoly propagate(const PauliPoly& x, double t, double rel_tol = 1e-9) const;

private:
  struct Term {
    PauliPoly::Key key;
    std::complex<double> c;
  };
  struct FamilyOps {
    double rate_down, rate_up, rate_zero;  // h(omega), h(-omega), h(0)
    std::vector<Term> a, adag, a0;         // operator expansions
    std::vector<Term> adag_a, a_adag, a0_sq;
  };

  const StabilizerModel* model_;
  double beta_;
  std::vector<Term> ham_;       // -J_k S_k terms
  std::vector<FamilyOps> fams_;
  double step_scale_;           // crude bound on the generator norm

  void accumulate_dissipative(PauliPoly::Key key, std::complex<double> coeff,
                              PauliPoly& out) const;
};

// tr(rho_beta X) for a polynomial observable, via exact stabilizer reduction.
std::complex<double> gibbs_trace(const StabilizerModel& m, const PauliPoly& x, double beta);

// Liouville inner product <A, B>_beta = tr(rho_beta A^dagger B).
std::complex<double> gibbs_inner(const StabilizerModel& m, const PauliPoly& a,
                                 const PauliPoly& b, double beta);

struct DetailedBalanceReport {
  double commutation_residual = 0;  // max |[delta, L_dis] P| over sampled basis
  double self_adjoint_asymmetry = 0;
  std::size_t basis_checked = 0;
  std::size_t pairs_checked = 0;
};

// basis_limit = 0 means the full monomial basis.
DetailedBalanceReport check_detailed_balance(const Lindbladian& lind,
                                             std::size_t basis_limit = 0,
                                             std::size_t n_pairs = 20,
                                             std::uint64_t seed = 1);

// Dimension of the joint commutant of the listed monomials, optionally
// together with the model Hamiltonian. Works in the Pauli basis: the
// Hamiltonian couples monomials only within cosets of the stabilizer
// group, where commutation reduces to a character condition.
std::int64_t commutant_dimension(std::uint32_t n_qubits,
                                 const std::vector<Pauli>& couplings,
                                 const StabilizerModel* hamiltonian);

// Convenience: couplings implied by the jump set, plus H.
std::int64_t commutant_dimension(const StabilizerModel& m, Coupling coupling);

// Verifies that nested commutators [H, [H, ... [H, X]]] up to order k stay
// supported inside the one-layer neighbourhood of X's support.
bool check_locality(const StabilizerModel& m, const Pauli& x, std::uint32_t k);
std::vector<std::uint32_t> stabilizer_neighbourhood(const StabilizerModel& m,
                                                    const std::vector<std::uint32_t>& sites);

}  // namespace qmem
