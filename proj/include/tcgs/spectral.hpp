// spectral.hpp — Generator spectra and gaps, semigroup evolution and mixing
// times, finite-rank remainder diagnostics, locality commutator bounds, and
// gap sweeps.

#pragma once

#include <vector>

#include "tcgs/lindblad.hpp"

namespace tcgs {

struct SpectralSummary {
    Vector eigenvalues; // ascending by real part
    double zero_threshold{0.0};
    double spectral_radius{0.0};
    double gap{0.0}; // min |λ| over eigenvalues above the kernel threshold
    int kernel_dim{0};
};

/// zero_threshold = 1e-10 x spectral radius; symmetrized generators go
/// through the self-adjoint solver, trace-class ones through the general one.
SpectralSummary spectral_summary(const GeneratorMatrix& gen);

/// Diagonalization-backed action of e^{tL}; falls back to scaling-and-squaring
/// when the eigenbasis is too ill-conditioned to reconstruct the generator.
class Propagator {
public:
    explicit Propagator(const GeneratorMatrix& gen);
    Matrix apply(const Matrix& x, double t) const;
    double reconstruction_residual() const { return residual_; }

private:
    Index dim_{0};
    bool use_eigen_{false};
    Vector eigenvalues_;
    Matrix vectors_;
    Matrix vectors_inv_;
    Matrix sup_;
    double residual_{0.0};
};

Matrix evolve(const GeneratorMatrix& gen, const Matrix& rho0, double t);

/// Smallest c with rho <= c sigma, taken against the block-normalized Gibbs
/// state (the fixed point of the block sampler): the top eigenvalue of
/// sigma^{-1/2} rho sigma^{-1/2}.
double warmness_constant(const Matrix& rho_ini, const HamiltonianBlock& block,
                         const GibbsState& sigma);

struct MixingRecord {
    std::vector<double> times;
    std::vector<double> distances; // trace distances to the block target
    double warmness{0.0};
    double gap{0.0};
    double epsilon{0.0};
    double t_mix{0.0};
    double bound{0.0}; // 2 log(c/eps) / gap
    double fitted_rate{0.0};
    bool distances_monotone{true};
    bool pointwise_bound_ok{true}; // sqrt(c) e^{-gap t/2} envelope (diagnostic)
};

/// Bisects the first time the trace distance to the target drops below
/// epsilon; gap comes from the symmetrized picture of the same model.
MixingRecord mixing_time_empirical(const GeneratorMatrix& gen, const Matrix& rho_ini,
                                   const HamiltonianBlock& block, const GibbsState& sigma,
                                   double epsilon, double gap);

struct RemainderReport {
    Matrix remainder;       // L_s(H) - L_s(H0)
    double norm{0.0};       // operator norm of the remainder
    double q_block_norm{0.0}; // norm of Q R Q, Q = 1 - Pi_{M_pert}
    int numerical_rank{0};
    int quadratic_rank{0};  // rank of L†L(H) - L†L(H0)
};

/// Both blocks must share one ProductBasis; the perturbation has to be
/// supported inside the product basis over the first m_pert one-body modes.
RemainderReport finite_rank_remainder(const HamiltonianBlock& block0,
                                      const HamiltonianBlock& block, const Matrix& bare,
                                      const FilterSpec& spec, double s, int m_pert);

struct LocalityReport {
    double commutator_norm{0.0};
    double bound{0.0};            // 2 ||X_M|| ||A P_M||
    double interaction_norm{0.0}; // ||X_M||
    double jump_norm{0.0};        // ||A P_M||
    std::vector<double> evolved_norms; // under free Heisenberg evolution
};

/// ||[X_M, A ⊗ 1]|| on the two-particle compressed space, with the free
/// Heisenberg evolution of A probed at the supplied times.
LocalityReport locality_commutator_norm(const InteractionTable& table, const Matrix& one_body_jump,
                                        const std::vector<double>& one_body_energies,
                                        const std::vector<double>& times);

struct GapSweepPoint {
    ModelParams params;
    double sigma_e{std::numeric_limits<double>::infinity()};
};

struct GapRow {
    int n{0}, d{0}, M{0};
    double alpha_max{0.0}, beta{0.0}, sigma_e{0.0};
    double gap{0.0};
    int kernel_dim{0};
    double zero_threshold{0.0};
    double hermiticity_residual{0.0};
    double wall_time_s{0.0};
};

std::vector<GapRow> gap_sweep(const std::vector<GapSweepPoint>& plan, const QuadratureSpec& quad);

/// min-over-n gap >= (1 - tolerance) * gap at the smallest n in the rows.
bool uniform_gap_holds(const std::vector<GapRow>& rows, double tolerance, double* margin = nullptr);

} // namespace tcgs
