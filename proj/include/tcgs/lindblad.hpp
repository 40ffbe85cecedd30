// lindblad.hpp — Gaussian-KMS filter, filtered jump operators, coherent term,
// and the Gibbs-sampler generators in the trace-class and symmetrized
// (Hilbert-Schmidt) pictures, plus the exactly solvable single-mode
// references.

#pragma once

#include <limits>
#include <vector>

#include "tcgs/hamiltonian.hpp"
#include "tcgs/types.hpp"

namespace tcgs {

/// Filter profile f_hat(nu) = exp(-beta nu/4 - nu^2/(8 sigma_w^2)). It obeys
/// the detailed-balance identity conj(f_hat(nu)) = f_hat(-nu) e^{-beta nu/2}
/// exactly. sigma_e = +inf selects the undamped generator variants.
struct FilterSpec {
    double beta{1.0};
    double sigma_e{std::numeric_limits<double>::infinity()};
    double sigma_w{1.0};

    bool sigma_e_finite() const { return std::isfinite(sigma_e); }
    void validate() const;
};

/// sigma_w defaults to sigma_e when finite and to 1 otherwise.
FilterSpec make_gaussian_kms_filter(double beta, double sigma_e);
FilterSpec make_gaussian_kms_filter(double beta, double sigma_e, double sigma_w);

double filter_hat(const FilterSpec& spec, double nu);

/// exp(-nu^2/(8 sigma_e^2)) / (1 + e^{beta nu/2}); requires finite sigma_e.
double g_hat(const FilterSpec& spec, double nu);

struct JumpOperator {
    int particle{0};
    int axis{0};
    LadderKind kind{LadderKind::lower};
    Matrix op;
};

/// All bare jumps a_{ij}, a†_{ij} on the product basis, ordered by particle,
/// axis, then lower/raise; raise entries are adjoints of their lower partner.
std::vector<JumpOperator> bare_jump_set(const ProductBasis& basis);

enum class GeneratorVariant { sigma_e_finite, sigma_e_infinite };
enum class GeneratorPicture { trace_class, symmetrized };

/// Dense superoperator on the column-major vectorized block,
/// vec(A X B) = (B^T ⊗ A) vec(X); entries are expressed in the product basis
/// so they do not depend on eigenvector phase or degenerate-subspace basis
/// choices.
struct GeneratorMatrix {
    Index dim{0}; // Hilbert dimension; sup is dim^2 x dim^2
    Matrix sup;
    GeneratorVariant variant{GeneratorVariant::sigma_e_infinite};
    GeneratorPicture picture{GeneratorPicture::trace_class};
    std::uint64_t provenance{0};
    double symmetrization_residual{0.0};

    Matrix apply(const Matrix& x) const;
};

/// Eigenvalue clusters with relative tolerance 1e-9; weights constant on
/// cluster pairs make the assembly projector-based.
struct BohrClusters {
    std::vector<int> cluster_of;
    std::vector<double> energy; // cluster means
};
BohrClusters cluster_energies(const RealVector& eigenvalues);

/// L_s = sum_{E,E'} e^{s(E-E')} f_hat(E-E') P_E A P_{E'} with clustered
/// eigenprojections; s = ±beta/4 gives the conjugated jumps of the
/// symmetrized picture.
OperatorMatrix filtered_jump(const HamiltonianBlock& block, const Matrix& bare,
                             const FilterSpec& spec, double s);

/// B = (i/2) sum_alpha sum_{E,F} tanh(beta(F-E)/4) P_F (L^a)†L^a P_E.
OperatorMatrix coherent_term(const HamiltonianBlock& block,
                             const std::vector<JumpOperator>& jumps, const FilterSpec& spec);

GeneratorMatrix build_generator_trace_class(const HamiltonianBlock& block,
                                            const std::vector<JumpOperator>& jumps,
                                            const FilterSpec& spec);

GeneratorMatrix build_generator_symmetrized(const HamiltonianBlock& block,
                                            const std::vector<JumpOperator>& jumps,
                                            const FilterSpec& spec, GeneratorVariant variant);

/// Birth/death rates |f_hat(±2)|^2 at the oscillator Bohr frequency.
struct OUParams {
    double nu_plus{0.0};
    double nu_minus{0.0};
};
OUParams ou_rates(const FilterSpec& spec);

/// Single-mode symmetrized Ornstein-Uhlenbeck generator on a cutoff-level
/// truncation.
GeneratorMatrix ou_reference_generator(double nu_plus, double nu_minus, int cutoff);

/// Diagonal comparison operator with eigenvalue kappa_{n+m} on |n><m|, in the
/// jump-amplitude variables lambda = sqrt(nu+), mu = sqrt(nu-):
///   kappa_k = -(mu - lambda)^2 k / 2 + lambda (mu - lambda).
/// It dominates the OU generator as a quadratic form (L_OU <= L_LB <= kappa_0)
/// while its eigenvalues still walk down to -infinity, which is what the
/// compact-resolvent comparison needs.
GeneratorMatrix ladder_block_generator(double nu_plus, double nu_minus, int cutoff);

/// iota2(x) = sigma^{1/4} x sigma^{1/4} and its inverse; the intertwining map
/// between the symmetrized and trace-class semigroups.
Matrix apply_iota2(const HamiltonianBlock& block, const GibbsState& sigma, const Matrix& x);
Matrix apply_iota2_inverse(const HamiltonianBlock& block, const GibbsState& sigma,
                           const Matrix& x);

} // namespace tcgs
