// hamiltonian.hpp — Truncated Hamiltonians with exact free-tail bookkeeping,
// Gibbs states and free energies, and magnetic quadratic normal modes.

#pragma once

#include "tcgs/coulomb.hpp"
#include "tcgs/oscillator.hpp"
#include "tcgs/types.hpp"

namespace tcgs {

struct ModelParams {
    int n{1};
    int d{2};
    int M{1};
    CouplingMatrix couplings;
    double beta{1.0};

    void validate() const;
};

/// Outside range(Pi_M) the Hamiltonian is the free oscillator, so traces over
/// the complement reduce to closed-form geometric sums.
struct TailDescriptor {
    int n{0};
    int d{0};
    int M{0};
};

struct HamiltonianBlock {
    ProductBasis basis;
    OperatorMatrix matrix;
    RealVector eigenvalues; // ascending
    Matrix eigenvectors;    // columns
    RealVector free_levels; // H0 diagonal over the retained product states
    TailDescriptor tail;
};

struct GibbsState {
    double beta{0.0};
    double partition_function{0.0}; // block sum plus analytic free tail
    double free_energy{0.0};
    double tail_weight{0.0};
    RealVector populations; // e^{-beta E_k}/Z over block eigenstates
    Matrix density;         // on range(Pi_M); trace = 1 - tail_weight

    /// Block-normalized state (trace one); the fixed point of the sampler
    /// built on the same block.
    Matrix density_normalized() const;
};

OperatorMatrix build_H0(const ProductBasis& basis);

HamiltonianBlock build_truncated_hamiltonian(const ModelParams& params,
                                             const InteractionTable& table);

/// H0 + R for an arbitrary Hermitian perturbation on the block.
HamiltonianBlock build_perturbed_block(const ProductBasis& basis, const Matrix& perturbation);

/// H(s) = (1-s) H0 + s H_{n,M}; since the interaction is linear in the
/// couplings this is the build with couplings scaled by s.
HamiltonianBlock interpolate(const ModelParams& params, const InteractionTable& table, double s);

GibbsState gibbs_state(const HamiltonianBlock& block, double beta);

/// dn/beta * log(2 sinh beta)
double free_free_energy(int n, int d, double beta);
double one_body_free_energy(int d, double beta);
/// (2 sinh beta)^{-dn}
double free_partition_function(int n, int d, double beta);

/// (-i∇ - A(x))^2 + <x, Mx> with A the vector potential of a constant field b.
struct MagneticQuadratic {
    RealMatrix m; // 2x2 symmetric positive definite
    double b{0.0};
};

struct SymplecticFrequencies {
    double sigma1{0.0}; // >= sigma2 > 0
    double sigma2{0.0};
    Vector omega_eigenvalues; // of the explicit 4x4 commutator matrix
};

SymplecticFrequencies symplectic_frequencies(const MagneticQuadratic& mq);

/// E|w_d(z)| for z the relative coordinate of two independent one-body
/// thermal densities at inverse temperature t: a centered normal with
/// per-component variance coth(t).
double mehler_bound_constant(int d, double t);

} // namespace tcgs
