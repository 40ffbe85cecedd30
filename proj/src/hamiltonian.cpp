#include "tcgs/hamiltonian.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tcgs/quadrature.hpp"

namespace tcgs {

void ModelParams::validate() const
{
    if (n < 1) throw schema_error("ModelParams: n >= 1 required");
    if (d < 1 || d > 3) throw schema_error("ModelParams: d must be 1, 2 or 3");
    if (M < 1) throw schema_error("ModelParams: M >= 1 required");
    if (!(beta > 0.0)) throw schema_error("ModelParams: beta > 0 required");
    if (couplings.n != n) throw schema_error("ModelParams: couplings.n must equal n");
}

OperatorMatrix build_H0(const ProductBasis& basis)
{
    Matrix h = Matrix::Zero(basis.dim, basis.dim);
    for (Index s = 0; s < basis.dim; ++s) h(s, s) = basis.free_energy_level(s);
    return make_operator(std::move(h), true);
}

namespace {

HamiltonianBlock build_block(const ProductBasis& basis, const InteractionTable& table,
                             const CouplingMatrix& couplings)
{
    HamiltonianBlock block;
    block.basis = basis;
    block.tail = TailDescriptor{basis.n, basis.one_body.d, basis.one_body.M};
    block.free_levels.resize(basis.dim);
    for (Index s = 0; s < basis.dim; ++s) block.free_levels(s) = basis.free_energy_level(s);

    Matrix h = build_H0(basis).entries;
    if (couplings.pair_sum() > 0.0) {
        h += assemble_interaction(basis, table, couplings).entries;
    }
    block.matrix = make_operator(std::move(h), true);

    Eigen::SelfAdjointEigenSolver<Matrix> es(block.matrix.entries);
    if (es.info() != Eigen::Success) {
        throw quality_error("build_truncated_hamiltonian: eigensolver failed", 0.0);
    }
    block.eigenvalues = es.eigenvalues();
    block.eigenvectors = es.eigenvectors();
    return block;
}

} // namespace

HamiltonianBlock build_truncated_hamiltonian(const ModelParams& params,
                                             const InteractionTable& table)
{
    params.validate();
    return build_block(product_basis(enumerate_one_body_basis(params.d, params.M), params.n),
                       table, params.couplings);
}

HamiltonianBlock build_perturbed_block(const ProductBasis& basis, const Matrix& perturbation)
{
    if (perturbation.rows() != basis.dim || perturbation.cols() != basis.dim) {
        throw std::invalid_argument("build_perturbed_block: perturbation dimension mismatch");
    }
    if (hermiticity_residual(perturbation) > 1e-12) {
        throw std::invalid_argument("build_perturbed_block: perturbation must be Hermitian");
    }
    HamiltonianBlock block;
    block.basis = basis;
    block.tail = TailDescriptor{basis.n, basis.one_body.d, basis.one_body.M};
    block.free_levels.resize(basis.dim);
    for (Index s = 0; s < basis.dim; ++s) block.free_levels(s) = basis.free_energy_level(s);
    block.matrix = make_operator(build_H0(basis).entries + perturbation, true);
    Eigen::SelfAdjointEigenSolver<Matrix> es(block.matrix.entries);
    if (es.info() != Eigen::Success) {
        throw quality_error("build_perturbed_block: eigensolver failed", 0.0);
    }
    block.eigenvalues = es.eigenvalues();
    block.eigenvectors = es.eigenvectors();
    return block;
}

HamiltonianBlock interpolate(const ModelParams& params, const InteractionTable& table, double s)
{
    if (s < 0.0 || s > 1.0) {
        throw std::invalid_argument("interpolate: s must lie in [0, 1]");
    }
    params.validate();
    return build_block(product_basis(enumerate_one_body_basis(params.d, params.M), params.n),
                       table, params.couplings.scaled(s));
}

double free_partition_function(int n, int d, double beta)
{
    return std::pow(2.0 * std::sinh(beta), -d * n);
}

double free_free_energy(int n, int d, double beta)
{
    return d * n / beta * std::log(2.0 * std::sinh(beta));
}

double one_body_free_energy(int d, double beta)
{
    return free_free_energy(1, d, beta);
}

GibbsState gibbs_state(const HamiltonianBlock& block, double beta)
{
    if (!(beta > 0.0)) throw std::invalid_argument("gibbs_state: beta > 0 required");
    const Index dim = block.basis.dim;
    GibbsState state;
    state.beta = beta;

    double z_block = 0.0;
    RealVector boltzmann(dim);
    for (Index k = 0; k < dim; ++k) {
        boltzmann(k) = std::exp(-beta * block.eigenvalues(k));
        z_block += boltzmann(k);
    }
    double z_free_block = 0.0;
    for (Index s = 0; s < dim; ++s) z_free_block += std::exp(-beta * block.free_levels(s));
    const double z_free_total =
        free_partition_function(block.tail.n, block.tail.d, beta);
    const double tail = std::max(0.0, z_free_total - z_free_block);

    state.partition_function = z_block + tail;
    state.free_energy = -std::log(state.partition_function) / beta;
    state.tail_weight = tail / state.partition_function;
    state.populations = boltzmann / state.partition_function;
    state.density = block.eigenvectors *
                    state.populations.asDiagonal() *
                    block.eigenvectors.adjoint();
    return state;
}

Matrix GibbsState::density_normalized() const
{
    return density / (1.0 - tail_weight);
}

SymplecticFrequencies symplectic_frequencies(const MagneticQuadratic& mq)
{
    if (mq.m.rows() != 2 || mq.m.cols() != 2) {
        throw std::invalid_argument("symplectic_frequencies: M must be 2x2");
    }
    if (std::abs(mq.m(0, 1) - mq.m(1, 0)) > 1e-12 * (1.0 + mq.m.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("symplectic_frequencies: M must be symmetric");
    }
    const double tr = mq.m(0, 0) + mq.m(1, 1);
    const double det = mq.m(0, 0) * mq.m(1, 1) - mq.m(0, 1) * mq.m(1, 0);
    if (!(tr > 0.0) || !(det > 0.0)) {
        throw std::invalid_argument("symplectic_frequencies: M must be positive definite");
    }

    const double s = tr + mq.b * mq.b;
    const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * det));
    SymplecticFrequencies out;
    out.sigma1 = std::sqrt(0.5 * (s + disc));
    out.sigma2 = std::sqrt(0.5 * (s - disc));

    const double b2 = 0.5 * mq.b;
    const double m11 = mq.m(0, 0), m12 = mq.m(0, 1), m22 = mq.m(1, 1);
    Matrix omega(4, 4);
    omega << 0, 1, -b2, 0,
        -m11 - b2 * b2, 0, -m12, -b2,
        b2, 0, 0, 1,
        -m12, b2, -m22 - b2 * b2, 0;
    Eigen::ComplexEigenSolver<Matrix> es(omega);
    out.omega_eigenvalues = es.eigenvalues();
    return out;
}

namespace {

// E|log r| for r with density dens(r) on (0, inf); panels graded towards the
// log singularity at 0 and split at the |log| kink at r = 1.
double abs_log_moment(double variance, int d)
{
    const double rmax = std::sqrt(variance) * 9.0 + 1.0;
    std::vector<double> bks;
    bks.push_back(0.0);
    for (int j = 40; j >= 0; --j) bks.push_back(std::ldexp(1.0, -j));
    double r = 1.0;
    const double step = std::max(0.125, std::sqrt(variance) / 8.0);
    while (r + step < rmax) {
        r += step;
        bks.push_back(r);
    }
    bks.push_back(rmax);
    const Rule1D rule = panel_rule(bks, 16);

    double acc = 0.0;
    for (Index i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes(i);
        double dens;
        if (d == 1) {
            dens = std::sqrt(2.0 / (std::numbers::pi * variance)) *
                   std::exp(-x * x / (2.0 * variance));
        } else {
            dens = x / variance * std::exp(-x * x / (2.0 * variance));
        }
        acc += rule.weights(i) * dens * std::abs(std::log(x));
    }
    return acc;
}

} // namespace

double mehler_bound_constant(int d, double t)
{
    if (!(t > 0.0)) throw std::invalid_argument("mehler_bound_constant: t > 0 required");
    const double variance = 1.0 / std::tanh(t);
    if (d == 3) {
        return std::sqrt(2.0 / (std::numbers::pi * variance));
    }
    if (d == 2 || d == 1) {
        return abs_log_moment(variance, d);
    }
    throw std::invalid_argument("mehler_bound_constant: d must be 1, 2 or 3");
}

} // namespace tcgs
