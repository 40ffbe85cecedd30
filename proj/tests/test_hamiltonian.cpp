#include <doctest.h>

#include <numbers>

#include <Eigen/Eigenvalues>

#include "tcgs/hamiltonian.hpp"
#include "tcgs/rng.hpp"

using namespace tcgs;

namespace {

InteractionTable zero_table(int d, int m)
{
    InteractionTable t;
    t.d = d;
    t.kind = kernel_for_dimension(d).kind;
    t.M = m;
    t.values.assign(static_cast<std::size_t>(m) * m * m * m, 0.0);
    return t;
}

const InteractionTable& table_d2_m6()
{
    static const InteractionTable table = two_body_matrix_elements(2, 6, QuadratureSpec{});
    return table;
}

} // namespace

TEST_CASE("free Hamiltonian diagonal and its thermal trace")
{
    const ProductBasis tiny = product_basis(enumerate_one_body_basis(2, 1), 1);
    const OperatorMatrix h_tiny = build_H0(tiny);
    CHECK(h_tiny.dim == 1);
    CHECK(h_tiny.entries(0, 0).real() == 2.0);

    const ProductBasis basis = product_basis(enumerate_one_body_basis(2, 3), 2);
    const OperatorMatrix h = build_H0(basis);
    CHECK(h.dim == 9);
    double min_entry = 1e9;
    for (Index s = 0; s < 9; ++s) min_entry = std::min(min_entry, h.entries(s, s).real());
    CHECK(min_entry == 4.0);

    // block trace of e^{-beta H0} equals the per-particle partial sum raised
    // to the n-th power
    const double beta = 0.8;
    double block_trace = 0.0;
    for (Index s = 0; s < 9; ++s) block_trace += std::exp(-beta * h.entries(s, s).real());
    double one_body = 0.0;
    for (double e : basis.one_body.energies) one_body += std::exp(-beta * e);
    CHECK(block_trace == doctest::Approx(one_body * one_body).epsilon(1e-14));
}

TEST_CASE("free couplings reproduce the analytic free energy exactly")
{
    for (int n : {1, 2, 3}) {
        for (int d : {1, 2, 3}) {
            for (double beta : {0.5, 1.0, 2.0}) {
                const int m = d == 3 ? 2 : (n == 3 ? 4 : 10);
                ModelParams mp{n, d, m, CouplingMatrix::zero(n), beta};
                const HamiltonianBlock block = build_truncated_hamiltonian(mp, zero_table(d, m));
                const GibbsState state = gibbs_state(block, beta);
                CHECK(std::abs(state.free_energy - free_free_energy(n, d, beta)) < 1e-12);
                CHECK(std::abs(1.0 - state.populations.sum() - state.tail_weight) < 1e-12);
                for (Index k = 0; k < state.populations.size(); ++k) {
                    CHECK(state.populations(k) >= 0.0);
                }
            }
        }
    }
}

TEST_CASE("interacting block: spectra sandwiched, partition function sandwiched")
{
    const CouplingMatrix alpha = CouplingMatrix::uniform(2, 0.2);
    ModelParams mp{2, 2, 6, alpha, 1.0};
    const HamiltonianBlock block = build_truncated_hamiltonian(mp, table_d2_m6());
    const Matrix w = assemble_interaction(block.basis, table_d2_m6(), alpha).entries;
    const double w_norm = Eigen::JacobiSVD<Matrix>(w).singularValues()(0);

    RealVector free_sorted = block.free_levels;
    std::sort(free_sorted.data(), free_sorted.data() + free_sorted.size());
    for (Index k = 0; k < block.eigenvalues.size(); ++k) {
        CHECK(block.eigenvalues(k) >= free_sorted(k) - w_norm - 1e-12);
        CHECK(block.eigenvalues(k) <= free_sorted(k) + w_norm + 1e-12);
    }
    const GibbsState state = gibbs_state(block, 1.0);
    const double z_free = free_partition_function(2, 2, 1.0);
    CHECK(state.partition_function >= std::exp(-w_norm) * z_free - 1e-12);
    CHECK(state.partition_function <= std::exp(w_norm) * z_free + 1e-12);
    CHECK_THROWS_AS(gibbs_state(block, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gibbs_state(block, 0.0), std::invalid_argument);
}

TEST_CASE("first-order perturbation theory pins the d=3 ground energy")
{
    const InteractionTable t3 = two_body_matrix_elements(3, 4, QuadratureSpec{});
    const double alpha = 0.1;
    ModelParams mp{2, 3, 4, CouplingMatrix::uniform(2, alpha), 1.0};
    const HamiltonianBlock block = build_truncated_hamiltonian(mp, t3);
    const double first_order = 6.0 + alpha * t3.value(0, 0, 0, 0);
    CHECK(std::abs(block.eigenvalues(0) - first_order) < 2.0 * alpha * alpha);
}

TEST_CASE("cold limit concentrates on the ground mode")
{
    ModelParams mp{1, 2, 3, CouplingMatrix::zero(1), 8.0};
    const GibbsState state = gibbs_state(build_truncated_hamiltonian(mp, zero_table(2, 3)), 8.0);
    CHECK(state.populations(0) >= 1.0 - 3.0 * std::exp(-16.0));
}

TEST_CASE("interpolation endpoints and eigenvalue continuity")
{
    const CouplingMatrix alpha = CouplingMatrix::uniform(2, 0.3);
    ModelParams mp{2, 2, 4, alpha, 1.0};
    const InteractionTable table = table_d2_m6().restricted(4);

    const HamiltonianBlock at0 = interpolate(mp, table, 0.0);
    for (Index s = 0; s < at0.basis.dim; ++s) {
        CHECK(std::abs(at0.eigenvalues(s) -
                       at0.free_levels(std::min<Index>(s, at0.basis.dim - 1))) <= 8.0);
    }
    const Matrix h0 = build_H0(at0.basis).entries;
    CHECK((at0.matrix.entries - h0).cwiseAbs().maxCoeff() < 1e-14);

    const HamiltonianBlock at1 = interpolate(mp, table, 1.0);
    const HamiltonianBlock direct = build_truncated_hamiltonian(mp, table);
    CHECK((at1.matrix.entries - direct.matrix.entries).cwiseAbs().maxCoeff() < 1e-14);

    const Matrix w = assemble_interaction(at0.basis, table, alpha).entries;
    const double w_norm = Eigen::JacobiSVD<Matrix>(w).singularValues()(0);
    RealVector prev = at0.eigenvalues;
    for (double s = 0.1; s <= 1.0 + 1e-9; s += 0.1) {
        const HamiltonianBlock at_s = interpolate(mp, table, s);
        for (Index k = 0; k < prev.size(); ++k) {
            CHECK(std::abs(at_s.eigenvalues(k) - prev(k)) <= 0.1 * w_norm + 1e-12);
        }
        prev = at_s.eigenvalues;
    }
    CHECK_THROWS_AS(interpolate(mp, table, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(mp, table, 1.1), std::invalid_argument);
}

TEST_CASE("symplectic normal modes: isotropic case and random SPD identities")
{
    RealMatrix eye(2, 2);
    eye << 1, 0, 0, 1;
    const SymplecticFrequencies iso = symplectic_frequencies({eye, 0.0});
    CHECK(iso.sigma1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(iso.sigma2 == doctest::Approx(1.0).epsilon(1e-14));

    StreamRng rng(stream_key(7, 7));
    for (int trial = 0; trial < 100; ++trial) {
        RealMatrix m(2, 2);
        const double a = 0.2 + 3.0 * rng.uniform();
        const double c = 0.2 + 3.0 * rng.uniform();
        const double b = (rng.uniform() - 0.5) * 1.8 * std::sqrt(a * c);
        m << a, b, b, c;
        const double field = (rng.uniform() - 0.5) * 4.0;
        const SymplecticFrequencies sf = symplectic_frequencies({m, field});
        CHECK(sf.sigma1 >= sf.sigma2);
        CHECK(sf.sigma2 > 0.0);
        CHECK(std::abs(sf.sigma1 * sf.sigma1 * sf.sigma2 * sf.sigma2 - (a * c - b * b)) < 1e-12);
        CHECK(std::abs(sf.sigma1 * sf.sigma1 + sf.sigma2 * sf.sigma2 -
                       (a + c + field * field)) < 1e-12);
        for (Index k = 0; k < 4; ++k) {
            const double im = std::abs(sf.omega_eigenvalues(k).imag());
            const double nearest = std::min(std::abs(im - sf.sigma1), std::abs(im - sf.sigma2));
            CHECK(nearest < 1e-10);
            CHECK(std::abs(sf.omega_eigenvalues(k).real()) < 1e-10);
        }
    }
    RealMatrix bad(2, 2);
    bad << 1, 2, 2, 1; // indefinite
    CHECK_THROWS_AS(symplectic_frequencies({bad, 0.0}), std::invalid_argument);
}

TEST_CASE("thermal pair-density constants")
{
    CHECK(std::abs(mehler_bound_constant(3, 1.0) -
                   std::sqrt(2.0 * std::tanh(1.0) / std::numbers::pi)) < 1e-12);
    CHECK(std::abs(mehler_bound_constant(3, 50.0) - std::sqrt(2.0 / std::numbers::pi)) < 1e-12);
    for (double t : {0.2, 1.0, 3.0}) {
        CHECK(mehler_bound_constant(2, t) > 0.0);
        CHECK(mehler_bound_constant(1, t) > 0.0);
    }
    CHECK_THROWS_AS(mehler_bound_constant(2, 0.0), std::invalid_argument);

    // Monte Carlo oracle for the d=2 absolute-log moment
    const double t = 0.9;
    const double variance = 1.0 / std::tanh(t);
    StreamRng rng(stream_key(5, 5));
    const long long samples = 2'000'000;
    double sum = 0.0, sum2 = 0.0;
    for (long long s = 0; s < samples; ++s) {
        const double zx = std::sqrt(variance) * rng.normal();
        const double zy = std::sqrt(variance) * rng.normal();
        const double w = std::abs(0.5 * std::log(zx * zx + zy * zy));
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
    CHECK(std::abs(mean - mehler_bound_constant(2, t)) < 4.0 * se);
}

TEST_CASE("free-energy upper bound via the free Gibbs state")
{
    for (double beta : {0.5, 1.0, 2.0}) {
        const CouplingMatrix alpha = CouplingMatrix::uniform(2, 0.25);
        ModelParams mp{2, 2, 6, alpha, beta};
        const GibbsState state = gibbs_state(build_truncated_hamiltonian(mp, table_d2_m6()), beta);
        const double bound = 2.0 * one_body_free_energy(2, beta) +
                             alpha.pair_sum() * mehler_bound_constant(2, beta);
        CHECK(state.free_energy <= bound + 1e-12);
    }
}
