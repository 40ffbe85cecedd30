#include "tcgs/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace tcgs {

namespace {

double operator_norm(const Matrix& a)
{
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

double trace_norm(const Matrix& a)
{
    return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

int numerical_rank(const Matrix& a, double rel_tol)
{
    const auto sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * sv(0)) ++rank;
    }
    return rank;
}

bool effectively_real(const Matrix& a)
{
    const double scale = a.cwiseAbs().maxCoeff();
    return a.imag().cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, scale);
}

} // namespace

SpectralSummary spectral_summary(const GeneratorMatrix& gen)
{
    SpectralSummary summary;
    Vector eigenvalues;
    if (gen.picture == GeneratorPicture::symmetrized) {
        if (effectively_real(gen.sup)) {
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(gen.sup.real(),
                                                         Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success) {
                throw quality_error("spectral_summary: eigensolver failed", 0.0);
            }
            eigenvalues = es.eigenvalues().cast<Complex>();
        } else {
            Eigen::SelfAdjointEigenSolver<Matrix> es(gen.sup, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success) {
                throw quality_error("spectral_summary: eigensolver failed", 0.0);
            }
            eigenvalues = es.eigenvalues().cast<Complex>();
        }
    } else {
        Eigen::ComplexEigenSolver<Matrix> es(gen.sup, false);
        if (es.info() != Eigen::Success) {
            throw quality_error("spectral_summary: eigensolver failed", 0.0);
        }
        eigenvalues = es.eigenvalues();
        std::sort(eigenvalues.data(), eigenvalues.data() + eigenvalues.size(),
                  [](Complex a, Complex b) {
                      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
                  });
    }
    summary.eigenvalues = eigenvalues;
    summary.spectral_radius = eigenvalues.cwiseAbs().maxCoeff();
    summary.zero_threshold = 1e-10 * summary.spectral_radius;
    double gap = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < eigenvalues.size(); ++k) {
        const double mag = std::abs(eigenvalues(k));
        if (mag <= summary.zero_threshold) {
            ++summary.kernel_dim;
        } else {
            gap = std::min(gap, mag);
        }
    }
    summary.gap = std::isfinite(gap) ? gap : 0.0;
    return summary;
}

Propagator::Propagator(const GeneratorMatrix& gen) : dim_(gen.dim), sup_(gen.sup)
{
    const Index n = gen.sup.rows();
    if (gen.picture == GeneratorPicture::symmetrized) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(gen.sup);
        if (es.info() == Eigen::Success) {
            eigenvalues_ = es.eigenvalues().cast<Complex>();
            vectors_ = es.eigenvectors();
            vectors_inv_ = vectors_.adjoint();
            use_eigen_ = true;
            residual_ = 0.0;
            return;
        }
    }
    Eigen::ComplexEigenSolver<Matrix> es(gen.sup, true);
    if (es.info() == Eigen::Success) {
        eigenvalues_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        Eigen::PartialPivLU<Matrix> lu(vectors_);
        vectors_inv_ = lu.solve(Matrix::Identity(n, n));
        const double scale = gen.sup.cwiseAbs().maxCoeff();
        residual_ = (vectors_ * eigenvalues_.asDiagonal() * vectors_inv_ - gen.sup)
                        .cwiseAbs()
                        .maxCoeff() /
                    std::max(scale, 1e-300);
        use_eigen_ = residual_ < 1e-8;
    } else {
        use_eigen_ = false;
        residual_ = std::numeric_limits<double>::infinity();
    }
}

Matrix Propagator::apply(const Matrix& x, double t) const
{
    if (t < 0.0) throw std::invalid_argument("Propagator::apply: t >= 0 required");
    if (x.rows() != dim_ || x.cols() != dim_) {
        throw std::invalid_argument("Propagator::apply: dimension mismatch");
    }
    const Vector v = vectorize(x);
    if (use_eigen_) {
        Vector phases(eigenvalues_.size());
        for (Index k = 0; k < eigenvalues_.size(); ++k) {
            phases(k) = std::exp(t * eigenvalues_(k));
        }
        return unvectorize(vectors_ * (phases.asDiagonal() * (vectors_inv_ * v)), dim_);
    }
    const Matrix expm = (t * sup_).exp();
    return unvectorize(expm * v, dim_);
}

Matrix evolve(const GeneratorMatrix& gen, const Matrix& rho0, double t)
{
    if (t < 0.0) throw std::invalid_argument("evolve: t >= 0 required");
    return Propagator(gen).apply(rho0, t);
}

double warmness_constant(const Matrix& rho_ini, const HamiltonianBlock& block,
                         const GibbsState& sigma)
{
    const double trace_deficit = std::abs(1.0 - rho_ini.trace().real());
    if (trace_deficit > 1e-10 || std::abs(rho_ini.trace().imag()) > 1e-12) {
        throw std::invalid_argument(
            "warmness_constant: state carries mass outside the block");
    }
    const double tail = sigma.tail_weight;
    RealVector inv_sqrt(sigma.populations.size());
    for (Index k = 0; k < inv_sqrt.size(); ++k) {
        const double p = sigma.populations(k) / (1.0 - tail);
        inv_sqrt(k) = 1.0 / std::sqrt(p);
    }
    const Matrix rho_en = block.eigenvectors.adjoint() * rho_ini * block.eigenvectors;
    const Matrix scaled =
        inv_sqrt.asDiagonal() * rho_en * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (scaled + scaled.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

MixingRecord mixing_time_empirical(const GeneratorMatrix& gen, const Matrix& rho_ini,
                                   const HamiltonianBlock& block, const GibbsState& sigma,
                                   double epsilon, double gap)
{
    if (!(epsilon > 0.0) || epsilon >= 1.0) {
        throw std::invalid_argument("mixing_time_empirical: epsilon in (0,1) required");
    }
    if (!(gap > 0.0)) throw std::invalid_argument("mixing_time_empirical: gap > 0 required");

    MixingRecord record;
    record.epsilon = epsilon;
    record.gap = gap;
    record.warmness = warmness_constant(rho_ini, block, sigma);
    record.bound = 2.0 * std::log(record.warmness / epsilon) / gap;

    const Matrix target = sigma.density_normalized();
    Propagator prop(gen);
    const auto distance = [&](double t) {
        return trace_norm(prop.apply(rho_ini, t) - target);
    };

    const double d0 = trace_norm(rho_ini - target);
    if (d0 <= epsilon) {
        record.t_mix = 0.0;
        record.times = {0.0};
        record.distances = {d0};
        return record;
    }

    double hi = record.bound;
    if (distance(hi) > epsilon) {
        hi = 10.0 * record.bound;
        const double dhi = distance(hi);
        if (dhi > epsilon) {
            throw quality_error(
                "mixing_time_empirical: distance did not reach epsilon within 10x the "
                "bound; the gap may be misestimated",
                dhi);
        }
    }
    double lo = 0.0;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (distance(mid) <= epsilon) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    record.t_mix = hi;

    // Trajectory at 50 log-spaced times for the record and the diagnostics.
    const double t_max = std::max(record.bound, record.t_mix) * 1.2;
    const double t_min = t_max * 1e-4;
    const int npts = 50;
    record.times.resize(npts + 1);
    record.distances.resize(npts + 1);
    record.times[0] = 0.0;
    record.distances[0] = d0;
    for (int k = 0; k < npts; ++k) {
        const double t = t_min * std::pow(t_max / t_min, static_cast<double>(k) / (npts - 1));
        record.times[k + 1] = t;
        record.distances[k + 1] = distance(t);
    }
    const double sqrt_c = std::sqrt(record.warmness);
    for (int k = 0; k <= npts; ++k) {
        if (k > 0 && record.distances[k] > record.distances[k - 1] + 1e-8) {
            record.distances_monotone = false;
        }
        if (record.distances[k] >
            sqrt_c * std::exp(-0.5 * gap * record.times[k]) + 1e-6) {
            record.pointwise_bound_ok = false;
        }
    }

    // Fit the asymptotic decay rate on the resolvable tail of the curve.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int k = 1; k <= npts; ++k) {
        const double dist = record.distances[k];
        if (dist < 1e-11 || dist > 0.2 * d0) continue;
        const double x = record.times[k];
        const double y = std::log(dist);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2 && sxx * count - sx * sx > 0.0) {
        record.fitted_rate = -(sxy * count - sx * sy) / (sxx * count - sx * sx);
    }
    return record;
}

RemainderReport finite_rank_remainder(const HamiltonianBlock& block0,
                                      const HamiltonianBlock& block, const Matrix& bare,
                                      const FilterSpec& spec, double s, int m_pert)
{
    if (block0.basis.dim != block.basis.dim ||
        block0.basis.one_body.M != block.basis.one_body.M ||
        block0.basis.n != block.basis.n) {
        throw std::invalid_argument("finite_rank_remainder: blocks must share a basis");
    }
    if (m_pert < 1 || m_pert >= block.basis.one_body.M) {
        throw std::invalid_argument("finite_rank_remainder: need 1 <= m_pert < M");
    }

    const Matrix l_h = filtered_jump(block, bare, spec, s).entries;
    const Matrix l_0 = filtered_jump(block0, bare, spec, s).entries;

    RemainderReport report;
    report.remainder = l_h - l_0;
    report.norm = operator_norm(report.remainder);

    // Q projects onto product states with at least one mode index >= m_pert.
    const ProductBasis& basis = block.basis;
    std::vector<char> in_p(basis.dim, 1);
    for (Index st = 0; st < basis.dim; ++st) {
        for (int i = 0; i < basis.n; ++i) {
            if (basis.mode_at(st, i) >= m_pert) {
                in_p[st] = 0;
                break;
            }
        }
    }
    Matrix qrq = report.remainder;
    for (Index r = 0; r < basis.dim; ++r) {
        for (Index c = 0; c < basis.dim; ++c) {
            if (in_p[r] || in_p[c]) qrq(r, c) = 0.0;
        }
    }
    report.q_block_norm = operator_norm(qrq);
    report.numerical_rank = numerical_rank(report.remainder, 1e-10);
    report.quadratic_rank =
        numerical_rank(l_h.adjoint() * l_h - l_0.adjoint() * l_0, 1e-10);
    return report;
}

LocalityReport locality_commutator_norm(const InteractionTable& table,
                                        const Matrix& one_body_jump,
                                        const std::vector<double>& one_body_energies,
                                        const std::vector<double>& times)
{
    const int m = table.M;
    if (one_body_jump.rows() != m || one_body_jump.cols() != m) {
        throw std::invalid_argument("locality_commutator_norm: jump must act on the one-body basis");
    }
    if (static_cast<int>(one_body_energies.size()) != m) {
        throw std::invalid_argument("locality_commutator_norm: energies must match the basis");
    }
    const Matrix x = table.two_particle_matrix();
    const Matrix eye = Matrix::Identity(m, m);

    LocalityReport report;
    report.interaction_norm = operator_norm(x);
    report.jump_norm = operator_norm(one_body_jump);
    report.bound = 2.0 * report.interaction_norm * report.jump_norm;

    const auto commutator_norm_at = [&](double t) {
        Matrix a_t = one_body_jump;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                a_t(r, c) *= std::exp(Complex(0.0, t * (one_body_energies[r] - one_body_energies[c])));
            }
        }
        const Matrix lifted = kron(a_t, eye);
        return operator_norm(x * lifted - lifted * x);
    };

    report.commutator_norm = commutator_norm_at(0.0);
    report.evolved_norms.reserve(times.size());
    for (double t : times) report.evolved_norms.push_back(commutator_norm_at(t));
    return report;
}

std::vector<GapRow> gap_sweep(const std::vector<GapSweepPoint>& plan, const QuadratureSpec& quad)
{
    // Tables are shared across plan points per dimension at the largest M.
    std::map<int, InteractionTable> tables;
    for (const auto& point : plan) {
        auto it = tables.find(point.params.d);
        if ((it == tables.end() || it->second.M < point.params.M) &&
            point.params.couplings.pair_sum() > 0.0) {
            tables[point.params.d] = two_body_matrix_elements(point.params.d, point.params.M, quad);
        }
    }

    std::vector<GapRow> rows;
    rows.reserve(plan.size());
    for (const auto& point : plan) {
        const auto start = std::chrono::steady_clock::now();
        const ModelParams& mp = point.params;
        InteractionTable table;
        if (mp.couplings.pair_sum() > 0.0) {
            table = tables.at(mp.d).restricted(mp.M);
        } else {
            table.d = mp.d;
            table.kind = kernel_for_dimension(mp.d).kind;
            table.M = mp.M;
            table.values.assign(static_cast<std::size_t>(mp.M) * mp.M * mp.M * mp.M, 0.0);
        }
        const HamiltonianBlock block = build_truncated_hamiltonian(mp, table);
        const auto jumps = bare_jump_set(block.basis);
        const FilterSpec filter = make_gaussian_kms_filter(mp.beta, point.sigma_e);
        const GeneratorVariant variant = filter.sigma_e_finite()
                                             ? GeneratorVariant::sigma_e_finite
                                             : GeneratorVariant::sigma_e_infinite;
        const GeneratorMatrix gen = build_generator_symmetrized(block, jumps, filter, variant);
        const SpectralSummary summary = spectral_summary(gen);
        const auto stop = std::chrono::steady_clock::now();

        GapRow row;
        row.n = mp.n;
        row.d = mp.d;
        row.M = mp.M;
        row.alpha_max = mp.couplings.alpha_max();
        row.beta = mp.beta;
        row.sigma_e = point.sigma_e;
        row.gap = summary.gap;
        row.kernel_dim = summary.kernel_dim;
        row.zero_threshold = summary.zero_threshold;
        row.hermiticity_residual = gen.symmetrization_residual;
        row.wall_time_s = std::chrono::duration<double>(stop - start).count();
        rows.push_back(row);
    }
    return rows;
}

bool uniform_gap_holds(const std::vector<GapRow>& rows, double tolerance, double* margin)
{
    if (rows.empty()) return true;
    double reference = 0.0;
    int n_min = rows.front().n;
    for (const auto& row : rows) n_min = std::min(n_min, row.n);
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        if (row.n == n_min) reference = std::max(reference, row.gap);
        min_gap = std::min(min_gap, row.gap);
    }
    const double threshold = (1.0 - tolerance) * reference;
    if (margin) *margin = min_gap - threshold;
    return min_gap >= threshold;
}

} // namespace tcgs
