#include "tcgs/lindblad.hpp"

#include <cmath>

namespace tcgs {

void FilterSpec::validate() const
{
    if (!(beta > 0.0)) throw schema_error("FilterSpec: beta > 0 required");
    if (!(sigma_e > 0.0)) throw schema_error("FilterSpec: sigma_E > 0 required");
    if (!(sigma_w > 0.0) || !std::isfinite(sigma_w)) {
        throw schema_error("FilterSpec: sigma_w must be finite and positive");
    }
}

FilterSpec make_gaussian_kms_filter(double beta, double sigma_e)
{
    FilterSpec spec;
    spec.beta = beta;
    spec.sigma_e = sigma_e;
    spec.sigma_w = std::isfinite(sigma_e) ? sigma_e : 1.0;
    spec.validate();
    return spec;
}

FilterSpec make_gaussian_kms_filter(double beta, double sigma_e, double sigma_w)
{
    FilterSpec spec;
    spec.beta = beta;
    spec.sigma_e = sigma_e;
    spec.sigma_w = sigma_w;
    spec.validate();
    return spec;
}

double filter_hat(const FilterSpec& spec, double nu)
{
    return std::exp(-spec.beta * nu / 4.0 - nu * nu / (8.0 * spec.sigma_w * spec.sigma_w));
}

double g_hat(const FilterSpec& spec, double nu)
{
    if (!spec.sigma_e_finite()) {
        throw std::invalid_argument("g_hat: sigma_E must be finite");
    }
    return std::exp(-nu * nu / (8.0 * spec.sigma_e * spec.sigma_e)) /
           (1.0 + std::exp(spec.beta * nu / 2.0));
}

std::vector<JumpOperator> bare_jump_set(const ProductBasis& basis)
{
    std::vector<JumpOperator> jumps;
    jumps.reserve(static_cast<std::size_t>(basis.n) * basis.one_body.d * 2);
    for (int i = 0; i < basis.n; ++i) {
        for (int j = 0; j < basis.one_body.d; ++j) {
            for (LadderKind kind : {LadderKind::lower, LadderKind::raise}) {
                jumps.push_back({i, j, kind, ladder_matrix(basis, i, j, kind).entries});
            }
        }
    }
    return jumps;
}

BohrClusters cluster_energies(const RealVector& eigenvalues)
{
    BohrClusters clusters;
    const Index n = eigenvalues.size();
    clusters.cluster_of.resize(n);
    if (n == 0) return clusters;
    const double scale = std::max(1.0, std::abs(eigenvalues(n - 1)));
    const double tol = 1e-9 * scale;

    int current = 0;
    double sum = eigenvalues(0);
    int count = 1;
    clusters.cluster_of[0] = 0;
    for (Index k = 1; k < n; ++k) {
        if (eigenvalues(k) - eigenvalues(k - 1) > tol) {
            clusters.energy.push_back(sum / count);
            ++current;
            sum = 0.0;
            count = 0;
        }
        clusters.cluster_of[k] = current;
        sum += eigenvalues(k);
        ++count;
    }
    clusters.energy.push_back(sum / count);
    return clusters;
}

namespace {

// Entry weights w(E_i - E_j) over cluster energies.
template <typename F>
RealMatrix bohr_weights(const BohrClusters& clusters, Index dim, F weight)
{
    RealMatrix w(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        const double ei = clusters.energy[clusters.cluster_of[i]];
        for (Index j = 0; j < dim; ++j) {
            w(i, j) = weight(ei - clusters.energy[clusters.cluster_of[j]]);
        }
    }
    return w;
}

struct EnergyFrame {
    const HamiltonianBlock& block;
    BohrClusters clusters;

    explicit EnergyFrame(const HamiltonianBlock& b) : block(b), clusters(cluster_energies(b.eigenvalues)) {}

    Matrix to_energy(const Matrix& op) const
    {
        return block.eigenvectors.adjoint() * op * block.eigenvectors;
    }
    Matrix to_product(const Matrix& op) const
    {
        return block.eigenvectors * op * block.eigenvectors.adjoint();
    }
    double cluster_energy(Index i) const { return clusters.energy[clusters.cluster_of[i]]; }
};

// S_prod = (conj(V) ⊗ V) S_en (conj(V) ⊗ V)†, applied column- and row-wise
// through the reshape identity instead of forming the Kronecker factors.
Matrix superop_to_product_basis(const Matrix& s_en, const Matrix& v)
{
    const Index n = v.rows();
    Matrix tmp(n * n, n * n);
    for (Index c = 0; c < n * n; ++c) {
        const Matrix x = unvectorize(s_en.col(c), n);
        tmp.col(c) = vectorize(Matrix(v * x * v.adjoint()));
    }
    // Right factor: out = tmp (conj(V) ⊗ V)† ⇔ out^T = conj(conj(V) ⊗ V) tmp^T.
    Matrix out(n * n, n * n);
    Matrix tmpt = tmp.transpose();
    for (Index c = 0; c < n * n; ++c) {
        const Matrix x = unvectorize(tmpt.col(c), n);
        out.col(c) = vectorize(Matrix(v.conjugate() * x * v.transpose()));
    }
    return out.transpose();
}

std::uint64_t generator_provenance(const HamiltonianBlock& block, const FilterSpec& spec,
                                   GeneratorVariant variant, GeneratorPicture picture)
{
    std::uint64_t h = fnv1a(&spec.beta, sizeof(double));
    h = fnv1a(&spec.sigma_e, sizeof(double), h);
    h = fnv1a(&spec.sigma_w, sizeof(double), h);
    const int tags[2] = {static_cast<int>(variant), static_cast<int>(picture)};
    h = fnv1a(tags, sizeof(tags), h);
    h = fnv1a(block.eigenvalues.data(), sizeof(double) * block.eigenvalues.size(), h);
    return h;
}

void check_superop_guard(Index dim)
{
    const double entries = static_cast<double>(dim) * dim;
    if (entries * entries > 1e8) {
        throw guard_error("generator: superoperator would exceed the dense-size guard");
    }
}

// G = -sum_E,E' ghat(E-E') P_E K P_E' in the energy frame, K = sum L†L.
Matrix damped_anticommutator_part(const EnergyFrame& frame, const Matrix& k_en,
                                  const FilterSpec& spec)
{
    const Index dim = frame.block.basis.dim;
    const RealMatrix gw =
        bohr_weights(frame.clusters, dim, [&](double nu) { return g_hat(spec, nu); });
    return -(gw.cast<Complex>().cwiseProduct(k_en));
}

} // namespace

Matrix GeneratorMatrix::apply(const Matrix& x) const
{
    return unvectorize(sup * vectorize(x), dim);
}

OperatorMatrix filtered_jump(const HamiltonianBlock& block, const Matrix& bare,
                             const FilterSpec& spec, double s)
{
    spec.validate();
    EnergyFrame frame(block);
    const Index dim = block.basis.dim;
    const RealMatrix w = bohr_weights(frame.clusters, dim, [&](double nu) {
        return std::exp(s * nu) * filter_hat(spec, nu);
    });
    Matrix l_en = w.cast<Complex>().cwiseProduct(frame.to_energy(bare));
    return make_operator(frame.to_product(l_en), false);
}

OperatorMatrix coherent_term(const HamiltonianBlock& block,
                             const std::vector<JumpOperator>& jumps, const FilterSpec& spec)
{
    spec.validate();
    EnergyFrame frame(block);
    const Index dim = block.basis.dim;
    const RealMatrix fw =
        bohr_weights(frame.clusters, dim, [&](double nu) { return filter_hat(spec, nu); });

    Matrix k_en = Matrix::Zero(dim, dim);
    for (const auto& jump : jumps) {
        const Matrix l_en = fw.cast<Complex>().cwiseProduct(frame.to_energy(jump.op));
        k_en.noalias() += l_en.adjoint() * l_en;
    }
    const RealMatrix tw = bohr_weights(frame.clusters, dim, [&](double nu) {
        return std::tanh(spec.beta * nu / 4.0);
    });
    const Matrix b_en = Complex(0.0, 0.5) * tw.cast<Complex>().cwiseProduct(k_en);
    Matrix b = frame.to_product(b_en);
    b = 0.5 * (b + b.adjoint().eval()); // remove roundoff skew before flagging
    return make_operator(std::move(b), true);
}

namespace {

// Trace-class generator in the energy frame of the block.
Matrix trace_class_sup_energy(const EnergyFrame& frame, const std::vector<JumpOperator>& jumps,
                              const FilterSpec& spec)
{
    const Index dim = frame.block.basis.dim;
    const RealMatrix fw =
        bohr_weights(frame.clusters, dim, [&](double nu) { return filter_hat(spec, nu); });

    std::vector<Matrix> l_en;
    l_en.reserve(jumps.size());
    Matrix k_en = Matrix::Zero(dim, dim);
    for (const auto& jump : jumps) {
        l_en.push_back(fw.cast<Complex>().cwiseProduct(frame.to_energy(jump.op)));
        k_en.noalias() += l_en.back().adjoint() * l_en.back();
    }
    const Matrix g_en = damped_anticommutator_part(frame, k_en, spec);

    Matrix sup = Matrix::Zero(dim * dim, dim * dim);
    const Matrix eye = Matrix::Identity(dim, dim);
    sup += kron(eye, g_en);
    sup += kron(g_en.conjugate(), eye);

    // Jump sandwich with the Gaussian closure of the time average:
    // exp(-[(E_i-E_k) - (E_j-E_l)]^2 / (8 sigma_E^2)) on L ⊗ conj(L).
    std::vector<double> energy(dim);
    for (Index i = 0; i < dim; ++i) energy[i] = frame.cluster_energy(i);
    const double inv8s2 = 1.0 / (8.0 * spec.sigma_e * spec.sigma_e);
    for (const auto& l : l_en) {
        for (Index l2 = 0; l2 < dim; ++l2) {
            for (Index j = 0; j < dim; ++j) {
                const Complex lc = std::conj(l(j, l2));
                if (lc == Complex(0.0, 0.0)) continue;
                const double bohr_jl = energy[j] - energy[l2];
                for (Index k = 0; k < dim; ++k) {
                    const Index col = k + dim * l2;
                    for (Index i = 0; i < dim; ++i) {
                        const Complex li = l(i, k);
                        if (li == Complex(0.0, 0.0)) continue;
                        const double mismatch = (energy[i] - energy[k]) - bohr_jl;
                        sup(i + dim * j, col) +=
                            li * lc * std::exp(-mismatch * mismatch * inv8s2);
                    }
                }
            }
        }
    }
    return sup;
}

} // namespace

GeneratorMatrix build_generator_trace_class(const HamiltonianBlock& block,
                                            const std::vector<JumpOperator>& jumps,
                                            const FilterSpec& spec)
{
    spec.validate();
    if (!spec.sigma_e_finite()) {
        throw std::invalid_argument(
            "build_generator_trace_class: sigma_E must be finite (the undamped "
            "generator lives in the symmetrized picture)");
    }
    const Index dim = block.basis.dim;
    check_superop_guard(dim);
    EnergyFrame frame(block);

    GeneratorMatrix gen;
    gen.dim = dim;
    gen.sup = superop_to_product_basis(trace_class_sup_energy(frame, jumps, spec),
                                       block.eigenvectors);
    gen.variant = GeneratorVariant::sigma_e_finite;
    gen.picture = GeneratorPicture::trace_class;
    gen.provenance = generator_provenance(block, spec, gen.variant, gen.picture);
    return gen;
}

GeneratorMatrix build_generator_symmetrized(const HamiltonianBlock& block,
                                            const std::vector<JumpOperator>& jumps,
                                            const FilterSpec& spec, GeneratorVariant variant)
{
    spec.validate();
    const Index dim = block.basis.dim;
    check_superop_guard(dim);

    Matrix sup;
    if (variant == GeneratorVariant::sigma_e_infinite) {
        EnergyFrame frame(block);
        const RealMatrix fw =
            bohr_weights(frame.clusters, dim, [&](double nu) { return filter_hat(spec, nu); });
        const RealMatrix gamma_p = bohr_weights(frame.clusters, dim, [&](double nu) {
            return std::exp(spec.beta * nu / 4.0);
        });

        Matrix k_en = Matrix::Zero(dim, dim);
        std::vector<Matrix> lp_en;
        lp_en.reserve(jumps.size());
        for (const auto& jump : jumps) {
            const Matrix l = fw.cast<Complex>().cwiseProduct(frame.to_energy(jump.op));
            k_en.noalias() += l.adjoint() * l;
            lp_en.push_back(gamma_p.cast<Complex>().cwiseProduct(l));
        }
        const RealMatrix tw = bohr_weights(frame.clusters, dim, [&](double nu) {
            return std::tanh(spec.beta * nu / 4.0);
        });
        // G = -K/2 - iB folds the coherent term into the one-sided factor.
        const Matrix g_en =
            -0.5 * k_en + 0.5 * tw.cast<Complex>().cwiseProduct(k_en);
        const Matrix gp_en = gamma_p.cast<Complex>().cwiseProduct(g_en);

        Matrix sup_en = Matrix::Zero(dim * dim, dim * dim);
        const Matrix eye = Matrix::Identity(dim, dim);
        sup_en += kron(eye, gp_en);
        sup_en += kron(gp_en.conjugate(), eye);
        for (const auto& lp : lp_en) {
            sup_en += kron(lp.conjugate(), lp);
        }
        sup = superop_to_product_basis(sup_en, block.eigenvectors);
    } else {
        if (!spec.sigma_e_finite()) {
            throw std::invalid_argument(
                "build_generator_symmetrized: sigma_e_finite variant needs finite sigma_E");
        }
        const double range = block.eigenvalues(dim - 1) - block.eigenvalues(0);
        if (spec.beta * range > 700.0) {
            throw guard_error(
                "build_generator_symmetrized: beta * spectral range too large for the "
                "iota_2 conjugation");
        }
        // iota_2(x) = sigma^{1/4} x sigma^{1/4} is diagonal in the energy
        // frame, so the conjugation scales the energy-frame entries by the
        // quarter-Boltzmann ratio of column over row.
        EnergyFrame frame(block);
        Matrix sup_en = trace_class_sup_energy(frame, jumps, spec);
        const double e0 = block.eigenvalues(0);
        RealVector quarter(dim);
        for (Index k = 0; k < dim; ++k) {
            quarter(k) = std::exp(-spec.beta * (block.eigenvalues(k) - e0) / 4.0);
        }
        RealVector scale(dim * dim);
        for (Index j = 0; j < dim; ++j) {
            for (Index i = 0; i < dim; ++i) scale(i + dim * j) = quarter(i) * quarter(j);
        }
        for (Index col = 0; col < dim * dim; ++col) {
            for (Index row = 0; row < dim * dim; ++row) {
                sup_en(row, col) *= scale(col) / scale(row);
            }
        }
        sup = superop_to_product_basis(sup_en, block.eigenvectors);
    }

    GeneratorMatrix gen;
    gen.dim = dim;
    gen.variant = variant;
    gen.picture = GeneratorPicture::symmetrized;
    gen.provenance = generator_provenance(block, spec, variant, gen.picture);
    const double scale = sup.cwiseAbs().maxCoeff();
    gen.symmetrization_residual =
        scale > 0.0 ? (sup - sup.adjoint()).cwiseAbs().maxCoeff() / scale : 0.0;
    gen.sup = 0.5 * (sup + sup.adjoint().eval());
    return gen;
}

OUParams ou_rates(const FilterSpec& spec)
{
    OUParams p;
    p.nu_plus = std::pow(filter_hat(spec, 2.0), 2);
    p.nu_minus = std::pow(filter_hat(spec, -2.0), 2);
    return p;
}

GeneratorMatrix ou_reference_generator(double nu_plus, double nu_minus, int cutoff)
{
    if (cutoff < 2) throw std::invalid_argument("ou_reference_generator: cutoff >= 2 required");
    const Index c = cutoff;
    check_superop_guard(c);
    Matrix lower = Matrix::Zero(c, c);
    for (Index k = 1; k < c; ++k) lower(k - 1, k) = std::sqrt(static_cast<double>(k));
    const Matrix raise = lower.adjoint();
    const Matrix eye = Matrix::Identity(c, c);
    // Anticommutator from the compressed ladder products; at the cutoff edge
    // this matches the sampler built from compressed jumps, in the interior
    // it is the textbook (nu-+nu+)/2 {N, x} + nu+ x form.
    const Matrix k_op = nu_minus * raise * lower + nu_plus * lower * raise;

    Matrix sup = Matrix::Zero(c * c, c * c);
    sup -= 0.5 * (kron(eye, k_op) + kron(k_op.transpose(), eye));
    const double amp = std::sqrt(nu_plus * nu_minus);
    sup += amp * kron(raise.transpose().eval(), lower); // a x a†
    sup += amp * kron(lower.transpose().eval(), raise); // a† x a

    GeneratorMatrix gen;
    gen.dim = c;
    gen.sup = std::move(sup);
    gen.variant = GeneratorVariant::sigma_e_infinite;
    gen.picture = GeneratorPicture::symmetrized;
    gen.provenance = fnv1a(&nu_plus, sizeof(double), fnv1a(&nu_minus, sizeof(double)));
    return gen;
}

GeneratorMatrix ladder_block_generator(double nu_plus, double nu_minus, int cutoff)
{
    if (cutoff < 2) throw std::invalid_argument("ladder_block_generator: cutoff >= 2 required");
    const Index c = cutoff;
    check_superop_guard(c);
    // kappa_k in the jump-amplitude variables sqrt(nu±); with these
    // coefficients L_OU <= L_LB holds as quadratic forms for every rate pair
    // (arithmetic-geometric mean bound on the sandwich term).
    const double lam = std::sqrt(nu_plus);
    const double mu = std::sqrt(nu_minus);
    const double slope = 0.5 * (mu - lam) * (mu - lam);
    const double offset = lam * (mu - lam);
    Matrix sup = Matrix::Zero(c * c, c * c);
    for (Index m = 0; m < c; ++m) {
        for (Index n = 0; n < c; ++n) {
            sup(n + c * m, n + c * m) = -slope * static_cast<double>(n + m) + offset;
        }
    }
    GeneratorMatrix gen;
    gen.dim = c;
    gen.sup = std::move(sup);
    gen.variant = GeneratorVariant::sigma_e_infinite;
    gen.picture = GeneratorPicture::symmetrized;
    gen.provenance = fnv1a(&nu_plus, sizeof(double), fnv1a(&nu_minus, sizeof(double)));
    return gen;
}

namespace {

Matrix sigma_power(const HamiltonianBlock& block, const GibbsState& sigma, double exponent)
{
    RealVector scaled(sigma.populations.size());
    for (Index k = 0; k < scaled.size(); ++k) {
        scaled(k) = std::pow(sigma.populations(k), exponent);
    }
    return block.eigenvectors * scaled.asDiagonal() * block.eigenvectors.adjoint();
}

} // namespace

Matrix apply_iota2(const HamiltonianBlock& block, const GibbsState& sigma, const Matrix& x)
{
    const Matrix root = sigma_power(block, sigma, 0.25);
    return root * x * root;
}

Matrix apply_iota2_inverse(const HamiltonianBlock& block, const GibbsState& sigma,
                           const Matrix& x)
{
    const Matrix root = sigma_power(block, sigma, -0.25);
    return root * x * root;
}

} // namespace tcgs
