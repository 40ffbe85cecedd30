#include "tcgs/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "tcgs/rng.hpp"

namespace tcgs {

namespace {

double block_expectation(const GibbsState& state, const Matrix& op)
{
    return (state.density.transpose().cwiseProduct(op)).sum().real();
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) return 0.0;
    const double denom = count * sxx - sx * sx;
    return denom > 0.0 ? (count * sxy - sx * sy) / denom : 0.0;
}

} // namespace

BogoliubovBracket bogoliubov_bracket(const HamiltonianBlock& h, const HamiltonianBlock& h_prime,
                                     double beta)
{
    if (h.basis.dim != h_prime.basis.dim || h.basis.one_body.M != h_prime.basis.one_body.M ||
        h.basis.n != h_prime.basis.n) {
        throw std::invalid_argument("bogoliubov_bracket: blocks must share a basis");
    }
    const Matrix delta = h.matrix.entries - h_prime.matrix.entries;
    const GibbsState g = gibbs_state(h, beta);
    const GibbsState gp = gibbs_state(h_prime, beta);

    BogoliubovBracket bracket;
    bracket.lower = block_expectation(g, delta);
    bracket.upper = block_expectation(gp, delta);
    bracket.delta_f = g.free_energy - gp.free_energy;

    const double scale =
        std::max({1.0, std::abs(bracket.lower), std::abs(bracket.upper)});
    if (bracket.lower > bracket.delta_f + 1e-10 * scale ||
        bracket.delta_f > bracket.upper + 1e-10 * scale) {
        throw quality_error("bogoliubov_bracket: ordering violated",
                            std::max(bracket.lower - bracket.delta_f,
                                     bracket.delta_f - bracket.upper));
    }
    return bracket;
}

namespace {

// -d/dt log Z(t) with the analytic free tail.
double internal_energy(const HamiltonianBlock& block, double t)
{
    const int dn = block.tail.d * block.tail.n;
    double z_block = 0.0, e_block = 0.0;
    for (Index k = 0; k < block.eigenvalues.size(); ++k) {
        const double w = std::exp(-t * block.eigenvalues(k));
        z_block += w;
        e_block += block.eigenvalues(k) * w;
    }
    double z_free = 0.0, e_free = 0.0;
    for (Index s = 0; s < block.free_levels.size(); ++s) {
        const double w = std::exp(-t * block.free_levels(s));
        z_free += w;
        e_free += block.free_levels(s) * w;
    }
    const double z_total_free = free_partition_function(block.tail.n, block.tail.d, t);
    const double e_total_free = dn / std::tanh(t) * z_total_free;
    const double z = z_block + std::max(0.0, z_total_free - z_free);
    return (e_block + e_total_free - e_free) / z;
}

} // namespace

std::vector<EnergyProfileRow> internal_energy_profile(const HamiltonianBlock& block,
                                                      const std::vector<double>& t_grid)
{
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0) || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
            throw std::invalid_argument("internal_energy_profile: grid must be positive ascending");
        }
    }
    std::vector<EnergyProfileRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        EnergyProfileRow row;
        row.t = t;
        row.internal_energy = internal_energy(block, t);
        const double f_t = gibbs_state(block, t).free_energy;
        const double f_half = gibbs_state(block, 0.5 * t).free_energy;
        row.bound = 2.0 * f_t - f_half;
        if (row.internal_energy > row.bound + 1e-10 * std::max(1.0, std::abs(row.bound))) {
            throw quality_error("internal_energy_profile: 2F_t - F_{t/2} bound violated",
                                row.internal_energy - row.bound);
        }
        if (!rows.empty() &&
            row.internal_energy >
                rows.back().internal_energy + 1e-10 * std::max(1.0, std::abs(row.internal_energy))) {
            throw quality_error("internal_energy_profile: internal energy not monotone",
                                row.internal_energy - rows.back().internal_energy);
        }
        rows.push_back(row);
    }
    return rows;
}

double trace_distance(const Matrix& rho, const Matrix& sigma)
{
    const Matrix diff = rho - sigma;
    const Matrix herm = 0.5 * (diff + diff.adjoint());
    if ((diff - herm).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, diff.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("trace_distance: inputs must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double relative_entropy(const Matrix& rho, const Matrix& sigma)
{
    Eigen::SelfAdjointEigenSolver<Matrix> er(0.5 * (rho + rho.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.adjoint()));
    const RealVector r = er.eigenvalues();
    const RealVector s = es.eigenvalues();
    const double r_scale = r.cwiseAbs().maxCoeff();
    const double s_scale = s.cwiseAbs().maxCoeff();
    const double r_floor = 1e-14 * std::max(1.0, r_scale);
    const double s_floor = 1e-14 * std::max(1.0, s_scale);

    const Matrix overlap = er.eigenvectors().adjoint() * es.eigenvectors();
    double entropy = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
        if (r(i) <= r_floor) continue;
        entropy += r(i) * std::log(r(i));
        double cross = 0.0;
        for (Index j = 0; j < s.size(); ++j) {
            const double w = std::norm(overlap(i, j));
            if (s(j) <= s_floor) {
                if (w * r(i) > 1e-12) return std::numeric_limits<double>::infinity();
                continue;
            }
            cross += w * std::log(s(j));
        }
        entropy -= r(i) * cross;
    }
    return entropy;
}

namespace {

// Embedding of a sub-level state into the reference block: the dense block
// part sits on product states with all modes < M, the rest of the reference
// block carries the free diagonal populations of the sub-level state.
struct EmbeddedState {
    Matrix density;      // on the reference block, trace 1 - tail_beyond_ref
    double z;            // partition function of the sub-level state
    double tail_beyond;  // mass outside the reference block
};

EmbeddedState embed_into_reference(const ProductBasis& ref_basis, const HamiltonianBlock& sub_block,
                                   const GibbsState& sub_state)
{
    const int m_ref = ref_basis.one_body.M;
    const int n = ref_basis.n;

    EmbeddedState out;
    out.z = sub_state.partition_function;
    out.density = Matrix::Zero(ref_basis.dim, ref_basis.dim);

    // Map sub-block product states into the reference indexing.
    std::vector<Index> map(sub_block.basis.dim);
    for (Index s = 0; s < sub_block.basis.dim; ++s) {
        Index ref_index = 0;
        for (int i = 0; i < n; ++i) {
            ref_index = ref_index * m_ref + sub_block.basis.mode_at(s, i);
        }
        map[s] = ref_index;
    }
    for (Index a = 0; a < sub_block.basis.dim; ++a) {
        for (Index b = 0; b < sub_block.basis.dim; ++b) {
            out.density(map[a], map[b]) = sub_state.density(a, b);
        }
    }
    // Free diagonal on reference states outside the sub-block.
    std::vector<char> inside(ref_basis.dim, 0);
    for (Index s : map) inside[s] = 1;
    double z_free_ref = 0.0;
    for (Index s = 0; s < ref_basis.dim; ++s) {
        const double level = ref_basis.free_energy_level(s);
        const double w = std::exp(-sub_state.beta * level);
        z_free_ref += w;
        if (!inside[s]) out.density(s, s) = w / out.z;
    }
    const double z_free_total =
        free_partition_function(n, ref_basis.one_body.d, sub_state.beta);
    out.tail_beyond = std::max(0.0, z_free_total - z_free_ref) / out.z;
    return out;
}

} // namespace

TruncationSweepResult truncation_sweep(int n, int d, double beta, const CouplingMatrix& couplings,
                                       const std::vector<int>& m_list, int m_ref,
                                       const QuadratureSpec& quad)
{
    if (m_list.empty()) throw std::invalid_argument("truncation_sweep: empty M list");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] > m_ref) {
            throw std::invalid_argument("truncation_sweep: M entries must not exceed M_ref");
        }
        if (i > 0 && m_list[i] <= m_list[i - 1]) {
            throw std::invalid_argument("truncation_sweep: M list must be ascending");
        }
    }
    const InteractionTable table_ref = two_body_matrix_elements(d, m_ref, quad);
    ModelParams ref_params{n, d, m_ref, couplings, beta};
    const HamiltonianBlock ref_block = build_truncated_hamiltonian(ref_params, table_ref);
    const GibbsState ref_state = gibbs_state(ref_block, beta);

    const double z_free_total = free_partition_function(n, d, beta);
    double z_free_ref_block = 0.0;
    for (Index s = 0; s < ref_block.basis.dim; ++s) {
        z_free_ref_block += std::exp(-beta * ref_block.free_levels(s));
    }
    const double tail_mass_ref_free = std::max(0.0, z_free_total - z_free_ref_block);

    TruncationSweepResult result;
    result.f_ref = ref_state.free_energy;
    result.rate_f = -1.0 / (4.0 * d);
    result.rate_trace = -1.0 / (8.0 * d);

    RealVector ref_pop_log(ref_state.populations.size());
    for (Index k = 0; k < ref_pop_log.size(); ++k) {
        ref_pop_log(k) = std::log(ref_state.populations(k));
    }

    for (int m : m_list) {
        ModelParams mp{n, d, m, couplings, beta};
        const HamiltonianBlock block = build_truncated_hamiltonian(mp, table_ref.restricted(m));
        const GibbsState state = gibbs_state(block, beta);

        TruncationRow row;
        row.M = m;
        row.f_error = std::abs(state.free_energy - ref_state.free_energy);

        const EmbeddedState embedded = embed_into_reference(ref_block.basis, block, state);
        // Block part plus the proportional free tails beyond the reference.
        row.trace_dist = trace_distance(embedded.density, ref_state.density) +
                         tail_mass_ref_free *
                             std::abs(1.0 / embedded.z - 1.0 / ref_state.partition_function);

        // D(sigma_ref || sigma_M): block part through the spectral overlap,
        // plus the constant log-ratio over the common free tail.
        double entropy = 0.0;
        for (Index k = 0; k < ref_state.populations.size(); ++k) {
            entropy += ref_state.populations(k) * ref_pop_log(k);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> em(embedded.density);
        const RealVector mu = em.eigenvalues();
        const Matrix overlap =
            ref_block.eigenvectors.adjoint() * em.eigenvectors();
        for (Index i = 0; i < ref_state.populations.size(); ++i) {
            double cross = 0.0;
            for (Index j = 0; j < mu.size(); ++j) {
                cross += std::norm(overlap(i, j)) * std::log(std::max(mu(j), 1e-300));
            }
            entropy -= ref_state.populations(i) * cross;
        }
        entropy += ref_state.tail_weight *
                   std::log(embedded.z / ref_state.partition_function);
        row.rel_entropy = std::max(0.0, entropy);

        if (!result.rows.empty() && row.f_error > result.rows.back().f_error + 1e-10) {
            throw quality_error("truncation_sweep: free-energy error not monotone in M",
                                row.f_error - result.rows.back().f_error);
        }
        result.rows.push_back(row);
    }

    std::vector<double> ms, fe, td;
    for (const auto& row : result.rows) {
        if (row.M == m_ref) continue; // zero rows carry no slope information
        ms.push_back(row.M);
        fe.push_back(row.f_error);
        td.push_back(row.trace_dist);
    }
    result.slope_f = fit_loglog_slope(ms, fe);
    result.slope_trace = fit_loglog_slope(ms, td);
    return result;
}

void IntegrationPlan::validate() const
{
    if (L < 1) throw schema_error("IntegrationPlan: L >= 1 required");
    if (S < 1) throw schema_error("IntegrationPlan: S >= 1 required");
    if (!(delta > 0.0) || delta >= 1.0) throw schema_error("IntegrationPlan: delta in (0,1) required");
}

namespace {

struct NodeValues {
    std::vector<double> values; // Tr(sigma(H(k/L)) W), k = 0..L-1
    double mean() const
    {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc / static_cast<double>(values.size());
    }
};

NodeValues exact_node_values(const ModelParams& params, const InteractionTable& table, int L)
{
    NodeValues out;
    out.values.reserve(L);
    const ProductBasis basis =
        product_basis(enumerate_one_body_basis(params.d, params.M), params.n);
    const Matrix w = params.couplings.pair_sum() > 0.0
                         ? assemble_interaction(basis, table, params.couplings).entries
                         : Matrix::Zero(basis.dim, basis.dim).eval();
    for (int k = 0; k < L; ++k) {
        const double s = static_cast<double>(k) / L;
        const HamiltonianBlock block = interpolate(params, table, s);
        const GibbsState state = gibbs_state(block, params.beta);
        out.values.push_back(block_expectation(state, w));
    }
    return out;
}

void check_monotone_nodes(const std::vector<double>& values)
{
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double slack = 1e-10 * std::max(1.0, std::abs(values[k - 1]));
        if (values[k] > values[k - 1] + slack) {
            throw quality_error("thermo_integrate: integrand not non-increasing in s",
                                values[k] - values[k - 1]);
        }
    }
}

} // namespace

FreeEnergyReport thermo_integrate_exact(const ModelParams& params, const InteractionTable& table,
                                        const IntegrationPlan& plan)
{
    params.validate();
    plan.validate();

    FreeEnergyReport report;
    report.f0_analytic = free_free_energy(params.n, params.d, params.beta);
    report.chosen_m = params.M;
    report.chosen_l = plan.L;
    report.chosen_s = 0;

    const NodeValues nodes = exact_node_values(params, table, plan.L);
    check_monotone_nodes(nodes.values);
    report.node_values = nodes.values;
    report.delta_f_hat = nodes.mean();
    report.f_hat = report.f0_analytic + report.delta_f_hat;

    const HamiltonianBlock endpoint = build_truncated_hamiltonian(params, table);
    report.f_exact = gibbs_state(endpoint, params.beta).free_energy;
    report.err_riemann = std::abs(report.f_hat - report.f_exact);

    // O(1/L) self-check: the error should halve (within 25%) under doubling.
    const NodeValues doubled = exact_node_values(params, table, 2 * plan.L);
    const double err2 = std::abs(report.f0_analytic + doubled.mean() - report.f_exact);
    if (report.err_riemann > 1e-10) {
        report.halving_ratio = err2 / report.err_riemann;
        if (report.halving_ratio < 0.375 || report.halving_ratio > 0.625) {
            throw quality_error("thermo_integrate_exact: Riemann error did not halve under L doubling",
                                report.halving_ratio);
        }
    }
    return report;
}

FreeEnergyReport thermo_integrate_sampled(const ModelParams& params, const InteractionTable& table,
                                          const IntegrationPlan& plan)
{
    params.validate();
    plan.validate();

    FreeEnergyReport report;
    report.f0_analytic = free_free_energy(params.n, params.d, params.beta);
    report.chosen_m = params.M;
    report.chosen_l = plan.L;
    report.chosen_s = plan.S;

    const ProductBasis basis =
        product_basis(enumerate_one_body_basis(params.d, params.M), params.n);
    const int m = params.M;
    const int n = params.n;

    // Shared spectral measure of the compressed pair interaction.
    Eigen::SelfAdjointEigenSolver<Matrix> pair_es(table.two_particle_matrix());
    const RealVector mu = pair_es.eigenvalues();
    const Matrix pair_vecs = pair_es.eigenvectors();
    const double mu_max = std::max(0.0, mu.maxCoeff());
    const double mu_min = std::min(0.0, mu.minCoeff());
    const double range = mu_max - mu_min;

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (params.couplings.get(i, j) != 0.0) pairs.emplace_back(i, j);
        }
    }

    const int outcomes = static_cast<int>(mu.size()) + 1; // + tail outcome (value 0)
    std::vector<double> cdf(outcomes);
    std::vector<double> node_means(plan.L, 0.0);

    for (int k = 0; k < plan.L; ++k) {
        const double s = static_cast<double>(k) / plan.L;
        const HamiltonianBlock block = interpolate(params, table, s);
        const GibbsState state = gibbs_state(block, params.beta);

        double node_value = 0.0;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [i, j] = pairs[p];
            // Two-body reduced density matrix on slots (i, j).
            Matrix rdm = Matrix::Zero(static_cast<Index>(m) * m, static_cast<Index>(m) * m);
            for (Index a = 0; a < basis.dim; ++a) {
                const Index row = static_cast<Index>(basis.mode_at(a, i)) * m + basis.mode_at(a, j);
                for (int bi = 0; bi < m; ++bi) {
                    const Index bstate = basis.replace_mode(a, i, bi);
                    for (int bj = 0; bj < m; ++bj) {
                        const Index b = basis.replace_mode(bstate, j, bj);
                        rdm(row, static_cast<Index>(bi) * m + bj) += state.density(a, b);
                    }
                }
            }
            // Outcome probabilities in the eigenbasis of the pair interaction;
            // the free tail contributes the zero outcome.
            double cum = 0.0;
            for (Index a = 0; a < mu.size(); ++a) {
                const double prob =
                    std::max(0.0, (pair_vecs.col(a).adjoint() * rdm * pair_vecs.col(a))(0).real());
                cum += prob;
                cdf[a] = cum;
            }
            cdf[outcomes - 1] = cum + state.tail_weight;
            const double total = cdf[outcomes - 1];

            StreamRng rng(stream_key(plan.seed, static_cast<std::uint64_t>(k), p));
            double acc = 0.0;
            for (long long shot = 0; shot < plan.S; ++shot) {
                const double u = rng.uniform() * total;
                const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                const Index idx = std::distance(cdf.begin(), it);
                if (idx < mu.size()) acc += mu(idx);
            }
            node_value += params.couplings.get(i, j) * acc / static_cast<double>(plan.S);
        }
        node_means[k] = node_value;
    }

    report.node_values = node_means;
    double acc = 0.0;
    for (double v : node_means) acc += v;
    report.delta_f_hat = plan.L > 0 ? acc / plan.L : 0.0;
    report.f_hat = report.f0_analytic + report.delta_f_hat;

    const HamiltonianBlock endpoint = build_truncated_hamiltonian(params, table);
    report.f_exact = gibbs_state(endpoint, params.beta).free_energy;

    // Hoeffding budget: per-(node, pair) confidence delta', aggregated with
    // the coupling weights (identical across nodes).
    const std::size_t n_estimates = pairs.size() * static_cast<std::size_t>(plan.L);
    if (n_estimates > 0) {
        const double delta_prime = plan.delta / static_cast<double>(n_estimates);
        const double per_width =
            range * std::sqrt(std::log(2.0 / delta_prime) / (2.0 * static_cast<double>(plan.S)));
        double coupling_sum = 0.0;
        for (const auto& [i, j] : pairs) coupling_sum += std::abs(params.couplings.get(i, j));
        report.err_statistical = coupling_sum * per_width;
    }

    // Statistical noise makes strict monotonicity a flag, not an assertion.
    for (std::size_t k = 1; k < node_means.size(); ++k) {
        const double allowance =
            2.0 * report.err_statistical * plan.L + 1e-10;
        if (node_means[k] > node_means[k - 1] + allowance) report.monotone_nodes = false;
    }
    return report;
}

FreeEnergyReport estimate_free_energy(int n, int d, double beta, const CouplingMatrix& couplings,
                                      double epsilon, double delta, std::uint64_t seed,
                                      const QuadratureSpec& quad)
{
    if (!(epsilon > 0.0) || epsilon >= 1.0) {
        throw schema_error("estimate_free_energy: epsilon in (0,1) required");
    }
    if (!(delta > 0.0) || delta >= 1.0) {
        throw schema_error("estimate_free_energy: delta in (0,1) required");
    }
    const double alpha_max = couplings.alpha_max();

    FreeEnergyReport report;
    report.f0_analytic = free_free_energy(n, d, beta);
    report.paper_budget_log10_m =
        alpha_max > 0.0
            ? 4.0 * d *
                  std::log10((std::pow(n, 3) * alpha_max + std::pow(n, 5) * std::pow(alpha_max, 3)) /
                             epsilon)
            : 0.0;

    if (alpha_max == 0.0) {
        report.f_hat = report.f0_analytic;
        report.f_exact = report.f0_analytic;
        report.chosen_m = 1;
        report.chosen_l = 1;
        report.chosen_s = 0;
        report.budget_note = "free model: analytic answer, no sampling";
        return report;
    }

    // Desk-scale reference level within the Hilbert-dimension guard.
    int m_ref = 12;
    while (m_ref > 2 && std::pow(static_cast<double>(m_ref), n) > 1500.0) --m_ref;
    const InteractionTable table_ref = two_body_matrix_elements(d, m_ref, quad);

    const double budget = epsilon / 3.0; // three error sources, even split
    // Measured truncation curve against the reference level.
    const GibbsState ref_state = gibbs_state(
        build_truncated_hamiltonian(ModelParams{n, d, m_ref, couplings, beta}, table_ref), beta);
    int chosen_m = m_ref;
    report.budget_feasible = false;
    for (int m : {2, 3, 4, 6, 8, 10}) {
        if (m > m_ref) break;
        const GibbsState st = gibbs_state(
            build_truncated_hamiltonian(ModelParams{n, d, m, couplings, beta},
                                        table_ref.restricted(m)),
            beta);
        const double err = std::abs(st.free_energy - ref_state.free_energy);
        if (err <= budget) {
            chosen_m = m;
            report.err_truncation = err;
            report.budget_feasible = true;
            break;
        }
    }
    if (!report.budget_feasible) {
        report.err_truncation = 0.0;
        chosen_m = m_ref;
        char note[200];
        std::snprintf(note, sizeof(note),
                      "budget-infeasible at desk scale: no M <= %d reaches truncation budget "
                      "%.3e; using M = %d",
                      m_ref, budget, m_ref);
        report.budget_note = note;
    }
    report.chosen_m = chosen_m;
    const InteractionTable table = table_ref.restricted(chosen_m);
    const ModelParams params{n, d, chosen_m, couplings, beta};

    // Riemann level from the measured integrand drop: the left-endpoint error
    // of a non-increasing integrand is at most (f(0) - f(1)) / L.
    const ProductBasis basis = product_basis(enumerate_one_body_basis(d, chosen_m), n);
    const Matrix w = assemble_interaction(basis, table, couplings).entries;
    const double f0 = block_expectation(gibbs_state(interpolate(params, table, 0.0), beta), w);
    const double f1 = block_expectation(gibbs_state(interpolate(params, table, 1.0), beta), w);
    const double drop = std::max(0.0, f0 - f1);
    int chosen_l = std::max(1, static_cast<int>(std::ceil(drop / budget)));
    if (chosen_l > 4096) {
        chosen_l = 4096;
        report.budget_feasible = false;
        report.budget_note += (report.budget_note.empty() ? "" : "; ");
        report.budget_note += "Riemann level capped at 4096";
    }
    report.err_riemann = chosen_l > 0 ? drop / chosen_l : 0.0;

    // Shot budget from the Hoeffding width.
    Eigen::SelfAdjointEigenSolver<Matrix> pair_es(table.two_particle_matrix());
    const double range = std::max(0.0, pair_es.eigenvalues().maxCoeff()) -
                         std::min(0.0, pair_es.eigenvalues().minCoeff());
    const double coupling_sum = couplings.pair_sum();
    std::size_t n_pairs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (couplings.get(i, j) != 0.0) ++n_pairs;
        }
    }
    const double delta_prime =
        delta / (static_cast<double>(chosen_l) * std::max<std::size_t>(1, n_pairs));
    long long chosen_s = static_cast<long long>(
        std::ceil(std::log(2.0 / delta_prime) *
                  std::pow(coupling_sum * range / budget, 2) / 2.0));
    chosen_s = std::max<long long>(1, chosen_s);
    const long long shot_cap = 2'000'000;
    if (chosen_s * static_cast<long long>(chosen_l) * static_cast<long long>(n_pairs) >
        shot_cap * 64) {
        chosen_s = std::max<long long>(
            1, shot_cap * 64 / (static_cast<long long>(chosen_l) * n_pairs));
        report.budget_feasible = false;
        report.budget_note += (report.budget_note.empty() ? "" : "; ");
        char note[120];
        std::snprintf(note, sizeof(note), "shot budget capped at S = %lld per (node, pair)",
                      chosen_s);
        report.budget_note += note;
    }

    IntegrationPlan plan;
    plan.L = chosen_l;
    plan.S = chosen_s;
    plan.delta = delta;
    plan.seed = seed;
    FreeEnergyReport sampled = thermo_integrate_sampled(params, table, plan);

    report.f_hat = sampled.f_hat;
    report.delta_f_hat = sampled.delta_f_hat;
    report.f_exact = sampled.f_exact;
    report.err_statistical = sampled.err_statistical;
    report.node_values = sampled.node_values;
    report.monotone_nodes = sampled.monotone_nodes;
    report.chosen_l = chosen_l;
    report.chosen_s = chosen_s;
    if (report.budget_note.empty()) {
        char note[160];
        std::snprintf(note, sizeof(note),
                      "budget split eps/3 = %.3e across truncation, Riemann, sampling", budget);
        report.budget_note = note;
    }
    return report;
}

} // namespace tcgs
