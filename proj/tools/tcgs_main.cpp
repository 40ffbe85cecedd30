// tcgs — experiment runner for the trapped Coulomb gas Gibbs sampler.
//
// Subcommands: basis, matelems, gibbs, generator, gap, evolve,
// sweep-truncation, sweep-gap, thermo, estimate, verify.
// Exit codes: 0 ok, 2 schema violation, 3 dimension guard, 4 numerical
// quality, 1 anything else. Errors are emitted as a JSON record on stderr.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcgs/config.hpp"
#include "tcgs/free_energy.hpp"
#include "tcgs/report.hpp"
#include "tcgs/spectral.hpp"
#include "tcgs/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tcgs;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir{"out"};
    std::uint64_t seed{0};
    bool seed_set{false};
    int jobs{0};
    bool force{false};
    bool guard_override{false};
};

std::string cache_dir(const CliOptions& opts)
{
    if (const char* env = std::getenv("TCGS_CACHE_DIR")) return env;
    return (fs::path(opts.out_dir) / "cache").string();
}

std::string cache_path(const std::string& dir, int d, int m, std::uint64_t fingerprint)
{
    char name[96];
    std::snprintf(name, sizeof(name), "vtab_d%d_M%d_q%016llx.bin", d, m,
                  static_cast<unsigned long long>(fingerprint));
    return (fs::path(dir) / name).string();
}

// Build-or-load keyed by (d, M, quadrature fingerprint); idempotent.
InteractionTable cached_table(const CliOptions& opts, int d, int m, const QuadratureSpec& quad)
{
    const std::string dir = cache_dir(opts);
    fs::create_directories(dir);
    const std::string path = cache_path(dir, d, m, quad.fingerprint());
    if (!opts.force && fs::exists(path)) {
        InteractionTable table = load_table(path);
        if (table.d == d && table.M == m && table.quad_fingerprint == quad.fingerprint()) {
            return table;
        }
    }
    InteractionTable table = two_body_matrix_elements(d, m, quad);
    cache_table(table, path);
    return table;
}

InteractionTable zero_table_for(const ModelParams& mp)
{
    InteractionTable table;
    table.d = mp.d;
    table.kind = kernel_for_dimension(mp.d).kind;
    table.M = mp.M;
    table.values.assign(static_cast<std::size_t>(mp.M) * mp.M * mp.M * mp.M, 0.0);
    return table;
}

ExperimentConfig load_config(const CliOptions& opts)
{
    if (opts.config_path.empty()) throw schema_error("missing --config");
    return ExperimentConfig::load(opts.config_path);
}

GuardSpec effective_guards(const ExperimentConfig& cfg, const CliOptions& opts)
{
    GuardSpec guards = cfg.guards();
    if (opts.guard_override) {
        guards.max_hilbert_dim = std::numeric_limits<Index>::max();
        guards.max_vectorized_dim = std::numeric_limits<Index>::max();
        guards.overridden = true;
    }
    return guards;
}

std::uint64_t effective_seed(const ExperimentConfig& cfg, const CliOptions& opts)
{
    return opts.seed_set ? opts.seed : cfg.seed();
}

RunReport make_report(const std::string& command, const ExperimentConfig& cfg,
                      const CliOptions& opts)
{
    RunReport report;
    report.command = command;
    report.config_echo = cfg.raw;
    report.config_hash = cfg.config_hash;
    report.seed = effective_seed(cfg, opts);
    return report;
}

void finish_report(RunReport& report, const CliOptions& opts,
                   std::chrono::steady_clock::time_point start)
{
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fs::create_directories(opts.out_dir);
    report.write((fs::path(opts.out_dir) / "report.json").string());
}

std::string out_path(const CliOptions& opts, const std::string& name)
{
    fs::create_directories(opts.out_dir);
    return (fs::path(opts.out_dir) / name).string();
}

HamiltonianBlock build_block(const CliOptions& opts, const ExperimentConfig& cfg,
                             const ModelParams& mp)
{
    if (mp.couplings.pair_sum() > 0.0) {
        return build_truncated_hamiltonian(mp, cached_table(opts, mp.d, mp.M, cfg.quadrature()));
    }
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    return build_perturbed_block(basis, Matrix::Zero(basis.dim, basis.dim));
}

int run_basis(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const OneBodyBasis basis = enumerate_one_body_basis(mp.d, mp.M);

    CsvWriter csv({"index", "energy", "occupations"});
    for (int i = 0; i < basis.M; ++i) {
        std::string occ;
        for (int j = 0; j < basis.d; ++j) {
            if (j) occ += ' ';
            occ += std::to_string(basis.modes[i].k[j]);
        }
        csv.append_row({std::to_string(i), format_double(basis.energies[i]), occ});
    }
    const std::string path = out_path(opts, "basis.csv");
    csv.write(path);

    RunReport report = make_report("basis", cfg, opts);
    report.results["modes"] = basis.M;
    report.results["max_occupation"] = basis.max_occupation();
    report.artifacts.emplace_back("basis", path);
    finish_report(report, opts, start);
    return 0;
}

int run_matelems(const CliOptions& opts, bool inspect, bool evict)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const QuadratureSpec quad = cfg.quadrature();
    const std::string path = cache_path(cache_dir(opts), mp.d, mp.M, quad.fingerprint());

    RunReport report = make_report("matelems", cfg, opts);
    if (evict) {
        const bool removed = fs::remove(path);
        report.results["evicted"] = removed;
        report.results["path"] = path;
        finish_report(report, opts, start);
        return 0;
    }
    if (inspect) {
        const CacheInfo info = inspect_table(path);
        report.results["path"] = path;
        report.results["format_version"] = info.format_version;
        report.results["d"] = info.d;
        report.results["M"] = info.M;
        report.results["kind"] = info.kind == KernelKind::log ? "log" : "inverse";
        report.results["quad_fingerprint"] = info.quad_fingerprint;
        report.results["checksum"] = info.checksum;
        finish_report(report, opts, start);
        return 0;
    }
    const InteractionTable table = cached_table(opts, mp.d, mp.M, quad);
    report.results["path"] = path;
    report.results["checksum"] = table.checksum;
    report.results["convergence_delta"] = table.convergence_delta;
    report.results["ground_pair"] = table.value(0, 0, 0, 0);
    finish_report(report, opts, start);
    return 0;
}

int run_gibbs(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const GuardSpec guards = effective_guards(cfg, opts);
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    guards.check_hilbert(basis.dim);

    const HamiltonianBlock block = build_block(opts, cfg, mp);
    const GibbsState state = gibbs_state(block, mp.beta);

    CsvWriter csv({"level", "energy", "population"});
    for (Index k = 0; k < block.eigenvalues.size(); ++k) {
        csv.append_row_numeric(
            {static_cast<double>(k), block.eigenvalues(k), state.populations(k)});
    }
    const std::string path = out_path(opts, "gibbs.csv");
    csv.write(path);

    RunReport report = make_report("gibbs", cfg, opts);
    report.results["free_energy"] = state.free_energy;
    report.results["partition_function"] = state.partition_function;
    report.results["tail_weight"] = state.tail_weight;
    report.results["free_reference"] = free_free_energy(mp.n, mp.d, mp.beta);
    report.artifacts.emplace_back("populations", path);
    finish_report(report, opts, start);
    return 0;
}

int run_generator(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const GuardSpec guards = effective_guards(cfg, opts);
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    guards.check_hilbert(basis.dim);
    guards.check_vectorized(basis.dim);

    const HamiltonianBlock block = build_block(opts, cfg, mp);
    const GibbsState sigma = gibbs_state(block, mp.beta);
    const FilterSpec filter = cfg.filter();
    const auto jumps = bare_jump_set(block.basis);

    RunReport report = make_report("generator", cfg, opts);
    if (filter.sigma_e_finite()) {
        const GeneratorMatrix tc = build_generator_trace_class(block, jumps, filter);
        const Vector vec_id = vectorize(Matrix::Identity(basis.dim, basis.dim));
        const SpectralSummary s = spectral_summary(tc);
        report.results["trace_preservation_residual"] =
            (tc.sup.adjoint() * vec_id).cwiseAbs().maxCoeff() / tc.sup.cwiseAbs().maxCoeff();
        report.results["kernel_residual"] =
            tc.apply(sigma.density_normalized()).cwiseAbs().maxCoeff() / s.spectral_radius;
        report.results["trace_class_gap"] = s.gap;
    }
    const GeneratorVariant variant = filter.sigma_e_finite()
                                         ? GeneratorVariant::sigma_e_finite
                                         : GeneratorVariant::sigma_e_infinite;
    const GeneratorMatrix hs = build_generator_symmetrized(block, jumps, filter, variant);
    const SpectralSummary s = spectral_summary(hs);
    report.results["hermiticity_residual"] = hs.symmetrization_residual;
    report.results["gap"] = s.gap;
    report.results["kernel_dim"] = s.kernel_dim;
    report.results["zero_threshold"] = s.zero_threshold;
    report.results["max_eigenvalue"] = s.eigenvalues(s.eigenvalues.size() - 1).real();
    report.results["provenance"] = hs.provenance;
    finish_report(report, opts, start);
    return 0;
}

int run_gap(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const GuardSpec guards = effective_guards(cfg, opts);
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    guards.check_hilbert(basis.dim);
    guards.check_vectorized(basis.dim);

    std::vector<GapSweepPoint> plan = {{mp, cfg.filter().sigma_e}};
    const std::vector<GapRow> rows = gap_sweep(plan, cfg.quadrature());
    CsvWriter csv({"n", "d", "M", "alpha_max", "beta", "sigma_E", "gap", "kernel_dim",
                   "zero_threshold", "hermiticity_residual", "wall_time_s"});
    for (const auto& row : rows) {
        csv.append_row_numeric({static_cast<double>(row.n), static_cast<double>(row.d),
                                static_cast<double>(row.M), row.alpha_max, row.beta, row.sigma_e,
                                row.gap, static_cast<double>(row.kernel_dim), row.zero_threshold,
                                row.hermiticity_residual, row.wall_time_s});
    }
    const std::string path = out_path(opts, "gap.csv");
    csv.write(path);

    RunReport report = make_report("gap", cfg, opts);
    report.results["gap"] = rows.front().gap;
    report.artifacts.emplace_back("gap", path);
    finish_report(report, opts, start);
    return 0;
}

int run_evolve(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const GuardSpec guards = effective_guards(cfg, opts);
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    guards.check_hilbert(basis.dim);
    guards.check_vectorized(basis.dim);

    const HamiltonianBlock block = build_block(opts, cfg, mp);
    const GibbsState sigma = gibbs_state(block, mp.beta);
    const FilterSpec filter = cfg.filter();
    if (!filter.sigma_e_finite()) {
        throw schema_error("evolve: trajectories need a finite sigma_E (trace-class picture)");
    }
    const auto jumps = bare_jump_set(block.basis);
    const GeneratorMatrix tc = build_generator_trace_class(block, jumps, filter);
    const GeneratorMatrix hs =
        build_generator_symmetrized(block, jumps, filter, GeneratorVariant::sigma_e_finite);
    const double gap = spectral_summary(hs).gap;

    Matrix rho0 = Matrix::Zero(basis.dim, basis.dim);
    if (cfg.evolve_initial() == "vacuum") {
        rho0(0, 0) = 1.0;
    } else {
        rho0 = block.eigenvectors.col(0) * block.eigenvectors.col(0).adjoint();
    }
    const MixingRecord record =
        mixing_time_empirical(tc, rho0, block, sigma, cfg.evolve_epsilon(), gap);

    CsvWriter csv({"t", "trace_distance", "envelope"});
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        csv.append_row_numeric({record.times[k], record.distances[k],
                                std::sqrt(record.warmness) *
                                    std::exp(-0.5 * gap * record.times[k])});
    }
    const std::string path = out_path(opts, "evolve.csv");
    csv.write(path);

    RunReport report = make_report("evolve", cfg, opts);
    report.results["gap"] = gap;
    report.results["warmness"] = record.warmness;
    report.results["t_mix"] = record.t_mix;
    report.results["bound"] = record.bound;
    report.results["fitted_rate"] = record.fitted_rate;
    report.results["distances_monotone"] = record.distances_monotone;
    report.results["envelope_ok"] = record.pointwise_bound_ok;
    report.artifacts.emplace_back("trajectory", path);
    finish_report(report, opts, start);
    return 0;
}

int run_sweep_truncation(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const SweepTruncationSpec sweep = cfg.sweep_truncation();
    const GuardSpec guards = effective_guards(cfg, opts);
    Index ref_dim = 1;
    for (int i = 0; i < mp.n; ++i) ref_dim *= sweep.m_ref;
    guards.check_hilbert(ref_dim);

    const TruncationSweepResult result = truncation_sweep(
        mp.n, mp.d, mp.beta, mp.couplings, sweep.m_list, sweep.m_ref, cfg.quadrature());

    CsvWriter csv({"M", "f_error", "trace_distance", "relative_entropy", "pinsker_bound"});
    for (const auto& row : result.rows) {
        csv.append_row_numeric({static_cast<double>(row.M), row.f_error, row.trace_dist,
                                row.rel_entropy, std::sqrt(2.0 * row.rel_entropy)});
    }
    const std::string path = out_path(opts, "truncation.csv");
    csv.write(path);

    RunReport report = make_report("sweep-truncation", cfg, opts);
    report.results["f_ref"] = result.f_ref;
    report.results["slope_f"] = result.slope_f;
    report.results["slope_trace"] = result.slope_trace;
    report.results["rate_f_reference"] = result.rate_f;
    report.results["rate_trace_reference"] = result.rate_trace;
    report.artifacts.emplace_back("truncation", path);
    finish_report(report, opts, start);
    return 0;
}

int run_sweep_gap(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const SweepGapSpec sweep = cfg.sweep_gap();
    const GuardSpec guards = effective_guards(cfg, opts);

    std::vector<GapSweepPoint> plan;
    for (int n : sweep.n_list) {
        Index dim = 1;
        for (int i = 0; i < n; ++i) dim *= sweep.M;
        guards.check_hilbert(dim);
        guards.check_vectorized(dim);
        ModelParams mp{n, sweep.d, sweep.M,
                       CouplingMatrix::uniform(n, sweep.coupling_eps / (n * n)), sweep.beta};
        plan.push_back({mp, sweep.sigma_e});
    }
    const std::vector<GapRow> rows = gap_sweep(plan, cfg.quadrature());
    double margin = 0.0;
    const bool uniform = uniform_gap_holds(rows, sweep.tolerance, &margin);

    CsvWriter csv({"n", "d", "M", "alpha_max", "beta", "sigma_E", "gap", "kernel_dim",
                   "zero_threshold", "hermiticity_residual", "wall_time_s"});
    for (const auto& row : rows) {
        csv.append_row_numeric({static_cast<double>(row.n), static_cast<double>(row.d),
                                static_cast<double>(row.M), row.alpha_max, row.beta, row.sigma_e,
                                row.gap, static_cast<double>(row.kernel_dim), row.zero_threshold,
                                row.hermiticity_residual, row.wall_time_s});
    }
    const std::string path = out_path(opts, "gap_sweep.csv");
    csv.write(path);

    RunReport report = make_report("sweep-gap", cfg, opts);
    report.results["uniform_gap"] = uniform;
    report.results["margin"] = margin;
    report.results["tolerance"] = sweep.tolerance;
    report.artifacts.emplace_back("gap_sweep", path);
    finish_report(report, opts, start);
    if (!uniform) {
        throw quality_error("sweep-gap: uniform-gap condition violated", margin);
    }
    return 0;
}

int run_thermo(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const GuardSpec guards = effective_guards(cfg, opts);
    const ProductBasis basis = product_basis(enumerate_one_body_basis(mp.d, mp.M), mp.n);
    guards.check_hilbert(basis.dim);

    const InteractionTable table = mp.couplings.pair_sum() > 0.0
                                       ? cached_table(opts, mp.d, mp.M, cfg.quadrature())
                                       : zero_table_for(mp);
    IntegrationPlan plan = cfg.plan();
    plan.seed = effective_seed(cfg, opts);

    const FreeEnergyReport exact = thermo_integrate_exact(mp, table, plan);
    const FreeEnergyReport sampled = thermo_integrate_sampled(mp, table, plan);

    CsvWriter csv({"k", "s", "integrand_exact", "integrand_sampled"});
    for (std::size_t k = 0; k < exact.node_values.size(); ++k) {
        csv.append_row_numeric({static_cast<double>(k),
                                static_cast<double>(k) / plan.L, exact.node_values[k],
                                sampled.node_values[k]});
    }
    const std::string path = out_path(opts, "thermo_nodes.csv");
    csv.write(path);

    RunReport report = make_report("thermo", cfg, opts);
    report.results["f_hat_exact"] = exact.f_hat;
    report.results["f_hat_sampled"] = sampled.f_hat;
    report.results["f_exact"] = exact.f_exact;
    report.results["f0_analytic"] = exact.f0_analytic;
    report.results["riemann_error"] = exact.err_riemann;
    report.results["halving_ratio"] = exact.halving_ratio;
    report.results["statistical_width"] = sampled.err_statistical;
    report.results["monotone_nodes"] = exact.monotone_nodes;
    report.artifacts.emplace_back("nodes", path);
    finish_report(report, opts, start);
    return 0;
}

int run_estimate(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = load_config(opts);
    const ModelParams mp = cfg.model();
    const FreeEnergyReport rep =
        estimate_free_energy(mp.n, mp.d, mp.beta, mp.couplings, cfg.estimate_epsilon(),
                             cfg.estimate_delta(), effective_seed(cfg, opts), cfg.quadrature());

    CsvWriter csv({"k", "integrand"});
    for (std::size_t k = 0; k < rep.node_values.size(); ++k) {
        csv.append_row_numeric({static_cast<double>(k), rep.node_values[k]});
    }
    const std::string path = out_path(opts, "estimate_nodes.csv");
    csv.write(path);

    RunReport report = make_report("estimate", cfg, opts);
    report.results["f_hat"] = rep.f_hat;
    report.results["f0_analytic"] = rep.f0_analytic;
    report.results["delta_f_hat"] = rep.delta_f_hat;
    report.results["chosen_M"] = rep.chosen_m;
    report.results["chosen_L"] = rep.chosen_l;
    report.results["chosen_S"] = rep.chosen_s;
    report.results["err_truncation"] = rep.err_truncation;
    report.results["err_riemann_bound"] = rep.err_riemann;
    report.results["err_statistical"] = rep.err_statistical;
    report.results["budget_feasible"] = rep.budget_feasible;
    report.results["budget_note"] = rep.budget_note;
    report.results["paper_budget_log10_M"] = rep.paper_budget_log10_m;
    report.artifacts.emplace_back("nodes", path);
    finish_report(report, opts, start);
    return 0;
}

int run_verify(const CliOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const std::vector<CheckRow> rows = run_verification();

    CsvWriter csv({"name", "observed", "comparator", "limit", "pass"});
    int failures = 0;
    for (const auto& row : rows) {
        csv.append_row({row.name, format_double(row.observed), row.comparator,
                        format_double(row.limit), row.pass ? "1" : "0"});
        std::printf("[%s] %-48s %13.6g %s %13.6g\n", row.pass ? "PASS" : "FAIL",
                    row.name.c_str(), row.observed, row.comparator.c_str(), row.limit);
        if (!row.pass) ++failures;
    }
    const std::string path = out_path(opts, "verify.csv");
    csv.write(path);
    std::printf("%zu checks, %d failures\n", rows.size(), failures);

    RunReport report;
    report.command = "verify";
    report.config_echo = json::object();
    report.results["checks"] = rows.size();
    report.results["failures"] = failures;
    report.artifacts.emplace_back("checks", path);
    finish_report(report, opts, start);
    return failures == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"tcgs — Gibbs sampling and free-energy estimation for trapped Coulomb gases"};
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--config", opts.config_path, "JSON experiment config");
    app.add_option("--out", opts.out_dir, "output directory (default: out)");
    auto* seed_opt = app.add_option("--seed", opts.seed, "seed override");
    app.add_option("--jobs", opts.jobs, "worker thread cap (0 = hardware)");
    app.add_flag("--force", opts.force, "rebuild cache entries");
    app.add_flag("--guard-override", opts.guard_override, "lift dimension guards");

    app.add_subcommand("basis", "enumerate the one-body basis; CSV: index,energy,occupations");
    auto* matelems = app.add_subcommand(
        "matelems", "build/inspect/evict the interaction-table cache keyed by (d, M, "
                    "quadrature fingerprint)");
    bool inspect = false, evict = false;
    matelems->add_flag("--inspect", inspect, "print cache metadata without loading the tensor");
    matelems->add_flag("--evict", evict, "remove the cache entry");
    app.add_subcommand("gibbs", "Gibbs state and free energy; CSV: level,energy,population");
    app.add_subcommand("generator",
                       "build generators and report invariant residuals and the gap");
    app.add_subcommand("gap", "spectral summary; CSV: n,d,M,alpha_max,beta,sigma_E,gap,"
                              "kernel_dim,zero_threshold,hermiticity_residual,wall_time_s");
    app.add_subcommand("evolve", "trajectory to the Gibbs state; CSV: t,trace_distance,envelope");
    app.add_subcommand("sweep-truncation",
                       "free-energy/trace-distance truncation sweep; CSV: M,f_error,"
                       "trace_distance,relative_entropy,pinsker_bound");
    app.add_subcommand("sweep-gap", "uniform-gap scan over n with alpha = eps/n^2 (same CSV "
                                    "columns as gap)");
    app.add_subcommand("thermo", "thermodynamic integration, exact and sampled; CSV: "
                                 "k,s,integrand_exact,integrand_sampled");
    app.add_subcommand("estimate", "end-to-end free-energy estimator with error budget");
    app.add_subcommand("verify", "run the invariant suite; non-zero exit on any failure");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough(true);

    CLI11_PARSE(app, argc, argv);
    opts.seed_set = seed_opt->count() > 0;
    set_max_threads(opts.jobs);

    const auto fail = [](const char* category, const std::exception& err, int code) {
        json record;
        record["error"]["category"] = category;
        record["error"]["message"] = err.what();
        std::cerr << record.dump() << "\n";
        return code;
    };

    try {
        if (app.got_subcommand("basis")) return run_basis(opts);
        if (app.got_subcommand("matelems")) return run_matelems(opts, inspect, evict);
        if (app.got_subcommand("gibbs")) return run_gibbs(opts);
        if (app.got_subcommand("generator")) return run_generator(opts);
        if (app.got_subcommand("gap")) return run_gap(opts);
        if (app.got_subcommand("evolve")) return run_evolve(opts);
        if (app.got_subcommand("sweep-truncation")) return run_sweep_truncation(opts);
        if (app.got_subcommand("sweep-gap")) return run_sweep_gap(opts);
        if (app.got_subcommand("thermo")) return run_thermo(opts);
        if (app.got_subcommand("estimate")) return run_estimate(opts);
        if (app.got_subcommand("verify")) return run_verify(opts);
    } catch (const schema_error& err) {
        return fail("schema", err, 2);
    } catch (const guard_error& err) {
        return fail("guard", err, 3);
    } catch (const quality_error& err) {
        return fail("quality", err, 4);
    } catch (const std::exception& err) {
        return fail("internal", err, 1);
    }
    return 1;
}
