#include "tcgs/config.hpp"

#include <fstream>

namespace tcgs {

using nlohmann::json;

void GuardSpec::check_hilbert(Index dim) const
{
    if (dim > max_hilbert_dim) {
        throw guard_error("guard: Hilbert dimension " + std::to_string(dim) + " exceeds " +
                          std::to_string(max_hilbert_dim) +
                          (overridden ? "" : " (raise with --guard-override)"));
    }
}

void GuardSpec::check_vectorized(Index dim) const
{
    if (dim * dim > max_vectorized_dim) {
        throw guard_error("guard: vectorized dimension " + std::to_string(dim * dim) +
                          " exceeds " + std::to_string(max_vectorized_dim) +
                          (overridden ? "" : " (raise with --guard-override)"));
    }
}

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where)
{
    if (!j.is_object()) throw schema_error("config: " + where + " must be an object");
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw schema_error("config: unknown key '" + where + "." + item.key() + "'");
        }
    }
}

double get_number(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw schema_error("config: missing key '" + where + "." + key + "'");
    if (!j[key].is_number()) {
        throw schema_error("config: '" + where + "." + key + "' must be a number");
    }
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key)) throw schema_error("config: missing key '" + where + "." + key + "'");
    if (!j[key].is_number_integer()) {
        throw schema_error("config: '" + where + "." + key + "' must be an integer");
    }
    return j[key].get<int>();
}

} // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw schema_error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw schema_error(std::string("config: JSON parse error: ") + err.what());
    }
    return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    reject_unknown_keys(j, {"version", "model", "filter", "quadrature", "plan", "evolve",
                            "estimate", "sweep", "guards", "seed", "output"},
                        "<root>");
    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1) {
        throw schema_error("config: 'version' must be the integer 1");
    }
    ExperimentConfig cfg;
    cfg.raw = j;
    const std::string canonical = j.dump();
    cfg.config_hash = fnv1a(canonical.data(), canonical.size());
    return cfg;
}

ModelParams ExperimentConfig::model() const
{
    if (!raw.contains("model")) throw schema_error("config: missing 'model' section");
    const json& m = raw["model"];
    reject_unknown_keys(m, {"n", "d", "M", "beta", "couplings"}, "model");
    ModelParams params;
    params.n = get_int(m, "n", "model");
    params.d = get_int(m, "d", "model");
    params.M = get_int(m, "M", "model");
    params.beta = get_number(m, "beta", "model");
    if (!(params.beta > 0.0)) throw schema_error("config: 'model.beta' must be > 0");

    params.couplings = CouplingMatrix::zero(std::max(1, params.n));
    if (m.contains("couplings")) {
        const json& c = m["couplings"];
        reject_unknown_keys(c, {"uniform", "pairs"}, "model.couplings");
        if (c.contains("uniform") && c.contains("pairs")) {
            throw schema_error("config: 'model.couplings' takes either 'uniform' or 'pairs'");
        }
        if (c.contains("uniform")) {
            params.couplings =
                CouplingMatrix::uniform(params.n, get_number(c, "uniform", "model.couplings"));
        } else if (c.contains("pairs")) {
            if (!c["pairs"].is_array()) {
                throw schema_error("config: 'model.couplings.pairs' must be an array");
            }
            for (const auto& entry : c["pairs"]) {
                if (!entry.is_array() || entry.size() != 3) {
                    throw schema_error(
                        "config: each 'model.couplings.pairs' entry must be [i, j, alpha]");
                }
                params.couplings.set(entry[0].get<int>(), entry[1].get<int>(),
                                     entry[2].get<double>());
            }
        }
    }
    params.validate();
    return params;
}

FilterSpec ExperimentConfig::filter() const
{
    const double beta = model().beta;
    if (!raw.contains("filter")) return make_gaussian_kms_filter(beta, 1.0);
    const json& f = raw["filter"];
    reject_unknown_keys(f, {"sigma_E", "sigma_w"}, "filter");
    double sigma_e;
    if (!f.contains("sigma_E")) throw schema_error("config: missing 'filter.sigma_E'");
    if (f["sigma_E"].is_string()) {
        if (f["sigma_E"] != "inf") {
            throw schema_error("config: 'filter.sigma_E' must be a number or \"inf\"");
        }
        sigma_e = std::numeric_limits<double>::infinity();
    } else if (f["sigma_E"].is_number()) {
        sigma_e = f["sigma_E"].get<double>();
    } else {
        throw schema_error("config: 'filter.sigma_E' must be a number or \"inf\"");
    }
    if (f.contains("sigma_w")) {
        return make_gaussian_kms_filter(beta, sigma_e, get_number(f, "sigma_w", "filter"));
    }
    return make_gaussian_kms_filter(beta, sigma_e);
}

QuadratureSpec ExperimentConfig::quadrature() const
{
    QuadratureSpec quad;
    if (!raw.contains("quadrature")) return quad;
    const json& q = raw["quadrature"];
    reject_unknown_keys(
        q, {"radial_nodes", "angular_nodes", "tensor_nodes", "singularity_mode", "target_tol"},
        "quadrature");
    if (q.contains("radial_nodes")) quad.radial_nodes = get_int(q, "radial_nodes", "quadrature");
    if (q.contains("angular_nodes")) quad.angular_nodes = get_int(q, "angular_nodes", "quadrature");
    if (q.contains("tensor_nodes")) quad.tensor_nodes = get_int(q, "tensor_nodes", "quadrature");
    if (q.contains("target_tol")) quad.target_tol = get_number(q, "target_tol", "quadrature");
    if (q.contains("singularity_mode")) {
        const std::string mode = q["singularity_mode"].get<std::string>();
        if (mode == "relative-coordinate-radial") {
            quad.singularity_mode = SingularityMode::relative_coordinate_radial;
        } else if (mode == "tensor-grid") {
            quad.singularity_mode = SingularityMode::tensor_grid;
        } else {
            throw schema_error("config: unknown 'quadrature.singularity_mode': " + mode);
        }
    }
    quad.validate();
    return quad;
}

IntegrationPlan ExperimentConfig::plan() const
{
    IntegrationPlan plan;
    plan.seed = seed();
    if (!raw.contains("plan")) return plan;
    const json& p = raw["plan"];
    reject_unknown_keys(p, {"L", "S", "delta"}, "plan");
    if (p.contains("L")) plan.L = get_int(p, "L", "plan");
    if (p.contains("S")) plan.S = static_cast<long long>(get_number(p, "S", "plan"));
    if (p.contains("delta")) plan.delta = get_number(p, "delta", "plan");
    plan.validate();
    return plan;
}

GuardSpec ExperimentConfig::guards() const
{
    GuardSpec guards;
    if (!raw.contains("guards")) return guards;
    const json& g = raw["guards"];
    reject_unknown_keys(g, {"max_hilbert_dim", "max_vectorized_dim"}, "guards");
    if (g.contains("max_hilbert_dim")) {
        guards.max_hilbert_dim = get_int(g, "max_hilbert_dim", "guards");
    }
    if (g.contains("max_vectorized_dim")) {
        guards.max_vectorized_dim = get_int(g, "max_vectorized_dim", "guards");
    }
    return guards;
}

SweepTruncationSpec ExperimentConfig::sweep_truncation() const
{
    if (!raw.contains("sweep")) throw schema_error("config: missing 'sweep' section");
    const json& s = raw["sweep"];
    reject_unknown_keys(s, {"M_list", "M_ref"}, "sweep");
    SweepTruncationSpec spec;
    if (!s.contains("M_list") || !s["M_list"].is_array()) {
        throw schema_error("config: 'sweep.M_list' must be an array of integers");
    }
    for (const auto& v : s["M_list"]) spec.m_list.push_back(v.get<int>());
    spec.m_ref = get_int(s, "M_ref", "sweep");
    return spec;
}

SweepGapSpec ExperimentConfig::sweep_gap() const
{
    if (!raw.contains("sweep")) throw schema_error("config: missing 'sweep' section");
    const json& s = raw["sweep"];
    reject_unknown_keys(s, {"n_list", "d", "M", "beta", "coupling_eps", "sigma_E", "tolerance"},
                        "sweep");
    SweepGapSpec spec;
    if (!s.contains("n_list") || !s["n_list"].is_array()) {
        throw schema_error("config: 'sweep.n_list' must be an array of integers");
    }
    for (const auto& v : s["n_list"]) spec.n_list.push_back(v.get<int>());
    spec.d = get_int(s, "d", "sweep");
    spec.M = get_int(s, "M", "sweep");
    spec.beta = get_number(s, "beta", "sweep");
    if (s.contains("coupling_eps")) spec.coupling_eps = get_number(s, "coupling_eps", "sweep");
    if (s.contains("tolerance")) spec.tolerance = get_number(s, "tolerance", "sweep");
    if (s.contains("sigma_E")) {
        if (s["sigma_E"].is_string() && s["sigma_E"] == "inf") {
            spec.sigma_e = std::numeric_limits<double>::infinity();
        } else {
            spec.sigma_e = get_number(s, "sigma_E", "sweep");
        }
    }
    return spec;
}

double ExperimentConfig::evolve_epsilon() const
{
    if (!raw.contains("evolve")) return 0.01;
    const json& e = raw["evolve"];
    reject_unknown_keys(e, {"epsilon", "initial"}, "evolve");
    return e.contains("epsilon") ? get_number(e, "epsilon", "evolve") : 0.01;
}

std::string ExperimentConfig::evolve_initial() const
{
    if (!raw.contains("evolve") || !raw["evolve"].contains("initial")) return "vacuum";
    const std::string init = raw["evolve"]["initial"].get<std::string>();
    if (init != "vacuum" && init != "ground") {
        throw schema_error("config: 'evolve.initial' must be \"vacuum\" or \"ground\"");
    }
    return init;
}

double ExperimentConfig::estimate_epsilon() const
{
    if (!raw.contains("estimate")) throw schema_error("config: missing 'estimate' section");
    const json& e = raw["estimate"];
    reject_unknown_keys(e, {"epsilon", "delta"}, "estimate");
    return get_number(e, "epsilon", "estimate");
}

double ExperimentConfig::estimate_delta() const
{
    const json& e = raw["estimate"];
    return e.contains("delta") ? get_number(e, "delta", "estimate") : 0.1;
}

std::uint64_t ExperimentConfig::seed() const
{
    if (!raw.contains("seed")) return 0;
    if (!raw["seed"].is_number_integer()) throw schema_error("config: 'seed' must be an integer");
    return raw["seed"].get<std::uint64_t>();
}

} // namespace tcgs
