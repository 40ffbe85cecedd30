// config.hpp — JSON experiment configs with a strict versioned schema:
// unknown keys are rejected, ranges validated before any work starts.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcgs/free_energy.hpp"
#include "tcgs/lindblad.hpp"

namespace tcgs {

struct GuardSpec {
    Index max_hilbert_dim{1500};
    Index max_vectorized_dim{10000};
    bool overridden{false};

    void check_hilbert(Index dim) const;
    void check_vectorized(Index dim) const;
};

struct SweepTruncationSpec {
    std::vector<int> m_list;
    int m_ref{12};
};

struct SweepGapSpec {
    std::vector<int> n_list;
    int d{1};
    int M{4};
    double beta{1.0};
    double coupling_eps{0.05}; // alpha = eps / n^2
    double sigma_e{std::numeric_limits<double>::infinity()};
    double tolerance{0.25};
};

struct ExperimentConfig {
    nlohmann::json raw;
    std::uint64_t config_hash{0};

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_json(const nlohmann::json& j);

    ModelParams model() const;
    FilterSpec filter() const; // beta taken from the model section
    QuadratureSpec quadrature() const;
    IntegrationPlan plan() const;
    GuardSpec guards() const;
    SweepTruncationSpec sweep_truncation() const;
    SweepGapSpec sweep_gap() const;
    double evolve_epsilon() const;
    std::string evolve_initial() const; // "vacuum" or "ground"
    double estimate_epsilon() const;
    double estimate_delta() const;
    std::uint64_t seed() const;

    bool has(const std::string& section) const { return raw.contains(section); }
};

} // namespace tcgs
