// oscillator.hpp — d-dimensional harmonic-oscillator eigenbasis, truncated
// ladder matrices on product spaces, and Hermite function evaluation.

#pragma once

#include <vector>

#include "tcgs/types.hpp"

namespace tcgs {

/// Occupation numbers per axis; the eigenvalue of -Δ + |x|^2 is 2|k| + d.
struct ModeIndex {
    std::vector<int> k;

    int total() const;
    double energy(int d) const;
    bool operator==(const ModeIndex& other) const { return k == other.k; }
};

/// The first M eigenstates of the one-body oscillator, ordered by energy and
/// lexicographically inside degenerate multiplets. M counts states, not
/// distinct energies, so multiplets may be split.
struct OneBodyBasis {
    int d{0};
    int M{0};
    std::vector<ModeIndex> modes;
    std::vector<double> energies;

    /// Position of a multi-index in the basis, or -1 if not retained.
    int find(const ModeIndex& mode) const;
    /// Largest per-axis occupation among retained modes.
    int max_occupation() const;
};

OneBodyBasis enumerate_one_body_basis(int d, int M);

/// n-particle product basis over a OneBodyBasis; states are ordered
/// lexicographically over particle slots (particle 0 most significant),
/// dim = M^n.
struct ProductBasis {
    int n{0};
    OneBodyBasis one_body;
    Index dim{0};

    int mode_at(Index state, int particle) const;
    Index replace_mode(Index state, int particle, int new_mode) const;
    /// Free energy of a product state: sum of one-body energies.
    double free_energy_level(Index state) const;
};

ProductBasis product_basis(OneBodyBasis one_body, int n);

enum class LadderKind { lower, raise };

/// Compressed ladder operator P a_{ij} P (or its adjoint) on the product
/// basis; a state leaves the compression iff it leaves the retained basis.
OperatorMatrix ladder_matrix(const ProductBasis& basis, int particle, int axis, LadderKind kind);

/// L^2-normalized eigenfunction of -d^2/dx^2 + x^2 with eigenvalue 2k+1,
/// evaluated by the stable normalized recurrence. Underflows to 0 for
/// large |x|.
double hermite_function(int k, double x);

/// h_0(x) .. h_kmax(x) in one recurrence pass.
RealVector hermite_function_table(int kmax, double x);

} // namespace tcgs
