// coulomb.hpp — Two-body interaction matrix elements in the truncated
// oscillator basis, pair-coupling bookkeeping, and the n-body assembly.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcgs/oscillator.hpp"
#include "tcgs/types.hpp"

namespace tcgs {

/// -log|y| in d=1,2 (the 1d case is a reference kernel for small scans),
/// 1/|y| in d=3.
enum class KernelKind : std::uint8_t { log = 0, inverse = 1 };

struct TwoBodyKernel {
    int d{0};
    KernelKind kind{KernelKind::log};
};

TwoBodyKernel kernel_for_dimension(int d);

enum class SingularityMode : std::uint8_t { relative_coordinate_radial = 0, tensor_grid = 1 };

struct QuadratureSpec {
    int radial_nodes{200};
    int angular_nodes{64};
    int tensor_nodes{40};
    SingularityMode singularity_mode{SingularityMode::relative_coordinate_radial};
    double target_tol{1e-7};

    void validate() const;
    std::uint64_t fingerprint() const;
};

/// V[a,b,c,e] = <phi_a ⊗ phi_b | w_d(x-y) | phi_c ⊗ phi_e> over the first M
/// one-body modes. Real, with exact Hermiticity V[a,b,c,e] = V[c,e,a,b] and
/// exchange V[a,b,c,e] = V[b,a,e,c] by construction (elements depend only on
/// the unordered pair products).
struct InteractionTable {
    int d{0};
    KernelKind kind{KernelKind::log};
    int M{0};
    std::vector<double> values; // row-major [a][b][c][e]
    std::uint64_t checksum{0};
    std::uint64_t quad_fingerprint{0};
    double convergence_delta{0.0}; // observed shift under node refinement
    double max_asymmetry{0.0};     // residual of the symmetry invariants

    double value(int a, int b, int c, int e) const
    {
        return values[((static_cast<std::size_t>(a) * M + b) * M + c) * M + e];
    }
    /// The same matrix elements restricted to the first Mp modes (bases nest).
    InteractionTable restricted(int Mp) const;
    /// (ab) x (ce) reshape on the two-particle space.
    Matrix two_particle_matrix() const;
    void update_checksum();
};

/// Pair couplings alpha_{i,j} with the derived scalars of the free-energy
/// bounds: alpha_max, A_n (max row sum), B_n (total pair sum).
struct CouplingMatrix {
    int n{0};
    RealMatrix alpha; // symmetric, zero diagonal

    static CouplingMatrix zero(int n);
    static CouplingMatrix uniform(int n, double value);
    void set(int i, int j, double value);
    double get(int i, int j) const;
    CouplingMatrix scaled(double s) const;

    double alpha_max() const;
    double row_sum_max() const;  // A_n
    double pair_sum() const;     // B_n
};

InteractionTable two_body_matrix_elements(int d, int M, const QuadratureSpec& quad);

/// Hermitian Σ_{i<j} alpha_{ij} (V lifted to slots i,j) on the product basis.
OperatorMatrix assemble_interaction(const ProductBasis& basis, const InteractionTable& table,
                                    const CouplingMatrix& couplings);

void cache_table(const InteractionTable& table, const std::string& path);
InteractionTable load_table(const std::string& path);

/// Header fields of a cache file without loading the tensor.
struct CacheInfo {
    std::uint32_t format_version{0};
    int d{0};
    KernelKind kind{KernelKind::log};
    int M{0};
    std::uint64_t quad_fingerprint{0};
    std::uint64_t checksum{0};
    std::uint64_t payload_bytes{0};
};
CacheInfo inspect_table(const std::string& path);

} // namespace tcgs
