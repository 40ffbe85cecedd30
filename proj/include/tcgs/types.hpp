// types.hpp — Dense operator carrier, vectorization helpers, error categories

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tcgs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense operator on a finite basis. The hermitian flag is only set by
/// constructors that have checked max|A - A†| <= 1e-12 * max|A|.
struct OperatorMatrix {
    Index dim{0};
    Matrix entries;
    bool hermitian{false};
};

/// max|A - A†| / max|A|; zero matrix reports 0.
double hermiticity_residual(const Matrix& a);

/// Builds an OperatorMatrix, validating the hermitian flag against the entries.
OperatorMatrix make_operator(Matrix entries, bool hermitian);

Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major vectorization, vec(A X B) = (B^T ⊗ A) vec(X).
Vector vectorize(const Matrix& x);
Matrix unvectorize(const Vector& v, Index dim);

// Error categories map onto CLI exit codes: schema 2, guard 3, quality 4.
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct quality_error : std::runtime_error {
    quality_error(const std::string& what, double delta)
        : std::runtime_error(what), observed_delta(delta) {}
    double observed_delta{0.0};
};

/// FNV-1a over a byte range; used for cache checksums and provenance tags.
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Process-wide cap on worker threads for data-parallel sections (0 = use
/// hardware concurrency). Results never depend on the cap: partial results
/// are merged in a fixed order.
void set_max_threads(int threads);
int max_threads();

} // namespace tcgs
