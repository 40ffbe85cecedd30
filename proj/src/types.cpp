#include "tcgs/types.hpp"

#include <atomic>
#include <thread>

namespace tcgs {

double hermiticity_residual(const Matrix& a)
{
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

OperatorMatrix make_operator(Matrix entries, bool hermitian)
{
    if (entries.rows() != entries.cols()) {
        throw std::invalid_argument("OperatorMatrix: entries must be square");
    }
    if (hermitian && hermiticity_residual(entries) > 1e-12) {
        throw std::invalid_argument("OperatorMatrix: hermitian flag set on a non-Hermitian matrix");
    }
    OperatorMatrix op;
    op.dim = entries.rows();
    op.entries = std::move(entries);
    op.hermitian = hermitian;
    return op;
}

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector vectorize(const Matrix& x)
{
    return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvectorize(const Vector& v, Index dim)
{
    if (v.size() != dim * dim) {
        throw std::invalid_argument("unvectorize: size mismatch");
    }
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed)
{
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}


namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int threads)
{
    g_max_threads.store(threads < 0 ? 0 : threads);
}

int max_threads()
{
    const int cap = g_max_threads.load();
    if (cap > 0) return cap;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace tcgs
