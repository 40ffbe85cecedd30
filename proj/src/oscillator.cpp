#include "tcgs/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace tcgs {

int ModeIndex::total() const
{
    return std::accumulate(k.begin(), k.end(), 0);
}

double ModeIndex::energy(int d) const
{
    return 2.0 * total() + d;
}

int OneBodyBasis::find(const ModeIndex& mode) const
{
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] == mode) return static_cast<int>(i);
    }
    return -1;
}

int OneBodyBasis::max_occupation() const
{
    int kmax = 0;
    for (const auto& m : modes) {
        for (int kj : m.k) kmax = std::max(kmax, kj);
    }
    return kmax;
}

namespace {

// Multi-indices with |k| = s, in ascending lexicographic order.
void append_shell(int d, int s, std::vector<ModeIndex>& out)
{
    ModeIndex mode;
    mode.k.assign(d, 0);
    // Recursive descent over axes; the final axis absorbs the remainder.
    auto rec = [&](auto&& self, int axis, int remaining) -> void {
        if (axis == d - 1) {
            mode.k[axis] = remaining;
            out.push_back(mode);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            mode.k[axis] = v;
            self(self, axis + 1, remaining - v);
        }
    };
    rec(rec, 0, s);
}

} // namespace

OneBodyBasis enumerate_one_body_basis(int d, int M)
{
    if (d < 1 || d > 3) throw std::invalid_argument("enumerate_one_body_basis: d must be 1, 2 or 3");
    if (M < 1) throw std::invalid_argument("enumerate_one_body_basis: M >= 1 required");

    OneBodyBasis basis;
    basis.d = d;
    basis.M = M;
    for (int s = 0; static_cast<int>(basis.modes.size()) < M; ++s) {
        append_shell(d, s, basis.modes);
    }
    basis.modes.resize(M);
    basis.energies.reserve(M);
    for (const auto& m : basis.modes) basis.energies.push_back(m.energy(d));
    return basis;
}

ProductBasis product_basis(OneBodyBasis one_body, int n)
{
    if (n < 1) throw std::invalid_argument("product_basis: n >= 1 required");
    ProductBasis basis;
    basis.n = n;
    basis.one_body = std::move(one_body);
    basis.dim = 1;
    for (int i = 0; i < n; ++i) {
        basis.dim *= basis.one_body.M;
    }
    return basis;
}

int ProductBasis::mode_at(Index state, int particle) const
{
    Index stride = 1;
    for (int i = particle + 1; i < n; ++i) stride *= one_body.M;
    return static_cast<int>((state / stride) % one_body.M);
}

Index ProductBasis::replace_mode(Index state, int particle, int new_mode) const
{
    Index stride = 1;
    for (int i = particle + 1; i < n; ++i) stride *= one_body.M;
    const Index old = (state / stride) % one_body.M;
    return state + (new_mode - old) * stride;
}

double ProductBasis::free_energy_level(Index state) const
{
    double e = 0.0;
    for (int i = 0; i < n; ++i) e += one_body.energies[mode_at(state, i)];
    return e;
}

OperatorMatrix ladder_matrix(const ProductBasis& basis, int particle, int axis, LadderKind kind)
{
    if (particle < 0 || particle >= basis.n) {
        throw std::out_of_range("ladder_matrix: particle index out of range");
    }
    if (axis < 0 || axis >= basis.one_body.d) {
        throw std::out_of_range("ladder_matrix: axis index out of range");
    }

    // Lowering on one-body modes; every lowered retained mode is retained
    // since it has strictly smaller energy.
    Matrix lower = Matrix::Zero(basis.dim, basis.dim);
    for (Index s = 0; s < basis.dim; ++s) {
        const int m = basis.mode_at(s, particle);
        ModeIndex target = basis.one_body.modes[m];
        if (target.k[axis] == 0) continue;
        const double amp = std::sqrt(static_cast<double>(target.k[axis]));
        target.k[axis] -= 1;
        const int mt = basis.one_body.find(target);
        if (mt < 0) continue;
        lower(basis.replace_mode(s, particle, mt), s) = amp;
    }
    if (kind == LadderKind::raise) {
        return make_operator(lower.adjoint(), false);
    }
    return make_operator(std::move(lower), false);
}

double hermite_function(int k, double x)
{
    if (k < 0) throw std::invalid_argument("hermite_function: k >= 0 required");
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    for (int j = 0; j < k; ++j) {
        const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(j / (j + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

RealVector hermite_function_table(int kmax, double x)
{
    if (kmax < 0) throw std::invalid_argument("hermite_function_table: kmax >= 0 required");
    RealVector values(kmax + 1);
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    values(0) = cur;
    for (int j = 0; j < kmax; ++j) {
        const double next = x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(j / (j + 1.0)) * prev;
        prev = cur;
        cur = next;
        values(j + 1) = cur;
    }
    return values;
}

} // namespace tcgs
