#include "tcgs/coulomb.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <thread>

#include "tcgs/quadrature.hpp"

namespace tcgs {

TwoBodyKernel kernel_for_dimension(int d)
{
    if (d == 3) return TwoBodyKernel{3, KernelKind::inverse};
    if (d == 2) return TwoBodyKernel{2, KernelKind::log};
    if (d == 1) return TwoBodyKernel{1, KernelKind::log};
    throw std::invalid_argument("kernel_for_dimension: d must be 1, 2 or 3");
}

void QuadratureSpec::validate() const
{
    if (radial_nodes < 8 || angular_nodes < 8 || tensor_nodes < 8) {
        throw schema_error("QuadratureSpec: node counts must be >= 8");
    }
    if (!(target_tol > 0.0) || target_tol > 1e-3) {
        throw schema_error("QuadratureSpec: target_tol must lie in (0, 1e-3]");
    }
}

std::uint64_t QuadratureSpec::fingerprint() const
{
    std::uint64_t h = fnv1a(&radial_nodes, sizeof(radial_nodes));
    h = fnv1a(&angular_nodes, sizeof(angular_nodes), h);
    h = fnv1a(&tensor_nodes, sizeof(tensor_nodes), h);
    const auto mode = static_cast<std::uint8_t>(singularity_mode);
    h = fnv1a(&mode, sizeof(mode), h);
    h = fnv1a(&target_tol, sizeof(target_tol), h);
    return h;
}

// ---------------------------------------------------------------------------
// CouplingMatrix

CouplingMatrix CouplingMatrix::zero(int n)
{
    if (n < 1) throw std::invalid_argument("CouplingMatrix: n >= 1 required");
    CouplingMatrix c;
    c.n = n;
    c.alpha = RealMatrix::Zero(n, n);
    return c;
}

CouplingMatrix CouplingMatrix::uniform(int n, double value)
{
    CouplingMatrix c = zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) c.alpha(i, j) = value;
        }
    }
    return c;
}

void CouplingMatrix::set(int i, int j, double value)
{
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) {
        throw std::invalid_argument("CouplingMatrix::set: need distinct indices in [0, n)");
    }
    alpha(i, j) = value;
    alpha(j, i) = value;
}

double CouplingMatrix::get(int i, int j) const { return alpha(i, j); }

CouplingMatrix CouplingMatrix::scaled(double s) const
{
    CouplingMatrix c = *this;
    c.alpha *= s;
    return c;
}

double CouplingMatrix::alpha_max() const
{
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(alpha(i, j)));
    }
    return m;
}

double CouplingMatrix::row_sum_max() const
{
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) row += std::abs(alpha(i, j));
        }
        m = std::max(m, row);
    }
    return m;
}

double CouplingMatrix::pair_sum() const
{
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) s += std::abs(alpha(i, j));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Matrix elements

namespace {

inline double kernel_value(KernelKind kind, double separation)
{
    if (kind == KernelKind::inverse) return 1.0 / separation;
    return -std::log(separation);
}

// Unordered pair index for p <= q: q(q+1)/2 + p.
inline int pair_index(int p, int q)
{
    if (p > q) std::swap(p, q);
    return q * (q + 1) / 2 + p;
}

struct AngularGrid {
    // Unit directions and weights such that sum w_p f(omega_p) integrates over
    // the sphere S^{d-1} (counting measure for d=1).
    std::vector<std::array<double, 3>> dirs;
    std::vector<double> weights;
};

// The integrand restricted to the sphere of radius rho is a polynomial of
// degree <= 4K in the direction, so the grids below are exact once they pass
// that degree; angular_nodes only raises them beyond the exactness floor.
AngularGrid make_angular_grid(int d, int max_occupation, int angular_nodes)
{
    const int degree = 4 * max_occupation;
    AngularGrid grid;
    if (d == 1) {
        grid.dirs = {{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}};
        grid.weights = {1.0, 1.0};
        return grid;
    }
    if (d == 2) {
        int nang = std::max(degree + 4, angular_nodes);
        nang += nang % 2; // even keeps the grid symmetric under omega -> -omega
        grid.dirs.reserve(nang);
        grid.weights.assign(nang, 2.0 * std::numbers::pi / nang);
        for (int p = 0; p < nang; ++p) {
            const double th = 2.0 * std::numbers::pi * p / nang;
            grid.dirs.push_back({std::cos(th), std::sin(th), 0.0});
        }
        return grid;
    }
    // d == 3: Gauss-Legendre in cos(theta) x uniform azimuth.
    const int nu = std::max(degree / 2 + 2, angular_nodes / 8);
    int nphi = std::max(degree + 4, angular_nodes / 4);
    nphi += nphi % 2;
    const Rule1D gl = gauss_legendre(nu);
    grid.dirs.reserve(static_cast<std::size_t>(nu) * nphi);
    grid.weights.reserve(static_cast<std::size_t>(nu) * nphi);
    for (int l = 0; l < nu; ++l) {
        const double u = gl.nodes(l);
        const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
        for (int p = 0; p < nphi; ++p) {
            const double phi = 2.0 * std::numbers::pi * p / nphi;
            grid.dirs.push_back({su * std::cos(phi), su * std::sin(phi), u});
            grid.weights.push_back(gl.weights(l) * 2.0 * std::numbers::pi / nphi);
        }
    }
    return grid;
}

struct PairCombos {
    // Mode pairs (a <= c) and the per-axis occupation-pair indices.
    int n_mode_pairs{0};
    std::vector<std::array<int, 3>> axis_pairs; // [mode pair] -> 1d pair index per axis
};

PairCombos make_pair_combos(const OneBodyBasis& basis)
{
    PairCombos pc;
    const int M = basis.M;
    pc.n_mode_pairs = M * (M + 1) / 2;
    pc.axis_pairs.resize(pc.n_mode_pairs);
    for (int c = 0; c < M; ++c) {
        for (int a = 0; a <= c; ++a) {
            std::array<int, 3> ap{0, 0, 0};
            for (int j = 0; j < basis.d; ++j) {
                ap[j] = pair_index(basis.modes[a].k[j], basis.modes[c].k[j]);
            }
            pc.axis_pairs[pair_index(a, c)] = ap;
        }
    }
    return pc;
}

// Sum over quadrature points of
//   w_point * prod_j g_j(pairA_j, pairB_j),
// where g_j is the 1d cross-correlation of occupation-pair products at the
// per-axis relative coordinate of the point. Returns the symmetric matrix
// U[mode pair A][mode pair B]; the four-index tensor is U mirrored.
RealMatrix relative_radial_pass(const OneBodyBasis& basis, KernelKind kind,
                                const QuadratureSpec& quad, int radial_scale)
{
    const int d = basis.d;
    const int K = basis.max_occupation();
    const int npair1 = (K + 1) * (K + 2) / 2;
    const PairCombos combos = make_pair_combos(basis);
    const int npairs = combos.n_mode_pairs;

    const double rmax = std::numbers::sqrt2 * (std::sqrt(2.0 * K + 1.0) + 3.0);
    // The log kernel is bare at rho=0 for d=1 (no rho^{d-1} factor), so the
    // dyadic grading has to reach much deeper there.
    const int dyadic_levels = (d == 1) ? 34 : 16;
    const std::vector<double> bks = radial_breakpoints(rmax, dyadic_levels, 0.6);
    const int npanels = static_cast<int>(bks.size()) - 1;
    const int per_panel =
        std::clamp(radial_scale * quad.radial_nodes / npanels, 8 * radial_scale, 32 * radial_scale);
    const Rule1D radial = panel_rule(bks, per_panel);

    const AngularGrid angular = make_angular_grid(d, K, radial_scale * quad.angular_nodes);

    const int ngh = 2 * K + 8; // exact beyond the 4K cross-correlation degree
    const Rule1D gh = gauss_hermite_unweighted(ngh);

    const Index nrad = radial.nodes.size();

    // Work is chunked over radial nodes; partial sums are merged in node
    // order so the result does not depend on the thread count.
    const int nodes_per_chunk = 16;
    const int nchunks = static_cast<int>((nrad + nodes_per_chunk - 1) / nodes_per_chunk);
    std::vector<RealMatrix> partial(nchunks);

    auto hermite_column = [K](double x, double* out) {
        double prev = 0.0;
        double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
        out[0] = cur;
        for (int j = 0; j < K; ++j) {
            const double next =
                x * std::sqrt(2.0 / (j + 1)) * cur - std::sqrt(j / (j + 1.0)) * prev;
            prev = cur;
            cur = next;
            out[j + 1] = cur;
        }
    };

    auto run_chunk = [&](int chunk) {
        RealMatrix acc = RealMatrix::Zero(npairs, npairs);
        RealMatrix prodA(npair1, ngh), prodB(npair1, ngh);
        std::array<RealMatrix, 3> g;
        std::vector<double> ha(K + 1), hb(K + 1);
        const Index q0 = static_cast<Index>(chunk) * nodes_per_chunk;
        const Index q1 = std::min<Index>(q0 + nodes_per_chunk, nrad);
        for (Index q = q0; q < q1; ++q) {
            const double rho = radial.nodes(q);
            const double wker = radial.weights(q) * std::pow(rho, d - 1) *
                                kernel_value(kind, std::numbers::sqrt2 * rho);
            for (std::size_t p = 0; p < angular.dirs.size(); ++p) {
                const double wpt = wker * angular.weights[p];
                for (int j = 0; j < d; ++j) {
                    const double t = rho * angular.dirs[p][j];
                    for (int i = 0; i < ngh; ++i) {
                        const double w = gh.weights(i);
                        hermite_column((gh.nodes(i) + t) / std::numbers::sqrt2, ha.data());
                        hermite_column((gh.nodes(i) - t) / std::numbers::sqrt2, hb.data());
                        for (int v = 0; v <= K; ++v) {
                            for (int u = 0; u <= v; ++u) {
                                const int pi = pair_index(u, v);
                                prodA(pi, i) = w * ha[u] * ha[v];
                                prodB(pi, i) = hb[u] * hb[v];
                            }
                        }
                    }
                    g[j].noalias() = prodA * prodB.transpose();
                }
                for (int pb = 0; pb < npairs; ++pb) {
                    const auto& bj = combos.axis_pairs[pb];
                    for (int pa = 0; pa <= pb; ++pa) {
                        const auto& aj = combos.axis_pairs[pa];
                        double val = g[0](aj[0], bj[0]);
                        for (int j = 1; j < d; ++j) val *= g[j](aj[j], bj[j]);
                        acc(pa, pb) += wpt * val;
                    }
                }
            }
        }
        partial[chunk] = std::move(acc);
    };

    const int nthreads = std::max(1, std::min(max_threads(), nchunks));
    if (nthreads == 1) {
        for (int c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&] {
                for (int c = next.fetch_add(1); c < nchunks; c = next.fetch_add(1)) run_chunk(c);
            });
        }
        for (auto& th : pool) th.join();
    }

    RealMatrix upper = RealMatrix::Zero(npairs, npairs);
    for (int c = 0; c < nchunks; ++c) upper += partial[c];
    RealMatrix full = upper.selfadjointView<Eigen::Upper>();
    return full;
}

RealMatrix tensor_grid_pass(const OneBodyBasis& basis, KernelKind kind, const QuadratureSpec& quad)
{
    const int d = basis.d;
    const int M = basis.M;
    const int K = basis.max_occupation();
    const PairCombos combos = make_pair_combos(basis);
    const int npairs = combos.n_mode_pairs;

    const int nx = quad.tensor_nodes + (quad.tensor_nodes % 2);
    const int ny = nx + 2; // distinct even orders, so x != y at every node pair
    const double joint = std::pow(static_cast<double>(nx) * ny, d);
    if (joint * npairs * npairs > 4e10) {
        throw guard_error("two_body_matrix_elements: tensor grid too large for M and node count");
    }
    const Rule1D ghx = gauss_hermite_unweighted(nx);
    const Rule1D ghy = gauss_hermite_unweighted(ny);

    // Per-axis occupation-pair products at the grid nodes.
    const int npair1 = (K + 1) * (K + 2) / 2;
    RealMatrix px(npair1, nx), py(npair1, ny);
    for (int i = 0; i < nx; ++i) {
        const RealVector h = hermite_function_table(K, ghx.nodes(i));
        for (int v = 0; v <= K; ++v)
            for (int u = 0; u <= v; ++u) px(pair_index(u, v), i) = h(u) * h(v);
    }
    for (int i = 0; i < ny; ++i) {
        const RealVector h = hermite_function_table(K, ghy.nodes(i));
        for (int v = 0; v <= K; ++v)
            for (int u = 0; u <= v; ++u) py(pair_index(u, v), i) = h(u) * h(v);
    }

    RealMatrix upper = RealMatrix::Zero(npairs, npairs);
    std::vector<int> ix(d, 0), iy(d, 0);
    const auto advance = [](std::vector<int>& idx, int base) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (++idx[j] < base) return true;
            idx[j] = 0;
        }
        return false;
    };
    do {
        double wx = 1.0;
        for (int j = 0; j < d; ++j) wx *= ghx.weights(ix[j]);
        std::fill(iy.begin(), iy.end(), 0);
        do {
            double wy = 1.0, dist2 = 0.0;
            for (int j = 0; j < d; ++j) {
                wy *= ghy.weights(iy[j]);
                const double dj = ghx.nodes(ix[j]) - ghy.nodes(iy[j]);
                dist2 += dj * dj;
            }
            const double w = wx * wy * kernel_value(kind, std::sqrt(dist2));
            for (int pb = 0; pb < npairs; ++pb) {
                const auto& bj = combos.axis_pairs[pb];
                double fy = py(bj[0], iy[0]);
                for (int j = 1; j < d; ++j) fy *= py(bj[j], iy[j]);
                const double wfy = w * fy;
                for (int pa = 0; pa <= pb; ++pa) {
                    const auto& aj = combos.axis_pairs[pa];
                    double fx = px(aj[0], ix[0]);
                    for (int j = 1; j < d; ++j) fx *= px(aj[j], ix[j]);
                    upper(pa, pb) += wfy * fx;
                }
            }
        } while (advance(iy, ny));
    } while (advance(ix, nx));

    // The x/y grids are not symmetric under exchange, so symmetrize here and
    // keep the residual as the asymmetry metric (stored by the caller).
    RealMatrix full = upper.selfadjointView<Eigen::Upper>();
    (void)M;
    return full;
}

InteractionTable table_from_pair_matrix(const OneBodyBasis& basis, KernelKind kind,
                                        const QuadratureSpec& quad, const RealMatrix& u)
{
    InteractionTable table;
    table.d = basis.d;
    table.kind = kind;
    table.M = basis.M;
    table.quad_fingerprint = quad.fingerprint();
    const int M = basis.M;
    table.values.assign(static_cast<std::size_t>(M) * M * M * M, 0.0);
    for (int a = 0; a < M; ++a) {
        for (int b = 0; b < M; ++b) {
            for (int c = 0; c < M; ++c) {
                for (int e = 0; e < M; ++e) {
                    table.values[((static_cast<std::size_t>(a) * M + b) * M + c) * M + e] =
                        u(pair_index(a, c), pair_index(b, e));
                }
            }
        }
    }
    table.update_checksum();
    return table;
}

} // namespace

InteractionTable two_body_matrix_elements(int d, int M, const QuadratureSpec& quad)
{
    quad.validate();
    if (d < 1 || d > 3) throw std::invalid_argument("two_body_matrix_elements: d must be 1, 2 or 3");
    if (M < 1 || M > 64) {
        throw guard_error("two_body_matrix_elements: M must lie in [1, 64] (M^4 tensor guard)");
    }
    const OneBodyBasis basis = enumerate_one_body_basis(d, M);
    const KernelKind kind = kernel_for_dimension(d).kind;

    if (quad.singularity_mode == SingularityMode::tensor_grid) {
        const RealMatrix u = tensor_grid_pass(basis, kind, quad);
        InteractionTable table = table_from_pair_matrix(basis, kind, quad, u);
        table.convergence_delta = 0.0; // cross-validation mode, no refinement pass
        return table;
    }

    const RealMatrix coarse = relative_radial_pass(basis, kind, quad, 1);
    const RealMatrix fine = relative_radial_pass(basis, kind, quad, 2);
    const double scale = fine.cwiseAbs().maxCoeff();
    const double delta = (coarse - fine).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
    if (delta > quad.target_tol) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "two_body_matrix_elements: node refinement moved entries by %.3e "
                      "(target %.3e)",
                      delta, quad.target_tol);
        throw quality_error(msg, delta);
    }
    InteractionTable table = table_from_pair_matrix(basis, kind, quad, fine);
    table.convergence_delta = delta;
    return table;
}

InteractionTable InteractionTable::restricted(int Mp) const
{
    if (Mp < 1 || Mp > M) throw std::invalid_argument("InteractionTable::restricted: need 1 <= Mp <= M");
    InteractionTable out;
    out.d = d;
    out.kind = kind;
    out.M = Mp;
    out.quad_fingerprint = quad_fingerprint;
    out.convergence_delta = convergence_delta;
    out.max_asymmetry = max_asymmetry;
    out.values.resize(static_cast<std::size_t>(Mp) * Mp * Mp * Mp);
    for (int a = 0; a < Mp; ++a)
        for (int b = 0; b < Mp; ++b)
            for (int c = 0; c < Mp; ++c)
                for (int e = 0; e < Mp; ++e)
                    out.values[((static_cast<std::size_t>(a) * Mp + b) * Mp + c) * Mp + e] =
                        value(a, b, c, e);
    out.update_checksum();
    return out;
}

Matrix InteractionTable::two_particle_matrix() const
{
    Matrix out(static_cast<Index>(M) * M, static_cast<Index>(M) * M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
            for (int c = 0; c < M; ++c)
                for (int e = 0; e < M; ++e)
                    out(static_cast<Index>(a) * M + b, static_cast<Index>(c) * M + e) =
                        value(a, b, c, e);
    return out;
}

void InteractionTable::update_checksum()
{
    checksum = fnv1a(values.data(), values.size() * sizeof(double));
}

OperatorMatrix assemble_interaction(const ProductBasis& basis, const InteractionTable& table,
                                    const CouplingMatrix& couplings)
{
    if (table.M != basis.one_body.M) {
        throw std::invalid_argument("assemble_interaction: table.M must match the basis");
    }
    if (table.d != basis.one_body.d) {
        throw std::invalid_argument("assemble_interaction: table dimension must match the basis");
    }
    if (couplings.n != basis.n) {
        throw std::invalid_argument("assemble_interaction: couplings.n must match the basis");
    }
    const int M = table.M;
    Matrix w = Matrix::Zero(basis.dim, basis.dim);
    for (int i = 0; i < basis.n; ++i) {
        for (int j = i + 1; j < basis.n; ++j) {
            const double alpha = couplings.get(i, j);
            if (alpha == 0.0) continue;
            for (Index s = 0; s < basis.dim; ++s) {
                const int c = basis.mode_at(s, i);
                const int e = basis.mode_at(s, j);
                for (int a = 0; a < M; ++a) {
                    const Index si = basis.replace_mode(s, i, a);
                    for (int b = 0; b < M; ++b) {
                        const Index r = basis.replace_mode(si, j, b);
                        w(r, s) += alpha * table.value(a, b, c, e);
                    }
                }
            }
        }
    }
    return make_operator(std::move(w), true);
}

// ---------------------------------------------------------------------------
// Cache IO: little-endian header + row-major float64 tensor.

namespace {

constexpr char kMagic[8] = {'T', 'C', 'G', 'S', 'V', 'T', 'B', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p)
{
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint64_t get_u64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 4 + 4 + 8 + 8 + 8;

std::string header_bytes(const InteractionTable& table, std::uint64_t payload_bytes)
{
    std::string h;
    h.append(kMagic, sizeof(kMagic));
    put_u32(h, kFormatVersion);
    put_u32(h, static_cast<std::uint32_t>(table.d));
    put_u32(h, static_cast<std::uint32_t>(table.kind));
    put_u32(h, static_cast<std::uint32_t>(table.M));
    put_u64(h, table.quad_fingerprint);
    put_u64(h, payload_bytes);
    put_u64(h, table.checksum);
    return h;
}

} // namespace

void cache_table(const InteractionTable& table, const std::string& path)
{
    std::string payload;
    payload.reserve(table.values.size() * 8);
    for (double v : table.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        put_u64(payload, bits);
    }
    const std::uint64_t checksum = fnv1a(payload.data(), payload.size());
    InteractionTable stamped = table;
    stamped.checksum = checksum;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cache_table: cannot open " + path);
    const std::string header = header_bytes(stamped, payload.size());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("cache_table: write failed for " + path);
}

CacheInfo inspect_table(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("inspect_table: cannot open " + path);
    unsigned char header[kHeaderBytes];
    in.read(reinterpret_cast<char*>(header), kHeaderBytes);
    if (!in) throw schema_error("inspect_table: truncated header in " + path);
    if (std::memcmp(header, kMagic, sizeof(kMagic)) != 0) {
        throw schema_error("inspect_table: bad magic in " + path);
    }
    CacheInfo info;
    info.format_version = get_u32(header + 8);
    info.d = static_cast<int>(get_u32(header + 12));
    info.kind = static_cast<KernelKind>(get_u32(header + 16));
    info.M = static_cast<int>(get_u32(header + 20));
    info.quad_fingerprint = get_u64(header + 24);
    info.payload_bytes = get_u64(header + 32);
    info.checksum = get_u64(header + 40);
    if (info.format_version != kFormatVersion) {
        throw schema_error("inspect_table: unsupported format version in " + path);
    }
    return info;
}

InteractionTable load_table(const std::string& path)
{
    const CacheInfo info = inspect_table(path);
    std::ifstream in(path, std::ios::binary);
    in.seekg(kHeaderBytes);
    std::string payload(info.payload_bytes, '\0');
    in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!in) throw schema_error("load_table: truncated payload in " + path);
    const std::uint64_t checksum = fnv1a(payload.data(), payload.size());
    if (checksum != info.checksum) {
        throw quality_error("load_table: checksum mismatch in " + path,
                            static_cast<double>(checksum ^ info.checksum));
    }
    const std::size_t count = info.payload_bytes / 8;
    const std::size_t m4 = static_cast<std::size_t>(info.M) * info.M * info.M * info.M;
    if (count != m4) throw schema_error("load_table: payload size does not match M in " + path);

    InteractionTable table;
    table.d = info.d;
    table.kind = info.kind;
    table.M = info.M;
    table.quad_fingerprint = info.quad_fingerprint;
    table.checksum = info.checksum;
    table.values.resize(count);
    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_u64(p + 8 * i);
        std::memcpy(&table.values[i], &bits, sizeof(double));
    }
    return table;
}

} // namespace tcgs
