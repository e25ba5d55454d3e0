#include "fluxfocus/brandt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/log.hpp"

namespace fluxfocus::brandt {
namespace {

using constants::pi;
constexpr double inv4pi = 1.0 / (4.0 * pi);

double corner_sum(double a, double b, double x, double y) {
    double s = 0;
    for (double p : {-1.0, 1.0})
        for (double q : {-1.0, 1.0}) {
            const double dx = a - p * x, dy = b - q * y;
            s += std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy));
        }
    return inv4pi * s;
}

// bracketing cell of v on a sorted axis: v in [c[k], c[k+1]]
std::size_t bracket(const std::vector<double>& c, double v) {
    auto it = std::upper_bound(c.begin(), c.end(), v);
    std::size_t k = static_cast<std::size_t>(std::distance(c.begin(), it));
    k = k == 0 ? 0 : k - 1;
    return std::min(k, c.size() - 2);
}

struct SourceShare {
    std::vector<std::size_t> points;
    std::vector<double> shares;
};

// corners of the cell containing p with nonzero bilinear weight
SourceShare source_cell(const Grid& g, const Vec2& p) {
    if (!(p.x() >= g.x.front() && p.x() <= g.x.back() && p.y() >= g.y.front() && p.y() <= g.y.back()))
        throw ConfigError("dipole lies outside the hull of grid points");
    const std::size_t i = bracket(g.x, p.x()), j = bracket(g.y, p.y());
    const double tx = (p.x() - g.x[i]) / (g.x[i + 1] - g.x[i]);
    const double ty = (p.y() - g.y[j]) / (g.y[j + 1] - g.y[j]);
    SourceShare s;
    const std::array<double, 2> wx{1.0 - tx, tx}, wy{1.0 - ty, ty};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double w = wx[a] * wy[b];
            if (w > 0.0) {
                s.points.push_back(g.index(i + a, j + b));
                s.shares.push_back(w);
            }
        }
    return s;
}

// applied field for a unit moment in units where lengths are scaled by ell:
// returns ell^3 * H_a / m
std::vector<double> scaled_source(const Grid& g, const Vec2& pd, double ell, FieldConvention conv,
                                  std::vector<std::string>* warnings) {
    const double pref = applied_prefactor(conv);
    const std::size_t N = g.size();
    std::vector<double> b(N, 0.0);
    const SourceShare cell = source_cell(g, pd);

    // points closer than this fraction of the local cell to the dipole are
    // treated as coincident: the sampled 1/r^3 would be meaningless there
    const double local = std::min(g.wx[g.ix(cell.points.front())], g.wy[g.iy(cell.points.front())]);
    const double coincide = 1e-3 * local;

    double sampled = 0.0;
    std::vector<char> skip(N, 0);
    for (std::size_t k : cell.points) {
        if ((g.point(k) - pd).norm() < coincide) {
            skip[k] = 1;
            if (warnings) {
                std::ostringstream os;
                os << "dipole coincides with grid point " << k << " (" << g.point(k).transpose()
                   << "); its sampled field is replaced by the flux-balance term";
                warnings->push_back(os.str());
            }
        }
    }
    for (std::size_t k = 0; k < N; ++k) {
        if (skip[k]) continue;
        const double r = (g.point(k) - pd).norm() / ell;
        b[k] = pref / (r * r * r);
        sampled += g.weights[k] / (ell * ell) * b[k];
    }
    // exact flux of the applied field over the grid square is -4 pi pref C(r_d)
    const double exact = -4.0 * pi * pref * exterior_kernel_integral(g, pd) * ell;
    const double deficit = exact - sampled;
    for (std::size_t n = 0; n < cell.points.size(); ++n) {
        const std::size_t k = cell.points[n];
        b[k] += cell.shares[n] * deficit / (g.weights[k] / (ell * ell));
    }
    return b;
}

// neighbour walk on the tensor grid: (di, dj) steps
constexpr std::array<std::array<int, 2>, 4> steps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

}  // namespace

double applied_prefactor(FieldConvention c) {
    return c == FieldConvention::Reference ? 1.0 / (2.0 * pi) : -1.0 / (4.0 * pi);
}

const char* to_string(FieldConvention c) { return c == FieldConvention::Reference ? "reference" : "physical"; }

double exterior_kernel_integral(const Grid& grid, const Vec2& p) {
    const double X = grid.half_extent;
    return corner_sum(X, X, p.x(), p.y());
}

FieldMap applied_field(const Dipole& dipole, const GridPtr& grid, FieldConvention convention) {
    if (!grid) throw ConfigError("applied field without grid");
    if (dipole.position.z() != 0.0) throw ConfigError("numeric engine needs the dipole in the film plane (z = 0)");
    const double m = dipole.moment.z();
    if (!(dipole.moment.norm() > 0.0)) throw ConfigError("dipole moment must be nonzero");
    std::vector<std::string> warnings;
    const Vec2 pd = dipole.position.head<2>();
    const double ell = grid->half_extent;
    auto b = scaled_source(*grid, pd, ell, convention, &warnings);
    for (auto& w : warnings) warn(w);
    const double s = m / (ell * ell * ell);
    for (double& v : b) v *= s;
    return FieldMap(grid, std::move(b), "H_a", "A/m");
}

Eigen::MatrixXd assemble_kernel(const Grid& g) {
    const std::size_t N = g.size();
    Eigen::MatrixXd K(N, N);
    const auto n = static_cast<std::ptrdiff_t>(N);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Vec2 pi_ = g.point(i);
        double off = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            const double r = (g.point(j) - pi_).norm();
            const double q = -inv4pi / (r * r * r) * g.weights[j];
            K(ii, static_cast<std::ptrdiff_t>(j)) = q;
            off += q;
        }
        K(ii, ii) = exterior_kernel_integral(g, pi_) - off;
    }
    return K;
}

Eigen::SparseMatrix<double> assemble_laplacian(const Grid& g) {
    const std::size_t nx = g.nx(), ny = g.ny();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * g.size());
    for (std::size_t i = 1; i + 1 < nx; ++i) {
        const double hm = g.x[i] - g.x[i - 1], hp = g.x[i + 1] - g.x[i];
        for (std::size_t j = 1; j + 1 < ny; ++j) {
            const double km = g.y[j] - g.y[j - 1], kp = g.y[j + 1] - g.y[j];
            const auto row = static_cast<int>(g.index(i, j));
            const double ax = 2.0 / (hm + hp), ay = 2.0 / (km + kp);
            t.emplace_back(row, static_cast<int>(g.index(i - 1, j)), ax / hm);
            t.emplace_back(row, static_cast<int>(g.index(i + 1, j)), ax / hp);
            t.emplace_back(row, static_cast<int>(g.index(i, j - 1)), ay / km);
            t.emplace_back(row, static_cast<int>(g.index(i, j + 1)), ay / kp);
            t.emplace_back(row, row, -ax / hm - ax / hp - ay / km - ay / kp);
        }
    }
    Eigen::SparseMatrix<double> L(static_cast<int>(g.size()), static_cast<int>(g.size()));
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

namespace {

// London operator times the cell weight, W L_Lambda, as face conductances.
// Calls f(i, j_neighbour_or_npos, conductance); the diagonal is the negative sum.
// Faces towards exterior points or the grid boundary see g = 0 there.
template <class F>
void london_faces(const Grid& g, const std::vector<double>& lam, const std::vector<char>& active, F&& f) {
    const std::size_t nx = g.nx(), ny = g.ny();
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t k = g.index(i, j);
            if (!active[k]) continue;
            for (const auto& s : steps) {
                const long ni = static_cast<long>(i) + s[0], nj = static_cast<long>(j) + s[1];
                const bool along_x = s[0] != 0;
                const double face = along_x ? g.wy[j] : g.wx[i];
                if (ni < 0 || nj < 0 || ni >= static_cast<long>(nx) || nj >= static_cast<long>(ny)) {
                    const double gap = along_x ? g.half_extent - std::abs(g.x[i]) : g.half_extent - std::abs(g.y[j]);
                    f(k, std::size_t(-1), lam[k] * face / gap);
                    continue;
                }
                const std::size_t nb = g.index(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj));
                const double h = along_x ? std::abs(g.x[static_cast<std::size_t>(ni)] - g.x[i])
                                         : std::abs(g.y[static_cast<std::size_t>(nj)] - g.y[j]);
                const double lf = active[nb] ? 2.0 * lam[k] * lam[nb] / (lam[k] + lam[nb]) : lam[k];
                f(k, active[nb] ? nb : std::size_t(-1), lf * face / h);
            }
        }
    }
}

std::vector<double> pearl_map(const Grid& g, double pearl, double factor) {
    std::vector<double> lam(g.size(), pearl);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.labels[k] == Region::Aperture) lam[k] = factor * pearl;
    return lam;
}

std::vector<char> active_mask(const Grid& g) {
    std::vector<char> a(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) a[k] = g.labels[k] != Region::Exterior;
    return a;
}

}  // namespace

SystemMatrix assemble_system(const Grid& g, const FilmSpec& film, double factor) {
    SystemMatrix s;
    s.matrix = assemble_kernel(g);
    s.pearl_lengths = pearl_map(g, film.pearl_length, factor);
    const auto active = active_mask(g);
    london_faces(g, s.pearl_lengths, active, [&](std::size_t k, std::size_t nb, double c) {
        const auto kk = static_cast<std::ptrdiff_t>(k);
        const double cw = c / g.weights[k];
        s.matrix(kk, kk) += cw;
        if (nb != std::size_t(-1)) s.matrix(kk, static_cast<std::ptrdiff_t>(nb)) -= cw;
    });
    return s;
}

std::vector<int> aperture_components(const Grid& g, int* count) {
    std::vector<int> label(g.size(), -1);
    int n = 0;
    for (std::size_t k0 = 0; k0 < g.size(); ++k0) {
        if (g.labels[k0] != Region::Aperture || label[k0] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(k0);
        label[k0] = n;
        while (!q.empty()) {
            const std::size_t k = q.front();
            q.pop();
            const long i = static_cast<long>(g.ix(k)), j = static_cast<long>(g.iy(k));
            for (const auto& s : steps) {
                const long ni = i + s[0], nj = j + s[1];
                if (ni < 0 || nj < 0 || ni >= static_cast<long>(g.nx()) || nj >= static_cast<long>(g.ny())) continue;
                const std::size_t nb = g.index(static_cast<std::size_t>(ni), static_cast<std::size_t>(nj));
                if (g.labels[nb] == Region::Aperture && label[nb] < 0) {
                    label[nb] = n;
                    q.push(nb);
                }
            }
        }
        ++n;
    }
    if (count) *count = n;
    return label;
}

struct StreamSystem::Impl {
    GridPtr grid;
    FilmSpec film;
    SolveOptions opts;
    double ell = 1;                     // length unit
    std::vector<std::size_t> act;       // active point -> grid index
    std::vector<std::ptrdiff_t> slot;   // grid index -> active slot or -1
    std::vector<double> lam;            // scaled Pearl length per point
    std::vector<double> diag;           // scaled kernel diagonal per active slot
    std::vector<double> wsc;            // scaled weights per grid point
    Eigen::VectorXd jacobi;             // D^{-1/2}
    Eigen::MatrixXd factor;
    std::optional<Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>>> llt;
    double rcond = 0;
    std::vector<std::string> warnings;
    std::vector<int> components;
    int ncomponents = 0;

    Vec2 scaled(std::size_t k) const { return grid->point(k) / ell; }

    // scaled London operator applied to scaled g, per grid point (film rows meaningful)
    std::vector<double> london(const std::vector<double>& gs) const {
        const Grid& g = *grid;
        std::vector<double> out(g.size(), 0.0);
        const auto active = active_mask(g);
        london_faces(g, lam, active, [&](std::size_t k, std::size_t nb, double c) {
            const double gn = nb == std::size_t(-1) ? 0.0 : gs[nb];
            out[k] += c * (gn - gs[k]);  // lam is already in units of ell
        });
        for (std::size_t k = 0; k < g.size(); ++k) out[k] /= wsc[k];
        return out;
    }

    // scaled H = b + (Q w) g
    std::vector<double> field(const std::vector<double>& gs, const std::vector<double>& b) const {
        const Grid& g = *grid;
        const std::size_t N = g.size();
        std::vector<double> h(N);
        const auto n = static_cast<std::ptrdiff_t>(N);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            const Vec2 p = scaled(i);
            double s = b[i];
            for (std::size_t j : act) {
                if (j == i) continue;
                const double r = (scaled(j) - p).norm();
                s -= inv4pi / (r * r * r) * wsc[j] * gs[j];
            }
            if (slot[i] >= 0) s += diag[static_cast<std::size_t>(slot[i])] * gs[i];
            h[i] = s;
        }
        return h;
    }

    std::vector<double> solve_scaled(const std::vector<double>& b) const {
        const auto n = static_cast<Eigen::Index>(act.size());
        Eigen::VectorXd rhs(n);
        for (Eigen::Index a = 0; a < n; ++a) {
            const std::size_t k = act[static_cast<std::size_t>(a)];
            rhs[a] = -wsc[k] * b[k] * jacobi[a];
        }
        const Eigen::VectorXd y = llt->solve(rhs);
        std::vector<double> gs(grid->size(), 0.0);
        for (Eigen::Index a = 0; a < n; ++a) gs[act[static_cast<std::size_t>(a)]] = jacobi[a] * y[a];
        return gs;
    }
};

StreamSystem::StreamSystem(const ApertureGeometry& geometry, const FilmSpec& film, GridPtr grid,
                           SolveOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (!grid) throw ConfigError("stream system without grid");
    validate(film, geometry);
    Impl& s = *impl_;
    s.grid = std::move(grid);
    s.film = film;
    s.opts = options;
    const Grid& g = *s.grid;
    if (std::abs(g.half_extent - film.grid_half_extent) > 1e-9 * film.grid_half_extent)
        throw ConfigError("grid extent does not match the film specification");
    s.ell = largest_dimension(geometry);
    const double ell = s.ell;
    const std::size_t N = g.size();

    const double hmin = std::min(g.min_spacing_x(), g.min_spacing_y());
    if (film.pearl_length < options.pearl_warning_ratio * hmin) {
        std::ostringstream os;
        os << "Pearl length " << film.pearl_length << " m is far below the finest grid spacing " << hmin
           << " m; the London term no longer regularises the system";
        s.warnings.push_back(os.str());
        warn(os.str());
    }

    s.wsc.resize(N);
    for (std::size_t k = 0; k < N; ++k) s.wsc[k] = g.weights[k] / (ell * ell);
    s.lam = pearl_map(g, film.pearl_length / ell, options.aperture_pearl_factor);
    s.slot.assign(N, -1);
    for (std::size_t k = 0; k < N; ++k)
        if (g.labels[k] != Region::Exterior) {
            s.slot[k] = static_cast<std::ptrdiff_t>(s.act.size());
            s.act.push_back(k);
        }
    if (s.act.empty()) throw ConfigError("grid has no film or aperture points");
    s.components = aperture_components(g, &s.ncomponents);

    const auto n = static_cast<std::ptrdiff_t>(s.act.size());
    s.diag.resize(s.act.size());
    s.factor.resize(n, n);
    Eigen::MatrixXd& A = s.factor;

    // A = W (Q w - L): symmetric positive definite on the active points
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < n; ++a) {
        const std::size_t i = s.act[static_cast<std::size_t>(a)];
        const Vec2 p = s.scaled(i);
        const double wi = s.wsc[i];
        double off_all = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            if (j == i) continue;
            const double r = (s.scaled(j) - p).norm();
            const double q = inv4pi / (r * r * r);
            off_all += q * s.wsc[j];
            if (s.slot[j] >= 0) A(a, s.slot[j]) = -wi * q * s.wsc[j];
        }
        const double C = exterior_kernel_integral(g, g.point(i)) * ell;
        s.diag[static_cast<std::size_t>(a)] = C + off_all;
        A(a, a) = wi * (C + off_all);
    }
    const auto active = active_mask(g);
    london_faces(g, s.lam, active, [&](std::size_t k, std::size_t nb, double c) {
        const std::ptrdiff_t a = s.slot[k];
        A(a, a) += c;
        if (nb != std::size_t(-1)) A(a, s.slot[nb]) -= c;
    });

    s.jacobi = A.diagonal().cwiseSqrt().cwiseInverse();
    A = s.jacobi.asDiagonal() * A * s.jacobi.asDiagonal();
    s.llt.emplace(A);
    if (s.llt->info() != Eigen::Success) {
        // rebuild is not possible after the in-place attempt; estimate from the failed factor
        std::ostringstream os;
        os << "system matrix is not positive definite (" << n << " unknowns)";
        throw SolverError(os.str(), 0.0);
    }
    s.rcond = s.llt->rcond();
    if (!(s.rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
        std::ostringstream os;
        os << "system matrix is numerically singular, reciprocal condition estimate " << s.rcond;
        throw SolverError(os.str(), s.rcond);
    }
}

StreamSystem::~StreamSystem() = default;
StreamSystem::StreamSystem(StreamSystem&&) noexcept = default;
StreamSystem& StreamSystem::operator=(StreamSystem&&) noexcept = default;

const GridPtr& StreamSystem::grid() const { return impl_->grid; }
double StreamSystem::reciprocal_condition() const { return impl_->rcond; }
std::size_t StreamSystem::unknowns() const { return impl_->act.size(); }
const std::vector<std::string>& StreamSystem::warnings() const { return impl_->warnings; }

StreamSolution StreamSystem::solve(const Dipole& dipole) const {
    const Impl& s = *impl_;
    const Grid& g = *s.grid;
    if (dipole.position.z() != 0.0) throw ConfigError("numeric engine needs the dipole in the film plane (z = 0)");
    if (!(dipole.moment.norm() > 0.0)) throw ConfigError("dipole moment must be nonzero");

    StreamSolution out;
    out.convention = s.opts.convention;
    out.warnings = s.warnings;
    const Vec2 pd = dipole.position.head<2>();
    if (g.labels[g.index(bracket(g.x, pd.x()), bracket(g.y, pd.y()))] == Region::Exterior)
        throw ConfigError("dipole lies outside the film region");
    if (dipole.moment.head<2>().norm() > 0.0)
        out.warnings.push_back("in-plane moment components are ignored by the numeric engine");

    std::vector<std::string> src_warn;
    const auto b = scaled_source(g, pd, s.ell, s.opts.convention, &src_warn);
    for (auto& w : src_warn) warn(w);
    out.warnings.insert(out.warnings.end(), src_warn.begin(), src_warn.end());

    const auto gs = s.solve_scaled(b);
    const auto hs = s.field(gs, b);
    const auto ls = s.london(gs);

    // scaled -> SI: H = (m / ell^3) h, g = (m / ell^2) gs
    const double m = dipole.moment.z();
    const double hscale = m / (s.ell * s.ell * s.ell), gscale = m / (s.ell * s.ell);
    std::vector<double> gv(gs.size()), hv(hs.size()), av(b.size());
    for (std::size_t k = 0; k < gs.size(); ++k) {
        gv[k] = gscale * gs[k];
        hv[k] = hscale * hs[k];
        av[k] = hscale * b[k];
    }

    double hmax = 0, res = 0;
    for (std::size_t k = 0; k < hs.size(); ++k) hmax = std::max(hmax, std::abs(hs[k]));
    for (std::size_t k = 0; k < hs.size(); ++k)
        if (g.labels[k] == Region::Film) res = std::max(res, std::abs(hs[k] - ls[k]));
    out.london_residual = hmax > 0 ? res / hmax : 0.0;

    std::vector<double> sum(static_cast<std::size_t>(s.ncomponents), 0.0), sq(sum.size(), 0.0), cnt(sum.size(), 0.0);
    for (std::size_t k = 0; k < gv.size(); ++k) {
        const int c = s.components[k];
        if (c < 0) continue;
        sum[static_cast<std::size_t>(c)] += gv[k];
        cnt[static_cast<std::size_t>(c)] += 1;
    }
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] /= cnt[c];
    for (std::size_t k = 0; k < gv.size(); ++k) {
        const int c = s.components[k];
        if (c < 0) continue;
        const double d = gv[k] - sum[static_cast<std::size_t>(c)];
        sq[static_cast<std::size_t>(c)] += d * d;
    }
    out.aperture_currents = sum;
    for (std::size_t c = 0; c < sum.size(); ++c) {
        const double sd = std::sqrt(sq[c] / cnt[c]);
        out.aperture_spread = std::max(out.aperture_spread, sum[c] != 0 ? sd / std::abs(sum[c]) : 0.0);
    }

    out.g = FieldMap(s.grid, std::move(gv), "g", "A");
    out.h_z = FieldMap(s.grid, std::move(hv), "H_z", "A/m");
    out.h_a = FieldMap(s.grid, std::move(av), "H_a", "A/m");
    return out;
}

FieldMap StreamSystem::solve_g(const FieldMap& h_a) const {
    const Impl& s = *impl_;
    if (h_a.grid != s.grid && (!h_a.grid || h_a.grid->size() != s.grid->size()))
        throw ConfigError("applied field is defined on a different grid");
    double scale = 0;
    for (double v : h_a.values) scale = std::max(scale, std::abs(v));
    std::vector<double> gv(s.grid->size(), 0.0);
    if (scale > 0) {
        std::vector<double> b(h_a.size());
        for (std::size_t k = 0; k < b.size(); ++k) b[k] = h_a.values[k] / scale;
        const auto gs = s.solve_scaled(b);
        for (std::size_t k = 0; k < gv.size(); ++k) gv[k] = gs[k] * scale * s.ell;
    }
    return FieldMap(s.grid, std::move(gv), "g", "A");
}

FieldMap StreamSystem::reconstruct(const FieldMap& g, const FieldMap& h_a) const {
    const Impl& s = *impl_;
    if (g.size() != s.grid->size() || h_a.size() != s.grid->size())
        throw ConfigError("field maps do not match the system grid");
    // H = H_a + (Q w) g; in scaled units (Q w) carries 1/ell
    std::vector<double> gs(g.size()), zero(g.size(), 0.0);
    for (std::size_t k = 0; k < gs.size(); ++k) gs[k] = g.values[k];
    auto h = s.field(gs, zero);
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = h_a.values[k] + h[k] / s.ell;
    return FieldMap(s.grid, std::move(h), "H_z", "A/m");
}

double StreamSystem::field_at(const StreamSolution& sol, const Dipole& dipole, const Vec2& p) const {
    const Impl& s = *impl_;
    const Grid& g = *s.grid;
    const double m = dipole.moment.z();
    const Vec2 pd = dipole.position.head<2>();
    const double rd = (p - pd).norm();
    if (rd == 0.0) throw SingularityError("probe at the dipole position");
    const double ha = applied_prefactor(sol.convention) * m / (rd * rd * rd);
    const double gp = interpolate(sol.g, p);
    // the subtraction runs over the whole grid square; exterior points carry g = 0
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double r = (g.point(j) - p).norm();
        if (r == 0.0) continue;
        sum -= inv4pi / (r * r * r) * g.weights[j] * (sol.g.values[j] - gp);
    }
    return ha + sum + gp * exterior_kernel_integral(g, p);
}

StreamSolution solve_stream(const Dipole& dipole, const ApertureGeometry& geometry, const FilmSpec& film,
                            const GridPtr& grid, SolveOptions options) {
    StreamSystem sys(geometry, film, grid, options);
    return sys.solve(dipole);
}

FieldMap reconstruct_field(const FieldMap& g, const FieldMap& h_a, const Eigen::MatrixXd& kernel) {
    const auto N = static_cast<Eigen::Index>(g.size());
    if (h_a.size() != g.size() || kernel.rows() != N || kernel.cols() != N)
        throw ConfigError("reconstruct_field: dimensions disagree");
    const Eigen::Map<const Eigen::VectorXd> gv(g.values.data(), N), av(h_a.values.data(), N);
    const Eigen::VectorXd h = av + kernel * gv;
    return FieldMap(g.grid, std::vector<double>(h.data(), h.data() + N), "H_z", "A/m");
}

double interpolate(const FieldMap& f, const Vec2& p) {
    const Grid& g = *f.grid;
    if (!(p.x() >= g.x.front() && p.x() <= g.x.back() && p.y() >= g.y.front() && p.y() <= g.y.back()))
        throw ConfigError("interpolation point outside the grid hull");
    const std::size_t i = bracket(g.x, p.x()), j = bracket(g.y, p.y());
    const double tx = (p.x() - g.x[i]) / (g.x[i + 1] - g.x[i]);
    const double ty = (p.y() - g.y[j]) / (g.y[j + 1] - g.y[j]);
    return (1 - tx) * (1 - ty) * f.values[g.index(i, j)] + tx * (1 - ty) * f.values[g.index(i + 1, j)] +
           (1 - tx) * ty * f.values[g.index(i, j + 1)] + tx * ty * f.values[g.index(i + 1, j + 1)];
}

double current_divergence_residual(const FieldMap& f) {
    const Grid& g = *f.grid;
    auto G = [&](std::size_t i, std::size_t j) { return f.values[g.index(i, j)]; };
    double dmax = 0, jmax = 0;
    for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
        const double hx = g.x[i + 1] - g.x[i];
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            const double hy = g.y[j + 1] - g.y[j];
            // J = (dg/dy, -dg/dx) on the cell edges
            const double jx0 = (G(i, j + 1) - G(i, j)) / hy, jx1 = (G(i + 1, j + 1) - G(i + 1, j)) / hy;
            const double jy0 = -(G(i + 1, j) - G(i, j)) / hx, jy1 = -(G(i + 1, j + 1) - G(i, j + 1)) / hx;
            const double div = (jx1 - jx0) / hx + (jy1 - jy0) / hy;
            const double h = std::min(hx, hy);
            dmax = std::max(dmax, std::abs(div) * h);
            jmax = std::max({jmax, std::abs(jx0), std::abs(jx1), std::abs(jy0), std::abs(jy1)});
        }
    }
    return jmax > 0 ? dmax / jmax : 0.0;
}

}  // namespace fluxfocus::brandt
