#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "fluxfocus/brandt.hpp"
#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/log.hpp"

using namespace fluxfocus;
using namespace fluxfocus::brandt;
using constants::pi;

namespace {

struct Setup {
    ApertureGeometry geometry;
    FilmSpec film;
    GridPtr grid;
};

Setup circle_setup(int n, double london = 50e-9, double R = 1000e-9, std::vector<double> kx = {},
                   std::vector<double> ky = {}) {
    Setup s{Circle{R}, {}, {}};
    s.film = FilmSpec::for_geometry(s.geometry, london, 80e-9);
    GridSpec spec;
    spec.nx = spec.ny = n;
    spec.edge_spacing_x = spec.edge_spacing_y = 25e-9;
    spec.extra_knots_x = std::move(kx);
    spec.extra_knots_y = std::move(ky);
    s.grid = make_grid(s.geometry, s.film, spec);
    return s;
}

// collects warnings for the lifetime of the object
struct WarningCapture {
    std::vector<std::string> seen;
    WarningCapture() {
        set_warning_sink([this](const std::string& w) { seen.push_back(w); });
    }
    ~WarningCapture() { set_warning_sink(nullptr); }
};

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_SUITE("brandt") {

TEST_CASE("conventions differ by a factor -2") {
    CHECK(applied_prefactor(FieldConvention::Reference) == doctest::Approx(1 / (2 * pi)));
    CHECK(applied_prefactor(FieldConvention::Physical) == doctest::Approx(-1 / (4 * pi)));
    CHECK(applied_prefactor(FieldConvention::Reference) / applied_prefactor(FieldConvention::Physical) == -2.0);
}

TEST_CASE("applied field: sampled values and exact total flux") {
    auto s = circle_setup(30, 50e-9, 1000e-9, {0.0}, {0.0});
    const double m = 1e-23;
    // dipole between grid points so no point coincides
    const Dipole d = Dipole::in_plane(Vec2(-311e-9, 7e-9), m);
    const auto ha = applied_field(d, s.grid, FieldConvention::Physical);
    const Grid& g = *s.grid;
    double flux = 0;
    std::size_t checked = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        flux += g.weights[k] * ha[k];
        const double r = (g.point(k) - d.position.head<2>()).norm();
        if (r > 3 * std::max(g.wx[g.ix(k)], g.wy[g.iy(k)])) {
            CHECK(ha[k] == doctest::Approx(-m / (4 * pi * r * r * r)).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked > g.size() / 4);
    // oracle for the flux of -m/(4 pi r^3) over the square: minus the flux outside it
    const double outside = exterior_kernel_integral(g, d.position.head<2>());
    CHECK(flux == doctest::Approx(m * outside).epsilon(1e-10));
}

TEST_CASE("applied field scales as 1/r^3 and is mirror symmetric") {
    auto s = circle_setup(24);
    const auto ha = applied_field(Dipole::in_plane(Vec2(0, 0), 1.0), s.grid, FieldConvention::Reference);
    const Grid& g = *s.grid;
    for (std::size_t i = 0; i < g.nx(); ++i)
        for (std::size_t j = 0; j < g.ny(); ++j) {
            const double a = ha[g.index(i, j)];
            CHECK(a == doctest::Approx(ha[g.index(g.nx() - 1 - i, j)]).epsilon(1e-12));
            CHECK(a == doctest::Approx(ha[g.index(i, g.ny() - 1 - j)]).epsilon(1e-12));
        }
    // along a grid row away from the source cell the field falls as 1/r^3
    const std::size_t j0 = g.ny() / 2;
    for (std::size_t i = g.nx() / 2 + 3; i < g.nx(); ++i)
        for (std::size_t i2 = i + 1; i2 < g.nx(); ++i2) {
            const double r = std::hypot(g.x[i], g.y[j0]), r2 = std::hypot(g.x[i2], g.y[j0]);
            const double expect = std::pow(r / r2, 3);
            CHECK(ha[g.index(i2, j0)] / ha[g.index(i, j0)] == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("applied field warns when the dipole sits on a grid point") {
    auto s = circle_setup(25);  // odd: x = 0 and y = 0 are grid points
    WarningCapture w;
    const auto ha = applied_field(Dipole::in_plane(Vec2(0, 0)), s.grid);
    REQUIRE(w.seen.size() == 1);
    CHECK(w.seen[0].find("coincides") != std::string::npos);
    for (double v : ha.values) CHECK(std::isfinite(v));
}

TEST_CASE("kernel: symmetry of Q, sum rule and far field") {
    auto s = circle_setup(20);
    const Grid& g = *s.grid;
    const Eigen::MatrixXd K = assemble_kernel(g);
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        // the diagonal cancels the off-diagonal sum, so compare on the scale of the row
        const double row_scale = K.row(i).cwiseAbs().sum();
        CHECK(std::abs(K.row(i).sum() - exterior_kernel_integral(g, g.point(ui))) < 1e-12 * row_scale);
        for (Eigen::Index j = i + 1; j < K.cols(); j += 37) {
            const auto uj = static_cast<std::size_t>(j);
            // Q_ij = K_ij / w_j is symmetric and equals -1/(4 pi r^3)
            const double qij = K(i, j) / g.weights[uj], qji = K(j, i) / g.weights[ui];
            CHECK(qij == doctest::Approx(qji).epsilon(1e-12));
            const double r = (g.point(ui) - g.point(uj)).norm();
            CHECK(qij == doctest::Approx(-1 / (4 * pi * r * r * r)).epsilon(1e-12));
        }
    }
}

TEST_CASE("exterior kernel integral: closed form against a far-field patch sum") {
    auto s = circle_setup(20);
    const Grid& g = *s.grid;
    const double X = g.half_extent;
    // (1/4pi) * integral over |x| > X or |y| > X of 1/r^3, here by quadrature on a
    // large annulus of squares: inside [-L, L]^2 minus the grid square, plus 1/(2L) tail bound
    const Vec2 p(0.3 * X, -0.1 * X);
    const double L = 40 * X;
    const int n = 1600;
    const double h = 2 * L / n;
    double acc = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -L + (i + 0.5) * h, y = -L + (j + 0.5) * h;
            if (std::abs(x) < X && std::abs(y) < X) continue;
            const double r = std::hypot(x - p.x(), y - p.y());
            acc += h * h / (r * r * r);
        }
    acc /= 4 * pi;
    // tail outside [-L, L]^2 is bounded by the disc estimate 1/(2 L) * (1 / (1 - |p|/L))
    const double tail = 1.0 / (2 * L);
    const double exact = exterior_kernel_integral(g, p);
    CHECK(exact > acc);
    CHECK(exact == doctest::Approx(acc + tail).epsilon(2e-2));
}

TEST_CASE("laplacian: exact on quadratics, first order on cubics") {
    auto s = circle_setup(20);
    const Grid& g = *s.grid;
    const Eigen::SparseMatrix<double, Eigen::RowMajor> lap = assemble_laplacian(g);
    const Eigen::VectorXd row_scale = Eigen::SparseMatrix<double, Eigen::RowMajor>(lap.cwiseAbs()) *
                                      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
    Eigen::VectorXd c(g.size()), q(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        c[static_cast<Eigen::Index>(k)] = 3.0;
        const Vec2 p = g.point(k);
        q[static_cast<Eigen::Index>(k)] = p.squaredNorm();
    }
    const Eigen::VectorXd lc = lap * c, lq = lap * q;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto i = g.ix(k), j = g.iy(k);
        const bool boundary = i == 0 || j == 0 || i + 1 == g.nx() || j + 1 == g.ny();
        if (boundary) {
            CHECK(lap.innerVector(static_cast<Eigen::Index>(k)).nonZeros() == 0);
            continue;
        }
        CHECK(std::abs(lc[static_cast<Eigen::Index>(k)]) < 1e-14 * 3.0 * row_scale[static_cast<Eigen::Index>(k)]);
        CHECK(lq[static_cast<Eigen::Index>(k)] == doctest::Approx(4.0).epsilon(1e-6));
    }
}

TEST_CASE("laplacian of a cubic: error shrinks with refinement") {
    double prev = 1e300;
    for (int n : {20, 40, 80}) {
        auto s = circle_setup(n);
        const Grid& g = *s.grid;
        const double X = g.half_extent;
        const auto lap = assemble_laplacian(g);
        Eigen::VectorXd f(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) f[static_cast<Eigen::Index>(k)] = std::pow(g.point(k).x() / X, 3);
        const Eigen::VectorXd lf = lap * f;
        double err = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const auto i = g.ix(k), j = g.iy(k);
            if (i == 0 || j == 0 || i + 1 == g.nx() || j + 1 == g.ny()) continue;
            err = std::max(err, std::abs(lf[static_cast<Eigen::Index>(k)] - 6 * g.point(k).x() / (X * X * X)) * X * X);
        }
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("system matrix rows outside the film are inert") {
    auto s = circle_setup(20);
    const auto sm = assemble_system(*s.grid, s.film);
    const Grid& g = *s.grid;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.labels[k] == Region::Aperture) CHECK(sm.pearl_lengths[k] == doctest::Approx(1e6 * s.film.pearl_length));
        if (g.labels[k] == Region::Film) CHECK(sm.pearl_lengths[k] == s.film.pearl_length);
    }
}

TEST_CASE("stream solution: structure, residuals and symmetry") {
    auto s = circle_setup(32, 50e-9, 1000e-9, {0.0}, {0.0});
    StreamSystem sys(s.geometry, s.film, s.grid, {FieldConvention::Physical});
    CHECK(sys.reciprocal_condition() > 1e-12);
    const Dipole d = Dipole::in_plane(Vec2(0, 0));
    const auto sol = sys.solve(d);
    const Grid& g = *s.grid;
    const double gmax = max_abs(sol.g.values);
    REQUIRE(gmax > 0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.labels[k] == Region::Exterior) CHECK(sol.g[k] == 0.0);
        const std::size_t mx = g.index(g.nx() - 1 - g.ix(k), g.iy(k));
        const std::size_t my = g.index(g.ix(k), g.ny() - 1 - g.iy(k));
        CHECK(std::abs(sol.g[k] - sol.g[mx]) < 1e-9 * gmax);
        CHECK(std::abs(sol.g[k] - sol.g[my]) < 1e-9 * gmax);
    }
    REQUIRE(sol.aperture_currents.size() == 1);
    CHECK(sol.aperture_spread < 0.05);
    CHECK(sol.london_residual < 1e-6);
    CHECK(current_divergence_residual(sol.g) < 1e-9);
}

TEST_CASE("stream solution: linearity and convention scaling") {
    auto s = circle_setup(24, 50e-9, 1000e-9, {-400e-9}, {0.0});
    StreamSystem ref(s.geometry, s.film, s.grid, {FieldConvention::Reference});
    StreamSystem phys(s.geometry, s.film, s.grid, {FieldConvention::Physical});
    const Vec2 xy(-400e-9, 0);
    const auto a = ref.solve(Dipole::in_plane(xy, 1e-23));
    const auto b = ref.solve(Dipole::in_plane(xy, 3e-23));
    const auto c = phys.solve(Dipole::in_plane(xy, 1e-23));
    const double gmax = max_abs(a.g.values);
    for (std::size_t k = 0; k < a.g.size(); ++k) {
        CHECK(std::abs(3 * a.g[k] - b.g[k]) < 1e-12 * 3 * gmax);
        CHECK(std::abs(a.g[k] + 2 * c.g[k]) < 1e-12 * gmax);
    }
    // shifted dipole: symmetric in y only
    const Grid& g = *s.grid;
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(std::abs(a.g[k] - a.g[g.index(g.ix(k), g.ny() - 1 - g.iy(k))]) < 1e-9 * gmax);
}

TEST_CASE("solve_g: zero field gives zero current, superposition holds") {
    auto s = circle_setup(20);
    StreamSystem sys(s.geometry, s.film, s.grid);
    const auto zero = sys.solve_g(FieldMap::zeros(s.grid, "H_a", "A/m"));
    CHECK(max_abs(zero.values) == 0.0);
    const auto h1 = applied_field(Dipole::in_plane(Vec2(-100e-9, 30e-9)), s.grid);
    const auto h2 = applied_field(Dipole::in_plane(Vec2(200e-9, -50e-9), 2e-23), s.grid);
    std::vector<double> sum(h1.size());
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = h1[k] + h2[k];
    const auto g1 = sys.solve_g(h1), g2 = sys.solve_g(h2);
    const auto g12 = sys.solve_g(FieldMap(s.grid, sum, "H_a", "A/m"));
    const double gmax = max_abs(g12.values);
    for (std::size_t k = 0; k < sum.size(); ++k) CHECK(std::abs(g1[k] + g2[k] - g12[k]) < 1e-12 * gmax);
    // reconstruct with no current returns the applied field
    const auto back = sys.reconstruct(FieldMap::zeros(s.grid, "g", "A"), h1);
    for (std::size_t k = 0; k < sum.size(); ++k) CHECK(back[k] == h1[k]);
}

TEST_CASE("reconstruct agrees with the kernel matrix and the solved field") {
    auto s = circle_setup(20, 50e-9, 1000e-9, {150e-9}, {0.0});
    StreamSystem sys(s.geometry, s.film, s.grid);
    const Dipole d = Dipole::in_plane(Vec2(150e-9, 0));
    const auto sol = sys.solve(d);
    const auto h = sys.reconstruct(sol.g, sol.h_a);
    const auto hk = reconstruct_field(sol.g, sol.h_a, assemble_kernel(*s.grid));
    const double hmax = max_abs(sol.h_z.values);
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(std::abs(h[k] - sol.h_z[k]) < 1e-9 * hmax);
        CHECK(std::abs(hk[k] - sol.h_z[k]) < 1e-9 * hmax);
    }
}

TEST_CASE("field_at reproduces the field map at grid points") {
    auto s = circle_setup(24, 50e-9, 1000e-9, {-300e-9}, {0.0});
    StreamSystem sys(s.geometry, s.film, s.grid, {FieldConvention::Physical});
    const Dipole d = Dipole::in_plane(Vec2(-300e-9, 0));
    const auto sol = sys.solve(d);
    const Grid& g = *s.grid;
    const double hmax = max_abs(sol.h_z.values);
    std::size_t n = 0;
    for (std::size_t k = 0; k < g.size(); k += 5) {
        // away from the source cell, whose corners carry the flux-balance term
        if ((g.point(k) - d.position.head<2>()).norm() < 100e-9) continue;
        CHECK(std::abs(sys.field_at(sol, d, g.point(k)) - sol.h_z[k]) < 1e-9 * hmax);
        ++n;
    }
    CHECK(n > 50);
    CHECK_THROWS_AS(sys.field_at(sol, d, d.position.head<2>()), SingularityError);
}

TEST_CASE("stronger screening as the Pearl length drops") {
    // field at a probe inside the aperture relative to the bare dipole field
    double prev = 0;
    bool first = true;
    for (double lam : {100e-9, 50e-9, 25e-9}) {
        auto s = circle_setup(32, lam, 1000e-9, {0.0, 800e-9}, {0.0});
        StreamSystem sys(s.geometry, s.film, s.grid, {FieldConvention::Physical});
        const Dipole d = Dipole::in_plane(Vec2(0, 0));
        const auto sol = sys.solve(d);
        const Vec2 p(800e-9, 0);
        const double bare = applied_prefactor(FieldConvention::Physical) * d.moment.z() / std::pow(p.norm(), 3);
        const double enh = sys.field_at(sol, d, p) / bare;
        CHECK(enh > 1.0);
        if (!first) CHECK(enh > prev);
        prev = enh;
        first = false;
    }
}

TEST_CASE("grid convergence of the probe field") {
    std::vector<double> vals;
    for (int n : {40, 60, 80}) {
        auto s = circle_setup(n, 50e-9, 1000e-9, {0.0, 900e-9}, {0.0});
        StreamSystem sys(s.geometry, s.film, s.grid, {FieldConvention::Physical});
        const Dipole d = Dipole::in_plane(Vec2(0, 0));
        vals.push_back(sys.field_at(sys.solve(d), d, Vec2(900e-9, 0)));
    }
    CHECK(std::abs(vals[2] - vals[1]) < std::abs(vals[1] - vals[0]));
    CHECK(std::abs(vals[2] - vals[1]) < 0.05 * std::abs(vals[2]));
}

TEST_CASE("warning for a Pearl length far below the grid spacing") {
    auto s = circle_setup(20, 1e-9);
    WarningCapture w;
    StreamSystem sys(s.geometry, s.film, s.grid);
    REQUIRE(sys.warnings().size() == 1);
    CHECK(sys.warnings()[0].find("Pearl length") != std::string::npos);
    CHECK(w.seen.size() == 1);
}

TEST_CASE("solver input errors") {
    auto s = circle_setup(20);
    StreamSystem sys(s.geometry, s.film, s.grid);
    CHECK_THROWS_AS(sys.solve(Dipole{Vec3(0, 0, 1e-9), Vec3::UnitZ()}), ConfigError);
    CHECK_THROWS_AS(sys.solve(Dipole{Vec3::Zero(), Vec3::Zero()}), ConfigError);
    CHECK_THROWS_AS(sys.solve(Dipole::in_plane(Vec2(48e-6, 0))), ConfigError);
    auto other = circle_setup(20, 50e-9, 500e-9);
    CHECK_THROWS_AS(StreamSystem(s.geometry, s.film, other.grid), ConfigError);
}

TEST_CASE("aperture components count separate openings") {
    const ApertureGeometry two = DogBone{200e-9, 1000e-9, 20e-9};
    const auto film = FilmSpec::for_geometry(two, 50e-9, 80e-9);
    GridSpec spec;
    spec.nx = spec.ny = 40;
    spec.edge_spacing_x = spec.edge_spacing_y = 10e-9;
    int n = 0;
    aperture_components(*make_grid(two, film, spec), &n);
    CHECK(n >= 1);
    aperture_components(*circle_setup(20).grid, &n);
    CHECK(n == 1);
}

}
