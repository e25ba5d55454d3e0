#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fluxfocus/errors.hpp"
#include "fluxfocus/grid.hpp"

using namespace fluxfocus;

namespace {
const ApertureGeometry circle = Circle{1000e-9};
const FilmSpec film = FilmSpec::for_geometry(circle, 50e-9, 80e-9);
}  // namespace

TEST_SUITE("grid") {

TEST_CASE("weights tile the grid square") {
    for (double ratio : {1.0, 4.0, 50.0}) {
        auto g = make_grid(circle, film, 30, 24, ratio);
        const double total = std::accumulate(g->weights.begin(), g->weights.end(), 0.0);
        const double X = g->half_extent;
        CHECK(total == doctest::Approx(4 * X * X).epsilon(1e-12));
        for (double w : g->weights) CHECK(w > 0.0);
    }
}

TEST_CASE("uniform spacing gives equal weights") {
    auto g = make_grid(circle, film, 20, 20, 1.0);
    for (double w : g->weights) CHECK(w == doctest::Approx(g->weights.front()).epsilon(1e-12));
    CHECK(g->min_spacing_x() == doctest::Approx(2 * g->half_extent / 20).epsilon(1e-12));
}

TEST_CASE("axes are mirror symmetric and strictly increasing") {
    for (std::size_t n : {16u, 17u, 40u, 41u}) {
        const auto a = stretched_axis(n, 5.0, {0.3, 1.0, 2.5}, 30.0);
        REQUIRE(a.size() == n);
        for (std::size_t k = 0; k < n; ++k) CHECK(a[k] == -a[n - 1 - k]);
        for (std::size_t k = 1; k < n; ++k) CHECK(a[k] > a[k - 1]);
        CHECK(std::abs(a.front()) < 5.0);
        if (n % 2) CHECK(a[n / 2] == 0.0);
    }
}

TEST_CASE("spacing grows away from the knots") {
    const auto a = stretched_axis(60, 50.0, {1.0}, 100.0);
    // the finest cells straddle the knot, the coarsest sit at the boundary
    double hmin = 1e300, hmax = 0;
    std::size_t at = 0;
    for (std::size_t k = 31; k < a.size(); ++k) {
        const double h = a[k] - a[k - 1];
        if (h < hmin) {
            hmin = h;
            at = k;
        }
        hmax = std::max(hmax, h);
    }
    CHECK(std::abs(0.5 * (a[at] + a[at - 1]) - 1.0) < 3 * hmin);
    CHECK(hmax / hmin > 20.0);
}

TEST_CASE("ratio_for_spacing hits the requested finest spacing") {
    const std::vector<double> knots{1e-6, 0.9e-6};
    const double X = 50e-6;
    for (double target : {5e-8, 1.5e-8}) {
        const double r = ratio_for_spacing(60, X, knots, target);
        const auto a = stretched_axis(60, X, knots, r);
        double h = 1e300;
        for (std::size_t k = 1; k < a.size(); ++k) h = std::min(h, a[k] - a[k - 1]);
        CHECK(h == doctest::Approx(target).epsilon(1e-6));
    }
    CHECK_THROWS_AS(ratio_for_spacing(60, X, knots, -1.0), ConfigError);
}

TEST_CASE("labels: aperture inside, film up to the film extent, exterior beyond") {
    GridSpec s;
    s.nx = s.ny = 40;
    s.edge_spacing_x = s.edge_spacing_y = 20e-9;
    auto g = make_grid(circle, film, s);
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t k = 0; k < g->size(); ++k) {
        const Vec2 p = g->point(k);
        const Region r = g->labels[k];
        ++counts[static_cast<int>(r)];
        if (p.norm() < 1000e-9)
            CHECK(r == Region::Aperture);
        else if (std::abs(p.x()) < film.film_half_extent && std::abs(p.y()) < film.film_half_extent)
            CHECK(r == Region::Film);
        else
            CHECK(r == Region::Exterior);
    }
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    // the refined grid's outer cells are wider than the film margin; a uniform one has exterior points
    auto u = make_grid(circle, film, 40, 40, 1.0);
    std::size_t exterior = 0;
    for (auto r : u->labels) exterior += r == Region::Exterior;
    CHECK(exterior == 40 * 40 - 36 * 36);  // two rings beyond 45 R at spacing 2.5 R
    CHECK(std::string(to_string(Region::Film)) == "film");
}

TEST_CASE("index helpers round trip") {
    auto g = make_grid(circle, film, 17, 23, 3.0);
    for (std::size_t k = 0; k < g->size(); k += 7) CHECK(g->index(g->ix(k), g->iy(k)) == k);
    CHECK(g->point(g->index(3, 5)) == Vec2(g->x[3], g->y[5]));
}

TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(make_grid(circle, film, 8, 40, 2.0), ConfigError);
    CHECK_THROWS_AS(stretched_axis(20, 1.0, {2.0}, 3.0), ConfigError);
    CHECK_THROWS_AS(stretched_axis(20, 1.0, {0.5}, 0.5), ConfigError);
    CHECK_THROWS_AS(grid_from_axes({0.0, -1.0}, {0.0, 1.0}, 2.0, circle, 1.5), ConfigError);
    CHECK_THROWS_AS(grid_from_axes({0.0, 3.0}, {0.0, 1.0}, 2.0, circle, 1.5), ConfigError);
}

}
