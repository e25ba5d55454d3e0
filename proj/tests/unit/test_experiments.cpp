#include <doctest.h>

#include <cmath>
#include <random>

#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/experiments.hpp"
#include "fluxfocus/power_law.hpp"

using namespace fluxfocus;
using namespace fluxfocus::experiments;
using constants::mu0;
using constants::pi;

namespace {

std::vector<SeriesPoint> power_series(double A, double p, double lo, double hi, std::size_t n) {
    std::vector<SeriesPoint> s;
    for (double x : log_spaced(lo, hi, n)) s.push_back({x, A * std::pow(x, p), 0.0});
    return s;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("smooth: centred windows shrinking at the ends") {
    std::vector<SeriesPoint> s{{1, 1}, {2, 2}, {3, 4}, {4, 8}, {5, 16}};
    const auto o = smooth(s, 3);
    CHECK(o[0].y == 1.0);
    CHECK(o[0].sigma == 0.0);
    CHECK(o[1].y == doctest::Approx(7.0 / 3));
    CHECK(o[2].y == doctest::Approx(14.0 / 3));
    CHECK(o[4].y == 16.0);
    const double m = 7.0 / 3;
    CHECK(o[1].sigma == doctest::Approx(std::sqrt(((1 - m) * (1 - m) + (2 - m) * (2 - m) + (4 - m) * (4 - m)) / 3)));
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(o[k].x == s[k].x);
    const auto id = smooth(s, 1);
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(id[k].y == s[k].y);
    const auto o5 = smooth(s, 5);
    CHECK(o5[2].y == doctest::Approx(31.0 / 5));
    CHECK(o5[1].y == doctest::Approx(7.0 / 3));
    CHECK_THROWS_AS(smooth(s, 4), ConfigError);
    CHECK_THROWS_AS(smooth(s, 7), ConfigError);
    CHECK_THROWS_AS(smooth(s, 0), ConfigError);
}

TEST_CASE("fit: exact power laws") {
    for (double p : {-2.5, -2.0, -1.0, 0.5}) {
        const auto f = fit_power_law(power_series(3.7e-5, p, 1e-7, 1e-4, 12));
        CHECK(f.slope == doctest::Approx(p).epsilon(1e-12));
        CHECK(std::exp(f.intercept) == doctest::Approx(3.7e-5).epsilon(1e-9));
        CHECK(f.slope_err < 1e-10);
        CHECK_FALSE(f.weighted);
        CHECK(f.points == 12);
    }
    // negative values are fitted on |y|
    auto neg = power_series(-2.0, -2.5, 1.0, 100.0, 8);
    CHECK(fit_power_law(neg).slope == doctest::Approx(-2.5).epsilon(1e-12));
}

TEST_CASE("fit: scale invariance") {
    const auto base = power_series(1.0, -2.3, 1e-7, 1e-5, 9);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n01;
    std::vector<SeriesPoint> noisy = base;
    for (auto& p : noisy) {
        p.y *= 1 + 0.03 * n01(rng);
        p.sigma = 0.03 * std::abs(p.y);
    }
    const auto f0 = fit_power_law(noisy);
    for (double sx : {1e-3, 7.0, 1e9})
        for (double sy : {1e-12, 0.5, 1e6}) {
            auto t = noisy;
            for (auto& p : t) {
                p.x *= sx;
                p.y *= sy;
                p.sigma *= sy;
            }
            const auto f = fit_power_law(t);
            CHECK(std::abs(f.slope - f0.slope) < 1e-12 * std::abs(f0.slope) + 1e-12);
            CHECK(f.slope_err == doctest::Approx(f0.slope_err).epsilon(1e-9));
        }
}

TEST_CASE("fit: Monte Carlo bias and error calibration") {
    const double p = -2.5, frac = 0.05;
    const auto base = power_series(1e-3, p, 1e-7, 1e-4, 15);
    std::vector<double> slopes, errs;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n01;
        auto s = base;
        for (auto& q : s) {
            q.sigma = frac * std::abs(q.y);
            q.y *= 1 + frac * n01(rng);
        }
        const auto f = fit_power_law(s);
        CHECK(f.weighted);
        slopes.push_back(f.slope);
        errs.push_back(f.slope_err);
    }
    double mean = 0, var = 0, mean_err = 0;
    for (double s : slopes) mean += s / 100;
    for (double s : slopes) var += (s - mean) * (s - mean) / 99;
    for (double e : errs) mean_err += e / 100;
    const double sd = std::sqrt(var);
    CHECK(std::abs(mean - p) < 4 * sd / 10);
    CHECK(mean_err == doctest::Approx(sd).epsilon(0.3));
}

TEST_CASE("fit: smoothing barely perturbs a clean power law") {
    for (double p : {-2.5, -2.0, -1.4})
        for (int w : {3, default_smoothing_window}) {
            const auto s = power_series(1.0, p, 1e-7, 1e-4, 30);
            const auto f = fit_power_law(smooth(s, w));
            CHECK(std::abs(f.slope - p) < 0.01);
        }
}

TEST_CASE("fit: input errors") {
    auto s = power_series(1.0, -2.0, 1.0, 10.0, 6);
    CHECK_THROWS_AS(fit_power_law({s.begin(), s.begin() + 4}), ConfigError);
    auto mixed = s;
    mixed[2].y = -mixed[2].y;
    CHECK_THROWS_AS(fit_power_law(mixed), DomainError);
    auto zero = s;
    zero[1].y = 0;
    CHECK_THROWS_AS(fit_power_law(zero), DomainError);
    auto bad_x = s;
    bad_x[0].x = 0;
    CHECK_THROWS_AS(fit_power_law(bad_x), DomainError);
    auto same_x = s;
    for (auto& q : same_x) q.x = 2.0;
    CHECK_THROWS_AS(fit_power_law(same_x), DomainError);
}

TEST_CASE("separation and log spacing") {
    CHECK(separation(Scenario::Centered, 1e-6, 1e-7) == doctest::Approx(9e-7));
    CHECK(separation(Scenario::Shifted, 1e-6, 1e-7) == doctest::Approx(1.8e-6));
    CHECK(separation(Scenario::Ellipse, 1e-6, 1e-7) == doctest::Approx(1.8e-6));
    const auto v = log_spaced(1.0, 1000.0, 4);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == doctest::Approx(10.0));
    CHECK(v[3] == doctest::Approx(1000.0));
    CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), ConfigError);
}

TEST_CASE("analytic sweeps approach the edge exponents") {
    const double d = 100e-9;
    double prev_c = 1e300, prev_s = 1e300;
    for (double lo : {1e-6, 1e-5, 1e-4}) {
        const auto radii = log_spaced(lo, 100 * lo, 20);
        const auto c = sweep(Scenario::Centered, d, radii, Engine::Analytic);
        const auto s = sweep(Scenario::Shifted, d, radii, Engine::Analytic);
        REQUIRE(c.fit);
        REQUIRE(s.fit);
        const double ec = std::abs(c.fit->slope + 2.5), es = std::abs(s.fit->slope + 2.0);
        CHECK(ec < prev_c);
        CHECK(es < prev_s);
        prev_c = ec;
        prev_s = es;
        for (const auto& p : c.points) CHECK(p.B < 0);
    }
    CHECK(prev_c < 0.02);
    CHECK(prev_s < 0.02);
}

TEST_CASE("sweep: noise is reproducible per seed") {
    SweepConfig c;
    c.scenario = Scenario::Centered;
    c.radii = log_spaced(1e-5, 1e-3, 10);
    c.noise_fraction = 0.05;
    c.seed = 42;
    const auto a = sweep(c), b = sweep(c);
    for (std::size_t k = 0; k < a.points.size(); ++k) {
        CHECK(a.points[k].B == b.points[k].B);
        CHECK(a.points[k].sigma_B > 0);
    }
    c.seed = 43;
    CHECK(sweep(c).points[3].B != a.points[3].B);
    c.noise_fraction = 0;
    c.radii.resize(4);
    CHECK_FALSE(sweep(c).fit.has_value());
}

TEST_CASE("sweep: invalid configurations") {
    SweepConfig c;
    CHECK_THROWS_AS(sweep(c), ConfigError);
    c.radii = {50e-9, 1e-6};
    CHECK_THROWS_AS(sweep(c), ConfigError);
    c.radii = {2e-6, 1e-6};
    CHECK_THROWS_AS(sweep(c), ConfigError);
    c.radii = {1e-6, 2e-6};
    c.scenario = Scenario::Ellipse;
    CHECK_THROWS_AS(sweep(c), ConfigError);
}

TEST_CASE("numeric setup places source and probe across the aperture") {
    SweepConfig c;
    c.d = 100e-9;
    const auto s = numeric_setup(Scenario::Shifted, 1e-6, c);
    CHECK(s.dipole.position.x() == doctest::Approx(-900e-9));
    CHECK(s.probe.x() == doctest::Approx(900e-9));
    const auto e = numeric_setup(Scenario::Ellipse, 2e-6, c);
    CHECK(std::get<Ellipse>(e.geometry).semi_y == doctest::Approx(100e-9));
    CHECK(e.dipole.position.x() == doctest::Approx(-1.9e-6));
    // half of min(d, Lambda, R / 4)
    const auto film = FilmSpec::for_geometry(Circle{1e-6}, 50e-9, 80e-9);
    CHECK(default_edge_spacing(Circle{1e-6}, film, 100e-9) == doctest::Approx(0.5 * 31.25e-9));
}

TEST_CASE("numeric centred sweep on a small grid is a falling power law") {
    SweepConfig c;
    c.engine = Engine::Numeric;
    c.scenario = Scenario::Centered;
    c.radii = log_spaced(500e-9, 4000e-9, 5);
    c.numeric.nx = c.numeric.ny = 32;
    c.numeric.convention = brandt::FieldConvention::Physical;
    const auto r = sweep(c);
    REQUIRE(r.fit);
    CHECK(r.fit->slope < -1.5);
    CHECK(r.fit->slope > -3.5);
    for (std::size_t k = 1; k < r.points.size(); ++k) CHECK(std::abs(r.points[k].B) < std::abs(r.points[k - 1].B));
}

TEST_CASE("coupling estimate oracles") {
    const double m = constants::nv_moment;
    const auto e = coupling_estimate(m, 1e-3, 300e-9);
    CHECK(e.coupling == doctest::Approx(m * 1e-3 / constants::planck).epsilon(1e-14));
    CHECK(coupling_estimate(m, -1e-3, 300e-9).coupling == e.coupling);
    CHECK_THROWS_AS(coupling_estimate(m, 1e-3, 0.0), ConfigError);
    // free-space NV pair at 10 nm, equatorial field: same order as 40 kHz
    const double L = 10e-9;
    const double B = mu0 * m / (4 * pi * L * L * L);
    const double hz = coupling_estimate(m, B, L).coupling;
    CHECK(hz > 40e3 / 10);
    CHECK(hz < 40e3 * 10);
}

TEST_CASE("numeric coupling beats free space") {
    CouplingConfig c;
    c.numeric.nx = c.numeric.ny = 32;
    c.numeric.convention = brandt::FieldConvention::Physical;
    const auto r = numeric_coupling(c);
    CHECK(r.free_space.coupling ==
          doctest::Approx(constants::nv_moment * mu0 * constants::nv_moment / (4 * pi * std::pow(300e-9, 3)) /
                          constants::planck)
              .epsilon(1e-12));
    CHECK(r.enhancement > 1.0);
    CHECK(r.enhancement == doctest::Approx(r.estimate.coupling / r.free_space.coupling));
    CHECK(r.geometry.find("ellipse") == 0);
}

TEST_CASE("field in decibels relative to one gauss") {
    CHECK(field_db(1e-4) == 0.0);
    CHECK(field_db(-1e-3) == doctest::Approx(20.0));
    CHECK(field_db(1e-6) == doctest::Approx(-40.0));
    CHECK(std::isinf(field_db(0.0)));
}

TEST_CASE("engine comparison on a small grid") {
    CompareConfig c;
    c.numeric.nx = c.numeric.ny = 32;
    const auto r = compare_engines(c);
    REQUIRE(r.points.size() > 3);
    CHECK(r.physical.band_points > 0);
    CHECK(r.physical.band_points == r.reference.band_points);
    CHECK(r.physical.sign_agreement >= 0.0);
    CHECK(r.physical.sign_agreement <= 1.0);
    CHECK(r.reciprocal_condition > 0.0);
    for (const auto& p : r.points) {
        CHECK(p.y == doctest::Approx(c.line_y));
        CHECK(p.rho == doctest::Approx(std::hypot(p.x, p.y)));
    }
    CHECK(r.exterior_analytic_max == 0.0);
    c.scenario = Scenario::Ellipse;
    CHECK_THROWS_AS(compare_engines(c), ConfigError);
}

}
