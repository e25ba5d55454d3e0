#include <doctest.h>

#include <cmath>
#include <random>

#include "fluxfocus/errors.hpp"
#include "fluxfocus/film.hpp"
#include "fluxfocus/geometry.hpp"

using namespace fluxfocus;

TEST_SUITE("geometry") {

TEST_CASE("ellipse with equal axes labels exactly like the circle") {
    const double R = 1e-6;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5 * R, 1.5 * R);
    for (int k = 0; k < 20000; ++k) {
        const Vec2 p(u(rng), u(rng));
        CHECK(point_in_aperture(Circle{R}, p) == point_in_aperture(Ellipse{R, R}, p));
    }
    // the boundary belongs to the superconductor
    CHECK_FALSE(point_in_aperture(Circle{R}, Vec2(R, 0)));
    CHECK(point_in_aperture(Circle{R}, Vec2(std::nextafter(R, 0.0), 0)));
}

TEST_CASE("ellipse membership follows the semi axes") {
    const ApertureGeometry e = Ellipse{1000e-9, 100e-9};
    CHECK(point_in_aperture(e, Vec2(950e-9, 0)));
    CHECK_FALSE(point_in_aperture(e, Vec2(0, 101e-9)));
    CHECK(point_in_aperture(e, Vec2(0, 99e-9)));
    CHECK(largest_dimension(e) == doctest::Approx(1000e-9));
}

TEST_CASE("dog-bone is two discs joined by a channel") {
    const ApertureGeometry d = DogBone{100e-9, 300e-9, 25e-9};
    CHECK(point_in_aperture(d, Vec2(150e-9, 90e-9)));    // inside the right disc
    CHECK(point_in_aperture(d, Vec2(-150e-9, -90e-9)));  // left disc
    CHECK(point_in_aperture(d, Vec2(0, 20e-9)));         // channel
    CHECK_FALSE(point_in_aperture(d, Vec2(0, 30e-9)));   // above the channel
    CHECK_FALSE(point_in_aperture(d, Vec2(260e-9, 0)));  // beyond the right end
    CHECK(largest_dimension(d) == doctest::Approx(250e-9));
}

TEST_CASE("invalid geometries are rejected") {
    CHECK_THROWS_AS(validate(ApertureGeometry{Circle{0.0}}), ConfigError);
    CHECK_THROWS_AS(validate(ApertureGeometry{Ellipse{1.0, -1.0}}), ConfigError);
    CHECK_THROWS_AS(validate(ApertureGeometry{Circle{std::nan("")}}), ConfigError);
    CHECK_THROWS_AS(validate(ApertureGeometry{DogBone{100e-9, 150e-9, 25e-9}}), ConfigError);
}

TEST_CASE("film: Pearl length and extents") {
    const ApertureGeometry c = Circle{1000e-9};
    const auto f = FilmSpec::for_geometry(c, 50e-9, 80e-9);
    CHECK(f.pearl_length == doctest::Approx(50e-9 * 50e-9 / 80e-9).epsilon(1e-14));
    CHECK(f.pearl_length == doctest::Approx(31.25e-9).epsilon(1e-12));
    // film 90 R and grid 100 R full width
    CHECK(f.film_half_extent == doctest::Approx(45e-6));
    CHECK(f.grid_half_extent == doctest::Approx(50e-6));
    CHECK_THROWS_AS(FilmSpec::make(50e-9, 80e-9, 2e-6, 1e-6), ConfigError);
    CHECK_THROWS_AS(FilmSpec::make(-1, 80e-9, 1e-6, 2e-6), ConfigError);
    CHECK_THROWS_AS(validate(FilmSpec::make(50e-9, 80e-9, 0.5e-6, 1e-6), c), ConfigError);
    CHECK(validity_notes(f).size() == 3);
}

TEST_CASE("outline knots sit on the aperture edges") {
    CHECK(edge_knots_x(Circle{2.0}) == std::vector<double>{2.0});
    CHECK(edge_knots_y(Ellipse{3.0, 1.0}) == std::vector<double>{1.0});
    const auto k = edge_knots_x(DogBone{1.0, 4.0, 0.2});
    REQUIRE(k.size() == 2);
    CHECK(k[0] == doctest::Approx(1.0));
    CHECK(k[1] == doctest::Approx(3.0));
    CHECK(describe(Circle{1e-6}).find("circle") == 0);
}

}
