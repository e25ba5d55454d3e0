#pragma once

#include <string>
#include <vector>

#include "fluxfocus/geometry.hpp"

namespace fluxfocus {

struct FilmSpec {
    double london_depth = 0;      // lambda
    double thickness = 0;         // Delta
    double pearl_length = 0;      // Lambda = lambda^2 / Delta
    double film_half_extent = 0;
    double grid_half_extent = 0;

    static FilmSpec make(double london_depth, double thickness, double film_half_extent,
                         double grid_half_extent);

    // film and grid are squares of full width film_width * D and grid_width * D,
    // D the largest aperture dimension
    static FilmSpec for_geometry(const ApertureGeometry& geometry, double london_depth,
                                 double thickness, double film_width = 90.0,
                                 double grid_width = 100.0);
};

inline constexpr double default_london_depth = 50e-9;
inline constexpr double default_thickness = 80e-9;

// grid_half_extent >= film_half_extent > largest aperture dimension
void validate(const FilmSpec& film, const ApertureGeometry& geometry);

// model assumptions that are documented but not checked
std::vector<std::string> validity_notes(const FilmSpec& film);

}  // namespace fluxfocus
