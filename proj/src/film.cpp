#include "fluxfocus/film.hpp"

#include <cmath>
#include <sstream>

#include "fluxfocus/errors.hpp"

namespace fluxfocus {

FilmSpec FilmSpec::make(double london_depth, double thickness, double film_half_extent,
                        double grid_half_extent) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("film ") + what + " must be positive and finite");
    };
    positive(london_depth, "london_depth");
    positive(thickness, "thickness");
    positive(film_half_extent, "film_half_extent");
    positive(grid_half_extent, "grid_half_extent");
    if (grid_half_extent < film_half_extent)
        throw ConfigError("grid_half_extent must be >= film_half_extent");
    FilmSpec f;
    f.london_depth = london_depth;
    f.thickness = thickness;
    f.pearl_length = london_depth * london_depth / thickness;
    f.film_half_extent = film_half_extent;
    f.grid_half_extent = grid_half_extent;
    return f;
}

FilmSpec FilmSpec::for_geometry(const ApertureGeometry& geometry, double london_depth,
                                double thickness, double film_width, double grid_width) {
    validate(geometry);
    const double D = largest_dimension(geometry);
    auto f = make(london_depth, thickness, 0.5 * film_width * D, 0.5 * grid_width * D);
    validate(f, geometry);
    return f;
}

void validate(const FilmSpec& film, const ApertureGeometry& geometry) {
    validate(geometry);
    if (!(film.pearl_length > 0.0))
        throw ConfigError("pearl length must be positive");
    if (film.grid_half_extent < film.film_half_extent)
        throw ConfigError("grid_half_extent must be >= film_half_extent");
    const double D = largest_dimension(geometry);
    if (!(film.film_half_extent > D)) {
        std::ostringstream os;
        os << "aperture (" << describe(geometry) << ") does not fit inside the film half extent "
           << film.film_half_extent << " m";
        throw ConfigError(os.str());
    }
}

std::vector<std::string> validity_notes(const FilmSpec& film) {
    std::ostringstream lam;
    lam << "thin-film limit: current uniform across thickness " << film.thickness
        << " m; screening governed by Pearl length " << film.pearl_length << " m";
    return {
        "applied field assumed far below the upper critical field (London regime, no vortices)",
        "film dimensions assumed much larger than the coherence length",
        lam.str(),
    };
}

}  // namespace fluxfocus
