#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fluxfocus/film.hpp"
#include "fluxfocus/geometry.hpp"

namespace fluxfocus {

enum class Region : std::uint8_t { Film, Aperture, Exterior };

// Tensor grid on the square [-X, X]^2. Points are cell centred: the outermost
// point sits half a cell inside the boundary, and each point owns the Voronoi
// cell bounded by the midpoints to its neighbours.
struct Grid {
    std::vector<double> x, y;    // strictly increasing
    std::vector<double> wx, wy;  // Voronoi widths per axis
    std::vector<double> weights; // wx[i] * wy[j] at index(i, j)
    std::vector<Region> labels;
    double half_extent = 0;
    double film_half_extent = 0;

    std::size_t nx() const { return x.size(); }
    std::size_t ny() const { return y.size(); }
    std::size_t size() const { return x.size() * y.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * y.size() + j; }
    std::size_t ix(std::size_t k) const { return k / y.size(); }
    std::size_t iy(std::size_t k) const { return k % y.size(); }
    Vec2 point(std::size_t k) const { return {x[ix(k)], y[iy(k)]}; }
    double min_spacing_x() const;
    double min_spacing_y() const;
};

using GridPtr = std::shared_ptr<const Grid>;

struct GridSpec {
    int nx = 100;
    int ny = 100;
    double ratio_x = 4.0;  // far-field spacing / edge spacing
    double ratio_y = 4.0;
    // refinement centres in addition to the aperture outline (e.g. dipole, probe)
    std::vector<double> extra_knots_x;
    std::vector<double> extra_knots_y;
    // when set, the ratio is solved so that the finest spacing equals this value
    std::optional<double> edge_spacing_x;
    std::optional<double> edge_spacing_y;
};

GridPtr make_grid(const ApertureGeometry& geometry, const FilmSpec& film, int n_x, int n_y,
                  double refinement_ratio);
GridPtr make_grid(const ApertureGeometry& geometry, const FilmSpec& film, const GridSpec& spec);

// labels and weights for explicit axes (must lie strictly inside [-half_extent, half_extent])
GridPtr grid_from_axes(std::vector<double> x, std::vector<double> y, double half_extent,
                       const ApertureGeometry& geometry, double film_half_extent);

// Symmetric 1-D axis of n cell-centred points on [-X, X]. Spacing is
// h_min * min(ratio, 1 + (ratio - 1) * dist / (X - k_max)), dist the distance to the
// nearest knot |k|, so cells grow geometrically away from the knots and reach
// ratio * h_min at the far boundary.
std::vector<double> stretched_axis(std::size_t n, double half_extent, std::vector<double> knots,
                                   double ratio);

// refinement ratio for which the finest spacing of stretched_axis equals target
double ratio_for_spacing(std::size_t n, double half_extent, const std::vector<double>& knots,
                         double target);

const char* to_string(Region r);

}  // namespace fluxfocus
