#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fluxfocus/dipole.hpp"
#include "fluxfocus/field_map.hpp"
#include "fluxfocus/film.hpp"
#include "fluxfocus/grid.hpp"

// Stream-function solver for a thin film of finite Pearl length. Unknown g on
// film and aperture points, g = 0 outside the film:
//   H_z = H_a + sum_j Q_ij w_j g_j,   H_z = Lambda lap g   (on the film)
namespace fluxfocus::brandt {

// Reference: H_a = +m / (2 pi r^3)
// Physical:  H_a = -m / (4 pi r^3)  (in-plane field of an in-plane z dipole)
enum class FieldConvention { Reference, Physical };

double applied_prefactor(FieldConvention c);
const char* to_string(FieldConvention c);

// In-plane applied field of a z dipole at z = 0. The singular part of the
// source is represented by distributing the flux that the sampled field misses
// onto the corners of the grid cell containing the dipole (bilinear shares),
// so that the total applied flux over the grid equals the exact value.
FieldMap applied_field(const Dipole& dipole, const GridPtr& grid,
                       FieldConvention convention = FieldConvention::Reference);

// (1/4pi) * integral over the plane outside the grid square of 1/|r - p|^3
double exterior_kernel_integral(const Grid& grid, const Vec2& p);

// Q_ij w_j with Q = -1/(4 pi r^3) off the diagonal and the diagonal fixed by the
// sum rule sum_j Q_ij w_j = exterior_kernel_integral(r_i)
Eigen::MatrixXd assemble_kernel(const Grid& grid);

// 5-point non-equidistant Laplacian on interior points; boundary rows are empty
Eigen::SparseMatrix<double> assemble_laplacian(const Grid& grid);

// Q w - Lambda lap over all grid points, with the Pearl length raised in
// apertures and a conservative (divergence form) London term. Rows of
// exterior points are kept for inspection but they are not solved for.
struct SystemMatrix {
    Eigen::MatrixXd matrix;
    std::vector<double> pearl_lengths;
};
SystemMatrix assemble_system(const Grid& grid, const FilmSpec& film, double aperture_pearl_factor = 1e6);

struct SolveOptions {
    FieldConvention convention = FieldConvention::Reference;
    double aperture_pearl_factor = 1e6;
    // below this Lambda / (finest spacing) a warning is emitted
    double pearl_warning_ratio = 1e-2;
};

struct StreamSolution {
    FieldMap g;    // A
    FieldMap h_z;  // A/m
    FieldMap h_a;  // A/m, as used on the right-hand side
    std::vector<double> aperture_currents;  // mean g per connected aperture
    double aperture_spread = 0;             // max over apertures of std(g)/|mean(g)|
    double london_residual = 0;             // max_film |H_z - Lambda lap g| / max |H_z|
    FieldConvention convention = FieldConvention::Reference;
    std::vector<std::string> warnings;
};

// Factor once, solve for many sources on a fixed geometry. Immutable after
// construction; solve() may be called concurrently.
class StreamSystem {
public:
    StreamSystem(const ApertureGeometry& geometry, const FilmSpec& film, GridPtr grid,
                 SolveOptions options = {});
    ~StreamSystem();
    StreamSystem(StreamSystem&&) noexcept;
    StreamSystem& operator=(StreamSystem&&) noexcept;

    StreamSolution solve(const Dipole& dipole) const;

    // g for an arbitrary applied field map
    FieldMap solve_g(const FieldMap& h_a) const;
    FieldMap reconstruct(const FieldMap& g, const FieldMap& h_a) const;

    // H_z at an arbitrary point of the grid square for a solution of solve(dipole)
    double field_at(const StreamSolution& solution, const Dipole& dipole, const Vec2& p) const;

    const GridPtr& grid() const;
    double reciprocal_condition() const;  // of the scaled SPD system
    std::size_t unknowns() const;
    const std::vector<std::string>& warnings() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

StreamSolution solve_stream(const Dipole& dipole, const ApertureGeometry& geometry,
                            const FilmSpec& film, const GridPtr& grid, SolveOptions options = {});

FieldMap reconstruct_field(const FieldMap& g, const FieldMap& h_a, const Eigen::MatrixXd& kernel);

// bilinear interpolation of a field map; p must lie inside the hull of grid points
double interpolate(const FieldMap& f, const Vec2& p);

// max |div J| * h / max |J| over grid cells for J = (dg/dy, -dg/dx)
double current_divergence_residual(const FieldMap& g);

// labels of connected aperture regions (4-neighbour), -1 for non-aperture points
std::vector<int> aperture_components(const Grid& grid, int* count = nullptr);

}  // namespace fluxfocus::brandt
