#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxfocus/brandt.hpp"
#include "fluxfocus/constants.hpp"
#include "fluxfocus/dipole.hpp"
#include "fluxfocus/film.hpp"
#include "fluxfocus/geometry.hpp"
#include "fluxfocus/grid.hpp"
#include "fluxfocus/power_law.hpp"

namespace fluxfocus::experiments {

enum class Scenario { Centered, Shifted, Ellipse };
enum class Engine { Analytic, Numeric };

const char* to_string(Scenario s);
const char* to_string(Engine e);

// 20 log10(|B| / 1 G); -inf for B = 0
double field_db(double tesla);

inline constexpr int default_smoothing_window = 5;
inline constexpr double default_line_offset = 5e-9;

struct NumericOptions {
    int nx = 100;
    int ny = 100;
    // finest grid spacing; by default half of min(d, Lambda, smallest aperture dimension / 4)
    std::optional<double> edge_spacing;
    double film_width = 90.0;   // in units of the largest aperture dimension
    double grid_width = 100.0;
    brandt::FieldConvention convention = brandt::FieldConvention::Reference;
    double aperture_pearl_factor = 1e6;
};

struct Material {
    double london_depth = default_london_depth;
    double thickness = default_thickness;
};

struct SweepConfig {
    Scenario scenario = Scenario::Centered;
    Engine engine = Engine::Analytic;
    double d = 100e-9;
    std::vector<double> radii;       // R for circles, a for the ellipse; strictly increasing
    double ellipse_semi_y = 100e-9;  // b, held fixed
    double moment = constants::nv_moment;
    double probe_y = 0.0;            // offset of the evaluation line from the midline
    Material material;
    NumericOptions numeric;
    int smoothing_window = 1;
    // multiplicative Gaussian noise on B, for exercising the fit
    double noise_fraction = 0.0;
    std::uint64_t seed = 0;
};

struct SweepPoint {
    double radius;
    double L;
    double B;        // tesla
    double sigma_B;  // tesla
};

struct SweepResult {
    Scenario scenario = Scenario::Centered;
    Engine engine = Engine::Analytic;
    double d = 0;
    std::vector<SweepPoint> points;
    std::optional<PowerLawFit> fit;
    std::vector<std::string> warnings;
};

// L from the aperture size: R - d (centred), 2 (R - d) (shifted and ellipse)
double separation(Scenario s, double radius, double d);

SweepResult sweep(const SweepConfig& config);
SweepResult sweep(Scenario scenario, double d, const std::vector<double>& radii, Engine engine);

std::vector<double> log_spaced(double lo, double hi, std::size_t n);

// Geometry, film, grid and source for one numeric evaluation
struct NumericSetup {
    ApertureGeometry geometry;
    FilmSpec film;
    GridSpec grid;
    Dipole dipole;
    Vec2 probe;
};

NumericSetup numeric_setup(Scenario scenario, double radius, const SweepConfig& config);
double default_edge_spacing(const ApertureGeometry& geometry, const FilmSpec& film, double d);

struct ComparePoint {
    double x, y, rho;
    double b_analytic;  // tesla
    double b_numeric;   // tesla, physical convention
};

struct ConventionStats {
    std::size_t band_points = 0;
    double median_abs_db = 0;
    double p90_abs_db = 0;
    double max_abs_db = 0;
    double sign_agreement = 0;
};

struct CompareConfig {
    Scenario scenario = Scenario::Centered;  // Centered or Shifted
    double radius = 1000e-9;
    double d = 100e-9;
    double line_y = default_line_offset;
    double band_lo = 0.1;  // in units of R
    double band_hi = 0.8;
    double moment = constants::nv_moment;
    Material material;
    NumericOptions numeric;
};

struct CompareReport {
    std::vector<ComparePoint> points;
    ConventionStats physical;
    ConventionStats reference;  // numeric field scaled to the reference source convention
    std::size_t exterior_points = 0;
    double exterior_analytic_max = 0;      // tesla
    double exterior_numeric_fraction = 0;  // max exterior |B| / peak |B| on the line
    double aperture_spread = 0;
    double reciprocal_condition = 0;
    std::vector<std::string> warnings;
};

CompareReport compare_engines(const CompareConfig& config);

struct CouplingEstimate {
    double separation = 0;  // m
    double field = 0;       // tesla at the partner
    double coupling = 0;    // Hz
};

// m |B| / h
CouplingEstimate coupling_estimate(double moment, double field, double separation);

enum class CouplingGeometry { Ellipse, DogBone };
const char* to_string(CouplingGeometry g);

struct CouplingConfig {
    CouplingGeometry geometry = CouplingGeometry::Ellipse;
    double separation = 300e-9;
    double d = 100e-9;                    // ellipse: source to tip; dog-bone: end radius
    double ellipse_semi_y = 100e-9;
    double channel_half_width = 25e-9;
    double moment = constants::nv_moment;
    Material material;
    NumericOptions numeric;
};

struct CouplingReport {
    CouplingEstimate estimate;
    CouplingEstimate free_space;  // same separation, no film, equatorial field
    double enhancement = 0;
    std::string geometry;
    std::vector<std::string> warnings;
};

CouplingReport numeric_coupling(const CouplingConfig& config);

}  // namespace fluxfocus::experiments
