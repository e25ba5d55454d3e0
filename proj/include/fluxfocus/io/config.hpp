#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fluxfocus/constants.hpp"
#include "fluxfocus/experiments.hpp"
#include "fluxfocus/geometry.hpp"

// Scenario configuration as read from JSON. Lengths are kept in the units of
// the file (nanometres) so that a written manifest parses back to the same
// values; conversion to SI happens in the to_* functions below.
namespace fluxfocus::io {

using Json = nlohmann::ordered_json;

enum class Command { Analytic, Solve, Sweep, Compare, Coupling };
std::optional<Command> parse_command(std::string_view name);
const char* to_string(Command c);

struct GeometrySection {
    std::string shape = "circle";  // circle | ellipse | dogbone
    double radius_nm = 1000;
    double a_nm = 1000;
    double b_nm = 100;
    double end_radius_nm = 100;
    double center_distance_nm = 300;
    double channel_half_width_nm = 25;
};

struct FilmSection {
    double london_depth_nm = 50;
    double thickness_nm = 80;
    double film_width = 90;   // multiples of the largest aperture dimension
    double grid_width = 100;
};

struct DipoleSection {
    double x_nm = 0;
    double y_nm = 0;
    double moment = constants::nv_moment;  // A m^2, along +z
};

struct GridSection {
    int nx = 100;
    int ny = 100;
    std::optional<double> edge_spacing_nm;
};

struct SolverSection {
    std::string convention = "reference";  // reference | physical
    double aperture_pearl_factor = 1e6;
};

struct SolveSection {
    double line_y_nm = 5;
};

struct AnalyticSection {
    std::string mode = "line";         // line: B along y = line_y; map: (B_x, B_z) in the x-z plane
    std::string orientation = "z";     // line mode, z | y | x (x and y need line_y = 0)
    double rho_min_nm = 10;
    double rho_max_nm = 1500;
    int samples = 300;
    double line_y_nm = 0;
    double map_half_width_nm = 2000;
    int map_points = 81;
};

struct SweepSection {
    std::string scenario = "centered";  // centered | shifted | ellipse
    std::string engine = "numeric";     // analytic | numeric
    double d_nm = 100;
    std::vector<double> radii_nm;
    double ellipse_b_nm = 100;
    double probe_y_nm = 0;
    int smoothing_window = 1;
    double noise_fraction = 0;
    std::optional<double> expected_slope;
    std::optional<double> slope_tolerance;
};

struct CompareSection {
    std::string scenario = "centered";
    double d_nm = 100;
    double line_y_nm = 5;
    double band_lo = 0.1;
    double band_hi = 0.8;
};

struct CouplingSection {
    std::string geometry = "ellipse";  // ellipse | dogbone
    double separation_nm = 300;
    double d_nm = 100;
    double ellipse_b_nm = 100;
    double channel_half_width_nm = 25;
};

struct OutputSection {
    std::string dir = "out";
    bool db = true;  // add dB columns (derived data)
};

struct ScenarioConfig {
    std::string preset;
    GeometrySection geometry;
    FilmSection film;
    std::vector<DipoleSection> dipoles{DipoleSection{}};
    GridSection grid;
    SolverSection solver;
    SolveSection solve;
    AnalyticSection analytic;
    SweepSection sweep;
    CompareSection compare;
    CouplingSection coupling;
    OutputSection output;
    std::uint64_t seed = 0;
};

// Parse a config file or a run manifest (its "config" member). A "preset" key
// selects a preset that the remaining keys override. Syntax errors carry
// source:line:column, value errors the JSON path. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text, std::string_view source = "config");

// Preset (may be empty) overridden by the parsed document (may be null)
ScenarioConfig resolve_config(const std::string& preset, const Json& overrides,
                              std::string_view source = "config");

Json to_json(const ScenarioConfig& c);

// true when the text has no content beyond whitespace or an empty object
bool is_empty_config(std::string_view text);

// command-specific checks (engine/geometry compatibility and the like)
void validate(const ScenarioConfig& c, Command command);

// SI views
ApertureGeometry to_geometry(const GeometrySection& g);
experiments::Material to_material(const FilmSection& f);
experiments::NumericOptions to_numeric(const ScenarioConfig& c);
experiments::SweepConfig to_sweep(const ScenarioConfig& c);
experiments::CompareConfig to_compare(const ScenarioConfig& c);
experiments::CouplingConfig to_coupling(const ScenarioConfig& c);
brandt::FieldConvention to_convention(const std::string& name);

}  // namespace fluxfocus::io
