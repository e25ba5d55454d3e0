#include "fluxfocus/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fluxfocus/analytic.hpp"
#include "fluxfocus/errors.hpp"

namespace fluxfocus::experiments {

using constants::mu0;

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::Centered: return "centered";
        case Scenario::Shifted: return "shifted";
        case Scenario::Ellipse: return "ellipse";
    }
    return "?";
}

const char* to_string(Engine e) { return e == Engine::Analytic ? "analytic" : "numeric"; }

const char* to_string(CouplingGeometry g) { return g == CouplingGeometry::Ellipse ? "ellipse" : "dogbone"; }

double field_db(double tesla) {
    if (tesla == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(std::abs(tesla) / constants::gauss);
}

double separation(Scenario s, double radius, double d) {
    return s == Scenario::Centered ? radius - d : 2.0 * (radius - d);
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_spaced needs 0 < lo < hi and n >= 2");
    std::vector<double> v(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

double default_edge_spacing(const ApertureGeometry& geometry, const FilmSpec& film, double d) {
    double smallest = 0;
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Circle>)
                smallest = g.radius;
            else if constexpr (std::is_same_v<T, Ellipse>)
                smallest = std::min(g.semi_x, g.semi_y);
            else
                smallest = std::min(g.end_radius, g.channel_half_width);
        },
        geometry);
    return 0.5 * std::min({d, film.pearl_length, smallest / 4.0});
}

namespace {

FilmSpec film_for(const ApertureGeometry& geo, const Material& mat, const NumericOptions& num) {
    return FilmSpec::for_geometry(geo, mat.london_depth, mat.thickness, num.film_width, num.grid_width);
}

GridSpec grid_spec_for(const ApertureGeometry& geo, const FilmSpec& film, double d,
                       const NumericOptions& num, std::vector<double> kx, std::vector<double> ky) {
    GridSpec gs;
    gs.nx = num.nx;
    gs.ny = num.ny;
    gs.extra_knots_x = std::move(kx);
    gs.extra_knots_y = std::move(ky);
    const double h = num.edge_spacing.value_or(default_edge_spacing(geo, film, d));
    if (!(h > 0.0)) throw ConfigError("edge spacing must be positive");
    gs.edge_spacing_x = h;
    gs.edge_spacing_y = h;
    return gs;
}

brandt::SolveOptions solve_options(const NumericOptions& num) {
    brandt::SolveOptions so;
    so.convention = num.convention;
    so.aperture_pearl_factor = num.aperture_pearl_factor;
    return so;
}

void check_sweep(const SweepConfig& c) {
    if (!(c.d > 0.0)) throw ConfigError("sweep: d must be positive");
    if (c.radii.empty()) throw ConfigError("sweep: empty radius list");
    for (std::size_t k = 0; k < c.radii.size(); ++k) {
        if (!(c.radii[k] > c.d)) throw ConfigError("sweep: every radius must exceed d");
        if (k > 0 && !(c.radii[k] > c.radii[k - 1]))
            throw ConfigError("sweep: radii must be strictly increasing");
    }
    if (c.engine == Engine::Analytic && c.scenario == Scenario::Ellipse)
        throw ConfigError("sweep: the analytic engine has no closed form for an ellipse");
    if (c.scenario == Scenario::Ellipse && !(c.ellipse_semi_y > 0.0))
        throw ConfigError("sweep: ellipse semi axis b must be positive");
    if (!(c.moment != 0.0) || !std::isfinite(c.moment)) throw ConfigError("sweep: moment must be nonzero");
    if (!(c.noise_fraction >= 0.0)) throw ConfigError("sweep: noise fraction must be >= 0");
}

double analytic_point(const SweepConfig& c, double R) {
    const Vec3 m(0.0, 0.0, c.moment);
    const double xp = R - c.d;
    if (c.scenario == Scenario::Centered) {
        if (c.probe_y == 0.0) return analytic::field_inplane(analytic::Orientation::Z, c.moment, xp, R).z();
        return analytic::field_centered(m, Vec3(xp, c.probe_y, 0.0), R).z();
    }
    return analytic::field_shifted(m, -xp, Vec3(xp, c.probe_y, 0.0), R).z();
}

}  // namespace

NumericSetup numeric_setup(Scenario scenario, double radius, const SweepConfig& c) {
    NumericSetup s;
    double xd = 0.0, xp = radius - c.d;
    switch (scenario) {
        case Scenario::Centered: s.geometry = Circle{radius}; break;
        case Scenario::Shifted:
            s.geometry = Circle{radius};
            xd = -xp;
            break;
        case Scenario::Ellipse:
            s.geometry = Ellipse{radius, c.ellipse_semi_y};
            xd = -xp;
            break;
    }
    validate(s.geometry);
    s.film = film_for(s.geometry, c.material, c.numeric);
    std::vector<double> ky{0.0};
    if (c.probe_y != 0.0) ky.push_back(c.probe_y);
    s.grid = grid_spec_for(s.geometry, s.film, c.d, c.numeric, {xd, xp}, ky);
    s.dipole = Dipole::in_plane({xd, 0.0}, c.moment);
    s.probe = Vec2(xp, c.probe_y);
    return s;
}

SweepResult sweep(const SweepConfig& c) {
    check_sweep(c);
    SweepResult out;
    out.scenario = c.scenario;
    out.engine = c.engine;
    out.d = c.d;
    std::vector<SeriesPoint> series;
    for (double R : c.radii) {
        double B;
        if (c.engine == Engine::Analytic) {
            B = analytic_point(c, R);
        } else {
            const auto s = numeric_setup(c.scenario, R, c);
            auto grid = make_grid(s.geometry, s.film, s.grid);
            brandt::StreamSystem sys(s.geometry, s.film, grid, solve_options(c.numeric));
            const auto sol = sys.solve(s.dipole);
            B = mu0 * sys.field_at(sol, s.dipole, s.probe);
            for (const auto& w : sol.warnings) {
                std::ostringstream os;
                os << "R=" << R << " m: " << w;
                out.warnings.push_back(os.str());
            }
        }
        series.push_back({separation(c.scenario, R, c.d), B, 0.0});
    }
    if (c.noise_fraction > 0.0) {
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& p : series) {
            p.sigma = c.noise_fraction * std::abs(p.y);
            p.y *= 1.0 + c.noise_fraction * normal(rng);
        }
    }
    if (c.smoothing_window > 1) series = smooth(series, c.smoothing_window);
    for (std::size_t k = 0; k < series.size(); ++k)
        out.points.push_back({c.radii[k], series[k].x, series[k].y, series[k].sigma});
    if (series.size() >= min_fit_points) out.fit = fit_power_law(series);
    return out;
}

SweepResult sweep(Scenario scenario, double d, const std::vector<double>& radii, Engine engine) {
    SweepConfig c;
    c.scenario = scenario;
    c.d = d;
    c.radii = radii;
    c.engine = engine;
    return sweep(c);
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ConventionStats band_stats(const std::vector<ComparePoint>& pts, double lo, double hi, double scale) {
    std::vector<double> diff;
    std::size_t agree = 0;
    for (const auto& p : pts) {
        if (!(p.rho > lo && p.rho < hi)) continue;
        const double bn = scale * p.b_numeric;
        diff.push_back(std::abs(field_db(bn) - field_db(p.b_analytic)));
        if ((bn > 0) == (p.b_analytic > 0) && bn != 0.0 && p.b_analytic != 0.0) ++agree;
    }
    ConventionStats s;
    s.band_points = diff.size();
    if (diff.empty()) return s;
    s.median_abs_db = quantile(diff, 0.5);
    s.p90_abs_db = quantile(diff, 0.9);
    s.max_abs_db = *std::max_element(diff.begin(), diff.end());
    s.sign_agreement = static_cast<double>(agree) / static_cast<double>(diff.size());
    return s;
}

}  // namespace

CompareReport compare_engines(const CompareConfig& c) {
    if (c.scenario == Scenario::Ellipse) throw ConfigError("compare: needs a circular aperture");
    if (!(c.radius > c.d) || !(c.d > 0.0)) throw ConfigError("compare: need 0 < d < R");
    if (!(c.band_lo >= 0.0 && c.band_hi > c.band_lo)) throw ConfigError("compare: invalid band");

    SweepConfig sc;
    sc.scenario = c.scenario;
    sc.d = c.d;
    sc.moment = c.moment;
    sc.probe_y = c.line_y;
    sc.material = c.material;
    sc.numeric = c.numeric;
    sc.numeric.convention = brandt::FieldConvention::Physical;
    const auto s = numeric_setup(c.scenario, c.radius, sc);
    auto grid = make_grid(s.geometry, s.film, s.grid);
    brandt::StreamSystem sys(s.geometry, s.film, grid, solve_options(sc.numeric));
    const auto sol = sys.solve(s.dipole);

    CompareReport rep;
    rep.aperture_spread = sol.aperture_spread;
    rep.reciprocal_condition = sys.reciprocal_condition();
    rep.warnings = sol.warnings;

    const double R = c.radius;
    const Vec3 m(0.0, 0.0, c.moment);
    const double x0 = s.dipole.position.x();
    for (double x : grid->x) {
        if (std::abs(x) >= grid->film_half_extent) continue;
        const Vec3 r(x, c.line_y, 0.0);
        double ba;
        try {
            ba = c.scenario == Scenario::Centered ? analytic::field_centered(m, r, R).z()
                                                  : analytic::field_shifted(m, x0, r, R).z();
        } catch (const SingularityError&) {
            continue;
        }
        const double bn = mu0 * sys.field_at(sol, s.dipole, Vec2(x, c.line_y));
        rep.points.push_back({x, c.line_y, std::hypot(x, c.line_y), ba, bn});
    }

    rep.physical = band_stats(rep.points, c.band_lo * R, c.band_hi * R, 1.0);
    rep.reference = band_stats(rep.points, c.band_lo * R, c.band_hi * R,
                           brandt::applied_prefactor(brandt::FieldConvention::Reference) /
                               brandt::applied_prefactor(brandt::FieldConvention::Physical));

    double peak = 0, ext = 0;
    for (const auto& p : rep.points) {
        peak = std::max(peak, std::abs(p.b_numeric));
        if (p.rho > R) {
            ++rep.exterior_points;
            ext = std::max(ext, std::abs(p.b_numeric));
            rep.exterior_analytic_max = std::max(rep.exterior_analytic_max, std::abs(p.b_analytic));
        }
    }
    rep.exterior_numeric_fraction = peak > 0 ? ext / peak : 0.0;
    return rep;
}

CouplingEstimate coupling_estimate(double moment, double field, double L) {
    if (!(L > 0.0)) throw ConfigError("coupling: separation must be positive");
    if (!std::isfinite(field) || !std::isfinite(moment)) throw ConfigError("coupling: non-finite input");
    return {L, field, std::abs(moment * field) / constants::planck};
}

CouplingReport numeric_coupling(const CouplingConfig& c) {
    if (!(c.separation > 0.0) || !(c.d > 0.0)) throw ConfigError("coupling: lengths must be positive");
    const double half = 0.5 * c.separation;
    ApertureGeometry geo;
    if (c.geometry == CouplingGeometry::Ellipse)
        geo = Ellipse{half + c.d, c.ellipse_semi_y};
    else
        geo = DogBone{c.d, c.separation, c.channel_half_width};
    validate(geo);
    const auto film = film_for(geo, c.material, c.numeric);
    const auto gs = grid_spec_for(geo, film, c.d, c.numeric, {-half, half}, {0.0});
    auto grid = make_grid(geo, film, gs);
    brandt::SolveOptions so;
    so.convention = c.numeric.convention;
    so.aperture_pearl_factor = c.numeric.aperture_pearl_factor;
    brandt::StreamSystem sys(geo, film, grid, so);
    const auto dip = Dipole::in_plane({-half, 0.0}, c.moment);
    const auto sol = sys.solve(dip);
    const double B = mu0 * sys.field_at(sol, dip, Vec2(half, 0.0));

    CouplingReport rep;
    rep.geometry = describe(geo);
    rep.estimate = coupling_estimate(c.moment, B, c.separation);
    const double bfree = mu0 * c.moment / (4.0 * constants::pi * std::pow(c.separation, 3));
    rep.free_space = coupling_estimate(c.moment, bfree, c.separation);
    rep.enhancement = rep.estimate.coupling / rep.free_space.coupling;
    rep.warnings = sol.warnings;
    return rep;
}

}  // namespace fluxfocus::experiments
