#include "fluxfocus/io/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <Eigen/Core>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxfocus/analytic.hpp"
#include "fluxfocus/brandt.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/experiments.hpp"
#include "fluxfocus/io/output.hpp"

namespace fluxfocus::io {
namespace {

namespace fs = std::filesystem;
using constants::mu0;
constexpr double nm_per_m = 1e9;  // dividing rounds once, so 1000 nm gives the literal 1e-6

class Writer {
public:
    // fail before any computation if the directory is not writable
    explicit Writer(fs::path dir) : dir_(std::move(dir)) {
        write_atomic(dir_ / ".fluxfocus-probe", "");
        std::error_code ec;
        fs::remove(dir_ / ".fluxfocus-probe", ec);
    }
    void text(const std::string& name, const std::string& content) {
        write_atomic(dir_ / name, content);
        names_.push_back(name);
    }
    void csv(const std::string& name, const CsvTable& t) { text(name, to_csv(t)); }
    void json(const std::string& name, const Json& j) { text(name, dump(j)); }
    const std::vector<std::string>& names() const { return names_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

std::string run_analytic(const ScenarioConfig& c, Writer& w) {
    const double R = c.geometry.radius_nm / nm_per_m;
    const double m = c.dipoles.front().moment;
    const auto& a = c.analytic;
    const bool db = c.output.db;
    CsvTable t;
    t.meta.push_back("source: z dipole at the centre of a circular aperture, R = " + format_number(R) + " m");
    t.meta.push_back("moment: " + format_number(m) + " A m^2");
    if (a.mode == "line") {
        const double y = a.line_y_nm / nm_per_m;
        t.meta.push_back("quantity: B_" + a.orientation + " along y = " + format_number(y) + " m, z = 0");
        t.meta.push_back("unit: T");
        t.meta.push_back(db ? "value_db: 20*log10(|value| / 1e-4 T)" : "value_db: absent");
        t.columns = {"x_m", "y_m", "value"};
        if (db) t.columns.push_back("value_db");
        const auto rho = experiments::log_spaced(a.rho_min_nm / nm_per_m, a.rho_max_nm / nm_per_m, static_cast<std::size_t>(a.samples));
        const int comp = a.orientation == "z" ? 2 : a.orientation == "y" ? 1 : 0;
        for (double x : rho) {
            double v;
            if (y == 0.0) {
                const auto o = a.orientation == "z"   ? analytic::Orientation::Z
                               : a.orientation == "y" ? analytic::Orientation::Y
                                                      : analytic::Orientation::X;
                v = analytic::field_inplane(o, m, x, R)[comp];
            } else {
                try {
                    v = analytic::field_centered(Vec3(0, 0, m), Vec3(x, y, 0.0), R).z();
                } catch (const SingularityError&) {
                    v = std::nan("");
                }
            }
            std::vector<double> row{x, y, v};
            if (db) row.push_back(experiments::field_db(v));
            t.rows.push_back(std::move(row));
        }
        w.csv("analytic_line.csv", t);
        return "analytic line: " + std::to_string(t.rows.size()) + " samples";
    }
    t.meta.push_back("quantity: (B_x, B_z) in the x-z plane (y = 0); nan on the edge circle");
    t.meta.push_back("unit: T");
    t.meta.push_back(db ? "b_db: 20*log10(|B| / 1e-4 T)" : "b_db: absent");
    t.columns = {"x_m", "z_m", "bx", "bz"};
    if (db) t.columns.push_back("b_db");
    const double hw = a.map_half_width_nm / nm_per_m;
    const int n = a.map_points;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double x = -hw + 2.0 * hw * i / (n - 1);
            const double z = -hw + 2.0 * hw * k / (n - 1);
            Vec3 b = Vec3::Constant(std::nan(""));
            if (x != 0.0 || z != 0.0) {
                try {
                    b = analytic::field_centered(Vec3(0, 0, m), Vec3(x, 0.0, z), R);
                } catch (const SingularityError&) {
                }
            }
            std::vector<double> row{x, z, b.x(), b.z()};
            if (db) row.push_back(experiments::field_db(b.norm()));
            t.rows.push_back(std::move(row));
        }
    }
    w.csv("analytic_map.csv", t);
    return "analytic map: " + std::to_string(n) + "x" + std::to_string(n) + " points";
}

std::string run_solve(const ScenarioConfig& c, Writer& w) {
    const auto geo = to_geometry(c.geometry);
    const auto num = to_numeric(c);
    const auto mat = to_material(c.film);
    const auto film = FilmSpec::for_geometry(geo, mat.london_depth, mat.thickness, num.film_width, num.grid_width);
    std::vector<Dipole> dips;
    std::vector<double> kx, ky{0.0};
    for (const auto& d : c.dipoles) {
        dips.push_back(Dipole::in_plane({d.x_nm / nm_per_m, d.y_nm / nm_per_m}, d.moment));
        kx.push_back(d.x_nm / nm_per_m);
        ky.push_back(d.y_nm / nm_per_m);
    }
    const double line_y = c.solve.line_y_nm / nm_per_m;
    ky.push_back(line_y);
    GridSpec gs;
    gs.nx = num.nx;
    gs.ny = num.ny;
    gs.extra_knots_x = kx;
    gs.extra_knots_y = ky;
    // the solve command has no probe distance; refine on Lambda and the aperture size only
    const double h = num.edge_spacing.value_or(
        experiments::default_edge_spacing(geo, film, std::numeric_limits<double>::infinity()));
    gs.edge_spacing_x = h;
    gs.edge_spacing_y = h;
    auto grid = make_grid(geo, film, gs);
    brandt::SolveOptions so;
    so.convention = num.convention;
    so.aperture_pearl_factor = num.aperture_pearl_factor;
    brandt::StreamSystem sys(geo, film, grid, so);

    std::vector<double> g(grid->size(), 0.0), hz(grid->size(), 0.0);
    std::vector<brandt::StreamSolution> sols;
    for (const auto& d : dips) {
        sols.push_back(sys.solve(d));
        for (std::size_t k = 0; k < grid->size(); ++k) {
            g[k] += sols.back().g.values[k];
            hz[k] += sols.back().h_z.values[k];
        }
    }
    const FieldMap gm(grid, g, "g", "A");
    const FieldMap hm(grid, hz, "H_z", "A/m");
    w.csv("g.csv", field_map_table(gm, false, 1.0));
    w.csv("hz.csv", field_map_table(hm, c.output.db, mu0));

    CsvTable line;
    line.meta.push_back("quantity: H_z along y = " + format_number(line_y) + " m");
    line.meta.push_back("unit: A/m");
    line.meta.push_back(c.output.db ? "value_db: 20*log10(|value * mu0| / 1e-4 T)" : "value_db: absent");
    line.meta.push_back(std::string("convention: ") + brandt::to_string(num.convention));
    line.columns = {"x_m", "y_m", "value"};
    if (c.output.db) line.columns.push_back("value_db");
    for (double x : grid->x) {
        if (std::abs(x) >= grid->film_half_extent) continue;
        double v = 0;
        for (std::size_t k = 0; k < dips.size(); ++k) v += sys.field_at(sols[k], dips[k], Vec2(x, line_y));
        std::vector<double> row{x, line_y, v};
        if (c.output.db) row.push_back(experiments::field_db(mu0 * v));
        line.rows.push_back(std::move(row));
    }
    w.csv("line.csv", line);

    Json s;
    s["geometry"] = describe(geo);
    s["convention"] = brandt::to_string(num.convention);
    s["grid"] = {{"nx", grid->nx()}, {"ny", grid->ny()}, {"half_extent_m", grid->half_extent},
                 {"film_half_extent_m", grid->film_half_extent}, {"min_spacing_x_m", grid->min_spacing_x()},
                 {"min_spacing_y_m", grid->min_spacing_y()}};
    s["pearl_length_m"] = film.pearl_length;
    s["unknowns"] = sys.unknowns();
    s["reciprocal_condition"] = sys.reciprocal_condition();
    Json per = Json::array();
    for (const auto& sol : sols)
        per.push_back({{"aperture_currents_a", sol.aperture_currents},
                       {"aperture_spread", sol.aperture_spread},
                       {"london_residual", sol.london_residual}});
    s["per_dipole"] = per;
    s["divergence_residual"] = brandt::current_divergence_residual(gm);
    std::vector<std::string> warns = sys.warnings();
    for (const auto& sol : sols) warns.insert(warns.end(), sol.warnings.begin(), sol.warnings.end());
    s["warnings"] = warns;
    s["validity_notes"] = validity_notes(film);
    w.json("solve.json", s);
    std::ostringstream os;
    os << "solve: " << sys.unknowns() << " unknowns, rcond " << sys.reciprocal_condition();
    return os.str();
}

std::string run_sweep(const ScenarioConfig& c, Writer& w) {
    const auto r = experiments::sweep(to_sweep(c));
    CsvTable t;
    t.meta.push_back(std::string("scenario: ") + experiments::to_string(r.scenario));
    t.meta.push_back(std::string("engine: ") + experiments::to_string(r.engine));
    t.meta.push_back("d_m: " + format_number(r.d));
    t.meta.push_back(c.output.db ? "B_db: 20*log10(|B| / 1e-4 T)" : "B_db: absent");
    t.columns = {"radius_m", "L_m", "B_t", "sigma_B_t"};
    if (c.output.db) t.columns.push_back("B_db");
    for (const auto& p : r.points) {
        std::vector<double> row{p.radius, p.L, p.B, p.sigma_B};
        if (c.output.db) row.push_back(experiments::field_db(p.B));
        t.rows.push_back(std::move(row));
    }
    w.csv("sweep.csv", t);
    w.json("sweep.json", sweep_json(r, c.sweep));
    std::ostringstream os;
    os << "sweep: " << r.points.size() << " points";
    if (r.fit) os << ", slope " << r.fit->slope << " +- " << r.fit->slope_err;
    return os.str();
}

std::string run_compare(const ScenarioConfig& c, Writer& w) {
    const auto r = experiments::compare_engines(to_compare(c));
    CsvTable t;
    t.meta.push_back("scenario: " + c.compare.scenario);
    t.meta.push_back("unit: T; numeric field in the physical convention (reference convention = -2x)");
    t.meta.push_back(c.output.db ? "db columns: 20*log10(|B| / 1e-4 T)" : "db columns: absent");
    t.columns = {"x_m", "y_m", "rho_m", "b_analytic_t", "b_numeric_t"};
    if (c.output.db) {
        t.columns.push_back("db_analytic");
        t.columns.push_back("db_numeric");
    }
    for (const auto& p : r.points) {
        std::vector<double> row{p.x, p.y, p.rho, p.b_analytic, p.b_numeric};
        if (c.output.db) {
            row.push_back(experiments::field_db(p.b_analytic));
            row.push_back(experiments::field_db(p.b_numeric));
        }
        t.rows.push_back(std::move(row));
    }
    w.csv("compare.csv", t);
    w.json("compare.json", compare_json(r, c.compare));
    std::ostringstream os;
    os << "compare: median |dB| " << r.physical.median_abs_db << " (physical), " << r.reference.median_abs_db
       << " (reference); sign agreement " << r.physical.sign_agreement;
    return os.str();
}

std::string run_coupling(const ScenarioConfig& c, Writer& w) {
    const auto r = experiments::numeric_coupling(to_coupling(c));
    w.json("coupling.json", coupling_json(r));
    std::ostringstream os;
    os << "coupling: " << r.estimate.coupling << " Hz at " << r.estimate.separation << " m (free space "
       << r.free_space.coupling << " Hz)";
    return os.str();
}

}  // namespace

int resolve_threads(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw ConfigError("--threads must be >= 1");
        return *requested;
    }
    if (const char* env = std::getenv(threads_env)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw ConfigError(std::string(threads_env) + " must be a positive integer");
        return static_cast<int>(v);
    }
    return 1;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    Eigen::setNbThreads(threads);
}

RunReport run(Command command, const ScenarioConfig& config, int threads) {
    validate(config, command);
    apply_threads(threads);
    Writer w(config.output.dir);
    RunReport rep;
    switch (command) {
        case Command::Analytic: rep.summary = run_analytic(config, w); break;
        case Command::Solve: rep.summary = run_solve(config, w); break;
        case Command::Sweep: rep.summary = run_sweep(config, w); break;
        case Command::Compare: rep.summary = run_compare(config, w); break;
        case Command::Coupling: rep.summary = run_coupling(config, w); break;
    }
    auto outputs = w.names();
    w.json("manifest.json", manifest_json(command, config, outputs, threads));
    rep.outputs = w.names();
    return rep;
}

int exit_code_for(const std::exception& e, std::string& message) {
    if (const auto* s = dynamic_cast<const SolverError*>(&e)) {
        std::ostringstream os;
        os << "solver failure: " << s->what() << " (reciprocal condition estimate " << s->reciprocal_condition << ")";
        message = os.str();
        return exit_solver;
    }
    if (dynamic_cast<const IoError*>(&e)) {
        message = std::string("i/o error: ") + e.what();
        return exit_io;
    }
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) {
        message = std::string("invalid configuration: ") + e.what();
        return exit_config;
    }
    if (dynamic_cast<const SingularityError*>(&e)) {
        message = std::string("singular configuration: ") + e.what();
        return exit_config;
    }
    if (dynamic_cast<const std::bad_alloc*>(&e)) {
        message = "out of memory (reduce --grid)";
        return exit_solver;
    }
    message = std::string("internal error: ") + e.what();
    return exit_solver;
}

}  // namespace fluxfocus::io
