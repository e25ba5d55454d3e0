#include "fluxfocus/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include "fluxfocus/errors.hpp"
#include "fluxfocus/io/presets.hpp"

namespace fluxfocus::io {

std::optional<Command> parse_command(std::string_view n) {
    if (n == "analytic") return Command::Analytic;
    if (n == "solve") return Command::Solve;
    if (n == "sweep") return Command::Sweep;
    if (n == "compare") return Command::Compare;
    if (n == "coupling") return Command::Coupling;
    return std::nullopt;
}

const char* to_string(Command c) {
    switch (c) {
        case Command::Analytic: return "analytic";
        case Command::Solve: return "solve";
        case Command::Sweep: return "sweep";
        case Command::Compare: return "compare";
        case Command::Coupling: return "coupling";
    }
    return "?";
}

namespace {

constexpr double nm_per_m = 1e9;  // dividing rounds once, so 1000 nm gives the literal 1e-6

// walks one JSON object, remembering the path for diagnostics
class Reader {
public:
    Reader(const Json& j, std::string path, std::string_view source)
        : j_(j), path_(std::move(path)), source_(source) {
        if (!j_.is_object()) fail("", "expected an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        std::ostringstream os;
        os << source_ << ": " << path_ << (key.empty() ? "" : "/" + key) << ": " << what;
        throw ConfigError(os.str());
    }

    void allow(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
                fail(it.key(), "unknown key");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) fail(key, "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(key, "must be finite");
    }

    void positive(const char* key, double& out) const {
        number(key, out);
        if (!(out > 0.0)) fail(key, "must be positive");
    }

    void optional_positive(const char* key, std::optional<double>& out) const {
        if (!has(key)) return;
        double v = 0;
        positive(key, v);
        out = v;
    }

    void optional_number(const char* key, std::optional<double>& out) const {
        if (!has(key)) return;
        double v = 0;
        number(key, v);
        out = v;
    }

    void integer(const char* key, int& out, int lo, int hi) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        const auto x = v.get<long long>();
        if (x < lo || x > hi) {
            std::ostringstream os;
            os << "must lie in [" << lo << ", " << hi << "]";
            fail(key, os.str());
        }
        out = static_cast<int>(x);
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
        out = j_.at(key).get<bool>();
    }

    void choice(const char* key, std::string& out, std::initializer_list<const char*> options) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_string()) fail(key, "expected a string");
        const auto s = v.get<std::string>();
        if (std::none_of(options.begin(), options.end(), [&](const char* o) { return s == o; })) {
            std::string list;
            for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
            fail(key, "must be one of: " + list);
        }
        out = s;
    }

    void text(const char* key, std::string& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_string()) fail(key, "expected a string");
        out = j_.at(key).get<std::string>();
    }

    std::optional<Reader> child(const char* key) const {
        if (!has(key)) return std::nullopt;
        return Reader(j_.at(key), path_ + "/" + key, source_);
    }

    const Json& at(const char* key) const { return j_.at(key); }
    const std::string& path() const { return path_; }
    std::string_view source() const { return source_; }

private:
    const Json& j_;
    std::string path_;
    std::string_view source_;
};

void read_geometry(const Reader& r, GeometrySection& g) {
    r.allow({"shape", "radius_nm", "a_nm", "b_nm", "end_radius_nm", "center_distance_nm",
             "channel_half_width_nm"});
    r.choice("shape", g.shape, {"circle", "ellipse", "dogbone"});
    r.positive("radius_nm", g.radius_nm);
    r.positive("a_nm", g.a_nm);
    r.positive("b_nm", g.b_nm);
    r.positive("end_radius_nm", g.end_radius_nm);
    r.positive("center_distance_nm", g.center_distance_nm);
    r.positive("channel_half_width_nm", g.channel_half_width_nm);
}

void read_film(const Reader& r, FilmSection& f) {
    r.allow({"london_depth_nm", "thickness_nm", "film_width", "grid_width"});
    r.positive("london_depth_nm", f.london_depth_nm);
    r.positive("thickness_nm", f.thickness_nm);
    r.positive("film_width", f.film_width);
    r.positive("grid_width", f.grid_width);
    if (!(f.grid_width >= f.film_width)) r.fail("grid_width", "must be at least film_width");
    if (!(f.film_width > 2.0)) r.fail("film_width", "must exceed 2 (the aperture must fit inside the film)");
}

void read_dipoles(const Reader& r, const char* key, std::vector<DipoleSection>& out) {
    if (!r.has(key)) return;
    const auto& arr = r.at(key);
    if (!arr.is_array() || arr.empty()) r.fail(key, "expected a non-empty array");
    out.clear();
    for (std::size_t k = 0; k < arr.size(); ++k) {
        Reader e(arr[k], r.path() + "/" + key + "/" + std::to_string(k), r.source());
        e.allow({"x_nm", "y_nm", "moment"});
        DipoleSection d;
        e.number("x_nm", d.x_nm);
        e.number("y_nm", d.y_nm);
        e.number("moment", d.moment);
        if (d.moment == 0.0) e.fail("moment", "must be nonzero");
        out.push_back(d);
    }
}

void read_grid(const Reader& r, GridSection& g) {
    r.allow({"nx", "ny", "edge_spacing_nm"});
    r.integer("nx", g.nx, 16, 400);
    r.integer("ny", g.ny, 16, 400);
    r.optional_positive("edge_spacing_nm", g.edge_spacing_nm);
}

void read_radii(const Reader& r, std::vector<double>& out) {
    if (!r.has("radii_nm")) return;
    const auto& arr = r.at("radii_nm");
    if (!arr.is_array()) r.fail("radii_nm", "expected an array of numbers");
    out.clear();
    for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) r.fail("radii_nm/" + std::to_string(k), "expected a number");
        const double v = arr[k].get<double>();
        if (!(v > 0.0) || !std::isfinite(v)) r.fail("radii_nm/" + std::to_string(k), "must be positive");
        if (k > 0 && !(v > out.back())) r.fail("radii_nm/" + std::to_string(k), "radii must be strictly increasing");
        out.push_back(v);
    }
}

void read_sweep(const Reader& r, SweepSection& s) {
    r.allow({"scenario", "engine", "d_nm", "radii_nm", "ellipse_b_nm", "probe_y_nm", "smoothing_window",
             "noise_fraction", "expected_slope", "slope_tolerance"});
    r.choice("scenario", s.scenario, {"centered", "shifted", "ellipse"});
    r.choice("engine", s.engine, {"analytic", "numeric"});
    r.positive("d_nm", s.d_nm);
    read_radii(r, s.radii_nm);
    r.positive("ellipse_b_nm", s.ellipse_b_nm);
    r.number("probe_y_nm", s.probe_y_nm);
    r.integer("smoothing_window", s.smoothing_window, 1, 101);
    if (s.smoothing_window % 2 == 0) r.fail("smoothing_window", "must be odd");
    r.number("noise_fraction", s.noise_fraction);
    if (s.noise_fraction < 0.0) r.fail("noise_fraction", "must be >= 0");
    r.optional_number("expected_slope", s.expected_slope);
    r.optional_positive("slope_tolerance", s.slope_tolerance);
}

void read_analytic(const Reader& r, AnalyticSection& a) {
    r.allow({"mode", "orientation", "rho_min_nm", "rho_max_nm", "samples", "line_y_nm", "map_half_width_nm",
             "map_points"});
    r.choice("mode", a.mode, {"line", "map"});
    r.choice("orientation", a.orientation, {"z", "y", "x"});
    r.positive("rho_min_nm", a.rho_min_nm);
    r.positive("rho_max_nm", a.rho_max_nm);
    if (!(a.rho_max_nm > a.rho_min_nm)) r.fail("rho_max_nm", "must exceed rho_min_nm");
    r.integer("samples", a.samples, 2, 1000000);
    r.number("line_y_nm", a.line_y_nm);
    r.positive("map_half_width_nm", a.map_half_width_nm);
    r.integer("map_points", a.map_points, 2, 4001);
}

void read_compare(const Reader& r, CompareSection& c) {
    r.allow({"scenario", "d_nm", "line_y_nm", "band_lo", "band_hi"});
    r.choice("scenario", c.scenario, {"centered", "shifted"});
    r.positive("d_nm", c.d_nm);
    r.number("line_y_nm", c.line_y_nm);
    r.number("band_lo", c.band_lo);
    r.number("band_hi", c.band_hi);
    if (!(c.band_lo >= 0.0 && c.band_hi > c.band_lo)) r.fail("band_hi", "need 0 <= band_lo < band_hi");
}

void read_coupling(const Reader& r, CouplingSection& c) {
    r.allow({"geometry", "separation_nm", "d_nm", "ellipse_b_nm", "channel_half_width_nm"});
    r.choice("geometry", c.geometry, {"ellipse", "dogbone"});
    r.positive("separation_nm", c.separation_nm);
    r.positive("d_nm", c.d_nm);
    r.positive("ellipse_b_nm", c.ellipse_b_nm);
    r.positive("channel_half_width_nm", c.channel_half_width_nm);
}

ScenarioConfig read_document(const Json& doc, std::string_view source) {
    Reader r(doc, "", source);
    r.allow({"preset", "geometry", "film", "dipoles", "grid", "solver", "solve", "analytic", "sweep", "compare",
             "coupling", "output", "seed"});
    ScenarioConfig c;
    r.text("preset", c.preset);
    if (auto g = r.child("geometry")) read_geometry(*g, c.geometry);
    if (auto f = r.child("film")) read_film(*f, c.film);
    read_dipoles(r, "dipoles", c.dipoles);
    if (auto g = r.child("grid")) read_grid(*g, c.grid);
    if (auto s = r.child("solver")) {
        s->allow({"convention", "aperture_pearl_factor"});
        s->choice("convention", c.solver.convention, {"reference", "physical"});
        s->positive("aperture_pearl_factor", c.solver.aperture_pearl_factor);
    }
    if (auto s = r.child("solve")) {
        s->allow({"line_y_nm"});
        s->number("line_y_nm", c.solve.line_y_nm);
    }
    if (auto a = r.child("analytic")) read_analytic(*a, c.analytic);
    if (auto s = r.child("sweep")) read_sweep(*s, c.sweep);
    if (auto s = r.child("compare")) read_compare(*s, c.compare);
    if (auto s = r.child("coupling")) read_coupling(*s, c.coupling);
    if (auto o = r.child("output")) {
        o->allow({"dir", "db"});
        o->text("dir", c.output.dir);
        if (c.output.dir.empty()) o->fail("dir", "must not be empty");
        o->boolean("db", c.output.db);
    }
    if (r.has("seed")) {
        const auto& v = doc.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            r.fail("seed", "expected a non-negative integer");
        c.seed = v.get<std::uint64_t>();
    }
    return c;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

bool is_empty_config(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return true;
    try {
        const auto j = Json::parse(text);
        return j.is_object() && j.empty();
    } catch (const Json::parse_error&) {
        return false;
    }
}

ScenarioConfig resolve_config(const std::string& preset, const Json& overrides, std::string_view source) {
    std::string name = preset;
    if (overrides.is_object() && overrides.contains("preset") && overrides.at("preset").is_string()) {
        const auto inner = overrides.at("preset").get<std::string>();
        if (!name.empty() && !inner.empty() && inner != name)
            throw ConfigError(std::string(source) + ": /preset: '" + inner + "' conflicts with --preset " + name);
        if (!inner.empty()) name = inner;
    }
    Json merged = Json::object();
    if (!name.empty()) {
        auto p = preset_json(name);
        if (!p) throw ConfigError(std::string(source) + ": /preset: unknown preset '" + name + "'");
        merged = *p;
    }
    if (!overrides.is_null()) {
        if (!overrides.is_object()) throw ConfigError(std::string(source) + ": top level must be an object");
        merged.merge_patch(overrides);
    }
    merged["preset"] = name;
    return read_document(merged, source);
}

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream os;
        os << source << ":" << line << ":" << col << ": syntax error: ";
        // the library message repeats the position; keep the explanation only
        std::string msg = e.what();
        const auto at = msg.find("syntax error while parsing");
        const auto cut = at == std::string::npos ? at : msg.find(" - ", at);
        os << (cut == std::string::npos ? msg : msg.substr(cut + 3));
        throw ConfigError(os.str());
    }
    // a run manifest carries the resolved configuration under "config"
    if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config"))
        return resolve_config("", doc.at("config"), source);
    return resolve_config("", doc, source);
}

Json to_json(const ScenarioConfig& c) {
    Json j;
    j["preset"] = c.preset;
    Json g;
    g["shape"] = c.geometry.shape;
    if (c.geometry.shape == "circle") {
        g["radius_nm"] = c.geometry.radius_nm;
    } else if (c.geometry.shape == "ellipse") {
        g["a_nm"] = c.geometry.a_nm;
        g["b_nm"] = c.geometry.b_nm;
    } else {
        g["end_radius_nm"] = c.geometry.end_radius_nm;
        g["center_distance_nm"] = c.geometry.center_distance_nm;
        g["channel_half_width_nm"] = c.geometry.channel_half_width_nm;
    }
    j["geometry"] = g;
    j["film"] = {{"london_depth_nm", c.film.london_depth_nm},
                 {"thickness_nm", c.film.thickness_nm},
                 {"film_width", c.film.film_width},
                 {"grid_width", c.film.grid_width}};
    Json dl = Json::array();
    for (const auto& d : c.dipoles) dl.push_back({{"x_nm", d.x_nm}, {"y_nm", d.y_nm}, {"moment", d.moment}});
    j["dipoles"] = dl;
    Json gr{{"nx", c.grid.nx}, {"ny", c.grid.ny}};
    gr["edge_spacing_nm"] = c.grid.edge_spacing_nm ? Json(*c.grid.edge_spacing_nm) : Json(nullptr);
    j["grid"] = gr;
    j["solver"] = {{"convention", c.solver.convention}, {"aperture_pearl_factor", c.solver.aperture_pearl_factor}};
    j["solve"] = {{"line_y_nm", c.solve.line_y_nm}};
    j["analytic"] = {{"mode", c.analytic.mode},
                     {"orientation", c.analytic.orientation},
                     {"rho_min_nm", c.analytic.rho_min_nm},
                     {"rho_max_nm", c.analytic.rho_max_nm},
                     {"samples", c.analytic.samples},
                     {"line_y_nm", c.analytic.line_y_nm},
                     {"map_half_width_nm", c.analytic.map_half_width_nm},
                     {"map_points", c.analytic.map_points}};
    Json sw{{"scenario", c.sweep.scenario},
            {"engine", c.sweep.engine},
            {"d_nm", c.sweep.d_nm},
            {"radii_nm", c.sweep.radii_nm},
            {"ellipse_b_nm", c.sweep.ellipse_b_nm},
            {"probe_y_nm", c.sweep.probe_y_nm},
            {"smoothing_window", c.sweep.smoothing_window},
            {"noise_fraction", c.sweep.noise_fraction}};
    sw["expected_slope"] = c.sweep.expected_slope ? Json(*c.sweep.expected_slope) : Json(nullptr);
    sw["slope_tolerance"] = c.sweep.slope_tolerance ? Json(*c.sweep.slope_tolerance) : Json(nullptr);
    j["sweep"] = sw;
    j["compare"] = {{"scenario", c.compare.scenario},
                    {"d_nm", c.compare.d_nm},
                    {"line_y_nm", c.compare.line_y_nm},
                    {"band_lo", c.compare.band_lo},
                    {"band_hi", c.compare.band_hi}};
    j["coupling"] = {{"geometry", c.coupling.geometry},
                     {"separation_nm", c.coupling.separation_nm},
                     {"d_nm", c.coupling.d_nm},
                     {"ellipse_b_nm", c.coupling.ellipse_b_nm},
                     {"channel_half_width_nm", c.coupling.channel_half_width_nm}};
    j["output"] = {{"dir", c.output.dir}, {"db", c.output.db}};
    j["seed"] = c.seed;
    return j;
}

ApertureGeometry to_geometry(const GeometrySection& g) {
    ApertureGeometry geo;
    if (g.shape == "circle")
        geo = Circle{g.radius_nm / nm_per_m};
    else if (g.shape == "ellipse")
        geo = Ellipse{g.a_nm / nm_per_m, g.b_nm / nm_per_m};
    else
        geo = DogBone{g.end_radius_nm / nm_per_m, g.center_distance_nm / nm_per_m, g.channel_half_width_nm / nm_per_m};
    validate(geo);
    return geo;
}

experiments::Material to_material(const FilmSection& f) {
    return {f.london_depth_nm / nm_per_m, f.thickness_nm / nm_per_m};
}

brandt::FieldConvention to_convention(const std::string& name) {
    if (name == "reference") return brandt::FieldConvention::Reference;
    if (name == "physical") return brandt::FieldConvention::Physical;
    throw ConfigError("unknown field convention '" + name + "'");
}

experiments::NumericOptions to_numeric(const ScenarioConfig& c) {
    experiments::NumericOptions o;
    o.nx = c.grid.nx;
    o.ny = c.grid.ny;
    if (c.grid.edge_spacing_nm) o.edge_spacing = *c.grid.edge_spacing_nm / nm_per_m;
    o.film_width = c.film.film_width;
    o.grid_width = c.film.grid_width;
    o.convention = to_convention(c.solver.convention);
    o.aperture_pearl_factor = c.solver.aperture_pearl_factor;
    return o;
}

namespace {
experiments::Scenario to_scenario(const std::string& s) {
    if (s == "centered") return experiments::Scenario::Centered;
    if (s == "shifted") return experiments::Scenario::Shifted;
    if (s == "ellipse") return experiments::Scenario::Ellipse;
    throw ConfigError("unknown scenario '" + s + "'");
}
}  // namespace

experiments::SweepConfig to_sweep(const ScenarioConfig& c) {
    experiments::SweepConfig s;
    s.scenario = to_scenario(c.sweep.scenario);
    s.engine = c.sweep.engine == "analytic" ? experiments::Engine::Analytic : experiments::Engine::Numeric;
    s.d = c.sweep.d_nm / nm_per_m;
    for (double r : c.sweep.radii_nm) s.radii.push_back(r / nm_per_m);
    s.ellipse_semi_y = c.sweep.ellipse_b_nm / nm_per_m;
    s.moment = c.dipoles.front().moment;
    s.probe_y = c.sweep.probe_y_nm / nm_per_m;
    s.material = to_material(c.film);
    s.numeric = to_numeric(c);
    s.smoothing_window = c.sweep.smoothing_window;
    s.noise_fraction = c.sweep.noise_fraction;
    s.seed = c.seed;
    return s;
}

experiments::CompareConfig to_compare(const ScenarioConfig& c) {
    experiments::CompareConfig k;
    k.scenario = to_scenario(c.compare.scenario);
    k.radius = c.geometry.radius_nm / nm_per_m;
    k.d = c.compare.d_nm / nm_per_m;
    k.line_y = c.compare.line_y_nm / nm_per_m;
    k.band_lo = c.compare.band_lo;
    k.band_hi = c.compare.band_hi;
    k.moment = c.dipoles.front().moment;
    k.material = to_material(c.film);
    k.numeric = to_numeric(c);
    return k;
}

experiments::CouplingConfig to_coupling(const ScenarioConfig& c) {
    experiments::CouplingConfig k;
    k.geometry = c.coupling.geometry == "ellipse" ? experiments::CouplingGeometry::Ellipse
                                                  : experiments::CouplingGeometry::DogBone;
    k.separation = c.coupling.separation_nm / nm_per_m;
    k.d = c.coupling.d_nm / nm_per_m;
    k.ellipse_semi_y = c.coupling.ellipse_b_nm / nm_per_m;
    k.channel_half_width = c.coupling.channel_half_width_nm / nm_per_m;
    k.moment = c.dipoles.front().moment;
    k.material = to_material(c.film);
    k.numeric = to_numeric(c);
    return k;
}

void validate(const ScenarioConfig& c, Command command) {
    const auto geo = to_geometry(c.geometry);
    switch (command) {
        case Command::Analytic: {
            if (c.geometry.shape != "circle")
                throw ConfigError("analytic: the closed forms exist for a circular aperture only (/geometry/shape)");
            if (c.analytic.mode == "line" && c.analytic.orientation != "z" && c.analytic.line_y_nm != 0.0)
                throw ConfigError("analytic: /analytic/orientation x or y needs /analytic/line_y_nm = 0");
            break;
        }
        case Command::Solve: {
            const auto film = FilmSpec::for_geometry(geo, c.film.london_depth_nm / nm_per_m, c.film.thickness_nm / nm_per_m,
                                                     c.film.film_width, c.film.grid_width);
            for (std::size_t k = 0; k < c.dipoles.size(); ++k) {
                const Vec2 p(c.dipoles[k].x_nm / nm_per_m, c.dipoles[k].y_nm / nm_per_m);
                if (std::abs(p.x()) >= film.grid_half_extent || std::abs(p.y()) >= film.grid_half_extent)
                    throw ConfigError("solve: /dipoles/" + std::to_string(k) + " lies outside the grid");
            }
            break;
        }
        case Command::Sweep: {
            if (c.sweep.radii_nm.empty()) throw ConfigError("sweep: /sweep/radii_nm is empty");
            if (c.sweep.engine == "analytic" && c.sweep.scenario == "ellipse")
                throw ConfigError("sweep: the analytic engine supports circular apertures only (/sweep/engine)");
            if (!(c.sweep.radii_nm.front() > c.sweep.d_nm))
                throw ConfigError("sweep: /sweep/radii_nm must all exceed /sweep/d_nm");
            if (c.sweep.smoothing_window > static_cast<int>(c.sweep.radii_nm.size()))
                throw ConfigError("sweep: /sweep/smoothing_window exceeds the number of radii");
            break;
        }
        case Command::Compare: {
            if (c.geometry.shape != "circle")
                throw ConfigError("compare: needs a circular aperture (/geometry/shape)");
            if (!(c.geometry.radius_nm > c.compare.d_nm))
                throw ConfigError("compare: /compare/d_nm must be below the radius");
            break;
        }
        case Command::Coupling: break;
    }
}

}  // namespace fluxfocus::io
