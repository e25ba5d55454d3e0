#include "fluxfocus/io/presets.hpp"

#include <cmath>

namespace fluxfocus::io {
namespace {

// n radii (nm) spaced evenly in log between lo and hi
Json log_radii(double lo, double hi, int n) {
    Json a = Json::array();
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        a.push_back(k == 0 ? lo : k == n - 1 ? hi : std::exp(std::log(lo) + t * std::log(hi / lo)));
    }
    return a;
}

Json circle(double r) { return {{"shape", "circle"}, {"radius_nm", r}}; }
Json ellipse(double a, double b) { return {{"shape", "ellipse"}, {"a_nm", a}, {"b_nm", b}}; }
Json dipole_at(double x) { return Json::array({{{"x_nm", x}, {"y_nm", 0.0}}}); }

Json sweep_preset(const char* scenario, const char* engine, Json radii, double slope, double tol) {
    return {{"sweep",
             {{"scenario", scenario},
              {"engine", engine},
              {"d_nm", 100.0},
              {"radii_nm", std::move(radii)},
              {"ellipse_b_nm", 100.0},
              {"expected_slope", slope},
              {"slope_tolerance", tol}}}};
}

struct Entry {
    PresetInfo info;
    Json doc;
};

const std::vector<Entry>& table() {
    static const std::vector<Entry> t = [] {
        std::vector<Entry> v;
        auto add = [&](std::string name, Command c, std::string what, Json doc) {
            v.push_back({{std::move(name), c, std::move(what)}, std::move(doc)});
        };
        add("fig3", Command::Analytic, "centred dipole field (B_x, B_z) in the x-z plane, R = 1000 nm",
            {{"geometry", circle(1000)}, {"analytic", {{"mode", "map"}, {"map_half_width_nm", 2000.0}, {"map_points", 81}}}});
        add("fig4", Command::Analytic, "in-plane B_z of a centred z dipole versus rho, R = 1000 nm",
            {{"geometry", circle(1000)},
             {"analytic", {{"mode", "line"}, {"orientation", "z"}, {"rho_min_nm", 10.0}, {"rho_max_nm", 1500.0},
                           {"samples", 300}, {"line_y_nm", 0.0}}}});
        add("edge-centered", Command::Sweep, "analytic centred edge field, d = 100 nm, R/d from 1e3 to 1e5",
            sweep_preset("centered", "analytic", log_radii(1e5, 1e7, 30), -2.5, 0.02));
        add("edge-shifted", Command::Sweep, "analytic shifted edge field, d = 100 nm, R/d from 1e3 to 1e5",
            sweep_preset("shifted", "analytic", log_radii(1e5, 1e7, 30), -2.0, 0.02));
        add("fig5a", Command::Compare, "analytic versus numeric, centred dipole, R = 1000 nm, y = 5 nm",
            {{"geometry", circle(1000)}, {"compare", {{"scenario", "centered"}, {"d_nm", 100.0}, {"line_y_nm", 5.0}}}});
        add("fig5b", Command::Compare, "analytic versus numeric, dipole 100 nm from the left edge, R = 1000 nm",
            {{"geometry", circle(1000)}, {"compare", {{"scenario", "shifted"}, {"d_nm", 100.0}, {"line_y_nm", 5.0}}}});
        add("fig5c", Command::Sweep, "numeric centred sweep, d = 100 nm, R from 0.5 to 8 um",
            sweep_preset("centered", "numeric", log_radii(500, 8000, 8), -2.3, 0.3));
        add("fig5d", Command::Sweep, "numeric shifted sweep, d = 100 nm, R from 0.5 to 8 um",
            sweep_preset("shifted", "numeric", log_radii(500, 8000, 8), -1.9, 0.3));
        add("fig6a", Command::Solve, "ellipse a = 1000 nm, b = 100 nm, dipole 100 nm from the left tip",
            {{"geometry", ellipse(1000, 100)}, {"dipoles", dipole_at(-900)}, {"solve", {{"line_y_nm", 5.0}}}});
        add("fig6b", Command::Sweep, "numeric ellipse sweep, b = 100 nm, a from 0.5 to 4 um",
            sweep_preset("ellipse", "numeric", log_radii(500, 4000, 8), -1.4, 0.5));
        add("fig7a", Command::Solve, "stream function, centred dipole, R = 1000 nm",
            {{"geometry", circle(1000)}, {"dipoles", dipole_at(0)}, {"solve", {{"line_y_nm", 5.0}}}});
        add("fig7", Command::Solve, "same as fig7a",
            {{"geometry", circle(1000)}, {"dipoles", dipole_at(0)}, {"solve", {{"line_y_nm", 5.0}}}});
        add("fig7b", Command::Solve, "stream function, dipole 100 nm from the left edge, R = 1000 nm",
            {{"geometry", circle(1000)}, {"dipoles", dipole_at(-900)}, {"solve", {{"line_y_nm", 5.0}}}});
        add("fig7c", Command::Solve, "stream function, ellipse a = 1000 nm, b = 100 nm",
            {{"geometry", ellipse(1000, 100)}, {"dipoles", dipole_at(-900)}, {"solve", {{"line_y_nm", 5.0}}}});
        add("coupling300", Command::Coupling, "two dipoles 300 nm apart in an ellipse (b = 100 nm)",
            {{"coupling", {{"geometry", "ellipse"}, {"separation_nm", 300.0}, {"d_nm", 100.0}, {"ellipse_b_nm", 100.0}}}});
        add("coupling300-dogbone", Command::Coupling, "two dipoles 300 nm apart in a dog-bone",
            {{"coupling", {{"geometry", "dogbone"}, {"separation_nm", 300.0}, {"d_nm", 100.0},
                           {"channel_half_width_nm", 25.0}}}});
        for (auto& e : v) {
            // material and film parameters written out so the preset is self-describing
            e.doc["film"] = {{"london_depth_nm", 50.0}, {"thickness_nm", 80.0}, {"film_width", 90.0}, {"grid_width", 100.0}};
        }
        return v;
    }();
    return t;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> list = [] {
        std::vector<PresetInfo> v;
        for (const auto& e : table()) v.push_back(e.info);
        return v;
    }();
    return list;
}

const PresetInfo* find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

std::optional<Json> preset_json(std::string_view name) {
    for (const auto& e : table())
        if (e.info.name == name) return e.doc;
    return std::nullopt;
}

}  // namespace fluxfocus::io
