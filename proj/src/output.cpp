#include "fluxfocus/io/output.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <unistd.h>

#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"

namespace fluxfocus::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing: " + std::strerror(errno));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string to_csv(const CsvTable& t) {
    std::string s;
    for (const auto& m : t.meta) s += "# " + m + "\n";
    for (std::size_t k = 0; k < t.columns.size(); ++k) s += (k ? "," : "") + t.columns[k];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) s += ",";
            s += format_number(row[k]);
        }
        s += "\n";
    }
    return s;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::size_t pos = 0;
    bool header = false;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.meta.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header) {
            t.columns = cells;
            header = true;
            continue;
        }
        if (cells.size() != t.columns.size()) throw IoError("csv row has " + std::to_string(cells.size()) + " cells");
        std::vector<double> row;
        for (const auto& c : cells) {
            char* e = nullptr;
            const double v = std::strtod(c.c_str(), &e);
            if (e == c.c_str() || *e != '\0') throw IoError("csv: not a number: '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!header) throw IoError("csv: missing header line");
    return t;
}

namespace {
double db_of(double tesla) { return experiments::field_db(tesla); }
}  // namespace

CsvTable field_map_table(const FieldMap& f, bool with_db, double tesla_per_unit) {
    CsvTable t;
    t.meta.push_back("quantity: " + f.quantity);
    t.meta.push_back("unit: " + f.unit);
    t.meta.push_back("points: " + std::to_string(f.size()));
    if (with_db)
        t.meta.push_back("value_db: 20*log10(|value * " + format_number(tesla_per_unit) + " T/" + f.unit +
                         "| / 1e-4 T)");
    else
        t.meta.push_back("value_db: absent");
    t.columns = {"x_m", "y_m", "value"};
    if (with_db) t.columns.push_back("value_db");
    const auto& g = *f.grid;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto p = g.point(k);
        std::vector<double> row{p.x(), p.y(), f.values[k]};
        if (with_db) row.push_back(db_of(f.values[k] * tesla_per_unit));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Json to_json(const experiments::PowerLawFit& f) {
    return {{"slope", f.slope},
            {"slope_err", f.slope_err},
            {"intercept", f.intercept},
            {"intercept_err", f.intercept_err},
            {"intercept_note", "ln|B/T| = intercept + slope * ln(L/m)"},
            {"points", f.points},
            {"weighted", f.weighted},
            {"reduced_chi2", f.reduced_chi2}};
}

Json sweep_json(const experiments::SweepResult& r, const SweepSection& spec) {
    Json j;
    j["scenario"] = experiments::to_string(r.scenario);
    j["engine"] = experiments::to_string(r.engine);
    j["d_m"] = r.d;
    Json pts = Json::array();
    for (const auto& p : r.points)
        pts.push_back({{"radius_m", p.radius}, {"L_m", p.L}, {"B_t", p.B}, {"sigma_B_t", p.sigma_B},
                       {"B_db", db_of(p.B)}});
    j["points"] = pts;
    j["fit"] = r.fit ? to_json(*r.fit) : Json(nullptr);
    Json tol;
    tol["expected_slope"] = spec.expected_slope ? Json(*spec.expected_slope) : Json(nullptr);
    tol["slope_tolerance"] = spec.slope_tolerance ? Json(*spec.slope_tolerance) : Json(nullptr);
    if (spec.expected_slope && spec.slope_tolerance && r.fit)
        tol["within_tolerance"] = std::abs(r.fit->slope - *spec.expected_slope) <= *spec.slope_tolerance;
    else
        tol["within_tolerance"] = nullptr;
    j["tolerances"] = tol;
    j["db_convention"] = "20*log10(|B| / 1e-4 T)";
    j["warnings"] = r.warnings;
    return j;
}

namespace {
Json stats_json(const experiments::ConventionStats& s) {
    return {{"band_points", s.band_points},
            {"median_abs_db", s.median_abs_db},
            {"p90_abs_db", s.p90_abs_db},
            {"max_abs_db", s.max_abs_db},
            {"sign_agreement", s.sign_agreement}};
}
}  // namespace

Json compare_json(const experiments::CompareReport& r, const CompareSection& spec) {
    Json j;
    j["scenario"] = spec.scenario;
    j["line_y_m"] = spec.line_y_nm / 1e9;
    j["band"] = {{"lo_over_R", spec.band_lo}, {"hi_over_R", spec.band_hi}};
    j["physical"] = stats_json(r.physical);
    j["reference"] = stats_json(r.reference);
    j["exterior"] = {{"points", r.exterior_points},
                     {"analytic_max_abs_t", r.exterior_analytic_max},
                     {"numeric_max_over_peak", r.exterior_numeric_fraction}};
    j["aperture_spread"] = r.aperture_spread;
    j["reciprocal_condition"] = r.reciprocal_condition;
    j["db_convention"] = "20*log10(|B| / 1e-4 T)";
    j["warnings"] = r.warnings;
    return j;
}

Json coupling_json(const experiments::CouplingReport& r) {
    auto est = [](const experiments::CouplingEstimate& e) {
        return Json{{"separation_m", e.separation}, {"field_t", e.field}, {"coupling_hz", e.coupling}};
    };
    return {{"geometry", r.geometry},
            {"film", est(r.estimate)},
            {"free_space", est(r.free_space)},
            {"enhancement", r.enhancement},
            {"warnings", r.warnings}};
}

Json manifest_json(Command command, const ScenarioConfig& config, const std::vector<std::string>& outputs,
                   int threads) {
    Json j;
    j["manifest_version"] = 1;
    j["tool"] = "fluxfocus";
    j["version"] = FLUXFOCUS_VERSION;
    j["command"] = to_string(command);
    j["config"] = to_json(config);
    Json env;
    env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                   std::to_string(EIGEN_MINOR_VERSION);
    env["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                  "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#if defined(__clang__)
    env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    env["compiler"] = std::string("gcc ") + __VERSION__;
#else
    env["compiler"] = "unknown";
#endif
    env["threads"] = threads;
    env["constants"] = {{"mu0", constants::mu0},
                        {"bohr_magneton", constants::bohr_magneton},
                        {"electron_g", constants::electron_g},
                        {"planck", constants::planck}};
    j["environment"] = env;
    j["outputs"] = outputs;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace fluxfocus::io
