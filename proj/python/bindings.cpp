#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fluxfocus/analytic.hpp"
#include "fluxfocus/brandt.hpp"
#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/experiments.hpp"
#include "fluxfocus/power_law.hpp"

namespace py = pybind11;
using namespace fluxfocus;
namespace ex = fluxfocus::experiments;

namespace {

analytic::Orientation orientation(const std::string& s) {
    if (s == "z") return analytic::Orientation::Z;
    if (s == "y") return analytic::Orientation::Y;
    if (s == "x") return analytic::Orientation::X;
    throw ConfigError("orientation must be 'z', 'y' or 'x'");
}

ex::Scenario scenario(const std::string& s) {
    if (s == "centered") return ex::Scenario::Centered;
    if (s == "shifted") return ex::Scenario::Shifted;
    if (s == "ellipse") return ex::Scenario::Ellipse;
    throw ConfigError("scenario must be 'centered', 'shifted' or 'ellipse'");
}

ex::Engine engine(const std::string& s) {
    if (s == "analytic") return ex::Engine::Analytic;
    if (s == "numeric") return ex::Engine::Numeric;
    throw ConfigError("engine must be 'analytic' or 'numeric'");
}

brandt::FieldConvention convention(const std::string& s) {
    if (s == "reference") return brandt::FieldConvention::Reference;
    if (s == "physical") return brandt::FieldConvention::Physical;
    throw ConfigError("convention must be 'reference' or 'physical'");
}

ex::NumericOptions numeric(int nx, int ny, std::optional<double> edge, const std::string& conv) {
    ex::NumericOptions o;
    o.nx = nx;
    o.ny = ny;
    o.edge_spacing = edge;
    o.convention = convention(conv);
    return o;
}

// values reshaped to (nx, ny) with index (i, j) at x[i], y[j]
Eigen::MatrixXd as_matrix(const FieldMap& f) {
    const auto& g = *f.grid;
    Eigen::MatrixXd m(g.nx(), g.ny());
    for (std::size_t k = 0; k < f.size(); ++k) m(g.ix(k), g.iy(k)) = f.values[k];
    return m;
}

py::dict sweep_dict(const ex::SweepResult& r) {
    py::dict d;
    d["scenario"] = ex::to_string(r.scenario);
    d["engine"] = ex::to_string(r.engine);
    d["d"] = r.d;
    std::vector<double> R, L, B, S;
    for (const auto& p : r.points) {
        R.push_back(p.radius);
        L.push_back(p.L);
        B.push_back(p.B);
        S.push_back(p.sigma_B);
    }
    d["radius"] = R;
    d["L"] = L;
    d["B"] = B;
    d["sigma_B"] = S;
    if (r.fit)
        d["fit"] = *r.fit;
    else
        d["fit"] = py::none();
    d["warnings"] = r.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fluxfocus, mod) {
    mod.doc() = "fields of point dipoles in apertures of superconducting thin films";
    mod.attr("__version__") = FLUXFOCUS_VERSION;
    mod.attr("mu0") = constants::mu0;
    mod.attr("nv_moment") = constants::nv_moment;
    mod.attr("planck") = constants::planck;

    auto base = py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
    py::register_exception<SingularityError>(mod, "SingularityError", PyExc_ArithmeticError);
    py::register_exception<SolverError>(mod, "SolverError", PyExc_RuntimeError);
    (void)base;

    py::class_<analytic::GreenEval>(mod, "GreenEval")
        .def_readonly("value", &analytic::GreenEval::value)
        .def_readonly("f_plus", &analytic::GreenEval::f_plus)
        .def_readonly("f_minus", &analytic::GreenEval::f_minus)
        .def_readonly("d_plus", &analytic::GreenEval::d_plus)
        .def_readonly("d_minus", &analytic::GreenEval::d_minus)
        .def_readonly("epsilon_sign", &analytic::GreenEval::epsilon_sign);

    mod.def("green_circular", &analytic::green_circular, py::arg("r"), py::arg("r_src"), py::arg("R"));
    mod.def(
        "n_vector",
        [](const Vec3& r, double R) {
            const auto n = analytic::n_vector(r, R);
            return py::make_tuple(n.n, n.c, n.alpha);
        },
        py::arg("r"), py::arg("R"), "returns (n, C, alpha)");
    mod.def("field_centered", &analytic::field_centered, py::arg("m"), py::arg("r"), py::arg("R"));
    mod.def("vector_potential_centered", &analytic::vector_potential_centered, py::arg("m"), py::arg("r"),
            py::arg("R"));
    mod.def(
        "field_inplane",
        [](const std::string& o, double m, double coord, double R) {
            return analytic::field_inplane(orientation(o), m, coord, R);
        },
        py::arg("orientation"), py::arg("m"), py::arg("coord"), py::arg("R"));
    mod.def("field_shifted", &analytic::field_shifted, py::arg("m"), py::arg("x0"), py::arg("r"), py::arg("R"));
    mod.def(
        "edge_asymptote",
        [](const std::string& kind, double m, double d, double R) {
            if (kind != "centered" && kind != "shifted") throw ConfigError("kind must be 'centered' or 'shifted'");
            return analytic::edge_asymptote(
                kind == "centered" ? analytic::EdgeCase::Centered : analytic::EdgeCase::Shifted, m, d, R);
        },
        py::arg("kind"), py::arg("m"), py::arg("d"), py::arg("R"));
    mod.def("free_dipole_field", &analytic::free_dipole_field, py::arg("m"), py::arg("r_rel"));

    mod.def(
        "solve_circle",
        [](double radius, double x0, double london_depth, double thickness, int nx, int ny,
           std::optional<double> edge, const std::string& conv) {
            ApertureGeometry geo = Circle{radius};
            auto film = FilmSpec::for_geometry(geo, london_depth, thickness);
            GridSpec gs;
            gs.nx = nx;
            gs.ny = ny;
            gs.extra_knots_x = {x0};
            gs.extra_knots_y = {0.0};
            const double h = edge.value_or(ex::default_edge_spacing(geo, film, radius));
            gs.edge_spacing_x = gs.edge_spacing_y = h;
            auto grid = make_grid(geo, film, gs);
            brandt::SolveOptions so;
            so.convention = convention(conv);
            brandt::StreamSystem sys(geo, film, grid, so);
            const auto sol = sys.solve(Dipole::in_plane({x0, 0.0}));
            py::dict d;
            d["x"] = grid->x;
            d["y"] = grid->y;
            d["g"] = as_matrix(sol.g);
            d["h_z"] = as_matrix(sol.h_z);
            d["aperture_currents"] = sol.aperture_currents;
            d["aperture_spread"] = sol.aperture_spread;
            d["london_residual"] = sol.london_residual;
            d["reciprocal_condition"] = sys.reciprocal_condition();
            std::vector<int> labels;
            for (auto l : grid->labels) labels.push_back(static_cast<int>(l));
            d["labels"] = labels;  // 0 film, 1 aperture, 2 exterior
            return d;
        },
        py::arg("radius"), py::arg("x0") = 0.0, py::arg("london_depth") = default_london_depth,
        py::arg("thickness") = default_thickness, py::arg("nx") = 40, py::arg("ny") = 40,
        py::arg("edge_spacing") = py::none(), py::arg("convention") = "reference",
        "stream function and H_z for a z dipole at (x0, 0) in a circular aperture");

    py::class_<ex::PowerLawFit>(mod, "PowerLawFit")
        .def_readonly("slope", &ex::PowerLawFit::slope)
        .def_readonly("slope_err", &ex::PowerLawFit::slope_err)
        .def_readonly("intercept", &ex::PowerLawFit::intercept)
        .def_readonly("intercept_err", &ex::PowerLawFit::intercept_err)
        .def_readonly("points", &ex::PowerLawFit::points)
        .def_readonly("weighted", &ex::PowerLawFit::weighted)
        .def_readonly("reduced_chi2", &ex::PowerLawFit::reduced_chi2)
        .def("__repr__", [](const ex::PowerLawFit& f) {
            return "PowerLawFit(slope=" + std::to_string(f.slope) + ", slope_err=" + std::to_string(f.slope_err) + ")";
        });

    mod.def(
        "fit_power_law",
        [](const std::vector<double>& L, const std::vector<double>& B, std::optional<std::vector<double>> sigma) {
            if (L.size() != B.size() || (sigma && sigma->size() != B.size()))
                throw ConfigError("L, B and sigma must have equal lengths");
            std::vector<ex::SeriesPoint> pts;
            for (std::size_t k = 0; k < L.size(); ++k) pts.push_back({L[k], B[k], sigma ? (*sigma)[k] : 0.0});
            return ex::fit_power_law(pts);
        },
        py::arg("L"), py::arg("B"), py::arg("sigma") = py::none());
    mod.def(
        "smooth",
        [](const std::vector<double>& L, const std::vector<double>& B, int window) {
            if (L.size() != B.size()) throw ConfigError("L and B must have equal lengths");
            std::vector<ex::SeriesPoint> pts;
            for (std::size_t k = 0; k < L.size(); ++k) pts.push_back({L[k], B[k], 0.0});
            const auto s = ex::smooth(pts, window);
            std::vector<double> y, e;
            for (const auto& p : s) {
                y.push_back(p.y);
                e.push_back(p.sigma);
            }
            return py::make_tuple(y, e);
        },
        py::arg("L"), py::arg("B"), py::arg("window") = ex::default_smoothing_window, "returns (mean, std)");
    mod.def(
        "sweep",
        [](const std::string& sc, double d, const std::vector<double>& radii, const std::string& eng, int nx, int ny,
           std::optional<double> edge, const std::string& conv, double ellipse_b) {
            ex::SweepConfig c;
            c.scenario = scenario(sc);
            c.engine = engine(eng);
            c.d = d;
            c.radii = radii;
            c.numeric = numeric(nx, ny, edge, conv);
            c.ellipse_semi_y = ellipse_b;
            return sweep_dict(ex::sweep(c));
        },
        py::arg("scenario"), py::arg("d"), py::arg("radii"), py::arg("engine") = "analytic", py::arg("nx") = 60,
        py::arg("ny") = 60, py::arg("edge_spacing") = py::none(), py::arg("convention") = "reference",
        py::arg("ellipse_b") = 100e-9);
    mod.def(
        "compare_engines",
        [](const std::string& sc, double radius, double d, int nx, int ny, double line_y) {
            ex::CompareConfig c;
            c.scenario = scenario(sc);
            c.radius = radius;
            c.d = d;
            c.line_y = line_y;
            c.numeric.nx = nx;
            c.numeric.ny = ny;
            const auto r = ex::compare_engines(c);
            py::dict out;
            std::vector<double> x, ba, bn;
            for (const auto& p : r.points) {
                x.push_back(p.x);
                ba.push_back(p.b_analytic);
                bn.push_back(p.b_numeric);
            }
            out["x"] = x;
            out["b_analytic"] = ba;
            out["b_numeric"] = bn;
            auto stats = [](const ex::ConventionStats& s) {
                py::dict d;
                d["band_points"] = s.band_points;
                d["median_abs_db"] = s.median_abs_db;
                d["p90_abs_db"] = s.p90_abs_db;
                d["max_abs_db"] = s.max_abs_db;
                d["sign_agreement"] = s.sign_agreement;
                return d;
            };
            out["physical"] = stats(r.physical);
            out["reference"] = stats(r.reference);
            out["exterior_numeric_fraction"] = r.exterior_numeric_fraction;
            return out;
        },
        py::arg("scenario") = "centered", py::arg("radius") = 1000e-9, py::arg("d") = 100e-9, py::arg("nx") = 40,
        py::arg("ny") = 40, py::arg("line_y") = ex::default_line_offset);
    mod.def(
        "coupling_estimate",
        [](double m, double B, double L) {
            const auto e = ex::coupling_estimate(m, B, L);
            return py::dict(py::arg("separation") = e.separation, py::arg("field") = e.field,
                            py::arg("coupling") = e.coupling);
        },
        py::arg("m"), py::arg("B"), py::arg("L"));
    mod.def("field_db", &ex::field_db, py::arg("tesla"));
}
