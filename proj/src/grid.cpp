#include "fluxfocus/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fluxfocus/errors.hpp"

namespace fluxfocus {
namespace {

double min_diff(const std::vector<double>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < v.size(); ++k) m = std::min(m, v[k] - v[k - 1]);
    return m;
}

std::vector<double> voronoi_widths(const std::vector<double>& c, double X) {
    const std::size_t n = c.size();
    std::vector<double> w(n);
    double left = -X;
    for (std::size_t k = 0; k < n; ++k) {
        const double right = (k + 1 < n) ? 0.5 * (c[k] + c[k + 1]) : X;
        w[k] = right - left;
        left = right;
    }
    return w;
}

// piece of the half line on which the spacing profile is either capped or linear in s
struct Segment {
    double s0, s1;
    double knot;   // nearest knot
    int side;      // +1: distance grows with s, -1: shrinks
    bool capped;
    double S0;     // cumulative point density at s0
};

struct Profile {
    double ratio, c;
    std::vector<Segment> segs;
    double total = 0;  // integral of 1/phi over [0, X]

    double dist0(const Segment& g) const { return g.side * (g.s0 - g.knot); }

    double integral(const Segment& g) const {
        if (g.capped) return (g.s1 - g.s0) / ratio;
        const double t0 = std::abs(g.s0 - g.knot), t1 = std::abs(g.s1 - g.knot);
        return std::abs(std::log1p(c * t1) - std::log1p(c * t0)) / c;
    }

    double invert(double S) const {
        auto it = std::upper_bound(segs.begin(), segs.end(), S,
                                   [](double v, const Segment& g) { return v < g.S0; });
        const Segment& g = *std::prev(it);
        const double dS = S - g.S0;
        if (g.capped) return g.s0 + dS * ratio;
        const double t0 = dist0(g);
        const double e = g.side * c * dS;
        const double t = t0 * std::exp(e) + std::expm1(e) / c;
        return g.knot + g.side * t;
    }
};

Profile build_profile(double X, const std::vector<double>& knots, double ratio) {
    Profile p;
    p.ratio = ratio;
    const double dfar = X - knots.back();
    p.c = (ratio - 1.0) / dfar;

    std::vector<double> br{0.0, X};
    for (std::size_t k = 0; k < knots.size(); ++k) {
        br.push_back(knots[k]);
        if (k + 1 < knots.size()) br.push_back(0.5 * (knots[k] + knots[k + 1]));
        br.push_back(knots[k] - dfar);
        br.push_back(knots[k] + dfar);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::remove_if(br.begin(), br.end(), [&](double b) { return b < 0.0 || b > X; }),
             br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    double S = 0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        Segment g;
        g.s0 = br[k];
        g.s1 = br[k + 1];
        if (!(g.s1 > g.s0)) continue;
        const double mid = 0.5 * (g.s0 + g.s1);
        double best = std::numeric_limits<double>::infinity();
        for (double kn : knots) {
            if (std::abs(mid - kn) < best) {
                best = std::abs(mid - kn);
                g.knot = kn;
            }
        }
        g.side = mid >= g.knot ? 1 : -1;
        g.capped = 1.0 + p.c * best >= ratio;
        g.S0 = S;
        S += p.integral(g);
        p.segs.push_back(g);
    }
    p.total = S;
    return p;
}

std::vector<double> mirror(const std::vector<double>& positive, bool has_zero) {
    std::vector<double> out;
    out.reserve(2 * positive.size());
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
        if (has_zero && *it == 0.0) continue;
        out.push_back(-*it);
    }
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

}  // namespace

double Grid::min_spacing_x() const { return min_diff(x); }
double Grid::min_spacing_y() const { return min_diff(y); }

const char* to_string(Region r) {
    switch (r) {
        case Region::Film: return "film";
        case Region::Aperture: return "aperture";
        case Region::Exterior: return "exterior";
    }
    return "?";
}

std::vector<double> stretched_axis(std::size_t n, double X, std::vector<double> knots,
                                   double ratio) {
    if (n < 2) throw ConfigError("axis needs at least 2 points");
    if (!(X > 0.0)) throw ConfigError("axis half extent must be positive");
    if (!(ratio >= 1.0) || !std::isfinite(ratio))
        throw ConfigError("refinement ratio must be >= 1");
    for (double& k : knots) k = std::abs(k);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    if (!knots.empty() && knots.back() >= X)
        throw ConfigError("refinement knot outside the grid extent");

    const bool odd = n % 2 == 1;
    const std::size_t npos = odd ? (n + 1) / 2 : n / 2;
    std::vector<double> pos(npos);

    if (ratio == 1.0 || knots.empty()) {
        const double h = 2.0 * X / static_cast<double>(n);
        for (std::size_t j = 0; j < npos; ++j)
            pos[j] = (odd ? static_cast<double>(j) : static_cast<double>(j) + 0.5) * h;
        return mirror(pos, odd);
    }

    const Profile p = build_profile(X, knots, ratio);
    for (std::size_t j = 0; j < npos; ++j) {
        const double frac = static_cast<double>(2 * j + (odd ? 0 : 1)) / static_cast<double>(n);
        pos[j] = j == 0 && odd ? 0.0 : p.invert(frac * p.total);
    }
    return mirror(pos, odd);
}

double ratio_for_spacing(std::size_t n, double X, const std::vector<double>& knots, double target) {
    if (!(target > 0.0)) throw ConfigError("target edge spacing must be positive");
    auto spacing = [&](double r) { return min_diff(stretched_axis(n, X, knots, r)); };
    if (spacing(1.0) <= target) return 1.0;
    double lo = 0.0, hi = std::log(1e15);
    if (spacing(std::exp(hi)) > target) {
        std::ostringstream os;
        os << "edge spacing " << target << " m is not reachable with " << n << " points";
        throw ConfigError(os.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (spacing(std::exp(mid)) > target ? lo : hi) = mid;
    }
    return std::exp(hi);
}

GridPtr grid_from_axes(std::vector<double> x, std::vector<double> y, double X,
                       const ApertureGeometry& geometry, double film_half_extent) {
    auto check = [X](const std::vector<double>& c, const char* name) {
        if (c.size() < 2) throw ConfigError(std::string(name) + " axis needs at least 2 points");
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!(std::abs(c[k]) < X))
                throw ConfigError(std::string(name) + " coordinate outside the grid extent");
            if (k > 0 && !(c[k] > c[k - 1]))
                throw ConfigError(std::string(name) + " coordinates must be strictly increasing");
        }
    };
    check(x, "x");
    check(y, "y");
    auto g = std::make_shared<Grid>();
    g->half_extent = X;
    g->film_half_extent = film_half_extent;
    g->wx = voronoi_widths(x, X);
    g->wy = voronoi_widths(y, X);
    g->x = std::move(x);
    g->y = std::move(y);
    const std::size_t N = g->size();
    g->weights.resize(N);
    g->labels.resize(N);
    for (std::size_t i = 0; i < g->nx(); ++i) {
        for (std::size_t j = 0; j < g->ny(); ++j) {
            const std::size_t k = g->index(i, j);
            g->weights[k] = g->wx[i] * g->wy[j];
            const Vec2 p(g->x[i], g->y[j]);
            if (point_in_aperture(geometry, p))
                g->labels[k] = Region::Aperture;
            else if (std::abs(p.x()) < film_half_extent && std::abs(p.y()) < film_half_extent)
                g->labels[k] = Region::Film;
            else
                g->labels[k] = Region::Exterior;
        }
    }
    return g;
}

GridPtr make_grid(const ApertureGeometry& geometry, const FilmSpec& film, const GridSpec& spec) {
    validate(film, geometry);
    if (spec.nx < 16 || spec.ny < 16) throw ConfigError("grid needs at least 16 points per axis");
    const double X = film.grid_half_extent;

    auto axis = [&](int n, double ratio, std::vector<double> knots, const std::vector<double>& extra,
                    const std::optional<double>& spacing) {
        knots.insert(knots.end(), extra.begin(), extra.end());
        for (double& k : knots) k = std::abs(k);
        if (spacing) ratio = ratio_for_spacing(static_cast<std::size_t>(n), X, knots, *spacing);
        return stretched_axis(static_cast<std::size_t>(n), X, knots, ratio);
    };
    auto xs = axis(spec.nx, spec.ratio_x, edge_knots_x(geometry), spec.extra_knots_x, spec.edge_spacing_x);
    auto ys = axis(spec.ny, spec.ratio_y, edge_knots_y(geometry), spec.extra_knots_y, spec.edge_spacing_y);
    return grid_from_axes(std::move(xs), std::move(ys), X, geometry, film.film_half_extent);
}

GridPtr make_grid(const ApertureGeometry& geometry, const FilmSpec& film, int n_x, int n_y,
                  double refinement_ratio) {
    GridSpec s;
    s.nx = n_x;
    s.ny = n_y;
    s.ratio_x = s.ratio_y = refinement_ratio;
    return make_grid(geometry, film, s);
}

}  // namespace fluxfocus
