#include "fluxfocus/power_law.hpp"

#include <algorithm>
#include <cmath>

#include "fluxfocus/errors.hpp"

namespace fluxfocus::experiments {

std::vector<SeriesPoint> smooth(const std::vector<SeriesPoint>& s, int window) {
    if (window < 1 || window % 2 == 0) throw ConfigError("smoothing window must be odd and >= 1");
    if (static_cast<std::size_t>(window) > s.size())
        throw ConfigError("smoothing window larger than the series");
    const auto n = static_cast<long>(s.size());
    const long half = window / 2;
    std::vector<SeriesPoint> out(s.size());
    for (long k = 0; k < n; ++k) {
        const long h = std::min({half, k, n - 1 - k});
        double mean = 0;
        for (long j = k - h; j <= k + h; ++j) mean += s[static_cast<std::size_t>(j)].y;
        const double cnt = static_cast<double>(2 * h + 1);
        mean /= cnt;
        double var = 0;
        for (long j = k - h; j <= k + h; ++j) {
            const double d = s[static_cast<std::size_t>(j)].y - mean;
            var += d * d;
        }
        auto& o = out[static_cast<std::size_t>(k)];
        o.x = s[static_cast<std::size_t>(k)].x;
        o.y = h == 0 ? s[static_cast<std::size_t>(k)].y : mean;
        o.sigma = std::sqrt(var / cnt);
    }
    return out;
}

PowerLawFit fit_power_law(const std::vector<SeriesPoint>& pts) {
    if (pts.size() < min_fit_points) throw ConfigError("power-law fit needs at least 5 points");
    const bool positive = pts.front().y > 0;
    bool all_sigma = true;
    for (const auto& p : pts) {
        if (!(p.y != 0.0) || !std::isfinite(p.y)) throw DomainError("power-law fit: zero or non-finite value");
        if ((p.y > 0) != positive) throw DomainError("power-law fit: values of mixed sign");
        if (!(p.x > 0.0)) throw DomainError("power-law fit: abscissa must be positive");
        if (!(p.sigma > 0.0)) all_sigma = false;
    }
    const std::size_t n = pts.size();
    std::vector<double> X(n), Y(n), W(n);
    for (std::size_t k = 0; k < n; ++k) {
        X[k] = std::log(pts[k].x);
        Y[k] = std::log(std::abs(pts[k].y));
        const double sl = pts[k].sigma / std::abs(pts[k].y);
        W[k] = all_sigma ? 1.0 / (sl * sl) : 1.0;
    }
    // centre x for a well conditioned normal system
    double S = 0, mx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        S += W[k];
        mx += W[k] * X[k];
    }
    mx /= S;
    double my = 0;
    for (std::size_t k = 0; k < n; ++k) my += W[k] * Y[k];
    my /= S;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += W[k] * (X[k] - mx) * (X[k] - mx);
        sxy += W[k] * (X[k] - mx) * (Y[k] - my);
    }
    if (!(sxx > 0)) throw DomainError("power-law fit: all abscissae equal");
    PowerLawFit f;
    f.points = n;
    f.weighted = all_sigma;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double chi2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = Y[k] - f.intercept - f.slope * X[k];
        chi2 += W[k] * r * r;
    }
    const double dof = static_cast<double>(n - 2);
    f.reduced_chi2 = chi2 / dof;
    f.slope_err = std::sqrt(f.reduced_chi2 / sxx);
    f.intercept_err = std::sqrt(f.reduced_chi2 * (1.0 / S + mx * mx / sxx));
    return f;
}

}  // namespace fluxfocus::experiments
