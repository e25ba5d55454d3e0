#pragma once

#include <cstddef>
#include <vector>

namespace fluxfocus::experiments {

struct SeriesPoint {
    double x;          // L
    double y;          // B
    double sigma = 0;  // standard error of y
};

// Centred moving mean; windows shrink symmetrically at the ends so every
// window stays centred. The error is the population standard deviation of the
// window. window = 1 is the identity.
std::vector<SeriesPoint> smooth(const std::vector<SeriesPoint>& series, int window);

struct PowerLawFit {
    double slope = 0;
    double slope_err = 0;
    double intercept = 0;      // ln of the prefactor: ln|y| = intercept + slope ln x
    double intercept_err = 0;
    std::size_t points = 0;
    bool weighted = false;     // false when some sigma was zero and equal weights were used
    double reduced_chi2 = 0;
};

// weighted least squares on (ln x, ln|y|) with weights 1/sigma_log^2,
// sigma_log = sigma/|y|; parameter covariance scaled by the residual variance
PowerLawFit fit_power_law(const std::vector<SeriesPoint>& points);

inline constexpr std::size_t min_fit_points = 5;

}  // namespace fluxfocus::experiments
