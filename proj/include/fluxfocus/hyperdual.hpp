#pragma once

#include <cmath>

namespace fluxfocus {

// a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0: carries f, df/dx1, df/dx2 and
// the exact mixed second derivative d2f/dx1dx2 through a computation
struct HyperDual {
    double f = 0, d1 = 0, d2 = 0, d12 = 0;

    HyperDual() = default;
    HyperDual(double v) : f(v) {}  // NOLINT: implicit promotion of constants
    HyperDual(double v, double a, double b, double c) : f(v), d1(a), d2(b), d12(c) {}
};

inline double real(double x) { return x; }
inline double real(const HyperDual& x) { return x.f; }

// chain rule for a scalar function with value v, first derivative p, second q
inline HyperDual lift(const HyperDual& x, double v, double p, double q) {
    return {v, p * x.d1, p * x.d2, p * x.d12 + q * x.d1 * x.d2};
}

inline HyperDual operator-(const HyperDual& a) { return {-a.f, -a.d1, -a.d2, -a.d12}; }
inline HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
}
inline HyperDual operator-(const HyperDual& a, const HyperDual& b) {
    return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
}
inline HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.f * b.f, a.f * b.d1 + a.d1 * b.f, a.f * b.d2 + a.d2 * b.f,
            a.f * b.d12 + a.d1 * b.d2 + a.d2 * b.d1 + a.d12 * b.f};
}
inline HyperDual inverse(const HyperDual& a) {
    const double i = 1.0 / a.f;
    return lift(a, i, -i * i, 2.0 * i * i * i);
}
inline HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * inverse(b); }

inline HyperDual sqrt(const HyperDual& a) {
    const double s = std::sqrt(a.f);
    return lift(a, s, 0.5 / s, -0.25 / (s * a.f));
}
inline HyperDual atan(const HyperDual& a) {
    const double w = 1.0 / (1.0 + a.f * a.f);
    return lift(a, std::atan(a.f), w, -2.0 * a.f * w * w);
}

}  // namespace fluxfocus
