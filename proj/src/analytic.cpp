#include "fluxfocus/analytic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fluxfocus/constants.hpp"
#include "fluxfocus/errors.hpp"
#include "fluxfocus/hyperdual.hpp"

namespace fluxfocus::analytic {
namespace {

using constants::mu0;
using constants::pi;

constexpr double two_over_pi = 2.0 / pi;

// relative distance to the edge circle below which we refuse to evaluate
constexpr double edge_tolerance = 1e-12;

void require_radius(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("aperture radius must be positive");
}

bool on_edge_circle(const Vec3& r, double R) {
    const double u = r.squaredNorm() - R * R;
    const double s = std::sqrt(u * u + 4.0 * R * R * r.z() * r.z());
    return s <= edge_tolerance * R * R;
}

template <class T>
struct Parts {
    T value, f_plus, f_minus, d_plus, d_minus;
    int eps;
};

// The kernel is written for z + z' >= 0 and mirrored otherwise. F is
// evaluated so that no cancellation occurs: when the product term is negative
// the brace equals (u1 v2 - v1 u2)^2 / (sqrt(P P') - product).
template <class T>
Parts<T> green_parts(T x, T y, T z, T xs, T ys, T zs, double R) {
    using std::atan;
    using std::sqrt;
    if (real(z) + real(zs) < 0.0) {
        z = -z;
        zs = -zs;
    }
    const double R2 = R * R;
    const T u1 = x * x + y * y + z * z - R2;
    const T v1 = 2.0 * R * z;
    const T u2 = xs * xs + ys * ys + zs * zs - R2;
    const T v2 = 2.0 * R * zs;
    const T sp = sqrt(u1 * u1 + v1 * v1);
    const T sps = sqrt(u2 * u2 + v2 * v2);

    auto brace_root = [&](double s) -> T {
        const T prod = u1 * u2 + s * (v1 * v2);
        if (real(prod) >= 0.0) return sqrt(prod + sp * sps);
        T num = u1 * (s * v2) - v1 * u2;
        if (real(num) < 0.0) num = -num;
        return num / sqrt(sp * sps - prod);
    };
    const double k = 1.0 / (std::sqrt(2.0) * R);
    const T fp = k * brace_root(-1.0);
    const T fm = k * brace_root(+1.0);

    const T dx = x - xs, dy = y - ys;
    const T dp = sqrt(dx * dx + dy * dy + (z + zs) * (z + zs));
    const T dm = sqrt(dx * dx + dy * dy + (z - zs) * (z - zs));

    // sign term; on its zero set take the limit from z, z' > 0
    int eps;
    const double a = real(z) * real(u2) + real(zs) * real(u1);
    if (a > 0.0)
        eps = 1;
    else if (a < 0.0)
        eps = -1;
    else
        eps = (real(u1) + real(u2) + 4.0 * real(z) * real(zs)) > 0.0 ? 1 : -1;

    const T term_m = (1.0 + two_over_pi * atan(fm / dm)) / dm;
    const T term_p = (1.0 + static_cast<double>(eps) * two_over_pi * atan(fp / dp)) / dp;
    return {(term_m - term_p) * (1.0 / (8.0 * pi)), fp, fm, dp, dm, eps};
}

void check_green_args(const Vec3& r, const Vec3& rs, double R) {
    require_radius(R);
    if ((r - rs).norm() == 0.0) throw SingularityError("green function at coincident points");
    Vec3 mirrored(rs.x(), rs.y(), -rs.z());
    if ((r - mirrored).norm() == 0.0)
        throw SingularityError("green function at mirror-coincident points");
    if (on_edge_circle(r, R) || on_edge_circle(rs, R))
        throw SingularityError("green function on the aperture edge circle");
    // the closed form holds for both points in the same closed half space
    if (r.z() * rs.z() < 0.0)
        throw DomainError("green function needs observer and source on the same side of the film plane");
}

double c_of_alpha(double a) { return two_over_pi * (std::atan(a) + a / (1.0 + a * a)); }

struct AlphaData {
    double r2, r, u, s, alpha;
    bool outside;  // r > R branch
};

AlphaData alpha_data(const Vec3& p, double R) {
    AlphaData d;
    d.r2 = p.squaredNorm();
    d.r = std::sqrt(d.r2);
    const double R2 = R * R;
    d.u = d.r2 - R2;
    d.s = std::sqrt(d.u * d.u + 4.0 * R2 * p.z() * p.z());
    d.outside = d.u > 0.0;
    const double Q = d.outside ? 4.0 * R2 * p.z() * p.z() / (d.s + d.u) : d.s - d.u;
    d.alpha = std::sqrt(0.5 * Q) / d.r;
    return d;
}

}  // namespace

GreenEval green_circular(const Vec3& r, const Vec3& rs, double R) {
    check_green_args(r, rs, R);
    const auto p = green_parts<double>(r.x(), r.y(), r.z(), rs.x(), rs.y(), rs.z(), R);
    return {p.value, p.f_plus, p.f_minus, p.d_plus, p.d_minus, p.eps};
}

Eigen::Matrix3d green_mixed_hessian(const Vec3& r, const Vec3& rs, double R) {
    check_green_args(r, rs, R);
    Eigen::Matrix3d H;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            std::array<HyperDual, 3> o{HyperDual(r.x()), HyperDual(r.y()), HyperDual(r.z())};
            std::array<HyperDual, 3> s{HyperDual(rs.x()), HyperDual(rs.y()), HyperDual(rs.z())};
            o[a].d1 = 1.0;
            s[b].d2 = 1.0;
            H(a, b) = green_parts<HyperDual>(o[0], o[1], o[2], s[0], s[1], s[2], R).value.d12;
        }
    }
    return H;
}

NVector n_vector(const Vec3& r, double R) {
    require_radius(R);
    if (r.norm() == 0.0) throw SingularityError("n vector at the origin");
    const auto d = alpha_data(r, R);
    const double C = c_of_alpha(d.alpha);
    return {Vec3(C * r.x(), C * r.y(), r.z()), C, d.alpha};
}

NVectorJacobian n_vector_jacobian(const Vec3& p, double R) {
    require_radius(R);
    if (p.norm() == 0.0) throw SingularityError("n vector derivative at the origin");
    if (on_edge_circle(p, R)) throw SingularityError("n vector derivative on the aperture edge circle");
    const auto d = alpha_data(p, R);
    const double R2 = R * R;
    const double a = d.alpha;

    Vec3 da;
    for (int j = 0; j < 3; ++j) {
        const double xj = p[j];
        const double du = 2.0 * xj;
        const double ds = (d.u * du + (j == 2 ? 4.0 * R2 * p.z() : 0.0)) / d.s;
        if (d.outside) {
            // alpha = sqrt(2) R |z| / (r sqrt(s + u)); z = 0 is the limit from z > 0
            const double su = d.s + d.u;
            const double zsign = p.z() < 0.0 ? -1.0 : 1.0;
            const double lead = j == 2 ? std::sqrt(2.0) * R * zsign / (d.r * std::sqrt(su)) : 0.0;
            da[j] = lead - a * ((ds + du) / (2.0 * su) + xj / d.r2);
        } else {
            const double Q = d.s - d.u;
            const double dQ = ds - du;
            da[j] = a * (dQ / (2.0 * Q) - xj / d.r2);
        }
    }
    const double C = c_of_alpha(a);
    const double w = 1.0 + a * a;
    const Vec3 dC = (2.0 * two_over_pi / (w * w)) * da;

    NVectorJacobian J;
    J.dn.setZero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) J.dn(i, j) = p[i] * dC[j];
        J.dn(i, i) += C;
    }
    J.dn(2, 2) = 1.0;
    J.divergence = 2.0 * C + p.x() * dC.x() + p.y() * dC.y() + 1.0;
    return J;
}

Vec3 field_centered(const Vec3& m, const Vec3& r, double R) {
    const auto J = n_vector_jacobian(r, R);
    const auto nv = n_vector(r, R);
    const double rn = r.norm();
    const Vec3 rhat = r / rn;
    const Vec3 nhat = nv.n / rn;
    const Vec3 bracket = 3.0 * m.dot(rhat) * nhat - J.dn * m + m * (J.divergence - 3.0 * rhat.dot(nhat));
    return mu0 / (4.0 * pi * rn * rn * rn) * bracket;
}

Vec3 vector_potential_centered(const Vec3& m, const Vec3& r, double R) {
    const auto nv = n_vector(r, R);
    const double rn = r.norm();
    return mu0 / (4.0 * pi * rn * rn) * m.cross(nv.n / rn);
}

Vec3 field_inplane(Orientation orientation, double m, double coord, double R) {
    require_radius(R);
    if (!(coord > 0.0)) throw DomainError("in-plane field needs a positive coordinate");
    const double u = coord / R;
    const double scale = mu0 * m / (4.0 * pi * coord * coord * coord);
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    switch (orientation) {
        case Orientation::Z: {
            if (u > 1.0) return Vec3::Zero();
            if (u == 1.0) return {0.0, 0.0, neg_inf};
            const double bracket = std::acos(u) + u * (1.0 + u * u) / std::sqrt(1.0 - u * u);
            return {0.0, 0.0, -two_over_pi * bracket * scale};
        }
        case Orientation::Y: {
            if (u > 1.0) return {0.0, scale, 0.0};
            if (u == 1.0) return {0.0, neg_inf, 0.0};
            const double bracket = 1.0 - 2.0 * two_over_pi * (std::acos(u) + u / std::sqrt(1.0 - u * u));
            return {0.0, bracket * scale, 0.0};
        }
        case Orientation::X: {
            if (u >= 1.0) return {scale, 0.0, 0.0};
            const double bracket = two_over_pi * (std::acos(u) + u * std::sqrt(1.0 - u * u) + 0.5 * pi);
            return {bracket * scale, 0.0, 0.0};
        }
    }
    return Vec3::Zero();
}

Vec3 field_shifted(const Vec3& m, double x0, const Vec3& r, double R) {
    require_radius(R);
    if (!(std::abs(x0) < R)) {
        std::ostringstream os;
        os << "shifted dipole at x0=" << x0 << " m is not strictly inside the aperture R=" << R << " m";
        throw ConfigError(os.str());
    }
    const Vec3 src(x0, 0.0, 0.0);
    if ((r - src).norm() == 0.0) throw SingularityError("field requested at the dipole position");
    if (on_edge_circle(r, R)) throw SingularityError("field requested on the aperture edge circle");

    const double rho = std::hypot(r.x(), r.y());
    if (r.z() == 0.0 && rho > R) {
        // on the film the normal component vanishes; the tangential part is the
        // limit from above
        const double delta = 1e-6 * std::min(rho - R, (r - src).norm());
        Vec3 b = field_shifted(m, x0, Vec3(r.x(), r.y(), delta), R);
        b.z() = 0.0;
        return b;
    }
    const Eigen::Matrix3d H = green_mixed_hessian(r, src, R);
    return mu0 * (H.trace() * m - H.transpose() * m);
}

double edge_asymptote(EdgeCase kind, double m, double d, double R) {
    require_radius(R);
    if (!(d > 0.0)) throw DomainError("edge distance must be positive");
    if (!(d < R)) throw DomainError("edge asymptote needs d < R");
    if (kind == EdgeCase::Centered)
        return -mu0 * m / (std::sqrt(2.0) * pi * pi) / (std::sqrt(d) * std::pow(R, 2.5));
    return -mu0 * m / (4.0 * pi * pi) / (d * R * R);
}

Vec3 free_dipole_field(const Vec3& m, const Vec3& r_rel) {
    const double r = r_rel.norm();
    if (r == 0.0) throw SingularityError("free dipole field at the source");
    const Vec3 rhat = r_rel / r;
    return mu0 / (4.0 * pi * r * r * r) * (3.0 * m.dot(rhat) * rhat - m);
}

}  // namespace fluxfocus::analytic
