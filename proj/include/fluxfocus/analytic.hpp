#pragma once

#include <Eigen/Core>

#include "fluxfocus/geometry.hpp"

// Closed-form fields for a point dipole near an infinite zero-penetration-depth
// film occupying the plane z = 0 outside a circular aperture of radius R.
// The film is sigma = {z = 0, rho >= R}.
namespace fluxfocus::analytic {

// Dirichlet Green function normalised so that the free-space limit is
// 1/(4 pi |r - r'|); units 1/length.
struct GreenEval {
    double value;
    double f_plus, f_minus;
    double d_plus, d_minus;
    int epsilon_sign;
};

GreenEval green_circular(const Vec3& r, const Vec3& r_src, double R);

struct NVector {
    Vec3 n;        // (C x, C y, z)
    double c;
    double alpha;
};

NVector n_vector(const Vec3& r, double R);

// d n_i / d x_j and div n; singular on the edge circle
struct NVectorJacobian {
    Eigen::Matrix3d dn;
    double divergence;
};

NVectorJacobian n_vector_jacobian(const Vec3& r, double R);

// dipole at the aperture centre
Vec3 field_centered(const Vec3& m, const Vec3& r, double R);
Vec3 vector_potential_centered(const Vec3& m, const Vec3& r, double R);

enum class Orientation { Z, Y, X };

// in-plane field on the x axis (or at radius rho for Z) of a centred dipole of
// magnitude m along the given axis; returns -inf in the divergent component at the edge
Vec3 field_inplane(Orientation orientation, double m, double coord, double R);

// dipole at (x0, 0, 0) inside the aperture
Vec3 field_shifted(const Vec3& m, double x0, const Vec3& r, double R);

// d^2 G / dr_a dr'_b at (r, r_src), exact (hyper-dual evaluation)
Eigen::Matrix3d green_mixed_hessian(const Vec3& r, const Vec3& r_src, double R);

enum class EdgeCase { Centered, Shifted };

// leading-order B_z at distance d from the edge (probe inside the aperture).
// Shifted: -mu0 m / (4 pi^2 d R^2) as commonly quoted; the exact on-axis field of
// field_shifted tends to a quarter of it, i.e. the same form with R replaced by
// the separation 2R.
double edge_asymptote(EdgeCase kind, double m, double d, double R);

Vec3 free_dipole_field(const Vec3& m, const Vec3& r_rel);

}  // namespace fluxfocus::analytic
