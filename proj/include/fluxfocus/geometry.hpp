#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace fluxfocus {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Circle {
    double radius;
};

struct Ellipse {
    double semi_x;  // a
    double semi_y;  // b
};

// two discs at (+-L/2, 0) joined by the rectangle |x| < L/2, |y| < channel_half_width
struct DogBone {
    double end_radius;
    double center_distance;
    double channel_half_width;
};

using ApertureGeometry = std::variant<Circle, Ellipse, DogBone>;

// throws ConfigError on non-positive lengths or overlapping dog-bone ends
void validate(const ApertureGeometry& geometry);

// strict interior; the boundary itself belongs to the superconductor
bool point_in_aperture(const ApertureGeometry& geometry, const Vec2& p);

// largest coordinate extent of the aperture, max(|x|, |y|) over its closure
double largest_dimension(const ApertureGeometry& geometry);

// x and y positions of the aperture outline where grid refinement is wanted
std::vector<double> edge_knots_x(const ApertureGeometry& geometry);
std::vector<double> edge_knots_y(const ApertureGeometry& geometry);

std::string describe(const ApertureGeometry& geometry);

}  // namespace fluxfocus
