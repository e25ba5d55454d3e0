#include "fluxfocus/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluxfocus/errors.hpp"

namespace fluxfocus {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// shared by Circle and Ellipse so that Ellipse{R, R} labels exactly like Circle{R}
bool inside_ellipse(double a, double b, double x, double y) {
    const double u = x / a;
    const double v = y / b;
    return u * u + v * v < 1.0;
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string("aperture ") + name + " must be positive and finite");
}

}  // namespace

void validate(const ApertureGeometry& geometry) {
    std::visit(overloaded{
                   [](const Circle& c) { require_positive(c.radius, "radius"); },
                   [](const Ellipse& e) {
                       require_positive(e.semi_x, "semi_x");
                       require_positive(e.semi_y, "semi_y");
                   },
                   [](const DogBone& d) {
                       require_positive(d.end_radius, "end_radius");
                       require_positive(d.center_distance, "center_distance");
                       require_positive(d.channel_half_width, "channel_half_width");
                       if (!(d.center_distance > 2.0 * d.end_radius))
                           throw ConfigError("dog-bone ends overlap: center_distance must exceed 2*end_radius");
                   },
               },
               geometry);
}

bool point_in_aperture(const ApertureGeometry& geometry, const Vec2& p) {
    const double x = p.x(), y = p.y();
    return std::visit(
        overloaded{
            [&](const Circle& c) { return inside_ellipse(c.radius, c.radius, x, y); },
            [&](const Ellipse& e) { return inside_ellipse(e.semi_x, e.semi_y, x, y); },
            [&](const DogBone& d) {
                const double h = 0.5 * d.center_distance;
                if (std::abs(x) < h && std::abs(y) < d.channel_half_width) return true;
                return inside_ellipse(d.end_radius, d.end_radius, x - h, y) ||
                       inside_ellipse(d.end_radius, d.end_radius, x + h, y);
            },
        },
        geometry);
}

double largest_dimension(const ApertureGeometry& geometry) {
    return std::visit(overloaded{
                          [](const Circle& c) { return c.radius; },
                          [](const Ellipse& e) { return std::max(e.semi_x, e.semi_y); },
                          [](const DogBone& d) {
                              return std::max(0.5 * d.center_distance + d.end_radius,
                                              std::max(d.end_radius, d.channel_half_width));
                          },
                      },
                      geometry);
}

std::vector<double> edge_knots_x(const ApertureGeometry& geometry) {
    return std::visit(overloaded{
                          [](const Circle& c) { return std::vector<double>{c.radius}; },
                          [](const Ellipse& e) { return std::vector<double>{e.semi_x}; },
                          [](const DogBone& d) {
                              const double h = 0.5 * d.center_distance;
                              return std::vector<double>{h - d.end_radius, h + d.end_radius};
                          },
                      },
                      geometry);
}

std::vector<double> edge_knots_y(const ApertureGeometry& geometry) {
    return std::visit(overloaded{
                          [](const Circle& c) { return std::vector<double>{c.radius}; },
                          [](const Ellipse& e) { return std::vector<double>{e.semi_y}; },
                          [](const DogBone& d) {
                              return std::vector<double>{d.channel_half_width, d.end_radius};
                          },
                      },
                      geometry);
}

std::string describe(const ApertureGeometry& geometry) {
    std::ostringstream os;
    os.precision(6);
    std::visit(overloaded{
                   [&](const Circle& c) { os << "circle R=" << c.radius << " m"; },
                   [&](const Ellipse& e) { os << "ellipse a=" << e.semi_x << " m b=" << e.semi_y << " m"; },
                   [&](const DogBone& d) {
                       os << "dogbone end_radius=" << d.end_radius << " m L=" << d.center_distance
                          << " m channel_half_width=" << d.channel_half_width << " m";
                   },
               },
               geometry);
    return os.str();
}

}  // namespace fluxfocus
