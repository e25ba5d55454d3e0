#pragma once

#include "fluxfocus/constants.hpp"
#include "fluxfocus/geometry.hpp"

namespace fluxfocus {

struct Dipole {
    Vec3 position = Vec3::Zero();  // m
    Vec3 moment = Vec3::UnitZ();   // A m^2

    // in-plane source pointing along +z
    static Dipole in_plane(const Vec2& xy, double m = constants::nv_moment) {
        return Dipole{Vec3(xy.x(), xy.y(), 0.0), Vec3(0.0, 0.0, m)};
    }
};

}  // namespace fluxfocus
