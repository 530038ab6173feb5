#pragma once

#include <cmath>
#include <numbers>

#include "saddle/error.hpp"

namespace saddle {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A vector in the plane. Holonomy vectors of saddle connections and
/// polygon vertices both live here.
struct PlanarVector
{
    double x = 0.0;
    double y = 0.0;

    constexpr PlanarVector() = default;
    constexpr PlanarVector(double x_, double y_) : x(x_), y(y_) {}

    /// Throws DomainError when either coordinate is NaN or infinite.
    static PlanarVector checked(double x, double y)
    {
        if(!std::isfinite(x) || !std::isfinite(y))
            throw DomainError("non-finite vector coordinate");
        return {x, y};
    }

    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }

    constexpr PlanarVector operator+(PlanarVector o) const { return {x + o.x, y + o.y}; }
    constexpr PlanarVector operator-(PlanarVector o) const { return {x - o.x, y - o.y}; }
    constexpr PlanarVector operator-() const { return {-x, -y}; }
    constexpr PlanarVector operator*(double s) const { return {x * s, y * s}; }
    PlanarVector& operator+=(PlanarVector o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr bool operator==(const PlanarVector&) const = default;
};

constexpr double cross(PlanarVector a, PlanarVector b) { return a.x * b.y - a.y * b.x; }
constexpr double dot(PlanarVector a, PlanarVector b) { return a.x * b.x + a.y * b.y; }

/// Argument in [0, 2π). Angles within 1e-12 below 2π are snapped to 0 so that
/// vectors that are horizontal up to rounding sort first.
inline double angle_of(PlanarVector v)
{
    double a = std::atan2(v.y, v.x);
    if(a < 0.0)
        a += two_pi;
    if(a >= two_pi - 1e-12)
        a = 0.0;
    return a;
}

/// Reduce an angle into [0, 2π).
inline double wrap_angle(double a)
{
    a = std::fmod(a, two_pi);
    if(a < 0.0)
        a += two_pi;
    if(a >= two_pi)
        a = 0.0;
    return a;
}

} // namespace saddle
