#pragma once

#include <cmath>
#include <optional>

#include "saddle/error.hpp"
#include "saddle/vector.hpp"

// Length of a vector under the diagonal flow, f_v(t) = |d^t v|, and the
// relative function f_{v,w} = f_v - f_w for first-quadrant vectors.

namespace saddle {

/// A vector with strictly positive entries.
struct QuadrantVector
{
    double v1 = 1.0;
    double v2 = 1.0;

    static QuadrantVector checked(double v1, double v2)
    {
        if(!(v1 > 0.0) || !(v2 > 0.0) || !std::isfinite(v1) || !std::isfinite(v2))
            throw DomainError("quadrant vector needs strictly positive finite entries");
        return {v1, v2};
    }

    /// Reflect an arbitrary vector with non-zero entries into the first quadrant.
    static QuadrantVector reflected(PlanarVector u) { return checked(std::abs(u.x), std::abs(u.y)); }

    double norm() const { return std::hypot(v1, v2); }
    PlanarVector vec() const { return {v1, v2}; }
    bool operator==(const QuadrantVector&) const = default;
};

struct DeformedLength
{
    double f; // |d^t v|
    double h; // e^{2t} v1^2 - e^{-2t} v2^2
};

inline DeformedLength deformed_length(QuadrantVector v, double t)
{
    const double a = std::exp(t) * v.v1;
    const double b = std::exp(-t) * v.v2;
    return {std::hypot(a, b), a * a - b * b};
}

struct LengthDerivatives
{
    double first;
    double second;
};

/// f' = h/f and f'' = f + 4 v1² v2² / f³.
inline LengthDerivatives length_derivatives(QuadrantVector v, double t)
{
    const auto [f, h] = deformed_length(v, t);
    const double p = v.v1 * v.v2;
    return {h / f, f + 4.0 * p * p / (f * f * f)};
}

/// The same derivatives through the angle θ of V = d^t v:
/// f' = |V| cos 2θ and f'' = |V| (1 + sin² 2θ).
inline LengthDerivatives length_derivatives_angular(QuadrantVector v, double t)
{
    const double a = std::exp(t) * v.v1;
    const double b = std::exp(-t) * v.v2;
    const double r = std::hypot(a, b);
    const double theta = std::atan2(b, a);
    const double s = std::sin(2.0 * theta);
    return {r * std::cos(2.0 * theta), r * (1.0 + s * s)};
}

/// Time of the global minimum of f_v: m(v) = ½ log(v2 / v1).
inline double min_time(QuadrantVector v) { return 0.5 * std::log(v.v2 / v.v1); }

/// f_{v,w}(t) = f_v(t) - f_w(t).
inline double relative_length(QuadrantVector v, QuadrantVector w, double t)
{
    return deformed_length(v, t).f - deformed_length(w, t).f;
}

inline double relative_length_derivative(QuadrantVector v, QuadrantVector w, double t)
{
    return length_derivatives(v, t).first - length_derivatives(w, t).first;
}

struct PairSeparation
{
    enum class Kind
    {
        decreasing_with_zero,
        increasing_with_zero,
        no_zero,
    };

    QuadrantVector v;
    QuadrantVector w;
    std::optional<double> r;
    Kind kind = Kind::no_zero;
};

inline const char* to_string(PairSeparation::Kind k)
{
    switch(k)
    {
    case PairSeparation::Kind::decreasing_with_zero: return "decreasing-with-zero";
    case PairSeparation::Kind::increasing_with_zero: return "increasing-with-zero";
    case PairSeparation::Kind::no_zero: return "no-zero";
    }
    return "?";
}

/// Classify f_{v,w} and locate its zero.
///
/// f_{v,w} vanishes iff one vector is strictly larger in the first coordinate
/// and strictly smaller in the second; the zero is then
/// r = ¼ log((v2² - w2²) / (w1² - v1²)). With w1 > v1, v2 > w2 the function is
/// strictly decreasing, in the mirrored case strictly increasing. Coordinates
/// equal to within 1e-12 relative are treated as equal, so no zero exists.
inline PairSeparation pair_zero(QuadrantVector v, QuadrantVector w)
{
    if(v == w)
        throw DomainError("pair_zero requires v != w");

    auto differ = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)); };

    PairSeparation out{v, w, std::nullopt, PairSeparation::Kind::no_zero};
    if(!differ(v.v1, w.v1) || !differ(v.v2, w.v2))
        return out;

    const bool w_right_v_up = w.v1 > v.v1 && v.v2 > w.v2;
    const bool v_right_w_up = v.v1 > w.v1 && w.v2 > v.v2;
    if(!w_right_v_up && !v_right_w_up)
        return out;

    const double num = (v.v2 - w.v2) * (v.v2 + w.v2);
    const double den = (w.v1 - v.v1) * (w.v1 + v.v1);
    out.r = 0.25 * std::log(num / den);
    out.kind = w_right_v_up ? PairSeparation::Kind::decreasing_with_zero : PairSeparation::Kind::increasing_with_zero;
    return out;
}

/// Linearization coefficient α(u) = (u1² - u2²)/|u|, the derivative of
/// s ↦ |d^s u| at 0.
inline double linearization_coefficient(PlanarVector u)
{
    const double n = u.norm();
    if(n == 0.0)
        throw DomainError("zero vector");
    return (u.x - u.y) * (u.x + u.y) / n;
}

/// β(u) = 2 u1 u2 / |u|.
inline double shear_coefficient(PlanarVector u)
{
    const double n = u.norm();
    if(n == 0.0)
        throw DomainError("zero vector");
    return 2.0 * u.x * u.y / n;
}

struct Linearization
{
    double approx; // |u| + α(u) s
    double bound;  // 42 s² |u|
};

/// First-order model of |d^s u| with its Taylor remainder bound.
/// The remainder is f''(ξ) s² / 2 ≤ e^s |u| s², below 42 s² |u| for s ≤ log 42.
inline Linearization linearize(PlanarVector u, double s)
{
    if(u.norm2() == 0.0)
        throw DomainError("linearize requires a non-zero vector");
    if(!(s >= 0.0))
        throw DomainError("linearize requires s >= 0");
    const double n = u.norm();
    return {n + linearization_coefficient(u) * s, 42.0 * s * s * n};
}

/// A(v, w) = sqrt((α(v) - |w|)² + β(v)²).
inline double pair_amplitude(PlanarVector v, PlanarVector w)
{
    if(v.norm2() == 0.0 || w.norm2() == 0.0)
        throw DomainError("pair_amplitude requires non-zero vectors");
    return std::hypot(linearization_coefficient(v) - w.norm(), shear_coefficient(v));
}

} // namespace saddle
