#pragma once

#include <cmath>
#include <cstdint>

#include "saddle/error.hpp"
#include "saddle/rng.hpp"
#include "saddle/vector.hpp"

namespace saddle {

inline constexpr double determinant_tolerance = 1e-10;

/// Element of SL(2,R), stored row-major:
///     | a b |
///     | c d |
struct GroupElement
{
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static constexpr GroupElement identity() { return {}; }

    /// Build from entries, rejecting |det - 1| > 1e-10.
    static GroupElement checked(double a, double b, double c, double d)
    {
        GroupElement g{a, b, c, d};
        if(!(std::abs(g.det() - 1.0) <= determinant_tolerance))
            throw DomainError("matrix determinant differs from 1");
        return g;
    }

    constexpr double det() const { return a * d - b * c; }

    constexpr GroupElement operator*(const GroupElement& o) const
    {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    constexpr PlanarVector operator*(PlanarVector v) const
    {
        return {a * v.x + b * v.y, c * v.x + d * v.y};
    }

    constexpr GroupElement inverse() const { return {d, -b, -c, a}; }

    constexpr bool operator==(const GroupElement&) const = default;
};

/// Matrix-vector product g·v.
constexpr PlanarVector act_on_vector(const GroupElement& g, PlanarVector v) { return g * v; }

/// d^t = diag(e^t, e^-t).
inline GroupElement diag_flow(double t)
{
    return {std::exp(t), 0.0, 0.0, std::exp(-t)};
}

/// r^θ, counterclockwise rotation by θ.
inline GroupElement rotation(double theta)
{
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

/// Cartan coordinates of r^θ d^t r^ψ.
struct CartanCoords
{
    double theta = 0.0;
    double t = 0.0;
    double psi = 0.0;
};

inline GroupElement recompose(const CartanCoords& k)
{
    return rotation(k.theta) * diag_flow(k.t) * rotation(k.psi);
}

/// Decompose g = r^θ d^t r^ψ with t ≥ 0.
///
/// Canonical form: θ ∈ [0, π) and ψ ∈ [0, 2π) when t > 0, using
/// r^θ d^t r^ψ = r^(θ-π) d^t r^(ψ+π). When t = 0 the element is a rotation and
/// ψ = 0, θ ∈ [0, 2π).
///
/// Closed-form 2×2 singular value decomposition: with E = (a+d)/2,
/// F = (a-d)/2, G = (c+b)/2, H = (c-b)/2 one has E + iH = Q e^{i(θ+ψ)},
/// F + iG = P e^{i(θ-ψ)}, and the singular values are Q ± P = e^{±t}.
inline CartanCoords kak_decompose(const GroupElement& g)
{
    const double e = 0.5 * (g.a + g.d);
    const double f = 0.5 * (g.a - g.d);
    const double gg = 0.5 * (g.c + g.b);
    const double h = 0.5 * (g.c - g.b);
    const double p = std::hypot(f, gg);

    CartanCoords k;
    if(p <= 1e-15)
    {
        k.theta = wrap_angle(std::atan2(h, e));
        return k;
    }
    const double q = std::hypot(e, h);
    k.t = 0.5 * std::log((q + p) / (q - p));
    if(!std::isfinite(k.t) || q <= p)
        k.t = std::asinh(p); // det slightly off; fall back on det = 1
    const double sum = std::atan2(h, e);  // θ + ψ
    const double diff = std::atan2(gg, f); // θ - ψ
    double theta = wrap_angle(0.5 * (sum + diff));
    double psi = 0.5 * (sum - diff);
    if(theta >= std::numbers::pi)
    {
        theta -= std::numbers::pi;
        psi += std::numbers::pi;
    }
    k.theta = theta;
    k.psi = wrap_angle(psi);
    return k;
}

/// Inverse CDF of the Cartan radial density ∝ sinh(2t) on [0, T].
inline double haar_radial_quantile(double u, double max_t)
{
    return 0.5 * std::acosh(1.0 + u * (std::cosh(2.0 * max_t) - 1.0));
}

/// Analytic CDF of the same density.
inline double haar_radial_cdf(double t, double max_t)
{
    if(t <= 0.0)
        return 0.0;
    if(t >= max_t)
        return 1.0;
    return (std::cosh(2.0 * t) - 1.0) / (std::cosh(2.0 * max_t) - 1.0);
}

/// Haar-distributed elements of the Cartan cell D(T) = {r^θ d^t r^ψ : t ≤ T}.
///
/// Sample `i` uses its own sub-seed derived from (seed, i), so any subset of
/// indices can be drawn in any order or on any thread with identical results.
class HaarSampler
{
public:
    HaarSampler(double max_t, std::uint64_t seed) : max_t_(max_t), seed_(seed)
    {
        if(!(max_t > 0.0) || !std::isfinite(max_t))
            throw DomainError("Haar sampler requires T > 0");
    }

    double max_t() const { return max_t_; }
    std::uint64_t seed() const { return seed_; }

    CartanCoords coords(std::uint64_t index) const
    {
        Rng rng(derive_seed(seed_, index));
        CartanCoords k;
        k.theta = two_pi * rng.uniform();
        k.t = haar_radial_quantile(rng.uniform(), max_t_);
        k.psi = two_pi * rng.uniform();
        return k;
    }

    GroupElement sample(std::uint64_t index) const { return recompose(coords(index)); }

private:
    double max_t_;
    std::uint64_t seed_;
};

/// Convenience wrapper over HaarSampler::sample.
inline GroupElement haar_sample(const HaarSampler& sampler, std::uint64_t index = 0)
{
    return sampler.sample(index);
}

} // namespace saddle
