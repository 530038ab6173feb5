#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "saddle/error.hpp"

namespace saddle {

/// Exponents and knobs of the experiments. Defaults are the published choices.
struct ExperimentParameters
{
    double delta = 1.0 / 3.0;
    double gamma = 1.0 / 300.0;
    double alpha_exp = 1.0 / 100.0;
    double zeta = 1.0 / 1000.0;
    double epsilon = 1.0 / 100.0;
    double epsilon2 = 1.0 / 100.0;
    double epsilon3 = 1.0 / 100.0;
    double nu = 1.0 / 100.0;
    double varpi = 1.0 / 100.0;
    double tau = 1.2;
    int p = 1;
    std::int64_t N = 1000;
    std::uint64_t seed = 1;
    int samples = 10;

    /// S = N^{-δ}, the maximal flow time of the thin annulus.
    double step() const { return std::pow(static_cast<double>(N), -delta); }

    /// ψ = 2 N^{-γ}, half-width of the axis sectors.
    double axis_halfwidth() const { return 2.0 * std::pow(static_cast<double>(N), -gamma); }

    /// κ = floor((π/2 - 2ψ) ℓ^α) given ℓ = ℓ(ω; N). Zero or negative means no arcs fit.
    std::int64_t arc_count(double nth_length) const
    {
        const double k = std::floor((std::numbers::pi / 2 - 2.0 * axis_halfwidth()) * std::pow(nth_length, alpha_exp));
        return static_cast<std::int64_t>(std::max(k, 0.0));
    }

    /// Throws DomainError for values outside the basic ranges.
    void check_ranges() const
    {
        for(double x : {delta, gamma, alpha_exp, zeta, epsilon, epsilon2, epsilon3, nu, varpi})
            if(!(x > 0.0) || !std::isfinite(x))
                throw DomainError("exponents must be positive and finite");
        if(!(tau > 1.0))
            throw DomainError("tau must exceed 1");
        if(N < 2)
            throw DomainError("N must be at least 2");
        if(samples < 1)
            throw DomainError("samples must be at least 1");
    }
};

struct Requirement
{
    std::string name;
    bool holds = false;
};

/// The nine inequalities the exponents must satisfy jointly.
inline std::vector<Requirement> check_requirements(const ExperimentParameters& q)
{
    const double a = q.alpha_exp;
    auto req = [](std::string name, bool holds) { return Requirement{std::move(name), holds}; };
    return {
        req("alpha(2+epsilon) < 1", a * (2.0 + q.epsilon) < 1.0),
        req("1/2 > gamma(2+epsilon2)", 0.5 > q.gamma * (2.0 + q.epsilon2)),
        req("gamma + alpha < delta", q.gamma + a < q.delta),
        req("gamma < alpha/2", q.gamma < a / 2.0),
        req("0.5 - gamma - alpha - varpi > 0.5 - delta", 0.5 - q.gamma - a - q.varpi > 0.5 - q.delta),
        req("delta > 0.25", q.delta > 0.25),
        req("delta + nu + alpha/2 < 0.5", q.delta + q.nu + a / 2.0 < 0.5),
        req("zeta < min(alpha/8, gamma/2, varpi/2)", q.zeta < std::min({a / 8.0, q.gamma / 2.0, q.varpi / 2.0})),
        req("1/2 > (alpha/2)(epsilon3 + 2)", 0.5 > (a / 2.0) * (q.epsilon3 + 2.0)),
    };
}

/// Names of the violated requirements, in ledger order.
inline std::vector<std::string> violated_requirements(const ExperimentParameters& q)
{
    std::vector<std::string> out;
    for(const auto& r : check_requirements(q))
        if(!r.holds)
            out.push_back(r.name);
    return out;
}

/// Throws ValidationError naming every violated requirement.
inline void validate_parameters(const ExperimentParameters& q)
{
    q.check_ranges();
    const auto bad = violated_requirements(q);
    if(bad.empty())
        return;
    std::string msg = "violated requirement";
    msg += bad.size() > 1 ? "s: " : ": ";
    for(std::size_t i = 0; i < bad.size(); ++i)
        msg += (i ? "; \"" : "\"") + bad[i] + "\"";
    throw ValidationError(msg);
}

} // namespace saddle
