#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace saddle {

/// Nodes and weights of n-point Gauss–Legendre quadrature on [-1, 1].
template <std::size_t N>
struct GaussLegendre
{
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre()
    {
        for(std::size_t i = 0; i < (N + 1) / 2; ++i)
        {
            // Newton iteration from the Tricomi initial guess.
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for(int it = 0; it < 100; ++it)
            {
                double p0 = 1.0, p1 = x;
                for(std::size_t k = 2; k <= N; ++k)
                {
                    const double pk = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                                      static_cast<double>(k);
                    p0 = p1;
                    p1 = pk;
                }
                dp = static_cast<double>(N) * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if(std::abs(dx) < 1e-16)
                    break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            weights[i] = w;
            weights[N - 1 - i] = w;
        }
    }
};

inline const GaussLegendre<16>& gauss_legendre_16()
{
    static const GaussLegendre<16> rule;
    return rule;
}

/// Calls f(x, w) for every node of composite 16-point Gauss–Legendre on
/// [a, b] split into `panels` equal panels; w already includes the Jacobian.
template <typename F>
void for_each_gauss_node(double a, double b, std::size_t panels, F&& f)
{
    const auto& rule = gauss_legendre_16();
    const double h = (b - a) / static_cast<double>(panels);
    for(std::size_t k = 0; k < panels; ++k)
    {
        const double mid = a + (static_cast<double>(k) + 0.5) * h;
        for(std::size_t i = 0; i < 16; ++i)
            f(mid + 0.5 * h * rule.nodes[i], 0.5 * h * rule.weights[i]);
    }
}

} // namespace saddle
