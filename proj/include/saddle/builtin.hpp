#pragma once

#include <cmath>
#include <numbers>
#include <regex>
#include <string>
#include <vector>

#include "saddle/error.hpp"
#include "saddle/surface.hpp"

namespace saddle {

namespace detail {

inline GluingMap pairs_from(std::initializer_list<std::array<int, 4>> list)
{
    GluingMap g;
    for(const auto& q : list)
        g.pairs.push_back({EdgeRef{q[0], q[1]}, EdgeRef{q[2], q[3]}});
    return g;
}

// Polygon with the given edge vectors, starting at `origin`.
inline PolygonChart polygon_from_edges(PlanarVector origin, const std::vector<PlanarVector>& edges)
{
    PolygonChart p;
    PlanarVector at = origin;
    for(std::size_t i = 0; i + 1 < edges.size(); ++i)
    {
        p.vertices.push_back(at);
        at += edges[i];
    }
    p.vertices.push_back(at);
    return p;
}

} // namespace detail

/// Unit square with opposite sides glued. Genus 1, one marked point.
inline TranslationSurface square_torus()
{
    PolygonChart sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    return TranslationSurface::create("square-torus", {sq}, detail::pairs_from({{0, 0, 0, 2}, {0, 1, 0, 3}}));
}

/// Regular octagon of side 1 with opposite sides glued. Genus 2, one cone
/// point of angle 6π.
inline TranslationSurface regular_octagon()
{
    std::vector<PlanarVector> edges(8);
    for(int k = 0; k < 4; ++k)
    {
        const double a = k * std::numbers::pi / 4.0;
        edges[k] = {std::cos(a), std::sin(a)};
        edges[k + 4] = -edges[k];
    }
    edges[2] = {0.0, 1.0};
    edges[6] = {0.0, -1.0};
    const PolygonChart oct = detail::polygon_from_edges({0, 0}, edges);
    return TranslationSurface::create(
        "regular-octagon", {oct}, detail::pairs_from({{0, 0, 0, 4}, {0, 1, 0, 5}, {0, 2, 0, 6}, {0, 3, 0, 7}}));
}

/// Two regular pentagons of side 1, the second the point reflection of the
/// first; edge k of one is glued to edge k of the other. Genus 2.
inline TranslationSurface double_pentagon()
{
    std::vector<PlanarVector> edges(5);
    for(int k = 0; k < 5; ++k)
    {
        const double a = 2.0 * k * std::numbers::pi / 5.0;
        edges[k] = {std::cos(a), std::sin(a)};
    }
    edges[0] = {1.0, 0.0};
    const PolygonChart first = detail::polygon_from_edges({0, 0}, edges);
    PolygonChart second = first;
    for(auto& v : second.vertices)
        v = -v;
    return TranslationSurface::create(
        "double-pentagon", {first, second},
        detail::pairs_from({{0, 0, 1, 0}, {0, 1, 1, 1}, {0, 2, 1, 2}, {0, 3, 1, 3}, {0, 4, 1, 4}}));
}

/// The L-shaped table: a unit square with a horizontal arm reaching x = a and
/// a vertical arm reaching y = b, both of width 1. Opposite parallel sides are
/// glued, giving genus 2 with a single cone point of angle 6π.
inline TranslationSurface l_shaped(double a, double b)
{
    if(!(a > 1.0) || !(b > 1.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("L-shaped(a,b) requires a, b > 1");
    // 0:(0,0) 1:(1,0) 2:(a,0) 3:(a,1) 4:(1,1) 5:(1,b) 6:(0,b) 7:(0,1)
    PolygonChart l{{{0, 0}, {1, 0}, {a, 0}, {a, 1}, {1, 1}, {1, b}, {0, b}, {0, 1}}};
    // edges: 0 bottom-left, 1 bottom-right, 2 right of arm, 3 top of arm,
    //        4 inner vertical, 5 top, 6 left upper, 7 left lower
    auto fmt = [](double x) {
        std::string s = std::to_string(x);
        s.erase(s.find_last_not_of('0') + 1);
        if(!s.empty() && s.back() == '.')
            s.pop_back();
        return s;
    };
    return TranslationSurface::create("L-shaped(" + fmt(a) + "," + fmt(b) + ")", {l},
                                      detail::pairs_from({{0, 0, 0, 5}, {0, 1, 0, 3}, {0, 2, 0, 7}, {0, 4, 0, 6}}));
}

/// Look up a built-in surface by name: square-torus, regular-octagon,
/// double-pentagon or L-shaped(a,b).
inline TranslationSurface builtin_surface(const std::string& name)
{
    if(name == "square-torus")
        return square_torus();
    if(name == "regular-octagon")
        return regular_octagon();
    if(name == "double-pentagon")
        return double_pentagon();
    static const std::regex l_re(R"(L-shaped\(\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*\))");
    std::smatch m;
    if(std::regex_match(name, m, l_re))
    {
        double a = 0.0, b = 0.0;
        try
        {
            a = std::stod(m[1].str());
            b = std::stod(m[2].str());
        }
        catch(const std::exception&)
        {
            throw DomainError("malformed L-shaped parameters in '" + name + "'");
        }
        return l_shaped(a, b);
    }
    throw DomainError("unknown surface name '" + name + "'");
}

/// Names of the fixed built-in surfaces used throughout the test suites.
inline std::vector<std::string> builtin_surface_names()
{
    return {"square-torus", "regular-octagon", "double-pentagon", "L-shaped(2,2)"};
}

} // namespace saddle
