#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "saddle/error.hpp"
#include "saddle/parallel.hpp"
#include "saddle/sl2.hpp"
#include "saddle/surface.hpp"
#include "saddle/vector.hpp"

namespace saddle {

/// Relative tolerance under which two lengths (or two angles) are a tie.
inline constexpr double tie_tolerance = 1e-9;

/// A straight segment between cone points with no cone point inside.
struct SaddleConnection
{
    PlanarVector holonomy;
    double length = 0.0;
    double angle = 0.0; // argument of holonomy in [0, 2π)
    int start = 0;      // cone point ids
    int end = 0;
    CornerRef start_corner; // polygon corner whose angular sector contains the initial direction
    CornerRef end_corner;   // polygon corner (in the final chart) where the segment lands
    std::vector<EdgeRef> chart_path; // glued polygon edges crossed, in order
};

struct Spectrum
{
    std::vector<SaddleConnection> connections;
    double complete_radius = 0.0; // every connection of length <= this is present

    std::size_t size() const { return connections.size(); }
    bool empty() const { return connections.empty(); }
    const SaddleConnection& operator[](std::size_t i) const { return connections[i]; }
};

struct EnumerationOptions
{
    std::uint64_t max_triangles = 100'000'000; // developed-triangle budget per call
    bool record_paths = true;
    Parallelism parallelism;
};

namespace detail {

/// A triangle of the triangulated surface, in the coordinates of its polygon.
/// Local edge j runs from corner j to corner j+1 (counterclockwise).
struct Triangle
{
    int polygon = 0;
    std::array<CornerRef, 3> corner;
    std::array<PlanarVector, 3> pos;
    std::array<int, 3> neighbor{-1, -1, -1};
    std::array<int, 3> neighbor_edge{-1, -1, -1};
    std::array<int, 3> polygon_edge{-1, -1, -1}; // -1 for interior diagonals
};

// Relative tolerance for collinearity while clipping ears; vertices that
// are collinear in exact arithmetic stay collinear after a linear map.
inline constexpr double ear_epsilon = 1e-9;

inline bool left_of(PlanarVector a, PlanarVector b, PlanarVector p)
{
    return cross(b - a, p - a) >= -ear_epsilon * (b - a).norm() * (p - a).norm();
}

inline bool point_in_closed_triangle(PlanarVector p, PlanarVector a, PlanarVector b, PlanarVector c)
{
    return left_of(a, b, p) && left_of(b, c, p) && left_of(c, a, p);
}

inline bool strictly_convex(PlanarVector a, PlanarVector b, PlanarVector c)
{
    return cross(b - a, c - b) > ear_epsilon * (b - a).norm() * (c - b).norm();
}

/// Ear-clipping triangulation of a simple counterclockwise polygon; returns
/// vertex index triples. Ear tips must be strictly convex and the ear must
/// not contain any other vertex, even on its boundary, so no triangle edge
/// passes through a vertex.
inline std::vector<std::array<int, 3>> ear_clip(const PolygonChart& poly)
{
    const int n = static_cast<int>(poly.size());
    std::vector<int> remaining(static_cast<std::size_t>(n));
    for(int i = 0; i < n; ++i)
        remaining[static_cast<std::size_t>(i)] = i;

    std::vector<std::array<int, 3>> out;
    while(remaining.size() > 3)
    {
        const std::size_t m = remaining.size();
        bool clipped = false;
        for(std::size_t k = 0; k < m && !clipped; ++k)
        {
            const int ia = remaining[(k + m - 1) % m], ib = remaining[k], ic = remaining[(k + 1) % m];
            const PlanarVector a = poly.vertex(static_cast<std::size_t>(ia));
            const PlanarVector b = poly.vertex(static_cast<std::size_t>(ib));
            const PlanarVector c = poly.vertex(static_cast<std::size_t>(ic));
            if(!strictly_convex(a, b, c))
                continue;
            bool empty = true;
            for(int j = 0; j < n && empty; ++j)
            {
                if(j == ia || j == ib || j == ic)
                    continue;
                if(point_in_closed_triangle(poly.vertex(static_cast<std::size_t>(j)), a, b, c))
                    empty = false;
            }
            if(!empty)
                continue;
            out.push_back({ia, ib, ic});
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
            clipped = true;
        }
        if(!clipped)
            throw ValidationError("polygon could not be triangulated");
    }
    const PlanarVector a = poly.vertex(static_cast<std::size_t>(remaining[0]));
    const PlanarVector b = poly.vertex(static_cast<std::size_t>(remaining[1]));
    const PlanarVector c = poly.vertex(static_cast<std::size_t>(remaining[2]));
    if(!strictly_convex(a, b, c))
        throw ValidationError("polygon could not be triangulated");
    out.push_back({remaining[0], remaining[1], remaining[2]});
    return out;
}

/// Triangulate every polygon and link triangles across diagonals and glued edges.
inline std::vector<Triangle> triangulate(const TranslationSurface& surface)
{
    std::vector<Triangle> tris;
    // (polygon, edge) -> (triangle, local edge)
    std::vector<std::vector<std::pair<int, int>>> owner(surface.polygons().size());

    for(std::size_t p = 0; p < surface.polygons().size(); ++p)
    {
        const auto& poly = surface.polygons()[p];
        const int n = static_cast<int>(poly.size());
        owner[p].assign(static_cast<std::size_t>(n), {-1, -1});
        std::map<std::pair<int, int>, std::pair<int, int>> diagonals;

        for(const auto& idx : ear_clip(poly))
        {
            const int t = static_cast<int>(tris.size());
            Triangle tri;
            tri.polygon = static_cast<int>(p);
            for(int j = 0; j < 3; ++j)
            {
                tri.corner[static_cast<std::size_t>(j)] = CornerRef{static_cast<int>(p), idx[static_cast<std::size_t>(j)]};
                tri.pos[static_cast<std::size_t>(j)] = poly.vertex(static_cast<std::size_t>(idx[static_cast<std::size_t>(j)]));
            }
            tris.push_back(tri);
            for(int j = 0; j < 3; ++j)
            {
                const int a = idx[static_cast<std::size_t>(j)], b = idx[static_cast<std::size_t>((j + 1) % 3)];
                if((a + 1) % n == b)
                {
                    tris[static_cast<std::size_t>(t)].polygon_edge[static_cast<std::size_t>(j)] = a;
                    owner[p][static_cast<std::size_t>(a)] = {t, j};
                    continue;
                }
                const auto key = std::minmax(a, b);
                auto it = diagonals.find(key);
                if(it == diagonals.end())
                {
                    diagonals.emplace(key, std::make_pair(t, j));
                    continue;
                }
                const auto [u, k] = it->second;
                tris[static_cast<std::size_t>(t)].neighbor[static_cast<std::size_t>(j)] = u;
                tris[static_cast<std::size_t>(t)].neighbor_edge[static_cast<std::size_t>(j)] = k;
                tris[static_cast<std::size_t>(u)].neighbor[static_cast<std::size_t>(k)] = t;
                tris[static_cast<std::size_t>(u)].neighbor_edge[static_cast<std::size_t>(k)] = j;
                diagonals.erase(it);
            }
        }
        if(!diagonals.empty())
            throw ValidationError("inconsistent polygon triangulation");
    }

    for(std::size_t p = 0; p < surface.polygons().size(); ++p)
        for(std::size_t e = 0; e < surface.polygons()[p].size(); ++e)
        {
            const auto [t, j] = owner[p][e];
            const EdgeRef other = surface.partner(EdgeRef{static_cast<int>(p), static_cast<int>(e)});
            const auto [u, k] = owner[static_cast<std::size_t>(other.polygon)][static_cast<std::size_t>(other.edge)];
            tris[static_cast<std::size_t>(t)].neighbor[static_cast<std::size_t>(j)] = u;
            tris[static_cast<std::size_t>(t)].neighbor_edge[static_cast<std::size_t>(j)] = k;
        }
    return tris;
}

// Angular tolerance (as a sine) for "strictly inside a wedge".
inline constexpr double wedge_epsilon = 1e-11;

inline bool strictly_ccw(PlanarVector a, PlanarVector b)
{
    return cross(a, b) > wedge_epsilon * std::sqrt(a.norm2() * b.norm2());
}

/// Distance from the origin to the part of segment xy seen between the rays lo and hi.
inline double window_distance(PlanarVector x, PlanarVector y, PlanarVector lo, PlanarVector hi)
{
    const PlanarVector d = y - x;
    auto hit = [&](PlanarVector ray, PlanarVector fallback) {
        const double den = cross(ray, d);
        if(den == 0.0)
            return fallback;
        const double s = cross(x, d) / den;
        return s > 0.0 ? ray * s : fallback;
    };
    const PlanarVector p = hit(lo, x);
    const PlanarVector q = hit(hi, y);
    const PlanarVector pq = q - p;
    const double len2 = pq.norm2();
    double u = len2 > 0.0 ? -dot(p, pq) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return (p + pq * u).norm();
}

/// Depth-first development of the surface from one triangle corner.
class CornerExplorer
{
public:
    CornerExplorer(const TranslationSurface& surface,
                   const std::vector<Triangle>& tris,
                   double radius,
                   const EnumerationOptions& options,
                   std::atomic<std::uint64_t>& developed)
        : surface_(surface), tris_(tris), radius_(radius), reach_(radius * (1.0 + 1e-12)),
          reach2_(reach_ * reach_), options_(options), developed_(developed)
    {}

    std::vector<SaddleConnection> run(int tri, int corner)
    {
        out_.clear();
        path_.clear();
        const Triangle& t = tris_[static_cast<std::size_t>(tri)];
        start_corner_ = t.corner[static_cast<std::size_t>(corner)];
        start_cone_ = surface_.cone_of(start_corner_);
        const PlanarVector offset = -t.pos[static_cast<std::size_t>(corner)];
        const int j1 = (corner + 1) % 3, j2 = (corner + 2) % 3;
        const PlanarVector p = t.pos[static_cast<std::size_t>(j1)] + offset;
        const PlanarVector q = t.pos[static_cast<std::size_t>(j2)] + offset;

        // The corner owns the half-open sector [p, q): the edge toward p is a
        // saddle connection; the edge toward q belongs to the next corner.
        if(p.norm2() <= reach2_)
            record(p, t.corner[static_cast<std::size_t>(j1)]);
        if(window_distance(p, q, p, q) <= reach_)
            cross_window(tri, offset, j1, p, q);
        return std::move(out_);
    }

private:
    void record(PlanarVector hol, CornerRef end)
    {
        SaddleConnection sc;
        sc.holonomy = hol;
        sc.length = hol.norm();
        sc.angle = angle_of(hol);
        sc.start = start_cone_;
        sc.end = surface_.cone_of(end);
        sc.start_corner = start_corner_;
        sc.end_corner = end;
        if(options_.record_paths)
            sc.chart_path = path_;
        out_.push_back(std::move(sc));
    }

    // Cross local edge `edge` of triangle `tri` (developed with `offset`),
    // seeing only directions strictly between lo and hi.
    void cross_window(int tri, PlanarVector offset, int edge, PlanarVector lo, PlanarVector hi)
    {
        if(developed_.fetch_add(1, std::memory_order_relaxed) + 1 > options_.max_triangles)
            throw ResourceLimitError("developed-triangle budget of " + std::to_string(options_.max_triangles) +
                                     " exhausted; radius too large");

        const Triangle& t = tris_[static_cast<std::size_t>(tri)];
        const int next = t.neighbor[static_cast<std::size_t>(edge)];
        const int k = t.neighbor_edge[static_cast<std::size_t>(edge)];
        const Triangle& u = tris_[static_cast<std::size_t>(next)];
        const bool glued = t.polygon_edge[static_cast<std::size_t>(edge)] >= 0;
        if(glued)
            path_.push_back(EdgeRef{t.polygon, t.polygon_edge[static_cast<std::size_t>(edge)]});

        // Edge k of u runs from the image of our edge's end to the image of its start.
        const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
        const PlanarVector next_offset = offset + t.pos[static_cast<std::size_t>(edge)] - u.pos[static_cast<std::size_t>(k1)];
        const PlanarVector a = u.pos[static_cast<std::size_t>(k1)] + next_offset; // clockwise end
        const PlanarVector b = u.pos[static_cast<std::size_t>(k)] + next_offset;  // counterclockwise end
        const PlanarVector c = u.pos[static_cast<std::size_t>(k2)] + next_offset;

        const bool after_lo = strictly_ccw(lo, c);
        const bool before_hi = strictly_ccw(c, hi);
        if(after_lo && before_hi && c.norm2() <= reach2_)
            record(c, u.corner[static_cast<std::size_t>(k2)]);

        // Window a→c is edge k1 of u; window c→b is edge k2.
        const PlanarVector hi1 = cross(c, hi) > 0.0 ? c : hi;
        if(strictly_ccw(lo, hi1) && window_distance(a, c, lo, hi1) <= reach_)
            cross_window(next, next_offset, k1, lo, hi1);
        const PlanarVector lo2 = cross(lo, c) > 0.0 ? c : lo;
        if(strictly_ccw(lo2, hi) && window_distance(c, b, lo2, hi) <= reach_)
            cross_window(next, next_offset, k2, lo2, hi);

        if(glued)
            path_.pop_back();
    }

    const TranslationSurface& surface_;
    const std::vector<Triangle>& tris_;
    double radius_;
    double reach_;
    double reach2_;
    const EnumerationOptions& options_;
    std::atomic<std::uint64_t>& developed_;

    CornerRef start_corner_;
    int start_cone_ = 0;
    std::vector<EdgeRef> path_;
    std::vector<SaddleConnection> out_;
};

inline bool exact_less(const SaddleConnection& a, const SaddleConnection& b)
{
    return std::tie(a.length, a.angle, a.start, a.end, a.start_corner) <
           std::tie(b.length, b.angle, b.start, b.end, b.start_corner);
}

} // namespace detail

/// Put connections into canonical order: lengths non-decreasing; lengths
/// within 1e-9 relative form one tie class, ordered by angle in [0, 2π);
/// holonomies whose angles also agree to 1e-9 are ordered by
/// (start cone, end cone, start corner). A connection is determined by its
/// start corner and holonomy, so the order is total and deterministic.
inline void canonical_sort(std::vector<SaddleConnection>& v)
{
    std::sort(v.begin(), v.end(), detail::exact_less);
    std::size_t i = 0;
    while(i < v.size())
    {
        std::size_t j = i + 1;
        while(j < v.size() && v[j].length - v[j - 1].length <= tie_tolerance * v[j].length)
            ++j;
        if(j - i > 1)
        {
            auto first = v.begin() + static_cast<std::ptrdiff_t>(i);
            auto last = v.begin() + static_cast<std::ptrdiff_t>(j);
            std::sort(first, last, [](const SaddleConnection& a, const SaddleConnection& b) {
                return std::tie(a.angle, a.start, a.end, a.start_corner, a.length) <
                       std::tie(b.angle, b.start, b.end, b.start_corner, b.length);
            });
            std::size_t g = i;
            while(g < j)
            {
                std::size_t h = g + 1;
                while(h < j && v[h].angle - v[h - 1].angle <= tie_tolerance)
                    ++h;
                if(h - g > 1)
                    std::sort(v.begin() + static_cast<std::ptrdiff_t>(g), v.begin() + static_cast<std::ptrdiff_t>(h),
                              [](const SaddleConnection& a, const SaddleConnection& b) {
                                  return std::tie(a.start, a.end, a.start_corner, a.angle, a.length) <
                                         std::tie(b.start, b.end, b.start_corner, b.angle, b.length);
                              });
                g = h;
            }
        }
        i = j;
    }
}

/// Λ(ω; R): every saddle connection of length at most R, canonically ordered.
///
/// Breadth of the search is split over the triangle corners at cone points;
/// each corner is developed depth-first across triangle edges while the
/// visible wedge is non-empty and its window is within distance R.
inline Spectrum enumerate_up_to_length(const TranslationSurface& surface, double radius,
                                       const EnumerationOptions& options = {})
{
    if(!(radius > 0.0) || !std::isfinite(radius))
        throw DomainError("enumeration radius must be positive and finite");

    const auto tris = detail::triangulate(surface);
    std::atomic<std::uint64_t> developed{0};
    const std::size_t tasks = tris.size() * 3;
    std::vector<std::vector<SaddleConnection>> found(tasks);

    parallel_for(tasks, options.parallelism, [&](std::size_t i) {
        detail::CornerExplorer explorer(surface, tris, radius, options, developed);
        found[i] = explorer.run(static_cast<int>(i / 3), static_cast<int>(i % 3));
    });

    Spectrum s;
    s.complete_radius = radius;
    std::size_t total = 0;
    for(const auto& f : found)
        total += f.size();
    s.connections.reserve(total);
    for(auto& f : found)
        std::move(f.begin(), f.end(), std::back_inserter(s.connections));
    canonical_sort(s.connections);
    return s;
}

/// Ξ(ω; N): the first N connections in canonical order. Enumerates to a
/// radius that is doubled until at least N connections are known.
inline Spectrum first_n(const TranslationSurface& surface, std::size_t n, const EnumerationOptions& options = {})
{
    if(n < 1)
        throw DomainError("first_n requires N >= 1");
    double radius = 0.25 * std::sqrt(static_cast<double>(n) * surface.area());
    Spectrum s = enumerate_up_to_length(surface, radius, options);
    while(s.size() < n)
    {
        radius *= 2.0;
        s = enumerate_up_to_length(surface, radius, options);
    }

    // Completeness after truncation: ties at the N-th length may have been cut.
    const double cut = s.connections[n - 1].length;
    double complete = cut;
    if(s.size() > n && s.connections[n].length - cut <= tie_tolerance * cut)
    {
        complete = 0.0;
        for(std::size_t i = n; i-- > 0;)
            if(cut - s.connections[i].length > tie_tolerance * cut)
            {
                complete = s.connections[i].length;
                break;
            }
    }
    s.connections.resize(n);
    s.complete_radius = complete;
    return s;
}

/// ℓ(ω; N), the length of the N-th connection.
inline double nth_length(const TranslationSurface& surface, std::size_t n, const EnumerationOptions& options = {})
{
    return first_n(surface, n, options).connections.back().length;
}

/// ℓ(ω), the length of the shortest saddle connection.
inline double systole(const TranslationSurface& surface, const EnumerationOptions& options = {})
{
    return nth_length(surface, 1, options);
}

/// Arc of directions [start, end) measured counterclockwise. A length of
/// exactly 2π is the full circle.
struct Arc
{
    double start = 0.0;
    double end = two_pi;

    double length() const { return end - start; }

    bool contains(double angle) const
    {
        if(length() >= two_pi)
            return true;
        return wrap_angle(angle - start) < length();
    }
};

/// Closed annulus A ≤ |u| ≤ B.
struct Annulus
{
    double inner = 0.0;
    double outer = 0.0;

    bool contains(double r) const { return inner <= r && r <= outer; }
};

inline Spectrum filter_sector(const Spectrum& s, const Arc& arc)
{
    if(!(arc.length() > 0.0) || arc.length() > two_pi)
        throw DomainError("arc length must lie in (0, 2π]");
    Spectrum out;
    out.complete_radius = s.complete_radius;
    for(const auto& c : s.connections)
        if(arc.contains(c.angle))
            out.connections.push_back(c);
    return out;
}

inline Spectrum filter_annulus(const Spectrum& s, const Annulus& ann)
{
    if(!(ann.inner >= 0.0) || !(ann.outer >= ann.inner))
        throw DomainError("annulus needs 0 <= A <= B");
    if(s.complete_radius < ann.outer)
        throw IncompleteSpectrumError("spectrum complete only up to " + std::to_string(s.complete_radius) +
                                      " but annulus reaches " + std::to_string(ann.outer));
    Spectrum out;
    out.complete_radius = s.complete_radius;
    for(const auto& c : s.connections)
        if(ann.contains(c.length))
            out.connections.push_back(c);
    return out;
}

/// Number of connections in `s` of length at most r.
inline std::size_t count_up_to(const Spectrum& s, double r)
{
    return static_cast<std::size_t>(
        std::count_if(s.connections.begin(), s.connections.end(), [r](const SaddleConnection& c) { return c.length <= r; }));
}

/// Spectrum export: `n,hol_x,hol_y,length,angle,frac_length` with 17
/// significant digits, n counted from 1.
inline std::string spectrum_to_csv(const Spectrum& s, char sep = ',')
{
    std::string out = "n,hol_x,hol_y,length,angle,frac_length\n";
    if(sep != ',')
        std::replace(out.begin(), out.end(), ',', sep);
    char buf[256];
    for(std::size_t i = 0; i < s.size(); ++i)
    {
        const auto& c = s.connections[i];
        const double frac = c.length - std::floor(c.length);
        std::snprintf(buf, sizeof buf, "%zu%c%.17g%c%.17g%c%.17g%c%.17g%c%.17g\n", i + 1, sep, c.holonomy.x, sep,
                      c.holonomy.y, sep, c.length, sep, c.angle, sep, frac);
        out += buf;
    }
    return out;
}

/// Re-develop a connection from its start corner along its chart path and
/// return the holonomy so obtained.
inline PlanarVector develop_chart_path(const TranslationSurface& surface, const SaddleConnection& c)
{
    PlanarVector offset = -surface.vertex(c.start_corner);
    for(const EdgeRef& e : c.chart_path)
    {
        const EdgeRef other = surface.partner(e);
        const auto& poly = surface.polygon(e.polygon);
        const auto& next = surface.polygon(other.polygon);
        offset += poly.vertex(static_cast<std::size_t>(e.edge)) - next.vertex(static_cast<std::size_t>(other.edge) + 1);
    }
    return surface.vertex(c.end_corner) + offset;
}

/// Identity of a connection across linear deformations: start corner plus
/// holonomy, matched with a relative tolerance.
class ConnectionIndex
{
public:
    explicit ConnectionIndex(std::vector<std::pair<CornerRef, PlanarVector>> items) : items_(std::move(items))
    {
        std::sort(items_.begin(), items_.end(), [](const auto& a, const auto& b) {
            return std::tie(a.first, a.second.x, a.second.y) < std::tie(b.first, b.second.x, b.second.y);
        });
    }

    static ConnectionIndex of(const Spectrum& s, const GroupElement& g = GroupElement::identity())
    {
        std::vector<std::pair<CornerRef, PlanarVector>> items;
        items.reserve(s.size());
        for(const auto& c : s.connections)
            items.emplace_back(c.start_corner, g * c.holonomy);
        return ConnectionIndex(std::move(items));
    }

    std::size_t size() const { return items_.size(); }
    const std::vector<std::pair<CornerRef, PlanarVector>>& items() const { return items_; }

    bool contains(CornerRef corner, PlanarVector h, double rel_tol = tie_tolerance) const
    {
        const double tol = rel_tol * std::max(1.0, h.norm());
        auto lo = std::lower_bound(items_.begin(), items_.end(), std::make_tuple(corner, h.x - tol),
                                   [](const auto& item, const auto& key) {
                                       return std::tie(item.first, item.second.x) < std::tie(std::get<0>(key), std::get<1>(key));
                                   });
        for(auto it = lo; it != items_.end() && it->first == corner && it->second.x <= h.x + tol; ++it)
            if(std::abs(it->second.y - h.y) <= tol)
                return true;
        return false;
    }

    /// |A \ B| where A = this.
    std::size_t count_missing_from(const ConnectionIndex& other) const
    {
        std::size_t n = 0;
        for(const auto& [corner, h] : items_)
            if(!other.contains(corner, h))
                ++n;
        return n;
    }

private:
    std::vector<std::pair<CornerRef, PlanarVector>> items_;
};

} // namespace saddle
