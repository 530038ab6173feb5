#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "saddle/error.hpp"
#include "saddle/sl2.hpp"
#include "saddle/vector.hpp"

namespace saddle {

/// Cone angles within this many radians of 2π(k+1) count as integral.
inline constexpr double cone_angle_tolerance = 1e-9;

/// A Euclidean polygon listed counterclockwise. Edge i runs from vertex i to
/// vertex i+1 (cyclically).
struct PolygonChart
{
    std::vector<PlanarVector> vertices;

    std::size_t size() const { return vertices.size(); }
    const PlanarVector& vertex(std::size_t i) const { return vertices[i % vertices.size()]; }
    PlanarVector edge(std::size_t i) const { return vertex(i + 1) - vertex(i); }

    double signed_area() const
    {
        double s = 0.0;
        for(std::size_t i = 0; i < vertices.size(); ++i)
            s += cross(vertex(i), vertex(i + 1));
        return 0.5 * s;
    }

    /// Interior angle at vertex i, in (0, 2π).
    double interior_angle(std::size_t i) const
    {
        const std::size_t n = vertices.size();
        const PlanarVector out = edge(i);
        const PlanarVector in = vertex(i + n - 1) - vertex(i);
        double a = std::atan2(cross(out, in), dot(out, in));
        if(a <= 0.0)
            a += two_pi;
        return a;
    }

    bool operator==(const PolygonChart&) const = default;
};

/// Edge `edge` of polygon `polygon`.
struct EdgeRef
{
    int polygon = 0;
    int edge = 0;
    auto operator<=>(const EdgeRef&) const = default;
};

/// Vertex `vertex` of polygon `polygon`, i.e. the polygon corner there.
struct CornerRef
{
    int polygon = 0;
    int vertex = 0;
    auto operator<=>(const CornerRef&) const = default;
};

using GluingPair = std::pair<EdgeRef, EdgeRef>;

/// Perfect matching of polygon edges, stored canonically: each pair has its
/// smaller edge first and pairs are sorted.
struct GluingMap
{
    std::vector<GluingPair> pairs;

    void canonicalize()
    {
        for(auto& [a, b] : pairs)
            if(b < a)
                std::swap(a, b);
        std::sort(pairs.begin(), pairs.end());
    }

    bool operator==(const GluingMap&) const = default;
};

/// A zero of ω (or a marked point when order = 0).
struct ConePoint
{
    std::vector<CornerRef> vertex_class; // in counterclockwise order around the point
    double total_angle = 0.0;
    int order = 0;
};

namespace detail {

inline bool segments_touch(PlanarVector p1, PlanarVector p2, PlanarVector q1, PlanarVector q2)
{
    auto orient = [](PlanarVector a, PlanarVector b, PlanarVector c) {
        const double v = cross(b - a, c - a);
        return (v > 0.0) - (v < 0.0);
    };
    auto on_segment = [](PlanarVector a, PlanarVector b, PlanarVector c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
               c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if(o1 != o2 && o3 != o4)
        return true;
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
           (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

inline void validate_polygon(const PolygonChart& poly, std::size_t index)
{
    const std::string where = "polygon " + std::to_string(index) + ": ";
    const std::size_t n = poly.size();
    if(n < 3)
        throw ValidationError(where + "fewer than 3 vertices");
    for(const auto& v : poly.vertices)
        if(!std::isfinite(v.x) || !std::isfinite(v.y))
            throw ValidationError(where + "non-finite coordinate");
    for(std::size_t i = 0; i < n; ++i)
        if(poly.edge(i).norm2() == 0.0)
            throw ValidationError(where + "zero-length edge");
    if(!(poly.signed_area() > 0.0))
        throw ValidationError(where + "non-positive signed area (vertices must be counterclockwise)");

    // Adjacent edges must not fold back onto each other.
    for(std::size_t i = 0; i < n; ++i)
    {
        const PlanarVector out = poly.edge(i);
        const PlanarVector in = poly.edge(i + n - 1);
        if(cross(in, out) == 0.0 && dot(in, out) < 0.0)
            throw ValidationError(where + "non-simple polygon");
    }
    // Non-adjacent edges must be disjoint.
    for(std::size_t i = 0; i < n; ++i)
        for(std::size_t j = i + 2; j < n; ++j)
        {
            if(i == 0 && j == n - 1)
                continue;
            if(segments_touch(poly.vertex(i), poly.vertex(i + 1), poly.vertex(j), poly.vertex(j + 1)))
                throw ValidationError(where + "non-simple polygon");
        }
}

} // namespace detail

/// A closed translation surface: planar polygons whose edges are glued in
/// pairs by translations. Immutable after construction; every instance has
/// passed validation.
class TranslationSurface
{
public:
    /// Validate and build. Throws ValidationError naming the violated invariant.
    static TranslationSurface create(std::string name, std::vector<PolygonChart> polygons, GluingMap gluings)
    {
        TranslationSurface s;
        s.name_ = std::move(name);
        s.polygons_ = std::move(polygons);
        s.gluings_ = std::move(gluings);
        s.gluings_.canonicalize();
        s.build();
        return s;
    }

    const std::string& name() const { return name_; }
    const std::vector<PolygonChart>& polygons() const { return polygons_; }
    const PolygonChart& polygon(int p) const { return polygons_[static_cast<std::size_t>(p)]; }
    const GluingMap& gluings() const { return gluings_; }
    const std::vector<ConePoint>& cone_points() const { return cone_points_; }
    double area() const { return area_; }
    int genus() const { return genus_; }

    /// The edge glued to `e`.
    EdgeRef partner(EdgeRef e) const { return partner_[static_cast<std::size_t>(e.polygon)][static_cast<std::size_t>(e.edge)]; }

    /// Index into cone_points() of the point at polygon corner `c`.
    int cone_of(CornerRef c) const { return corner_cone_[static_cast<std::size_t>(c.polygon)][static_cast<std::size_t>(c.vertex)]; }

    PlanarVector vertex(CornerRef c) const { return polygon(c.polygon).vertex(static_cast<std::size_t>(c.vertex)); }
    PlanarVector edge_holonomy(EdgeRef e) const { return polygon(e.polygon).edge(static_cast<std::size_t>(e.edge)); }

    std::size_t corner_count() const
    {
        std::size_t n = 0;
        for(const auto& p : polygons_)
            n += p.size();
        return n;
    }

    TranslationSurface renamed(std::string name) const
    {
        TranslationSurface s = *this;
        s.name_ = std::move(name);
        return s;
    }

    bool operator==(const TranslationSurface& o) const
    {
        return name_ == o.name_ && polygons_ == o.polygons_ && gluings_ == o.gluings_;
    }

private:
    TranslationSurface() = default;

    void build()
    {
        if(polygons_.empty())
            throw ValidationError("surface has no polygons");
        for(std::size_t i = 0; i < polygons_.size(); ++i)
            detail::validate_polygon(polygons_[i], i);

        build_partners();
        check_holonomies();
        check_connected();
        trace_cone_points();

        area_ = 0.0;
        for(const auto& p : polygons_)
            area_ += p.signed_area();
    }

    void build_partners()
    {
        const EdgeRef unset{-1, -1};
        partner_.assign(polygons_.size(), {});
        for(std::size_t p = 0; p < polygons_.size(); ++p)
            partner_[p].assign(polygons_[p].size(), unset);

        auto check_ref = [&](EdgeRef e) {
            if(e.polygon < 0 || static_cast<std::size_t>(e.polygon) >= polygons_.size() || e.edge < 0 ||
               static_cast<std::size_t>(e.edge) >= polygons_[static_cast<std::size_t>(e.polygon)].size())
                throw ValidationError("gluing references a nonexistent edge (" + std::to_string(e.polygon) +
                                      ", " + std::to_string(e.edge) + ")");
        };
        for(const auto& [a, b] : gluings_.pairs)
        {
            check_ref(a);
            check_ref(b);
            if(a == b)
                throw ValidationError("edge glued to itself");
            auto& pa = partner_[static_cast<std::size_t>(a.polygon)][static_cast<std::size_t>(a.edge)];
            auto& pb = partner_[static_cast<std::size_t>(b.polygon)][static_cast<std::size_t>(b.edge)];
            if(pa != unset || pb != unset)
                throw ValidationError("edge glued more than once");
            pa = b;
            pb = a;
        }
        for(std::size_t p = 0; p < polygons_.size(); ++p)
            for(std::size_t e = 0; e < polygons_[p].size(); ++e)
                if(partner_[p][e] == unset)
                    throw ValidationError("unmatched edge (" + std::to_string(p) + ", " + std::to_string(e) + ")");
    }

    void check_holonomies() const
    {
        for(const auto& [a, b] : gluings_.pairs)
        {
            const PlanarVector ha = edge_holonomy(a), hb = edge_holonomy(b);
            const double scale = std::max({1.0, ha.norm(), hb.norm()});
            if((ha + hb).norm() > 1e-9 * scale)
                throw ValidationError("gluing holonomy mismatch between (" + std::to_string(a.polygon) + ", " +
                                      std::to_string(a.edge) + ") and (" + std::to_string(b.polygon) + ", " +
                                      std::to_string(b.edge) + ")");
        }
    }

    void check_connected() const
    {
        std::vector<std::size_t> parent(polygons_.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while(parent[x] != x)
                x = parent[x] = parent[parent[x]];
            return x;
        };
        for(const auto& [a, b] : gluings_.pairs)
            parent[find(static_cast<std::size_t>(a.polygon))] = find(static_cast<std::size_t>(b.polygon));
        for(std::size_t p = 1; p < polygons_.size(); ++p)
            if(find(p) != find(0))
                throw ValidationError("disconnected surface");
    }

    // Walk counterclockwise around each vertex: from corner (p, i) cross the
    // incoming edge i-1; its partner (q, f) starts at the identified vertex, so
    // the next corner is (q, f). The walk is purely combinatorial.
    void trace_cone_points()
    {
        corner_cone_.assign(polygons_.size(), {});
        for(std::size_t p = 0; p < polygons_.size(); ++p)
            corner_cone_[p].assign(polygons_[p].size(), -1);

        cone_points_.clear();
        int order_sum = 0;
        for(std::size_t p = 0; p < polygons_.size(); ++p)
            for(std::size_t i = 0; i < polygons_[p].size(); ++i)
            {
                if(corner_cone_[p][i] >= 0)
                    continue;
                const int id = static_cast<int>(cone_points_.size());
                ConePoint cone;
                CornerRef c{static_cast<int>(p), static_cast<int>(i)};
                while(corner_cone_[static_cast<std::size_t>(c.polygon)][static_cast<std::size_t>(c.vertex)] < 0)
                {
                    corner_cone_[static_cast<std::size_t>(c.polygon)][static_cast<std::size_t>(c.vertex)] = id;
                    cone.vertex_class.push_back(c);
                    cone.total_angle += polygon(c.polygon).interior_angle(static_cast<std::size_t>(c.vertex));
                    const int n = static_cast<int>(polygon(c.polygon).size());
                    const EdgeRef incoming{c.polygon, (c.vertex + n - 1) % n};
                    const EdgeRef across = partner(incoming);
                    c = CornerRef{across.polygon, across.edge};
                }
                const double turns = cone.total_angle / two_pi;
                const double rounded = std::round(turns);
                if(rounded < 1.0 || std::abs(cone.total_angle - two_pi * rounded) > cone_angle_tolerance)
                    throw ValidationError("non-integer cone angle " + std::to_string(cone.total_angle) +
                                          " at vertex class of corner (" + std::to_string(p) + ", " +
                                          std::to_string(i) + ")");
                cone.order = static_cast<int>(rounded) - 1;
                order_sum += cone.order;
                cone_points_.push_back(std::move(cone));
            }

        if(order_sum % 2 != 0)
            throw ValidationError("cone orders sum to an odd number; no integer genus");
        genus_ = order_sum / 2 + 1;

        // Euler characteristic must agree with Gauss-Bonnet.
        const long v = static_cast<long>(cone_points_.size());
        const long e = static_cast<long>(gluings_.pairs.size());
        const long f = static_cast<long>(polygons_.size());
        if(v - e + f != 2 - 2L * genus_)
            throw ValidationError("Euler characteristic inconsistent with cone angles");
    }

    std::string name_;
    std::vector<PolygonChart> polygons_;
    GluingMap gluings_;
    std::vector<std::vector<EdgeRef>> partner_;
    std::vector<std::vector<int>> corner_cone_;
    std::vector<ConePoint> cone_points_;
    double area_ = 0.0;
    int genus_ = 0;
};

/// The cone points of a surface together with its genus.
struct ConeData
{
    std::vector<ConePoint> cone_points;
    int genus = 0;
};

inline ConeData cone_data(const TranslationSurface& surface)
{
    return {surface.cone_points(), surface.genus()};
}

/// g·ω: every polygon vertex is mapped by g; gluings are unchanged.
inline TranslationSurface apply_matrix(const TranslationSurface& surface, const GroupElement& g)
{
    if(!(std::abs(g.det() - 1.0) <= determinant_tolerance))
        throw DomainError("matrix determinant differs from 1");
    std::vector<PolygonChart> polys = surface.polygons();
    for(auto& p : polys)
        for(auto& v : p.vertices)
            v = g * v;
    return TranslationSurface::create(surface.name(), std::move(polys), surface.gluings());
}

} // namespace saddle
