#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "saddle/builtin.hpp"
#include "saddle/enumerator.hpp"

using namespace saddle;

namespace {

// Primitive integer vectors of norm at most r: the saddle connections of the
// square torus with its single marked point.
std::multiset<std::pair<long, long>> primitive_vectors(double r)
{
    std::multiset<std::pair<long, long>> out;
    const long m = static_cast<long>(std::floor(r));
    for(long x = -m; x <= m; ++x)
        for(long y = -m; y <= m; ++y)
            if((x != 0 || y != 0) && std::gcd(x, y) == 1 && static_cast<double>(x * x + y * y) <= r * r)
                out.emplace(x, y);
    return out;
}

std::multiset<std::pair<long, long>> rounded(const Spectrum& s)
{
    std::multiset<std::pair<long, long>> out;
    for(const auto& c : s.connections)
    {
        EXPECT_NEAR(c.holonomy.x, std::round(c.holonomy.x), 1e-9);
        EXPECT_NEAR(c.holonomy.y, std::round(c.holonomy.y), 1e-9);
        out.emplace(std::lround(c.holonomy.x), std::lround(c.holonomy.y));
    }
    return out;
}

} // namespace

TEST(Enumerate, TorusUnitRadius)
{
    const auto s = enumerate_up_to_length(square_torus(), 1.0);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(rounded(s), primitive_vectors(1.0));
    EXPECT_EQ(s.complete_radius, 1.0);
}

TEST(Enumerate, TorusAddsDiagonals)
{
    // Four unit vectors plus the four (±1,±1).
    const auto s = enumerate_up_to_length(square_torus(), 1.5);
    ASSERT_EQ(s.size(), 8u);
    EXPECT_EQ(rounded(s), primitive_vectors(1.5));
}

TEST(Enumerate, BelowSystoleIsEmpty)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto surface = builtin_surface(name);
        const double sys = systole(surface);
        EXPECT_TRUE(enumerate_up_to_length(surface, 0.999 * sys).empty()) << name;
    }
}

TEST(Enumerate, TorusMatchesPrimitiveVectors)
{
    for(double r : {2.0, 3.7, 10.0, 25.5})
        EXPECT_EQ(rounded(enumerate_up_to_length(square_torus(), r)), primitive_vectors(r)) << r;
}

TEST(Enumerate, RotatedTorusKeepsCounts)
{
    const auto rotated = apply_matrix(square_torus(), rotation(0.3));
    for(double r : {1.0, 5.0, 12.0})
        EXPECT_EQ(enumerate_up_to_length(rotated, r).size(), primitive_vectors(r).size()) << r;
}

TEST(Enumerate, ChartPathsReproduceHolonomy)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto surface = builtin_surface(name);
        const auto s = enumerate_up_to_length(surface, 6.0);
        ASSERT_FALSE(s.empty());
        for(const auto& c : s.connections)
        {
            const PlanarVector h = develop_chart_path(surface, c);
            EXPECT_NEAR(h.x, c.holonomy.x, 1e-9) << name;
            EXPECT_NEAR(h.y, c.holonomy.y, 1e-9) << name;
            EXPECT_GT(c.length, 0.0);
        }
    }
}

TEST(Enumerate, CanonicalOrderAndNoDuplicates)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto s = enumerate_up_to_length(builtin_surface(name), 8.0);
        std::set<std::tuple<CornerRef, long long, long long>> seen;
        for(std::size_t i = 0; i < s.size(); ++i)
        {
            const auto& c = s[i];
            EXPECT_TRUE(seen.emplace(c.start_corner, std::llround(c.holonomy.x * 1e8), std::llround(c.holonomy.y * 1e8)).second);
            if(i == 0)
                continue;
            const auto& p = s[i - 1];
            const bool tie = c.length - p.length <= tie_tolerance * c.length;
            if(!tie)
                EXPECT_GT(c.length, p.length);
            else
                EXPECT_GE(c.angle, p.angle - tie_tolerance);
        }
    }
}

TEST(Enumerate, AntipodalSymmetry)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto s = enumerate_up_to_length(builtin_surface(name), 7.0);
        EXPECT_EQ(s.size() % 2, 0u) << name;
        std::multiset<std::pair<long long, long long>> hol;
        for(const auto& c : s.connections)
            hol.emplace(std::llround(c.holonomy.x * 1e7), std::llround(c.holonomy.y * 1e7));
        for(const auto& [x, y] : hol)
            EXPECT_EQ(hol.count({x, y}), hol.count({-x, -y})) << name;
    }
}

TEST(Enumerate, IndependentOfWorkers)
{
    const auto surface = builtin_surface("regular-octagon");
    EnumerationOptions one, four;
    four.parallelism.workers = 4;
    const auto a = enumerate_up_to_length(surface, 10.0, one);
    const auto b = enumerate_up_to_length(surface, 10.0, four);
    ASSERT_EQ(a.size(), b.size());
    for(std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].holonomy, b[i].holonomy);
        EXPECT_EQ(a[i].start_corner, b[i].start_corner);
        EXPECT_EQ(a[i].chart_path, b[i].chart_path);
    }
}

TEST(Enumerate, ResourceCap)
{
    EnumerationOptions opts;
    opts.max_triangles = 50;
    EXPECT_THROW(enumerate_up_to_length(builtin_surface("regular-octagon"), 30.0, opts), ResourceLimitError);
    EXPECT_THROW(enumerate_up_to_length(square_torus(), -1.0), DomainError);
}

TEST(Enumerate, Equivariance)
{
    const auto surface = builtin_surface("L-shaped(2,2)");
    const HaarSampler sampler(1.0, 11);
    const double r = 6.0;
    const auto big = enumerate_up_to_length(surface, std::exp(1.0) * r);
    for(std::uint64_t i = 0; i < 5; ++i)
    {
        const GroupElement g = sampler.sample(i);
        const auto moved = enumerate_up_to_length(apply_matrix(surface, g), r);
        std::vector<std::pair<CornerRef, PlanarVector>> expected;
        for(const auto& c : big.connections)
        {
            const PlanarVector h = g * c.holonomy;
            if(h.norm() <= r)
                expected.emplace_back(c.start_corner, h);
        }
        const ConnectionIndex lhs = ConnectionIndex::of(moved);
        const ConnectionIndex rhs(expected);
        EXPECT_EQ(lhs.size(), rhs.size());
        EXPECT_EQ(lhs.count_missing_from(rhs), 0u);
        EXPECT_EQ(rhs.count_missing_from(lhs), 0u);
    }
}

TEST(FirstN, TorusUnitVectors)
{
    const auto s = first_n(square_torus(), 4);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(rounded(s), primitive_vectors(1.0));
    EXPECT_NEAR(s[0].holonomy.x, 1.0, 1e-12);
    EXPECT_NEAR(s[1].holonomy.y, 1.0, 1e-12);
    EXPECT_NEAR(s[2].holonomy.x, -1.0, 1e-12);
    EXPECT_NEAR(s[3].holonomy.y, -1.0, 1e-12);
}

TEST(FirstN, ExactCardinality)
{
    for(const auto& name : builtin_surface_names())
        for(std::size_t n : {1u, 2u, 7u, 50u, 333u})
            EXPECT_EQ(first_n(builtin_surface(name), n).size(), n) << name << " " << n;
}

TEST(FirstN, CompleteRadiusRespectsTies)
{
    // The 5th..8th connections of the torus all have length √2.
    const auto s = first_n(square_torus(), 6);
    EXPECT_NEAR(s.complete_radius, 1.0, 1e-12);
    const auto t = first_n(square_torus(), 8);
    EXPECT_NEAR(t.complete_radius, std::sqrt(2.0), 1e-12);
    EXPECT_THROW(first_n(square_torus(), 0), DomainError);
}

TEST(NthLength, Torus)
{
    EXPECT_NEAR(systole(square_torus()), 1.0, 1e-12);
    EXPECT_NEAR(nth_length(square_torus(), 5), std::sqrt(2.0), 1e-12);
    const auto first = first_n(square_torus(), 1);
    EXPECT_NEAR(first[0].angle, 0.0, 1e-12);
}

TEST(NthLength, RotationInvariant)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto surface = builtin_surface(name);
        const auto rotated = apply_matrix(surface, rotation(1.1));
        for(std::size_t n : {1u, 10u, 100u})
            EXPECT_NEAR(nth_length(rotated, n), nth_length(surface, n), 1e-10) << name << " " << n;
    }
}

TEST(Filter, Sector)
{
    const auto s = enumerate_up_to_length(square_torus(), 1.5);
    EXPECT_EQ(filter_sector(s, Arc{0.0, two_pi}).size(), s.size());
    const auto q = filter_sector(s, Arc{0.0, std::numbers::pi / 2});
    ASSERT_EQ(q.size(), 2u);
    EXPECT_EQ(rounded(q), (std::multiset<std::pair<long, long>>{{1, 0}, {1, 1}}));
    // An arc that wraps through angle zero.
    const auto w = filter_sector(s, Arc{7 * std::numbers::pi / 4, 7 * std::numbers::pi / 4 + std::numbers::pi / 2});
    EXPECT_EQ(rounded(w), (std::multiset<std::pair<long, long>>{{1, -1}, {1, 0}}));
    EXPECT_THROW(filter_sector(s, Arc{1.0, 1.0}), DomainError);
}

TEST(Filter, Annulus)
{
    const auto s = enumerate_up_to_length(square_torus(), 1.5);
    const auto a = filter_annulus(s, Annulus{1.2, 1.5});
    EXPECT_EQ(rounded(a), (std::multiset<std::pair<long, long>>{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}));
    EXPECT_THROW(filter_annulus(s, Annulus{1.0, 2.0}), IncompleteSpectrumError);
    EXPECT_EQ(filter_annulus(s, Annulus{1.0, 1.0}).size(), 4u);
}

TEST(Export, Csv)
{
    const auto csv = spectrum_to_csv(enumerate_up_to_length(square_torus(), 1.0));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,hol_x,hol_y,length,angle,frac_length");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_NE(csv.find("\n1,1,0,1,0,0\n"), std::string::npos);
}

TEST(Triangulate, CoversPolygonArea)
{
    for(const auto& name : builtin_surface_names())
    {
        const auto surface = builtin_surface(name);
        double total = 0.0;
        for(const auto& t : detail::triangulate(surface))
        {
            const double a = 0.5 * cross(t.pos[1] - t.pos[0], t.pos[2] - t.pos[0]);
            EXPECT_GT(a, 0.0);
            total += a;
            for(int j = 0; j < 3; ++j)
                EXPECT_GE(t.neighbor[static_cast<std::size_t>(j)], 0);
        }
        EXPECT_NEAR(total, surface.area(), 1e-12 * surface.area());
    }
}
