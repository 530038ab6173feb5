#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saddle/enumerator.hpp"
#include "saddle/error.hpp"
#include "saddle/length_calculus.hpp"
#include "saddle/parallel.hpp"
#include "saddle/params.hpp"
#include "saddle/quadrature.hpp"
#include "saddle/rng.hpp"
#include "saddle/sl2.hpp"
#include "saddle/surface.hpp"

namespace saddle {

inline constexpr double euler_e = std::numbers::e;

// ---------------------------------------------------------------------------
// Weyl sums and discrepancy

/// (1/N) Σ exp(2πi p ℓ_n).
inline std::complex<double> weyl_sum(std::span<const double> lengths, int p)
{
    if(lengths.empty())
        throw DomainError("weyl_sum of an empty list");
    if(p == 0)
        return 1.0;
    double re = 0.0, im = 0.0;
    for(double l : lengths)
    {
        // Reduce first so large lengths keep their fractional precision.
        const double x = static_cast<double>(p) * l;
        const double phase = two_pi * (x - std::round(x));
        re += std::cos(phase);
        im += std::sin(phase);
    }
    const double n = static_cast<double>(lengths.size());
    return {re / n, im / n};
}

/// Exact star discrepancy of points in [0, 1).
inline double star_discrepancy(std::span<const double> values)
{
    if(values.empty())
        throw DomainError("star_discrepancy of an empty list");
    std::vector<double> x(values.begin(), values.end());
    for(double v : x)
        if(!(v >= 0.0 && v < 1.0))
            throw DomainError("star_discrepancy value outside [0, 1)");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for(std::size_t i = 0; i < x.size(); ++i)
    {
        const double k = static_cast<double>(i + 1);
        d = std::max({d, k / n - x[i], x[i] - (k - 1.0) / n});
    }
    return d;
}

inline std::vector<double> lengths_of(const Spectrum& s, std::size_t count)
{
    count = std::min(count, s.size());
    std::vector<double> out(count);
    for(std::size_t i = 0; i < count; ++i)
        out[i] = s.connections[i].length;
    return out;
}

inline std::vector<double> fractional_parts(std::span<const double> lengths)
{
    std::vector<double> out(lengths.size());
    for(std::size_t i = 0; i < lengths.size(); ++i)
    {
        double f = lengths[i] - std::floor(lengths[i]);
        out[i] = f >= 1.0 ? 0.0 : f;
    }
    return out;
}

/// Distinct ⌈τ^J⌉ not exceeding N, followed by N itself.
inline std::vector<std::int64_t> geometric_checkpoints(double tau, std::int64_t n)
{
    if(!(tau > 1.0))
        throw DomainError("tau must exceed 1");
    std::vector<std::int64_t> out;
    for(double x = 1.0; x <= static_cast<double>(n); x *= tau)
    {
        const auto c = static_cast<std::int64_t>(std::ceil(x - 1e-9 * x));
        if(c <= n && (out.empty() || out.back() != c))
            out.push_back(c);
    }
    if(out.empty() || out.back() != n)
        out.push_back(n);
    return out;
}

struct WeylSample
{
    std::uint64_t index = 0;
    CartanCoords g;
    std::vector<std::complex<double>> sums; // per checkpoint
    std::vector<double> discrepancy;         // D* of lengths mod 1, per checkpoint
};

struct WeylReport
{
    std::string surface;
    std::uint64_t seed = 0;
    ExperimentParameters params;
    double max_t = 1.0;
    std::vector<std::int64_t> checkpoints;
    std::vector<WeylSample> samples;
    std::vector<double> mean_abs_sum;
    std::vector<double> mean_discrepancy;
};

struct WeylOptions
{
    std::vector<std::int64_t> checkpoints; // empty: geometric in τ up to N
    double max_t = 1.0;
    std::uint64_t max_triangles = EnumerationOptions{}.max_triangles;
    Parallelism parallelism;
};

/// Weyl sums and discrepancies of Ξ(gω₀; N) along checkpoints N, for Haar
/// samples g ∈ D(max_t).
inline WeylReport weyl_experiment(const TranslationSurface& surface, const ExperimentParameters& params,
                                  const WeylOptions& options = {})
{
    params.check_ranges();
    WeylReport r;
    r.surface = surface.name();
    r.seed = params.seed;
    r.params = params;
    r.max_t = options.max_t;
    r.checkpoints = options.checkpoints.empty() ? geometric_checkpoints(params.tau, params.N) : options.checkpoints;
    std::sort(r.checkpoints.begin(), r.checkpoints.end());
    r.checkpoints.erase(std::unique(r.checkpoints.begin(), r.checkpoints.end()), r.checkpoints.end());
    if(r.checkpoints.empty() || r.checkpoints.front() < 1)
        throw DomainError("checkpoints must be positive");
    const auto top = static_cast<std::size_t>(r.checkpoints.back());

    const HaarSampler sampler(options.max_t, params.seed);
    r.samples.resize(static_cast<std::size_t>(params.samples));
    parallel_for(r.samples.size(), options.parallelism, [&](std::size_t i) {
        WeylSample& out = r.samples[i];
        out.index = i;
        out.g = sampler.coords(i);
        EnumerationOptions eo;
        eo.record_paths = false;
        eo.max_triangles = options.max_triangles;
        const auto spectrum = first_n(apply_matrix(surface, recompose(out.g)), top, eo);
        const auto all = lengths_of(spectrum, top);
        for(auto c : r.checkpoints)
        {
            const std::span<const double> head(all.data(), static_cast<std::size_t>(c));
            out.sums.push_back(weyl_sum(head, params.p));
            out.discrepancy.push_back(star_discrepancy(fractional_parts(head)));
        }
    });

    const std::size_t m = r.checkpoints.size();
    r.mean_abs_sum.assign(m, 0.0);
    r.mean_discrepancy.assign(m, 0.0);
    for(const auto& s : r.samples)
        for(std::size_t j = 0; j < m; ++j)
        {
            r.mean_abs_sum[j] += std::abs(s.sums[j]);
            r.mean_discrepancy[j] += s.discrepancy[j];
        }
    for(std::size_t j = 0; j < m; ++j)
    {
        r.mean_abs_sum[j] /= static_cast<double>(r.samples.size());
        r.mean_discrepancy[j] /= static_cast<double>(r.samples.size());
    }
    return r;
}

struct DiscrepancyReport
{
    std::string surface;
    std::uint64_t seed = 0;
    ExperimentParameters params;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> base_discrepancy; // D* for ω₀ itself
    std::vector<double> mean_discrepancy; // averaged over Haar samples
    std::vector<std::vector<double>> sample_discrepancy;
};

/// Star discrepancy of lengths mod 1 for ω₀ and for Haar-perturbed copies.
inline DiscrepancyReport discrepancy_experiment(const TranslationSurface& surface, const ExperimentParameters& params,
                                                const WeylOptions& options = {})
{
    const WeylReport w = weyl_experiment(surface, params, options);
    DiscrepancyReport r;
    r.surface = w.surface;
    r.seed = w.seed;
    r.params = params;
    r.checkpoints = w.checkpoints;
    r.mean_discrepancy = w.mean_discrepancy;
    for(const auto& s : w.samples)
        r.sample_discrepancy.push_back(s.discrepancy);

    EnumerationOptions eo;
    eo.record_paths = false;
    eo.max_triangles = options.max_triangles;
    eo.parallelism = options.parallelism;
    const auto all = lengths_of(first_n(surface, static_cast<std::size_t>(r.checkpoints.back()), eo),
                                static_cast<std::size_t>(r.checkpoints.back()));
    for(auto c : r.checkpoints)
        r.base_discrepancy.push_back(
            star_discrepancy(fractional_parts(std::span<const double>(all.data(), static_cast<std::size_t>(c)))));
    return r;
}

// ---------------------------------------------------------------------------
// Quadratic growth

struct GrowthFit
{
    std::string surface;
    std::vector<double> radii;
    std::vector<std::size_t> counts;
    double c_hat = 0.0; // least-squares count ≈ c R²
    double c1 = 0.0;    // (c1 e R)² ≤ count on the grid
    double c2 = 0.0;    // count ≤ (c2 R / e)² on the grid
};

/// Fit |Λ(ω;R)| ≈ cR² on an increasing grid and report envelope constants.
inline GrowthFit growth_fit(const TranslationSurface& surface, std::vector<double> grid,
                            const EnumerationOptions& options = {})
{
    if(grid.size() < 4)
        throw DomainError("growth_fit needs at least 4 radii");
    for(std::size_t i = 0; i < grid.size(); ++i)
        if(!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
            throw DomainError("growth_fit radii must be positive and increasing");

    EnumerationOptions eo = options;
    eo.record_paths = false;
    const Spectrum all = enumerate_up_to_length(surface, grid.back(), eo);

    GrowthFit f;
    f.surface = surface.name();
    f.radii = std::move(grid);
    double num = 0.0, den = 0.0;
    f.c1 = std::numeric_limits<double>::infinity();
    for(double r : f.radii)
    {
        const std::size_t n = count_up_to(all, r);
        f.counts.push_back(n);
        num += static_cast<double>(n) * r * r;
        den += r * r * r * r;
        const double root = std::sqrt(static_cast<double>(n));
        f.c1 = std::min(f.c1, root / (euler_e * r));
        f.c2 = std::max(f.c2, euler_e * root / r);
    }
    f.c_hat = num / den;
    return f;
}

/// Geometric grid of `points` radii from lo to hi inclusive.
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t points)
{
    if(!(lo > 0.0) || !(hi > lo) || points < 2)
        throw DomainError("geometric grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> out(points);
    for(std::size_t i = 0; i < points; ++i)
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    out.back() = hi;
    return out;
}

// ---------------------------------------------------------------------------
// Sector counts

struct SectorReport
{
    std::string surface;
    double radius = 0.0;
    double epsilon = 0.0;
    std::vector<double> arc_lengths;
    int arcs_per_length = 0;
    std::vector<std::vector<double>> ratios; // [length][placement]: count / (|I| R²)
    double c4 = 0.0;                          // max ratio at R
    std::vector<double> scan_radii;           // dyadic, decreasing from R
    std::vector<std::vector<double>> scan_max_ratio; // [length][radius]
    std::vector<double> threshold;            // R*(|I|)
    double c_fit = 0.0;                       // R* ≈ C / |I|^{2+ε}
};

/// Sector-count ratios over rotated arcs of the given lengths.
inline SectorReport sector_scan(const TranslationSurface& surface, double radius, const std::vector<double>& arc_lengths,
                                int arcs_per_length, double epsilon = 0.01, const EnumerationOptions& options = {},
                                int dyadic_steps = 6)
{
    if(!(radius > 0.0))
        throw DomainError("sector_scan radius must be positive");
    if(arcs_per_length < 1 || arc_lengths.empty())
        throw DomainError("sector_scan needs arcs");
    for(double len : arc_lengths)
        if(!(len > 0.0 && len < two_pi))
            throw DomainError("arc lengths must lie in (0, 2π)");

    EnumerationOptions eo = options;
    eo.record_paths = false;
    const Spectrum all = enumerate_up_to_length(surface, radius, eo);
    std::vector<std::pair<double, double>> pts; // (length, angle)
    pts.reserve(all.size());
    for(const auto& c : all.connections)
        pts.emplace_back(c.length, c.angle);

    SectorReport r;
    r.surface = surface.name();
    r.radius = radius;
    r.epsilon = epsilon;
    r.arc_lengths = arc_lengths;
    r.arcs_per_length = arcs_per_length;
    for(int j = 0; j < dyadic_steps; ++j)
        r.scan_radii.push_back(radius / std::pow(2.0, j));

    auto count = [&](const Arc& arc, double rr) {
        std::size_t n = 0;
        for(const auto& [len, ang] : pts)
            if(len <= rr && arc.contains(ang))
                ++n;
        return n;
    };

    for(double len : arc_lengths)
    {
        std::vector<double> row;
        std::vector<double> scan(r.scan_radii.size(), 0.0);
        for(int k = 0; k < arcs_per_length; ++k)
        {
            const double start = two_pi * static_cast<double>(k) / static_cast<double>(arcs_per_length);
            const Arc arc{start, start + len};
            for(std::size_t j = 0; j < r.scan_radii.size(); ++j)
            {
                const double rr = r.scan_radii[j];
                const double ratio = static_cast<double>(count(arc, rr)) / (len * rr * rr);
                scan[j] = std::max(scan[j], ratio);
                if(j == 0)
                    row.push_back(ratio);
            }
        }
        r.c4 = std::max(r.c4, *std::max_element(row.begin(), row.end()));
        r.ratios.push_back(std::move(row));
        r.scan_max_ratio.push_back(std::move(scan));
    }

    double log_sum = 0.0;
    for(std::size_t i = 0; i < arc_lengths.size(); ++i)
    {
        // Smallest scanned radius from which every larger scanned radius stays below c4.
        double rstar = radius;
        for(std::size_t j = 0; j < r.scan_radii.size(); ++j)
        {
            if(r.scan_max_ratio[i][j] > r.c4)
                break;
            rstar = r.scan_radii[j];
        }
        r.threshold.push_back(rstar);
        log_sum += std::log(rstar) + (2.0 + epsilon) * std::log(arc_lengths[i]);
    }
    r.c_fit = std::exp(log_sum / static_cast<double>(arc_lengths.size()));
    return r;
}

// ---------------------------------------------------------------------------
// Annuli around the N-th length

/// E_N with the N-th length ℓ = ℓ(d^tω; N) already known.
inline bool annulus_indicator(PlanarVector hol, double t, double nth, double step)
{
    const double r = (diag_flow(t) * hol).norm();
    return Annulus{std::exp(-2.0 * step) * nth, std::exp(2.0 * step) * nth}.contains(r);
}

/// E_N(v; t): whether d^t hol(v) lies in ann(e^{-2S}ℓ(d^tω;N), e^{2S}ℓ(d^tω;N)).
inline bool annulus_indicator(const SaddleConnection& v, const TranslationSurface& surface, double t, std::int64_t n,
                              double step)
{
    if(n < 1)
        throw DomainError("annulus_indicator requires N >= 1");
    EnumerationOptions eo;
    eo.record_paths = false;
    const double nth = nth_length(apply_matrix(surface, diag_flow(t)), static_cast<std::size_t>(n), eo);
    return annulus_indicator(v.holonomy, t, nth, step);
}

/// Bracket N^{1/2}/(c₂ log N) ≤ ℓ ≤ N^{1/2}/c₁.
inline Annulus length_bracket(std::int64_t n, double c1, double c2)
{
    const double rt = std::sqrt(static_cast<double>(n));
    return {rt / (c2 * std::log(static_cast<double>(n))), rt / c1};
}

/// The big annulus ann(N^{1/2}/(2e c₂ log N), 2e N^{1/2}/c₁).
inline Annulus big_annulus(std::int64_t n, double c1, double c2)
{
    const double rt = std::sqrt(static_cast<double>(n));
    return {rt / (2.0 * euler_e * c2 * std::log(static_cast<double>(n))), 2.0 * euler_e * rt / c1};
}

struct SandwichResult
{
    std::size_t outside_upper = 0; // members of Ξ(d^s gω;N) missing from d^sΛ(gω; e^{2s}ℓ)
    std::size_t missing_lower = 0; // members of d^sΛ(gω; e^{-2s}ℓ) missing from Ξ(d^s gω;N)
    std::size_t symdiff = 0;       // |Ξ(d^s gω;N) △ d^sΞ(gω;N)|
    std::size_t annulus_count = 0; // |Λ(gω) ∩ ann(e^{-2S}ℓ, e^{2S}ℓ)|
    double nth = 0.0;              // ℓ(gω;N)

    bool holds() const { return outside_upper == 0 && missing_lower == 0; }
};

namespace detail {

// Relative slack for comparisons against ℓ, well above rounding of apply_matrix.
inline constexpr double sandwich_slack = 1e-7;

inline SandwichResult sandwich(const TranslationSurface& base, double s, double step, std::size_t n,
                               std::uint64_t max_triangles = EnumerationOptions{}.max_triangles)
{
    EnumerationOptions eo;
    eo.record_paths = false;
    eo.max_triangles = max_triangles;
    const Spectrum xi = first_n(base, n, eo);
    const double nth = xi.connections.back().length;
    const double reach = std::exp(2.0 * std::max(s, step)) * nth * (1.0 + sandwich_slack);
    const Spectrum big = enumerate_up_to_length(base, reach, eo);
    const GroupElement ds = diag_flow(s);
    const Spectrum moved = first_n(apply_matrix(base, ds), n, eo);

    SandwichResult r;
    r.nth = nth;
    const ConnectionIndex moved_idx = ConnectionIndex::of(moved);
    const ConnectionIndex pushed = ConnectionIndex::of(xi, ds);
    r.symdiff = moved_idx.count_missing_from(pushed) + pushed.count_missing_from(moved_idx);

    const double upper = std::exp(2.0 * s) * nth * (1.0 + sandwich_slack);
    const double lower = std::exp(-2.0 * s) * nth * (1.0 - sandwich_slack);
    std::vector<std::pair<CornerRef, PlanarVector>> up, low;
    for(const auto& c : big.connections)
    {
        if(c.length <= upper)
            up.emplace_back(c.start_corner, ds * c.holonomy);
        if(c.length <= lower)
            low.emplace_back(c.start_corner, ds * c.holonomy);
    }
    r.outside_upper = moved_idx.count_missing_from(ConnectionIndex(std::move(up)));
    r.missing_lower = ConnectionIndex(std::move(low)).count_missing_from(moved_idx);

    const Annulus ann{std::exp(-2.0 * step) * nth, std::exp(2.0 * step) * nth};
    for(const auto& c : big.connections)
        if(ann.contains(c.length))
            ++r.annulus_count;
    return r;
}

} // namespace detail

/// Sandwich of Ξ(d^s gω; N) between d^sΛ(gω; e^{∓2s}ℓ(gω;N)).
inline SandwichResult sandwich_check(const TranslationSurface& surface, const GroupElement& g, double s, std::size_t n)
{
    if(!(s >= 0.0))
        throw DomainError("sandwich_check requires s >= 0");
    return detail::sandwich(apply_matrix(surface, g), s, s, n);
}

struct AnnularSample
{
    double s = 0.0;
    double theta = 0.0;
    std::size_t symdiff = 0;
    std::size_t annulus_count = 0;
    bool sandwich_holds = true;
};

struct AnnularReport
{
    std::string surface;
    std::uint64_t seed = 0;
    ExperimentParameters params;
    double phi = 0.0;
    double step = 0.0;      // S
    double threshold = 0.0; // N^{1-ζ}
    std::vector<double> t;
    std::vector<std::size_t> max_symdiff;   // per t, over (s, θ)
    std::vector<double> nth;                // ℓ(d^t r^φ ω₀; N) per t
    std::vector<std::vector<AnnularSample>> samples;
    double bad_fraction = 0.0;
    std::size_t bound_violations = 0;   // samples with symdiff > annulus count
    std::size_t sandwich_failures = 0;
};

struct AnnularOptions
{
    int t_points = 200;
    std::optional<double> forced_s; // every sample uses this s instead of drawing from [0, S]
    std::uint64_t max_triangles = EnumerationOptions{}.max_triangles;
    Parallelism parallelism;
};

/// Compare Ξ(d^s r^θ d^t r^φ ω₀; N) with d^s Ξ(r^θ d^t r^φ ω₀; N) over a t-grid
/// and `samples` draws of (s, θ) per t; the first draw at each t uses s = S.
inline AnnularReport symdiff_experiment(const TranslationSurface& surface, double phi, const ExperimentParameters& params,
                                        const AnnularOptions& options = {})
{
    params.check_ranges();
    if(options.t_points < 2)
        throw DomainError("t-grid needs at least 2 points");
    AnnularReport r;
    r.surface = surface.name();
    r.seed = params.seed;
    r.params = params;
    r.phi = phi;
    r.step = params.step();
    r.threshold = std::pow(static_cast<double>(params.N), 1.0 - params.zeta);

    const auto tp = static_cast<std::size_t>(options.t_points);
    const auto k = static_cast<std::size_t>(params.samples);
    r.t.resize(tp);
    r.max_symdiff.assign(tp, 0);
    r.nth.assign(tp, 0.0);
    r.samples.assign(tp, std::vector<AnnularSample>(k));
    const GroupElement rphi = rotation(phi);

    parallel_for(tp, options.parallelism, [&](std::size_t i) {
        const double t = static_cast<double>(i) / static_cast<double>(tp - 1);
        r.t[i] = t;
        const GroupElement flow = diag_flow(t) * rphi;
        for(std::size_t j = 0; j < k; ++j)
        {
            Rng rng(derive_seed(params.seed, i * k + j));
            AnnularSample& a = r.samples[i][j];
            a.s = j == 0 ? r.step : r.step * rng.uniform();
            a.theta = two_pi * rng.uniform();
            if(options.forced_s)
                a.s = *options.forced_s;
            const auto res =
                detail::sandwich(apply_matrix(surface, rotation(a.theta) * flow), a.s, r.step,
                                             static_cast<std::size_t>(params.N), options.max_triangles);
            a.symdiff = res.symdiff;
            a.annulus_count = res.annulus_count;
            a.sandwich_holds = res.holds();
            r.max_symdiff[i] = std::max(r.max_symdiff[i], res.symdiff);
            r.nth[i] = res.nth;
        }
    });

    std::size_t bad = 0;
    for(std::size_t i = 0; i < tp; ++i)
    {
        if(static_cast<double>(r.max_symdiff[i]) > r.threshold)
            ++bad;
        for(const auto& a : r.samples[i])
        {
            if(a.symdiff > a.annulus_count)
                ++r.bound_violations;
            if(!a.sandwich_holds)
                ++r.sandwich_failures;
        }
    }
    r.bad_fraction = static_cast<double>(bad) / static_cast<double>(tp);
    return r;
}

// ---------------------------------------------------------------------------
// Sector partition of the big annulus

struct PartitionArc
{
    int k = 0;        // 1-based label
    int quadrant = 0; // 0..3
    int index = 0;    // position inside the quadrant, counterclockwise
    int first_quadrant_index = 0;
    Arc arc;
};

struct SectorPartition
{
    double psi = 0.0;
    std::int64_t kappa = 0;
    double width = 0.0;
    double nth = 0.0; // ℓ(ω; N)
    Annulus annulus;  // big annulus
    std::vector<Arc> z;          // four axis sectors of half-width ψ
    std::vector<PartitionArc> w; // W(1..4κ)
    std::vector<std::vector<int>> v; // V(k) as labels, k = 1..4κ at index k-1
    std::vector<std::size_t> z_members;              // indices into `connections` in Z
    std::vector<std::vector<std::size_t>> w_members; // per W(k)
    Spectrum connections; // Λ(ω; 2e N^{1/2}/c₁)
};

/// Partition Λ(ω) ∩ big-annulus into the axis sectors Z and the arcs W(k).
/// c₁, c₂ are growth constants (see growth_fit).
inline SectorPartition sector_partition(const TranslationSurface& surface, const ExperimentParameters& params, double c1,
                                        double c2, const EnumerationOptions& options = {})
{
    params.check_ranges();
    if(!(c1 > 0.0) || !(c2 > 0.0))
        throw DomainError("growth constants must be positive");
    SectorPartition out;
    EnumerationOptions eo = options;
    eo.record_paths = false;
    out.nth = nth_length(surface, static_cast<std::size_t>(params.N), eo);
    out.psi = params.axis_halfwidth();
    out.kappa = params.arc_count(out.nth);
    if(out.kappa < 1)
        throw DomainError("kappa = 0: N too small for the sector partition");
    const int kappa = static_cast<int>(out.kappa);
    const double half_pi = std::numbers::pi / 2;
    out.width = (half_pi - 2.0 * out.psi) / static_cast<double>(kappa);
    out.annulus = big_annulus(params.N, c1, c2);

    for(int q = 0; q < 4; ++q)
        out.z.push_back(Arc{wrap_angle(q * half_pi - out.psi), wrap_angle(q * half_pi - out.psi) + 2.0 * out.psi});
    for(int q = 0; q < 4; ++q)
        for(int j = 0; j < kappa; ++j)
        {
            PartitionArc a;
            a.k = q * kappa + j + 1;
            a.quadrant = q;
            a.index = j;
            a.first_quadrant_index = q % 2 == 0 ? j : kappa - 1 - j;
            const double start = q * half_pi + out.psi + j * out.width;
            a.arc = Arc{start, start + out.width};
            out.w.push_back(a);
        }
    for(const auto& a : out.w)
    {
        std::vector<int> labels;
        for(const auto& b : out.w)
            if(std::abs(b.first_quadrant_index - a.first_quadrant_index) <= 1)
                labels.push_back(b.k);
        out.v.push_back(std::move(labels));
    }

    out.connections = enumerate_up_to_length(surface, out.annulus.outer, eo);
    out.w_members.assign(out.w.size(), {});
    for(std::size_t i = 0; i < out.connections.size(); ++i)
    {
        const auto& c = out.connections[i];
        if(!out.annulus.contains(c.length))
            continue;
        bool in_z = false;
        for(const auto& z : out.z)
            in_z = in_z || z.contains(c.angle);
        if(in_z)
        {
            out.z_members.push_back(i);
            continue;
        }
        // Arcs tile each quadrant from qπ/2 + ψ; rounding at an arc end goes to the neighbour.
        const int q = std::min(3, static_cast<int>(c.angle / half_pi));
        int j = static_cast<int>(std::floor((c.angle - q * half_pi - out.psi) / out.width));
        j = std::clamp(j, 0, kappa - 1);
        std::size_t idx = static_cast<std::size_t>(q * kappa + j);
        if(!out.w[idx].arc.contains(c.angle) && j + 1 < kappa && out.w[idx + 1].arc.contains(c.angle))
            ++idx;
        out.w_members[idx].push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Oscillatory kernel

struct KernelReport
{
    PlanarVector v;
    PlanarVector w;
    int p = 0;
    double step = 0.0;       // S
    double delta = 0.0;
    double implied_n = 0.0;  // N with S = N^{-δ}
    std::complex<double> value;
    double magnitude = 0.0;
    int quad_points = 0;     // per dimension, at convergence
    double amplitude = 0.0;  // A(v, w)
    double bound = 0.0;
    bool within_bound = false;
};

namespace detail {

inline std::complex<double> kernel_quadrature(PlanarVector v, PlanarVector w, int p, double step, std::size_t panels)
{
    const double nv = v.norm(), nw = w.norm();
    const double av = std::atan2(v.y, v.x), aw = std::atan2(w.y, w.x);
    const double k = two_pi * static_cast<double>(p);
    double re = 0.0, im = 0.0;
    for_each_gauss_node(0.0, two_pi, panels, [&](double theta, double wt) {
        // α(r^θ u) = |u| cos 2(θ + arg u)
        const double diff = nv * std::cos(2.0 * (theta + av)) - nw * std::cos(2.0 * (theta + aw));
        double inner_re = 0.0, inner_im = 0.0;
        for_each_gauss_node(0.0, step, panels, [&](double s, double ws) {
            const double phase = k * s * diff;
            inner_re += ws * std::cos(phase);
            inner_im += ws * std::sin(phase);
        });
        re += wt * inner_re;
        im += wt * inner_im;
    });
    const double scale = 1.0 / (two_pi * step);
    return {re * scale, im * scale};
}

} // namespace detail

/// (1/2π)∫₀^{2π} (1/S)∫₀^S χ_p(sα(r^θv)) conj χ_p(sα(r^θw)) ds dθ by tensor
/// Gauss–Legendre, doubling the points per dimension until two successive
/// values agree to 1e-6.
inline KernelReport kernel_integral(PlanarVector v, PlanarVector w, int p, double step, int quad_points,
                                    double delta = 1.0 / 3.0, int max_quad_points = 1 << 13)
{
    if(v.norm2() == 0.0 || w.norm2() == 0.0)
        throw DomainError("kernel_integral requires non-zero vectors");
    if(quad_points < 64)
        throw DomainError("kernel_integral requires quad_points >= 64");
    if(!(step > 0.0) || !(delta > 0.0))
        throw DomainError("kernel_integral requires S > 0 and delta > 0");

    KernelReport r;
    r.v = v;
    r.w = w;
    r.p = p;
    r.step = step;
    r.delta = delta;
    r.implied_n = std::pow(step, -1.0 / delta);
    r.amplitude = pair_amplitude(v, w);
    const double n = r.implied_n;
    r.bound = 4.0 / (std::numbers::pi * std::sqrt(n)) +
              (r.amplitude > 0.0 ? std::pow(n, delta) / (std::numbers::pi * r.amplitude) *
                                       (std::log(n) + std::log(std::numbers::pi / 4.0))
                                 : std::numeric_limits<double>::infinity());

    std::size_t panels = (static_cast<std::size_t>(quad_points) + 15) / 16;
    if(p == 0 || v == w)
    {
        r.value = 1.0;
        r.magnitude = 1.0;
        r.quad_points = static_cast<int>(panels * 16);
        r.within_bound = r.magnitude <= r.bound;
        return r;
    }
    std::complex<double> prev = detail::kernel_quadrature(v, w, p, step, panels);
    while(true)
    {
        const std::size_t next = 2 * panels;
        if(static_cast<int>(next * 16) > max_quad_points)
            throw NonConvergenceError("kernel quadrature did not stabilise below 1e-6");
        const std::complex<double> cur = detail::kernel_quadrature(v, w, p, step, next);
        const bool stable = std::abs(cur - prev) <= 1e-6;
        prev = cur;
        panels = next;
        if(stable)
            break;
    }
    r.value = prev;
    r.magnitude = std::abs(prev);
    r.quad_points = static_cast<int>(panels * 16);
    r.within_bound = r.magnitude <= r.bound;
    return r;
}

} // namespace saddle
