// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "saddle/saddle.hpp"

namespace fs = std::filesystem;
using namespace saddle;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int prec = 4)
{
    std::ostringstream s;
    s.precision(prec);
    s << x;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

EnumerationOptions fast()
{
    EnumerationOptions o;
    o.record_paths = false;
    return o;
}

std::multiset<std::pair<long, long>> primitive_vectors(double r)
{
    std::multiset<std::pair<long, long>> out;
    const long m = static_cast<long>(std::floor(r));
    for(long x = -m; x <= m; ++x)
        for(long y = -m; y <= m; ++y)
            if((x || y) && std::gcd(x, y) == 1 && static_cast<double>(x * x + y * y) <= r * r)
                out.emplace(x, y);
    return out;
}

Outcome torus_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    int radii = 0, mismatches = 0;
    for(int k = 2; k <= 80; ++k)
    {
        const double r = 0.5 * k;
        const auto s = enumerate_up_to_length(square_torus(), r, fast());
        std::multiset<std::pair<long, long>> got;
        bool integral = true;
        for(const auto& c : s.connections)
        {
            integral = integral && std::abs(c.holonomy.x - std::round(c.holonomy.x)) < 1e-9 &&
                       std::abs(c.holonomy.y - std::round(c.holonomy.y)) < 1e-9;
            got.emplace(std::lround(c.holonomy.x), std::lround(c.holonomy.y));
        }
        ++radii;
        if(!integral || got != primitive_vectors(r))
            ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 10.0, std::to_string(radii) + " radii up to 40, " + std::to_string(mismatches) +
                                               " mismatches, " + fmt(secs, 3) + " s"};
}

Outcome quadratic_growth()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double torus = static_cast<double>(enumerate_up_to_length(square_torus(), 100.0, fast()).size()) / 1e4;
    bool ok = std::abs(torus / (6.0 / pi) - 1.0) < 0.02;
    std::string detail = "torus " + fmt(torus, 5) + " vs 6/pi " + fmt(6.0 / pi, 5);
    for(const char* name : {"regular-octagon", "L-shaped(2,2)"})
    {
        const auto all = enumerate_up_to_length(builtin_surface(name), 200.0, fast());
        std::vector<double> ratio;
        for(double r : {50.0, 100.0, 200.0})
            ratio.push_back(static_cast<double>(count_up_to(all, r)) / (r * r));
        const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
        const double spread = *hi / *lo - 1.0;
        ok = ok && spread < 0.15;
        detail += std::string("; ") + name + " " + fmt(ratio[0]) + "/" + fmt(ratio[1]) + "/" + fmt(ratio[2]) +
                  " spread " + fmt(100 * spread, 3) + "%";
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 300.0, detail + ", " + fmt(secs, 3) + " s"};
}

long double f_ext(QuadrantVector v, long double t)
{
    const long double a = std::exp(t) * static_cast<long double>(v.v1);
    const long double b = std::exp(-t) * static_cast<long double>(v.v2);
    return std::sqrt(a * a + b * b);
}

int sign_changes(QuadrantVector v, QuadrantVector w, bool derivative)
{
    int changes = 0;
    double prev = 0.0;
    for(int i = 0; i < 10000; ++i)
    {
        const double t = -10.0 + 20.0 * i / 9999.0;
        const double x = derivative ? relative_length_derivative(v, w, t) : relative_length(v, w, t);
        if(i > 0 && ((prev < 0 && x > 0) || (prev > 0 && x < 0)))
            ++changes;
        if(x != 0.0)
            prev = x;
    }
    return changes;
}

Outcome length_calculus()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(11);
    const long double h = 1e-5L;
    int derivative_failures = 0;
    double worst = 0.0;
    for(int i = 0; i < 10000; ++i)
    {
        const double r = std::pow(10.0, rng.uniform(-1.0, 3.0));
        const double a = rng.uniform(0.01, pi / 2 - 0.01);
        const QuadrantVector v = QuadrantVector::checked(r * std::cos(a), r * std::sin(a));
        const double t = rng.uniform(-3, 3);
        const auto d = length_derivatives(v, t);
        const long double fp = f_ext(v, t + h), fm = f_ext(v, t - h), f0 = f_ext(v, t);
        const double fd1 = static_cast<double>((fp - fm) / (2 * h));
        const double fd2 = static_cast<double>((fp - 2 * f0 + fm) / (h * h));
        const double e1 = std::abs(fd1 - d.first) / std::max(std::abs(d.first), 1e-3 * static_cast<double>(f0));
        const double e2 = std::abs(fd2 - d.second) / d.second;
        worst = std::max({worst, e1, e2});
        if(e1 > 1e-6 || e2 > 1e-6)
            ++derivative_failures;
    }
    int pair_failures = 0;
    for(int i = 0; i < 10000; ++i)
    {
        const QuadrantVector v = QuadrantVector::checked(rng.uniform(0.1, 10), rng.uniform(0.1, 10));
        const QuadrantVector w = QuadrantVector::checked(rng.uniform(0.1, 10), rng.uniform(0.1, 10));
        const auto sep = pair_zero(v, w);
        const int changes = sign_changes(v, w, false);
        bool ok = true;
        if(sep.kind == PairSeparation::Kind::no_zero)
            ok = changes == 0;
        else
        {
            const double left = relative_length(v, w, -10), right = relative_length(v, w, 10);
            const bool decreasing = sep.kind == PairSeparation::Kind::decreasing_with_zero;
            ok = changes == 1 && sep.r.has_value() &&
                 std::abs(relative_length(v, w, *sep.r)) <= 1e-9 * (v.norm() + w.norm()) &&
                 (decreasing ? (left > 0 && right < 0) : (left < 0 && right > 0)) && sign_changes(v, w, true) == 0;
        }
        if(!ok)
            ++pair_failures;
    }
    const double secs = seconds_since(t0);
    return {derivative_failures == 0 && pair_failures == 0 && secs < 30.0,
            "derivative failures " + std::to_string(derivative_failures) + " (worst rel. error " + fmt(worst, 3) +
                "), pair failures " + std::to_string(pair_failures) + ", " + fmt(secs, 3) + " s"};
}

Outcome linearization()
{
    Rng rng(4);
    int failures = 0;
    double worst = 0.0;
    for(int i = 0; i < 100000; ++i)
    {
        const PlanarVector u{rng.uniform(-100, 100), rng.uniform(-100, 100)};
        const double s = rng.uniform(0, 0.2);
        const auto l = linearize(u, s);
        const double err = std::abs(l.approx - (diag_flow(s) * u).norm());
        if(err > l.bound)
            ++failures;
        if(s > 0)
            worst = std::max(worst, err / (s * s * u.norm()));
    }
    return {failures == 0, std::to_string(failures) + " failures in 100000, worst err/(s^2|u|) " + fmt(worst, 3)};
}

Outcome sandwich()
{
    const auto t0 = std::chrono::steady_clock::now();
    int failures = 0, instances = 0;
    std::size_t max_symdiff = 0;
    for(const auto& name : builtin_surface_names())
    {
        const auto surface = builtin_surface(name);
        const HaarSampler sampler(1.0, 2024);
        for(std::uint64_t i = 0; i < 100; ++i)
        {
            Rng rng(derive_seed(2024, i));
            const double s = rng.uniform();
            const auto n = static_cast<std::size_t>(rng.integer(2, 300));
            const auto r = sandwich_check(surface, sampler.sample(i), s, n);
            ++instances;
            if(!r.holds())
                ++failures;
            max_symdiff = std::max(max_symdiff, r.symdiff);
        }
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 300.0, std::to_string(failures) + " failures in " + std::to_string(instances) +
                                               " instances, max symdiff " + std::to_string(max_symdiff) + ", " +
                                               fmt(secs, 3) + " s"};
}

Outcome nth_length_bracket()
{
    int failures = 0, checks = 0;
    std::string consts;
    for(const auto& name : builtin_surface_names())
    {
        const auto s = builtin_surface(name);
        const auto f = growth_fit(s, geometric_grid(nth_length(s, 8, fast()), 2.0 * nth_length(s, 2048, fast()), 12),
                                  fast());
        consts += " " + name + " c1=" + fmt(f.c1, 3) + " c2=" + fmt(f.c2, 3);
        for(int i = 0; i < 50; ++i)
        {
            const auto spectrum = first_n(apply_matrix(s, diag_flow(i / 49.0)), 1024, fast());
            for(std::int64_t n : {16, 64, 256, 1024})
            {
                ++checks;
                if(!length_bracket(n, f.c1, f.c2).contains(spectrum.connections[static_cast<std::size_t>(n - 1)].length))
                    ++failures;
            }
        }
    }
    return {failures == 0, std::to_string(failures) + " failures in " + std::to_string(checks) + ";" + consts};
}

Outcome sector_counts()
{
    const std::vector<double> lengths{0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.2};
    bool ok = true;
    std::string detail;
    for(const char* name : {"square-torus", "regular-octagon"})
    {
        const auto s = builtin_surface(name);
        const double a = sector_scan(s, 100.0, lengths, 8, 0.01, fast()).c4;
        const double b = sector_scan(s, 200.0, lengths, 8, 0.01, fast()).c4;
        const double change = std::abs(b / a - 1.0);
        ok = ok && std::isfinite(a) && std::isfinite(b) && change < 0.2;
        detail += std::string(detail.empty() ? "" : "; ") + name + " c4 " + fmt(a) + " (R=100) " + fmt(b) +
                  " (R=200) change " + fmt(100 * change, 3) + "%";
    }
    return {ok, "64 arcs, " + detail};
}

Outcome weyl_trend()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto octagon = builtin_surface("regular-octagon");
    int good = 0;
    std::string detail;
    for(std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        bool ok = true;
        for(int p : {1, 2})
        {
            ExperimentParameters q;
            q.N = 5000;
            q.p = p;
            q.seed = seed;
            WeylOptions o;
            o.checkpoints = {500, 5000};
            const auto r = weyl_experiment(octagon, q, o);
            ok = ok && r.mean_abs_sum[1] < r.mean_abs_sum[0] && r.mean_discrepancy[1] < r.mean_discrepancy[0];
            if(seed == 1)
                detail += " p=" + std::to_string(p) + " |W| " + fmt(r.mean_abs_sum[0], 3) + "->" +
                          fmt(r.mean_abs_sum[1], 3) + " D* " + fmt(r.mean_discrepancy[0], 3) + "->" +
                          fmt(r.mean_discrepancy[1], 3);
        }
        good += ok;
    }
    const double secs = seconds_since(t0);
    return {good >= 8 && secs < 1200.0,
            std::to_string(good) + "/10 seeds; seed 1:" + detail + ", " + fmt(secs, 3) + " s"};
}

Outcome annular_trend()
{
    std::vector<double> fractions;
    std::string detail;
    for(std::int64_t n : {100, 200, 400})
    {
        ExperimentParameters q;
        q.N = n;
        AnnularOptions o;
        o.t_points = 200;
        const auto r = symdiff_experiment(square_torus(), 0.0, q, o);
        fractions.push_back(r.bad_fraction);
        const auto mx = *std::max_element(r.max_symdiff.begin(), r.max_symdiff.end());
        detail += (detail.empty() ? "" : ", ") + std::string("N=") + std::to_string(n) + " bad " +
                  fmt(r.bad_fraction, 3) + " (max symdiff " + std::to_string(mx) + ", threshold " +
                  fmt(r.threshold, 4) + ")";
    }
    const bool ok = fractions[1] <= fractions[0] && fractions[2] <= fractions[1];
    return {ok, detail};
}

double chi_square_p(const std::vector<double>& x, int bins)
{
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for(double v : x)
        counts[static_cast<std::size_t>(std::clamp(static_cast<int>(v / two_pi * bins), 0, bins - 1))] += 1.0;
    const double expected = static_cast<double>(x.size()) / bins;
    double stat = 0.0;
    for(double c : counts)
        stat += (c - expected) * (c - expected) / expected;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1), stat));
}

Outcome haar()
{
    const HaarSampler sampler(1.0, 2024);
    std::vector<double> t, theta, psi;
    for(std::uint64_t i = 0; i < 100000; ++i)
    {
        const auto k = sampler.coords(i);
        t.push_back(k.t);
        theta.push_back(k.theta);
        psi.push_back(k.psi);
    }
    std::sort(t.begin(), t.end());
    const double n = static_cast<double>(t.size());
    double ks = 0.0;
    for(std::size_t i = 0; i < t.size(); ++i)
    {
        const double f = haar_radial_cdf(t[i], 1.0);
        ks = std::max({ks, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    const double pt = chi_square_p(theta, 32), pp = chi_square_p(psi, 32);
    return {ks < 0.01 && pt > 0.001 && pp > 0.001,
            "KS " + fmt(ks, 3) + ", chi2 p(theta) " + fmt(pt, 3) + ", p(psi) " + fmt(pp, 3)};
}

struct Run
{
    int status = -1;
    std::string out;
};

Run run_cli(const std::string& args)
{
    Run r;
    FILE* pipe = popen(("'" SADDLE_CLI "' " + args + " 2>&1").c_str(), "r");
    if(!pipe)
        return r;
    char buf[4096];
    std::size_t n = 0;
    while((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string without_timestamp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::string line, out;
    while(std::getline(in, line))
        if(line.find("\"timestamp\"") == std::string::npos)
            out += line + "\n";
    return out;
}

Outcome determinism()
{
    const std::vector<std::string> commands{
        "enumerate --surface regular-octagon --max-length 15",
        "weyl --surface regular-octagon --first-n 300 --samples 6 --seed 7",
        "discrepancy --surface 'L-shaped(2,2)' --first-n 200 --samples 4 --seed 3",
        "growth --surface double-pentagon --max-length 20",
        "sector-scan --surface regular-octagon --max-length 30",
        "annulus --first-n 60 --t-points 12 --samples 3 --seed 9",
        "kernel --v 30 40 --w -10 25 --S 0.05",
    };
    const fs::path root = fs::temp_directory_path() / "saddle_acceptance_determinism";
    int identical = 0, files = 0;
    std::string differing;
    for(std::size_t i = 0; i < commands.size(); ++i)
    {
        std::map<std::string, std::string> first;
        for(int workers : {1, 4})
        {
            const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(workers));
            fs::remove_all(dir);
            const auto r = run_cli(commands[i] + " --workers " + std::to_string(workers) + " --output '" +
                                   dir.string() + "'");
            if(r.status != 0)
                return {false, "'" + commands[i] + "' exited with " + std::to_string(r.status) + ": " + r.out};
            for(const auto& e : fs::directory_iterator(dir))
            {
                const auto name = e.path().filename().string();
                const auto text = without_timestamp(e.path());
                if(workers == 1)
                    first[name] = text;
                else
                {
                    ++files;
                    if(first.count(name) && first[name] == text)
                        ++identical;
                    else
                        differing += " " + commands[i].substr(0, commands[i].find(' ')) + "/" + name;
                }
            }
        }
    }
    fs::remove_all(root);
    return {identical == files && files > 0,
            std::to_string(identical) + "/" + std::to_string(files) + " files identical across --workers 1 and 4" +
                (differing.empty() ? "" : "; differ:" + differing)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"torus enumeration equals primitive vectors for R <= 40", torus_oracle},
        {"quadratic growth constants", quadratic_growth},
        {"length-deformation calculus", length_calculus},
        {"linearization remainder <= 42 s^2 |u|", linearization},
        {"sandwich inclusions", sandwich},
        {"fitted n-th length bracket", nth_length_bracket},
        {"sector counts: empirical c4 stable", sector_counts},
        {"Weyl sum and discrepancy trend", weyl_trend},
        {"bad-t fraction non-increasing", annular_trend},
        {"Haar sampler distribution", haar},
        {"CLI determinism across worker counts", determinism},
    };
    int failed = 0;
    for(std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch(const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << ": " << criteria[i].first << " -- "
                  << o.detail << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
