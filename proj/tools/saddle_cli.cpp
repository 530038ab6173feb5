// Command-line front end: one subcommand per experiment.
//
//   saddle_cli enumerate --surface regular-octagon --max-length 20 --output out/
//   saddle_cli weyl --surface regular-octagon --p 1 --tau 1.2 --samples 10 --seed 7
//   saddle_cli validate-params --delta 0.2

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "saddle/saddle.hpp"

namespace fs = std::filesystem;
using namespace saddle;

namespace {

struct RunConfig
{
    std::string command;
    std::string surface = "square-torus";
    ExperimentParameters params;
    std::optional<double> max_length;
    std::optional<double> min_length;
    std::optional<std::int64_t> first_n;
    std::string output;
    std::string format = "json";
    unsigned workers = 1;
    bool force = false;

    // experiment specifics
    std::vector<std::int64_t> checkpoints;
    double max_t = 1.0;
    int grid_points = 8;
    std::vector<double> arc_lengths{0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.2};
    int arcs_per_length = 8;
    double phi = 0.0;
    int t_points = 200;
    std::optional<double> forced_s;
    std::vector<double> v{3.0, 4.0};
    std::vector<double> w{1.0, 1.0};
    std::optional<double> step;
    int quad_points = 64;
};

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t triangle_cap()
{
    std::uint64_t cap = EnumerationOptions{}.max_triangles;
    if(const char* env = std::getenv("SADDLE_MAX_TRIANGLES"))
    {
        try
        {
            std::size_t used = 0;
            cap = std::stoull(env, &used);
            if(used != std::string(env).size() || cap == 0)
                throw std::invalid_argument(env);
        }
        catch(const std::exception&)
        {
            throw DomainError(std::string("SADDLE_MAX_TRIANGLES must be a positive integer, got \"") + env + "\"");
        }
    }
    return cap;
}

TranslationSurface resolve_surface(const std::string& what)
{
    std::error_code ec;
    if(fs::is_regular_file(what, ec))
        return load_surface_file(what);
    return builtin_surface(what);
}

EnumerationOptions enumeration_options(const RunConfig& cfg)
{
    EnumerationOptions eo;
    eo.max_triangles = triangle_cap();
    eo.parallelism.workers = cfg.workers;
    return eo;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if(!out)
        throw Error("cannot write " + path.string());
    out << content;
    if(!out)
        throw Error("failed writing " + path.string());
}

/// Emit artifacts: all of them into --output when given, otherwise the one
/// selected by --format on stdout. The summary line goes to stdout with
/// --output and to stderr otherwise.
void emit(const RunConfig& cfg, const nlohmann::json& report, const std::string& series_tsv,
          const std::optional<Spectrum>& spectrum, const std::string& summary)
{
    const std::string json_text = report.dump(2) + "\n";
    auto table = [&](char sep) {
        if(spectrum)
            return spectrum_to_csv(*spectrum, sep);
        std::string s = series_tsv;
        if(sep != '\t')
            std::replace(s.begin(), s.end(), '\t', sep);
        return s;
    };

    if(!cfg.output.empty())
    {
        fs::create_directories(cfg.output);
        write_file(fs::path(cfg.output) / "report.json", json_text);
        write_file(fs::path(cfg.output) / "series.tsv", series_tsv);
        if(spectrum)
            write_file(fs::path(cfg.output) / (cfg.format == "tsv" ? "spectrum.tsv" : "spectrum.csv"),
                       spectrum_to_csv(*spectrum, cfg.format == "tsv" ? '\t' : ','));
        std::cout << summary << "\n";
        return;
    }
    if(cfg.format == "json")
        std::cout << json_text;
    else
        std::cout << table(cfg.format == "tsv" ? '\t' : ',');
    std::cerr << summary << "\n";
}

void require_valid(const RunConfig& cfg)
{
    cfg.params.check_ranges();
    if(!cfg.force)
        validate_parameters(cfg.params);
}

std::string fmt(double x)
{
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

int run_validate(const RunConfig& cfg)
{
    cfg.params.check_ranges();
    const auto checks = check_requirements(cfg.params);
    for(const auto& r : checks)
        std::cout << (r.holds ? "ok      " : "VIOLATED") << "  " << r.name << "\n";
    validate_parameters(cfg.params);
    std::cout << "all " << checks.size() << " requirements hold\n";
    return 0;
}

int run_enumerate(const RunConfig& cfg)
{
    const auto surface = resolve_surface(cfg.surface);
    const EnumerationOptions eo = enumeration_options(cfg);
    Spectrum s;
    if(cfg.first_n)
    {
        if(*cfg.first_n < 1)
            throw DomainError("--first-n must be at least 1");
        s = first_n(surface, static_cast<std::size_t>(*cfg.first_n), eo);
    }
    else
        s = enumerate_up_to_length(surface, cfg.max_length.value_or(10.0), eo);

    auto results = results_to_json(s);
    results["genus"] = surface.genus();
    results["area"] = surface.area();
    std::vector<double> n, len;
    for(std::size_t i = 0; i < s.size(); ++i)
    {
        n.push_back(static_cast<double>(i + 1));
        len.push_back(s[i].length);
    }
    const auto report = make_report("enumerate", surface.name(), cfg.params, results, utc_timestamp());
    emit(cfg, report, detail::tsv({"n", "length"}, {n, len}), s,
         "enumerate " + surface.name() + ": " + std::to_string(s.size()) + " saddle connections up to length " +
             fmt(s.complete_radius));
    return 0;
}

WeylOptions weyl_options(const RunConfig& cfg)
{
    WeylOptions wo;
    wo.checkpoints = cfg.checkpoints;
    wo.max_t = cfg.max_t;
    wo.max_triangles = triangle_cap();
    wo.parallelism.workers = cfg.workers;
    return wo;
}

int run_weyl(const RunConfig& cfg)
{
    require_valid(cfg);
    const auto surface = resolve_surface(cfg.surface);
    const auto r = weyl_experiment(surface, cfg.params, weyl_options(cfg));
    const auto report = make_report("weyl", surface.name(), cfg.params, results_to_json(r), utc_timestamp());
    emit(cfg, report, series_tsv(r), std::nullopt,
         "weyl " + surface.name() + ": p=" + std::to_string(cfg.params.p) + " mean |W| at N=" +
             std::to_string(r.checkpoints.back()) + " is " + fmt(r.mean_abs_sum.back()) + " over " +
             std::to_string(r.samples.size()) + " samples");
    return 0;
}

int run_discrepancy(const RunConfig& cfg)
{
    require_valid(cfg);
    const auto surface = resolve_surface(cfg.surface);
    const auto r = discrepancy_experiment(surface, cfg.params, weyl_options(cfg));
    const auto report = make_report("discrepancy", surface.name(), cfg.params, results_to_json(r), utc_timestamp());
    emit(cfg, report, series_tsv(r), std::nullopt,
         "discrepancy " + surface.name() + ": mean D* at N=" + std::to_string(r.checkpoints.back()) + " is " +
             fmt(r.mean_discrepancy.back()));
    return 0;
}

int run_growth(const RunConfig& cfg)
{
    const auto surface = resolve_surface(cfg.surface);
    const EnumerationOptions eo = enumeration_options(cfg);
    const double hi = cfg.max_length.value_or(100.0);
    const double lo = cfg.min_length.value_or(systole(surface, eo));
    const auto f = growth_fit(surface, geometric_grid(lo, hi, static_cast<std::size_t>(cfg.grid_points)), eo);
    const auto report = make_report("growth", surface.name(), cfg.params, results_to_json(f), utc_timestamp());
    emit(cfg, report, series_tsv(f), std::nullopt,
         "growth " + surface.name() + ": c_hat=" + fmt(f.c_hat) + " c1=" + fmt(f.c1) + " c2=" + fmt(f.c2));
    return 0;
}

int run_sector_scan(const RunConfig& cfg)
{
    const auto surface = resolve_surface(cfg.surface);
    const auto r = sector_scan(surface, cfg.max_length.value_or(100.0), cfg.arc_lengths, cfg.arcs_per_length,
                               cfg.params.epsilon, enumeration_options(cfg));
    const auto report = make_report("sector-scan", surface.name(), cfg.params, results_to_json(r), utc_timestamp());
    emit(cfg, report, series_tsv(r), std::nullopt,
         "sector-scan " + surface.name() + ": empirical c4=" + fmt(r.c4) + " C(eps)=" + fmt(r.c_fit));
    return 0;
}

int run_annulus(const RunConfig& cfg)
{
    require_valid(cfg);
    const auto surface = resolve_surface(cfg.surface);
    AnnularOptions ao;
    ao.t_points = cfg.t_points;
    ao.forced_s = cfg.forced_s;
    ao.max_triangles = triangle_cap();
    ao.parallelism.workers = cfg.workers;
    const auto r = symdiff_experiment(surface, cfg.phi, cfg.params, ao);
    std::size_t worst = 0;
    for(auto m : r.max_symdiff)
        worst = std::max(worst, m);
    const auto report = make_report("annulus", surface.name(), cfg.params, results_to_json(r), utc_timestamp());
    emit(cfg, report, series_tsv(r), std::nullopt,
         "annulus " + surface.name() + ": N=" + std::to_string(cfg.params.N) + " max symdiff " + std::to_string(worst) +
             ", bad-t fraction " + fmt(r.bad_fraction) + ", sandwich failures " + std::to_string(r.sandwich_failures));
    return 0;
}

int run_kernel(const RunConfig& cfg)
{
    require_valid(cfg);
    if(cfg.v.size() != 2 || cfg.w.size() != 2)
        throw DomainError("--v and --w take two numbers");
    const double step = cfg.step.value_or(cfg.params.step());
    const auto r = kernel_integral(PlanarVector::checked(cfg.v[0], cfg.v[1]), PlanarVector::checked(cfg.w[0], cfg.w[1]),
                                   cfg.params.p, step, cfg.quad_points, cfg.params.delta);
    const auto report = make_report("kernel", "", cfg.params, results_to_json(r), utc_timestamp());
    emit(cfg, report, series_tsv(r), std::nullopt,
         "kernel: |I|=" + fmt(r.magnitude) + " bound=" + fmt(r.bound) + (r.within_bound ? " (within)" : " (EXCEEDED)"));
    return 0;
}

void add_parameter_flags(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--delta", cfg.params.delta, "Exponent delta (S = N^-delta)");
    sub->add_option("--gamma", cfg.params.gamma, "Exponent gamma (psi = 2 N^-gamma)");
    sub->add_option("--alpha", cfg.params.alpha_exp, "Exponent alpha");
    sub->add_option("--zeta", cfg.params.zeta, "Exponent zeta (threshold N^(1-zeta))");
    sub->add_option("--nu", cfg.params.nu, "Exponent nu");
    sub->add_option("--varpi", cfg.params.varpi, "Exponent varpi");
    sub->add_option("--epsilon", cfg.params.epsilon, "Exponent epsilon");
    sub->add_option("--epsilon2", cfg.params.epsilon2, "Exponent epsilon'");
    sub->add_option("--epsilon3", cfg.params.epsilon3, "Exponent epsilon''");
}

void add_common_flags(CLI::App* sub, RunConfig& cfg)
{
    add_parameter_flags(sub, cfg);
    sub->add_option("--surface", cfg.surface, "Built-in surface name or path to a surface JSON file");
    sub->add_option("--max-length", cfg.max_length, "Length bound R");
    sub->add_option("--first-n", cfg.first_n, "Number N of saddle connections");
    sub->add_option("--p", cfg.params.p, "Frequency p of the Weyl sum");
    sub->add_option("--tau", cfg.params.tau, "Checkpoint ratio tau > 1");
    sub->add_option("--samples", cfg.params.samples, "Monte Carlo samples");
    sub->add_option("--seed", cfg.params.seed, "Master seed");
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output", cfg.output, "Output directory");
    sub->add_option("--format", cfg.format, "Stdout format")->check(CLI::IsMember({"csv", "tsv", "json"}));
    sub->add_flag("--force", cfg.force, "Run even if the exponents violate a requirement");
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"Saddle connection enumeration and equidistribution experiments"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate-params", "Check the exponent requirements");
    add_parameter_flags(validate, cfg);

    auto* enumerate = app.add_subcommand("enumerate", "Enumerate saddle connections");
    add_common_flags(enumerate, cfg);

    auto* weyl = app.add_subcommand("weyl", "Weyl sums of lengths over Haar samples");
    auto* disc = app.add_subcommand("discrepancy", "Star discrepancy of lengths mod 1");
    for(auto* sub : {weyl, disc})
    {
        add_common_flags(sub, cfg);
        sub->add_option("--checkpoints", cfg.checkpoints, "Explicit list of N values");
        sub->add_option("--max-t", cfg.max_t, "Haar cell radius T");
    }

    auto* growth = app.add_subcommand("growth", "Fit quadratic growth constants");
    add_common_flags(growth, cfg);
    growth->add_option("--min-length", cfg.min_length, "Smallest grid radius (default: systole)");
    growth->add_option("--grid-points", cfg.grid_points, "Number of grid radii")->check(CLI::Range(4, 1000));

    auto* sector = app.add_subcommand("sector-scan", "Sector-count ratios over rotated arcs");
    add_common_flags(sector, cfg);
    sector->add_option("--arc-lengths", cfg.arc_lengths, "Arc lengths in (0, 2pi)");
    sector->add_option("--arcs-per-length", cfg.arcs_per_length, "Rotated placements per length")->check(CLI::PositiveNumber);

    auto* annulus = app.add_subcommand("annulus", "Symmetric differences near the N-th length");
    add_common_flags(annulus, cfg);
    annulus->add_option("--phi", cfg.phi, "Initial rotation phi");
    annulus->add_option("--t-points", cfg.t_points, "Points of the t-grid")->check(CLI::Range(2, 100000));
    annulus->add_option("--s", cfg.forced_s, "Use this s for every sample");

    auto* kernel = app.add_subcommand("kernel", "Oscillatory kernel integral and its bound");
    add_common_flags(kernel, cfg);
    kernel->add_option("--v", cfg.v, "Vector v")->expected(2);
    kernel->add_option("--w", cfg.w, "Vector w")->expected(2);
    kernel->add_option("--S", cfg.step, "Flow length S (default N^-delta)");
    kernel->add_option("--quad-points", cfg.quad_points, "Initial points per dimension (>= 64)");

    try
    {
        app.parse(argc, argv);
    }
    catch(const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch(const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch(const CLI::ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if(cfg.first_n)
        cfg.params.N = *cfg.first_n;

    try
    {
        if(validate->parsed())
            return run_validate(cfg);
        if(enumerate->parsed())
            return run_enumerate(cfg);
        if(weyl->parsed())
            return run_weyl(cfg);
        if(disc->parsed())
            return run_discrepancy(cfg);
        if(growth->parsed())
            return run_growth(cfg);
        if(sector->parsed())
            return run_sector_scan(cfg);
        if(annulus->parsed())
            return run_annulus(cfg);
        if(kernel->parsed())
            return run_kernel(cfg);
    }
    catch(const ResourceLimitError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    catch(const ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const ValidationError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const DomainError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const IncompleteSpectrumError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch(const std::exception& e)
    {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
