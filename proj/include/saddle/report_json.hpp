#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "saddle/enumerator.hpp"
#include "saddle/equidistribution.hpp"
#include "saddle/params.hpp"

// Report serialization: one JSON document per run, holding "params",
// "provenance" and "results"; numeric series also go out as TSV.

namespace saddle {

inline constexpr const char* tool_name = "saddle";
inline constexpr const char* tool_version = "0.1.0";

inline nlohmann::json params_to_json(const ExperimentParameters& q)
{
    return {
        {"delta", q.delta},   {"gamma", q.gamma},       {"alpha", q.alpha_exp}, {"zeta", q.zeta},
        {"epsilon", q.epsilon}, {"epsilon2", q.epsilon2}, {"epsilon3", q.epsilon3}, {"nu", q.nu},
        {"varpi", q.varpi},   {"tau", q.tau},           {"p", q.p},             {"N", q.N},
        {"seed", q.seed},     {"samples", q.samples},
    };
}

/// Wrap results with the parameter and provenance blocks. The timestamp is
/// the only field that may differ between otherwise identical runs.
inline nlohmann::json make_report(const std::string& command, const std::string& surface, const ExperimentParameters& q,
                                  nlohmann::json results, const std::string& timestamp)
{
    nlohmann::json j;
    j["command"] = command;
    j["params"] = params_to_json(q);
    j["provenance"] = {
        {"surface", surface}, {"seed", q.seed}, {"tool", tool_name}, {"version", tool_version}, {"timestamp", timestamp}};
    j["results"] = std::move(results);
    return j;
}

inline nlohmann::json complex_to_json(std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json results_to_json(const WeylReport& r)
{
    nlohmann::json samples = nlohmann::json::array();
    for(const auto& s : r.samples)
    {
        nlohmann::json sums = nlohmann::json::array();
        for(auto z : s.sums)
            sums.push_back(complex_to_json(z));
        samples.push_back({{"index", s.index},
                           {"cartan", {{"theta", s.g.theta}, {"t", s.g.t}, {"psi", s.g.psi}}},
                           {"weyl_sums", sums},
                           {"discrepancy", s.discrepancy}});
    }
    return {{"max_t", r.max_t},
            {"checkpoints", r.checkpoints},
            {"mean_abs_weyl_sum", r.mean_abs_sum},
            {"mean_discrepancy", r.mean_discrepancy},
            {"samples", samples}};
}

inline nlohmann::json results_to_json(const DiscrepancyReport& r)
{
    return {{"checkpoints", r.checkpoints},
            {"base_discrepancy", r.base_discrepancy},
            {"mean_discrepancy", r.mean_discrepancy},
            {"sample_discrepancy", r.sample_discrepancy}};
}

inline nlohmann::json results_to_json(const GrowthFit& f)
{
    return {{"radii", f.radii}, {"counts", f.counts}, {"c_hat", f.c_hat}, {"c1", f.c1}, {"c2", f.c2}};
}

inline nlohmann::json results_to_json(const SectorReport& r)
{
    return {{"radius", r.radius},
            {"epsilon", r.epsilon},
            {"arc_lengths", r.arc_lengths},
            {"arcs_per_length", r.arcs_per_length},
            {"ratios", r.ratios},
            {"c4", r.c4},
            {"scan_radii", r.scan_radii},
            {"scan_max_ratio", r.scan_max_ratio},
            {"threshold_radius", r.threshold},
            {"c_fit", r.c_fit}};
}

inline nlohmann::json results_to_json(const AnnularReport& r)
{
    std::vector<std::size_t> worst_annulus;
    for(const auto& row : r.samples)
    {
        std::size_t m = 0;
        for(const auto& a : row)
            m = std::max(m, a.annulus_count);
        worst_annulus.push_back(m);
    }
    return {{"phi", r.phi},
            {"S", r.step},
            {"threshold", r.threshold},
            {"t", r.t},
            {"nth_length", r.nth},
            {"max_symdiff", r.max_symdiff},
            {"max_annulus_count", worst_annulus},
            {"bad_fraction", r.bad_fraction},
            {"bound_violations", r.bound_violations},
            {"sandwich_failures", r.sandwich_failures}};
}

inline nlohmann::json results_to_json(const KernelReport& r)
{
    return {{"v", {r.v.x, r.v.y}},
            {"w", {r.w.x, r.w.y}},
            {"p", r.p},
            {"S", r.step},
            {"delta", r.delta},
            {"implied_N", r.implied_n},
            {"value", complex_to_json(r.value)},
            {"magnitude", r.magnitude},
            {"quad_points", r.quad_points},
            {"amplitude", r.amplitude},
            {"bound", r.bound},
            {"within_bound", r.within_bound}};
}

inline nlohmann::json results_to_json(const Spectrum& s)
{
    return {{"count", s.size()},
            {"complete_radius", s.complete_radius},
            {"systole", s.empty() ? 0.0 : s.connections.front().length},
            {"longest", s.empty() ? 0.0 : s.connections.back().length}};
}

// ---------------------------------------------------------------------------
// TSV

namespace detail {

inline std::string tsv_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string tsv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    std::string out;
    for(std::size_t i = 0; i < header.size(); ++i)
        out += (i ? "\t" : "") + header[i];
    out += "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for(std::size_t r = 0; r < rows; ++r)
    {
        for(std::size_t c = 0; c < columns.size(); ++c)
            out += (c ? "\t" : "") + tsv_number(columns[c][r]);
        out += "\n";
    }
    return out;
}

template <typename T>
std::vector<double> as_doubles(const std::vector<T>& v)
{
    return std::vector<double>(v.begin(), v.end());
}

} // namespace detail

inline std::string series_tsv(const WeylReport& r)
{
    return detail::tsv({"N", "mean_abs_weyl_sum", "mean_discrepancy"},
                       {detail::as_doubles(r.checkpoints), r.mean_abs_sum, r.mean_discrepancy});
}

inline std::string series_tsv(const DiscrepancyReport& r)
{
    return detail::tsv({"N", "base_discrepancy", "mean_discrepancy"},
                       {detail::as_doubles(r.checkpoints), r.base_discrepancy, r.mean_discrepancy});
}

inline std::string series_tsv(const GrowthFit& f)
{
    std::vector<double> ratio;
    for(std::size_t i = 0; i < f.radii.size(); ++i)
        ratio.push_back(static_cast<double>(f.counts[i]) / (f.radii[i] * f.radii[i]));
    return detail::tsv({"R", "count", "count_over_R2"}, {f.radii, detail::as_doubles(f.counts), ratio});
}

inline std::string series_tsv(const SectorReport& r)
{
    std::vector<double> worst;
    for(const auto& row : r.ratios)
        worst.push_back(*std::max_element(row.begin(), row.end()));
    return detail::tsv({"arc_length", "max_ratio", "threshold_radius"}, {r.arc_lengths, worst, r.threshold});
}

inline std::string series_tsv(const AnnularReport& r)
{
    return detail::tsv({"t", "nth_length", "max_symdiff"}, {r.t, r.nth, detail::as_doubles(r.max_symdiff)});
}

inline std::string series_tsv(const KernelReport& r)
{
    return detail::tsv({"re", "im", "magnitude", "bound"}, {{r.value.real()}, {r.value.imag()}, {r.magnitude}, {r.bound}});
}

} // namespace saddle
