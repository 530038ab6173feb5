#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "saddle/params.hpp"
#include "saddle/rng.hpp"

using namespace saddle;

namespace {

// The nine inequalities, written out independently of the library.
std::vector<bool> oracle(const ExperimentParameters& q)
{
    const double a = q.alpha_exp, g = q.gamma, d = q.delta;
    return {
        a * (2 + q.epsilon) < 1,
        0.5 > g * (2 + q.epsilon2),
        g + a < d,
        g < a / 2,
        0.5 - g - a - q.varpi > 0.5 - d,
        d > 0.25,
        d + q.nu + a / 2 < 0.5,
        q.zeta < a / 8 && q.zeta < g / 2 && q.zeta < q.varpi / 2,
        0.5 > (a / 2) * (q.epsilon3 + 2),
    };
}

std::string message_of(const ExperimentParameters& q)
{
    try
    {
        validate_parameters(q);
    }
    catch(const ValidationError& e)
    {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Params, DefaultsPass)
{
    const ExperimentParameters q;
    EXPECT_NO_THROW(validate_parameters(q));
    EXPECT_TRUE(violated_requirements(q).empty());
    EXPECT_EQ(check_requirements(q).size(), 9u);
    EXPECT_NEAR(q.step(), 0.1, 1e-15);
    EXPECT_NEAR(q.axis_halfwidth(), 2.0 * std::pow(1000.0, -1.0 / 300.0), 1e-15);
}

TEST(Params, DeltaTooSmall)
{
    ExperimentParameters q;
    q.delta = 0.2;
    EXPECT_EQ(violated_requirements(q), std::vector<std::string>{"delta > 0.25"});
    EXPECT_EQ(message_of(q), "violated requirement: \"delta > 0.25\"");
}

TEST(Params, EachRequirementAlone)
{
    using Tweak = std::function<void(ExperimentParameters&)>;
    const std::vector<std::pair<std::string, Tweak>> cases{
        {"alpha(2+epsilon) < 1", [](auto& q) { q.alpha_exp = 0.3; q.epsilon = 2; }},
        {"1/2 > gamma(2+epsilon2)", [](auto& q) { q.epsilon2 = 200; }},
        {"gamma < alpha/2", [](auto& q) { q.gamma = 0.01; }},
        {"0.5 - gamma - alpha - varpi > 0.5 - delta", [](auto& q) { q.varpi = 1.0; }},
        {"delta > 0.25", [](auto& q) { q.delta = 0.2; }},
        {"delta + nu + alpha/2 < 0.5", [](auto& q) { q.nu = 1.0; }},
        {"zeta < min(alpha/8, gamma/2, varpi/2)", [](auto& q) { q.varpi = 0.001; }},
        {"1/2 > (alpha/2)(epsilon3 + 2)", [](auto& q) { q.alpha_exp = 0.3; q.epsilon3 = 2; }},
    };
    for(const auto& [name, tweak] : cases)
    {
        ExperimentParameters q;
        tweak(q);
        EXPECT_EQ(violated_requirements(q), std::vector<std::string>{name});
        EXPECT_NE(message_of(q).find(name), std::string::npos);
    }
}

TEST(Params, GammaPlusAlphaImpliedByVarpiRequirement)
{
    ExperimentParameters q;
    q.delta = 0.26;
    q.alpha_exp = 0.3;
    q.epsilon = 0.01;
    q.gamma = 0.01;
    const auto bad = violated_requirements(q);
    EXPECT_NE(std::find(bad.begin(), bad.end(), "gamma + alpha < delta"), bad.end());
    EXPECT_NE(std::find(bad.begin(), bad.end(), "0.5 - gamma - alpha - varpi > 0.5 - delta"), bad.end());
    EXPECT_NE(message_of(q).find("violated requirements: "), std::string::npos);
}

TEST(Params, AgreesWithOracle)
{
    Rng rng(3);
    for(int i = 0; i < 100000; ++i)
    {
        ExperimentParameters q;
        for(double* x : {&q.delta, &q.gamma, &q.alpha_exp, &q.zeta, &q.epsilon, &q.epsilon2, &q.epsilon3, &q.nu,
                         &q.varpi})
            *x = std::pow(10.0, rng.uniform(-3.5, 0.3));
        const auto want = oracle(q);
        const auto got = check_requirements(q);
        ASSERT_EQ(got.size(), want.size());
        for(std::size_t k = 0; k < got.size(); ++k)
            EXPECT_EQ(got[k].holds, want[k]) << k;
    }
}

TEST(Params, Ranges)
{
    ExperimentParameters q;
    q.N = 1;
    EXPECT_THROW(q.check_ranges(), DomainError);
    q = {};
    q.tau = 1.0;
    EXPECT_THROW(q.check_ranges(), DomainError);
    q = {};
    q.gamma = 0.0;
    EXPECT_THROW(validate_parameters(q), DomainError);
    q = {};
    q.samples = 0;
    EXPECT_THROW(q.check_ranges(), DomainError);
}

TEST(Params, ArcCount)
{
    ExperimentParameters q;
    q.gamma = 0.5;
    q.alpha_exp = 0.5;
    q.N = 500;
    const double psi = 2.0 / std::sqrt(500.0);
    EXPECT_EQ(q.arc_count(16.0), static_cast<std::int64_t>(std::floor((std::numbers::pi / 2 - 2 * psi) * 4.0)));
    EXPECT_EQ(ExperimentParameters{}.arc_count(1.0), 0);
}
