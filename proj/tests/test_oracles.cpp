#include "shapemap/oracles.hpp"
#include "shapemap/quat3d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shapemap;
using planar::Complex;

namespace
{

planar::Regulators absolute_regs()
{
    planar::Regulators r;
    r.zeta_relative = false;
    return r;
}

std::vector<Complex> random_complex(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Complex> z;
    for (int i = 0; i < n; ++i)
    {
        const double x = u(rng);
        z.emplace_back(x, u(rng));
    }
    return z;
}

std::vector<Point3> random_points3(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Point3> p;
    for (int i = 0; i < n; ++i)
        p.emplace_back(u(rng), u(rng), u(rng));
    return p;
}

double closed_form(std::span<const Complex> y, std::span<const Complex> v, const planar::Regulators& r)
{
    return planar::log_marginal_kernel(planar::suff_stats(y, v), static_cast<int>(y.size()), r);
}

const std::vector<Complex> kRefY{{0.3, -0.2}, {1.1, 0.4}, {-0.5, 0.9}};
const std::vector<Complex> kRefV{{0.0, 0.0}, {1.0, 0.1}, {-0.2, 1.0}};

} // namespace

TEST(QuadratureSpec, Validation)
{
    oracle::QuadratureSpec s;
    EXPECT_NO_THROW(s.validate());
    s.scale_steps = 7;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.sigma_range = {-1, 2};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = {};
    s.translation_range = oracle::Interval{1, 1};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    const auto r = oracle::QuadratureSpec{}.refined();
    EXPECT_EQ(r.rotation_steps, 512);
    EXPECT_EQ(r.sigma_steps, 192);
}

TEST(Brute2D, OffsetConstant)
{
    const double lg = std::lgamma(4.5);
    EXPECT_NEAR(oracle::closed_form_offset_2d(3, 1.5),
                -std::log(2 * std::numbers::pi) - std::log(3.0) + lg + 4.5 * std::log(2.0), 1e-12);
}

TEST(Brute2D, GridDoublingConverges)
{
    const auto regs = absolute_regs();
    oracle::QuadratureSpec half;
    half.rotation_steps /= 2;
    half.scale_steps /= 2;
    half.translation_steps /= 2;
    half.sigma_steps /= 2;
    half.tolerance = 1.0;
    const auto coarse = oracle::brute_marginal_2d(kRefY, kRefV, regs, half);
    const auto fine = oracle::brute_marginal_2d(kRefY, kRefV, regs, half.refined());
    EXPECT_LT(std::abs(fine.log_value - coarse.log_value), 1e-4);
    EXPECT_LT(fine.error_estimate, 1e-4);
}

TEST(Brute2D, MatchesClosedFormUpToKnownConstant)
{
    const auto regs = absolute_regs();
    const auto b = oracle::brute_marginal_2d(kRefY, kRefV, regs);
    const double rel = std::abs(b.log_value - oracle::closed_form_offset_2d(3, regs.alpha) - closed_form(kRefY, kRefV, regs));
    EXPECT_LT(rel, 1e-3 * std::abs(b.log_value));
    EXPECT_LT(rel, 1e-6);
}

TEST(Brute2D, OffsetIsConstantUnderPerturbationsOfSelfMatch)
{
    const auto regs = absolute_regs();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 0.1);
    const auto v = random_complex(rng, 3);
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (int t = 0; t < 10; ++t)
    {
        auto y = v;
        for (auto& z : y)
            z += Complex(g(rng), g(rng));
        const double d = oracle::brute_marginal_2d(y, v, regs).log_value - closed_form(y, v, regs);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    EXPECT_LT(hi - lo, 1e-3);
}

TEST(Brute2D, FivePointOffset)
{
    const auto regs = absolute_regs();
    std::mt19937_64 rng(5);
    const auto y = random_complex(rng, 5), v = random_complex(rng, 5);
    const double d = oracle::brute_marginal_2d(y, v, regs).log_value - closed_form(y, v, regs);
    EXPECT_NEAR(d, oracle::closed_form_offset_2d(5, regs.alpha), 1e-4);
}

TEST(Brute2D, InvariantUnderDataRotation)
{
    const auto regs = absolute_regs();
    const double base = oracle::brute_marginal_2d(kRefY, kRefV, regs).log_value;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 2 * std::numbers::pi);
    const Complex rot = std::polar(1.0, u(rng));
    auto y = kRefY;
    for (auto& z : y)
        z *= rot;
    EXPECT_NEAR(oracle::brute_marginal_2d(y, kRefV, regs).log_value, base, 1e-6);
}

TEST(Brute2D, Errors)
{
    const auto regs = absolute_regs();
    EXPECT_THROW(oracle::brute_marginal_2d(kRefY, std::vector<Complex>(2), regs), std::invalid_argument);
    oracle::QuadratureSpec tight;
    tight.rotation_steps = tight.scale_steps = tight.translation_steps = tight.sigma_steps = 8;
    tight.tolerance = 1e-12;
    try
    {
        oracle::brute_marginal_2d(kRefY, kRefV, regs, tight);
        FAIL();
    }
    catch (const std::runtime_error& e)
    {
        EXPECT_NE(std::string(e.what()).find("refine"), std::string::npos);
    }
}

TEST(Brute3D, MatchesTranslationExponent)
{
    std::mt19937_64 rng(11);
    for (int f = 0; f < 5; ++f)
    {
        const auto y = random_points3(rng, 4), v = random_points3(rng, 4);
        const double sigma = 0.3 + 0.2 * f;
        const auto b = oracle::brute_translation_marginal_3d(y, v, sigma);
        const double expect =
            quat::translation_marginal_exponent(y, v, sigma) + 1.5 * std::log(2 * std::numbers::pi * sigma * sigma / 4);
        EXPECT_NEAR(b.log_value, expect, 1e-6);
        EXPECT_LT(b.error_estimate, 1e-5);
    }
}

TEST(Brute3D, IndependentOfCommonOffset)
{
    std::mt19937_64 rng(12);
    const auto v = random_points3(rng, 4);
    const double base = oracle::brute_translation_marginal_3d(v, v, 0.5).log_value;
    for (const Point3 t : {Point3(0.5, 0, 0), Point3(-3, 2, 1), Point3(10, -10, 4)})
    {
        auto y = v;
        for (auto& p : y)
            p += t;
        EXPECT_NEAR(oracle::brute_translation_marginal_3d(y, v, 0.5).log_value, base, 1e-6);
    }
}

TEST(Brute3D, GridDoublingConverges)
{
    std::mt19937_64 rng(13);
    const auto y = random_points3(rng, 3), v = random_points3(rng, 3);
    oracle::QuadratureSpec s;
    const double a = oracle::brute_translation_marginal_3d(y, v, 0.4, s).log_value;
    const double b = oracle::brute_translation_marginal_3d(y, v, 0.4, s.refined()).log_value;
    EXPECT_LT(std::abs(a - b), 1e-5);
}

TEST(Brute3D, RangeMustCoverData)
{
    std::mt19937_64 rng(14);
    const auto y = random_points3(rng, 3), v = random_points3(rng, 3);
    oracle::QuadratureSpec s;
    s.translation_range = oracle::Interval{-0.1, 0.1};
    EXPECT_THROW(oracle::brute_translation_marginal_3d(y, v, 0.4, s), std::invalid_argument);
    s.translation_range = oracle::Interval{-20, 20};
    EXPECT_NO_THROW(oracle::brute_translation_marginal_3d(y, v, 0.4, s));
    EXPECT_THROW(oracle::brute_translation_marginal_3d(y, v, 0.0), std::invalid_argument);
}

TEST(VerifyEq2, SmallRunPasses)
{
    const auto r = oracle::verify_eq2(2, 1, 1e-3, 7, absolute_regs());
    ASSERT_EQ(r.trials.size(), 3u);
    EXPECT_EQ(r.trials[2].n, 5);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.max_spread, 1e-3);
    EXPECT_LT(r.max_residual, 1e-4);
    EXPECT_THROW(oracle::verify_eq2(1, 0, 1e-3, 7, absolute_regs()), std::invalid_argument);
}
