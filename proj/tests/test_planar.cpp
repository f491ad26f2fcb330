#include "shapemap/planar_likelihood.hpp"
#include "shapemap/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shapemap;
using planar::Complex;

namespace
{

std::vector<Complex> random_points(std::mt19937_64& rng, int n, double spread = 1.0)
{
    std::normal_distribution<double> g(0.0, spread);
    std::vector<Complex> z;
    for (int i = 0; i < n; ++i)
    {
        const double x = g(rng);
        const double y = g(rng);
        z.emplace_back(x, y);
    }
    return z;
}

// Cov(v, y) = (1/n) [sum_i v_i conj(y_i) - (1/n) sum_i sum_j v_i conj(y_j)], as printed,
// with the variances formed the same way.
struct NaiveStats
{
    double var_y, var_v;
    Complex cov;
};

NaiveStats naive(const std::vector<Complex>& y, const std::vector<Complex>& v)
{
    const double n = static_cast<double>(y.size());
    auto cov = [&](const std::vector<Complex>& a, const std::vector<Complex>& b) {
        Complex s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            s1 += a[i] * std::conj(b[i]);
            for (std::size_t j = 0; j < b.size(); ++j)
                s2 += a[i] * std::conj(b[j]);
        }
        return (s1 - s2 / n) / n;
    };
    return {cov(y, y).real(), cov(v, v).real(), cov(v, y)};
}

double naive_kernel(const std::vector<Complex>& y, const std::vector<Complex>& v, double B, double alpha,
                    double zeta)
{
    const auto s = naive(y, v);
    const double n = static_cast<double>(y.size());
    const double br = n * s.var_y - n * n * std::norm(s.cov) / (n * s.var_v + 1.0 / (B * B)) + 2.0 * zeta;
    return -(n + alpha) * std::log(br);
}

planar::Regulators absolute_regs(double B = 1e3, double alpha = 1.0, double zeta = 1e-8)
{
    planar::Regulators r;
    r.B = B;
    r.alpha = alpha;
    r.zeta = zeta;
    r.zeta_relative = false;
    return r;
}

std::vector<Complex> shifted(const std::vector<Complex>& v, int k)
{
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[(i + k) % v.size()];
    return out;
}

std::vector<Complex> template_points(const std::string& family, int n, double phase = 0.0)
{
    return planar::to_complex(synth_shape(family, 0.0, n, {}, 1, {0.0, phase}).points());
}

} // namespace

TEST(SuffStats, MatchesPrintedFormula)
{
    std::mt19937_64 rng(1);
    for (int t = 0; t < 50; ++t)
    {
        const auto y = random_points(rng, 3 + t % 9, 2.0);
        const auto v = random_points(rng, 3 + t % 9);
        const auto s = planar::suff_stats(y, v);
        const auto w = naive(y, v);
        EXPECT_EQ(s.n_tilde, static_cast<double>(y.size()));
        EXPECT_NEAR(s.var_y, w.var_y, 1e-12 * (1 + w.var_y));
        EXPECT_NEAR(s.var_v, w.var_v, 1e-12 * (1 + w.var_v));
        EXPECT_NEAR(std::abs(s.cov_vy - w.cov), 0.0, 1e-12 * (1 + std::abs(w.cov)));
    }
}

TEST(SuffStats, SquareSelfCovariance)
{
    const std::vector<Complex> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const auto s = planar::suff_stats(sq, sq);
    EXPECT_DOUBLE_EQ(s.var_y, s.var_v);
    EXPECT_NEAR(s.cov_vy.real(), s.var_y, 1e-15);
    EXPECT_EQ(s.cov_vy.imag(), 0.0);
    EXPECT_DOUBLE_EQ(s.var_y, 0.5);
}

TEST(SuffStats, TranslationDoesNotChangeStats)
{
    std::mt19937_64 rng(2);
    const auto v = random_points(rng, 7);
    auto y = v;
    for (auto& p : y)
        p += Complex(3.5, -2.25);
    const auto a = planar::suff_stats(v, v);
    const auto b = planar::suff_stats(y, v);
    EXPECT_NEAR(a.var_y, b.var_y, 1e-13);
    EXPECT_NEAR(std::abs(a.cov_vy - b.cov_vy), 0.0, 1e-13);
}

TEST(SuffStats, RotationTurnsCovariancePhaseBackwards)
{
    std::mt19937_64 rng(3);
    const auto v = random_points(rng, 9);
    const double theta = 0.7;
    auto y = v;
    for (auto& p : y)
        p *= std::polar(1.0, theta);
    const auto s0 = planar::suff_stats(v, v);
    const auto s = planar::suff_stats(y, v);
    EXPECT_NEAR(std::abs(s.cov_vy), std::abs(s0.cov_vy), 1e-13);
    EXPECT_NEAR(std::arg(s.cov_vy), -theta, 1e-13);
}

TEST(SuffStats, Errors)
{
    std::vector<Complex> a{{0, 0}, {1, 0}, {0, 1}}, b{{0, 0}, {1, 0}};
    EXPECT_THROW(planar::suff_stats(a, b), std::invalid_argument);
    EXPECT_THROW(planar::suff_stats(std::vector<Complex>{}, std::vector<Complex>{}), std::invalid_argument);
}

TEST(Kernel, MatchesNaiveEvaluation)
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 40; ++t)
    {
        const int n = 3 + t % 6;
        const auto y = random_points(rng, n);
        const auto v = random_points(rng, n);
        const auto r = absolute_regs(10.0, 1.5, 1e-3);
        EXPECT_NEAR(planar::log_marginal_kernel(planar::suff_stats(y, v), n, r), naive_kernel(y, v, 10.0, 1.5, 1e-3),
                    1e-10);
    }
}

TEST(Kernel, PerfectMatchSaturatesAtTwoZeta)
{
    const auto v = template_points("letter_L", 12);
    const auto r = absolute_regs(1e9, 1.0, 1e-6);
    const auto s = planar::suff_stats(v, v);
    EXPECT_NEAR(planar::bracket(s, r), 2e-6, 1e-13);
    EXPECT_NEAR(planar::log_marginal_kernel(s, 12, r), -13.0 * std::log(2e-6), 1e-6);
}

TEST(Kernel, OrthogonalTemplate)
{
    const std::vector<Complex> v{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const std::vector<Complex> y{{2, 0}, {-2, 0}, {2, 0}, {-2, 0}};
    const auto s = planar::suff_stats(y, v);
    ASSERT_NEAR(std::abs(s.cov_vy), 0.0, 1e-15);
    const auto r = absolute_regs(1e3, 2.0, 1e-4);
    EXPECT_NEAR(planar::log_marginal_kernel(s, 4, r), -6.0 * std::log(4.0 * s.var_y + 2e-4), 1e-12);
}

TEST(Kernel, DegenerateTemplateReducesToOrthogonalCase)
{
    std::mt19937_64 rng(5);
    const auto y = random_points(rng, 6);
    const std::vector<Complex> v(6, Complex(0.3, -0.2));
    const auto s = planar::suff_stats(y, v);
    EXPECT_NEAR(s.var_v, 0.0, 1e-30);
    const auto r = absolute_regs();
    EXPECT_NEAR(planar::log_marginal_kernel(s, 6, r), -7.0 * std::log(6.0 * s.var_y + 2e-8), 1e-12);
}

TEST(Kernel, RegulatorUnderflow)
{
    planar::SufficientStats bad;
    bad.n_tilde = 3;
    bad.var_y = 1;
    bad.var_v = 1;
    bad.cov_vy = 2;
    try
    {
        planar::log_marginal_kernel(bad, 3, absolute_regs());
        FAIL();
    }
    catch (const std::domain_error& e)
    {
        EXPECT_STREQ(e.what(), "regulator underflow");
    }
}

TEST(Regulators, Validation)
{
    for (double bad : {0.0, -1.0, std::nan(""), HUGE_VAL})
    {
        EXPECT_THROW(absolute_regs(bad).validate(), std::invalid_argument);
        EXPECT_THROW(absolute_regs(1.0, bad).validate(), std::invalid_argument);
        EXPECT_THROW(absolute_regs(1.0, 1.0, bad).validate(), std::invalid_argument);
    }
    EXPECT_EQ(planar::parse_corr_mode("map"), planar::CorrespondenceMode::map);
    EXPECT_EQ(planar::to_string(planar::CorrespondenceMode::marginal), "marginal");
    EXPECT_THROW(planar::parse_corr_mode("sum"), std::invalid_argument);
}

TEST(KernelProperty, CauchySchwarzAndPositiveBracket)
{
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> nd(3, 40);
    std::uniform_real_distribution<double> logscale(-6, 6);
    const planar::Regulators r;
    for (int t = 0; t < 10000; ++t)
    {
        const int n = nd(rng);
        const auto y = random_points(rng, n, std::exp(logscale(rng)));
        auto v = random_points(rng, n, std::exp(logscale(rng)));
        if (t % 5 == 0)
            v = y; // saturating case
        const auto s = planar::suff_stats(y, v);
        ASSERT_LE(std::norm(s.cov_vy), s.var_v * s.var_y * (1 + 1e-12) + 1e-12);
        ASSERT_GT(planar::bracket(s, r), 0.0);
    }
}

TEST(KernelProperty, TranslationAndRotationInvariant)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    const auto r = absolute_regs();
    for (int t = 0; t < 200; ++t)
    {
        const int n = 3 + t % 20;
        const auto y = random_points(rng, n);
        const auto v = random_points(rng, n);
        const double base = planar::log_marginal_kernel(planar::suff_stats(y, v), n, r);
        auto yt = y;
        const Complex shift(u(rng), u(rng));
        const Complex turn = std::polar(1.0, u(rng));
        for (auto& p : yt)
            p = turn * p + shift;
        EXPECT_NEAR(planar::log_marginal_kernel(planar::suff_stats(yt, v), n, r), base, 1e-10);
    }
}

TEST(KernelProperty, DataScalingMapsBracketAffinely)
{
    std::mt19937_64 rng(8);
    const auto r = absolute_regs(1e3, 1.0, 1e-3);
    const auto y = random_points(rng, 10);
    std::vector<std::vector<Complex>> templates;
    for (int k = 0; k < 6; ++k)
        templates.push_back(random_points(rng, 10));
    for (double c : {0.01, 0.5, 3.0, 250.0})
    {
        auto ys = y;
        for (auto& p : ys)
            p *= c;
        std::vector<double> before, after;
        for (const auto& v : templates)
        {
            const double b0 = planar::bracket(planar::suff_stats(y, v), r);
            const double b1 = planar::bracket(planar::suff_stats(ys, v), r);
            EXPECT_NEAR(b1, c * c * (b0 - 2e-3) + 2e-3, 1e-10 * b1);
            before.push_back(planar::log_marginal_kernel(planar::suff_stats(y, v), 10, r));
            after.push_back(planar::log_marginal_kernel(planar::suff_stats(ys, v), 10, r));
        }
        for (std::size_t i = 0; i < before.size(); ++i)
            for (std::size_t j = 0; j < before.size(); ++j)
                EXPECT_EQ(before[i] < before[j], after[i] < after[j]);
    }
}

TEST(KernelProperty, RelativeZetaShiftsByAConstantUnderScaling)
{
    std::mt19937_64 rng(9);
    const planar::Regulators r;
    const auto y = random_points(rng, 8);
    const auto v = random_points(rng, 8);
    auto ys = y;
    for (auto& p : ys)
        p *= 7.0;
    const double d = planar::log_marginal_kernel(planar::suff_stats(ys, v), 8, r) -
                     planar::log_marginal_kernel(planar::suff_stats(y, v), 8, r);
    EXPECT_NEAR(d, -9.0 * std::log(49.0), 1e-10);
}

TEST(KernelProperty, IncreasingInCovarianceMagnitude)
{
    planar::SufficientStats s;
    s.n_tilde = 10;
    s.var_y = 1.0;
    s.var_v = 1.0;
    const auto r = absolute_regs();
    double prev = -INFINITY;
    for (double c = 0.0; c < 0.999; c += 0.01)
    {
        s.cov_vy = std::polar(c, 2.0 * c);
        const double v = planar::log_marginal_kernel(s, 10, r);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Correspondence, RecoversCyclicShift)
{
    const auto v = template_points("star", 30, 0.13);
    const auto y = shifted(v, 7);
    for (auto mode : {planar::CorrespondenceMode::map, planar::CorrespondenceMode::marginal})
    {
        auto r = planar::Regulators{};
        r.corr_mode = mode;
        const auto res = planar::best_correspondence(y, v, r, false);
        EXPECT_EQ(res.best.cyclic_offset, 7);
        EXPECT_FALSE(res.best.reversed);
        const auto self = planar::best_correspondence(v, v, r, false);
        EXPECT_EQ(self.best.cyclic_offset, 0);
        EXPECT_NEAR(res.value, self.value, 1e-9);
        EXPECT_NEAR(res.best_value, self.best_value, 1e-9);
    }
}

TEST(Correspondence, PermuteMatchesConvention)
{
    const std::vector<Complex> v{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    const auto f = planar::permute(v, {2, false});
    EXPECT_EQ(f[0], v[2]);
    EXPECT_EQ(f[4], v[1]);
    const auto b = planar::permute(v, {2, true});
    EXPECT_EQ(b[0], v[2]);
    EXPECT_EQ(b[1], v[1]);
    EXPECT_EQ(b[3], v[4]);
}

TEST(Correspondence, BestValueIsKernelAtBest)
{
    std::mt19937_64 rng(10);
    const auto y = random_points(rng, 11);
    const auto v = random_points(rng, 11);
    const planar::Regulators r;
    const auto res = planar::best_correspondence(y, v, r, true);
    const auto pv = planar::permute(v, res.best);
    EXPECT_NEAR(res.best_value, planar::log_marginal_kernel(planar::suff_stats(y, pv), 11, r), 1e-10);
    // exhaustive check of the maximum
    for (bool rev : {false, true})
        for (int k = 0; k < 11; ++k)
            EXPECT_LE(planar::log_marginal_kernel(planar::suff_stats(y, planar::permute(v, {k, rev})), 11, r),
                      res.best_value + 1e-12);
}

TEST(Correspondence, MirrorImageSelectsReversal)
{
    // a mirror-symmetric outline reflected is the same outline traversed backwards
    const auto v = template_points("letter_T", 40, 0.21);
    std::vector<Complex> y;
    for (const auto& p : v)
        y.push_back(Complex(-p.real(), p.imag()) * std::polar(1.3, 0.4));
    const planar::Regulators r;
    const auto with = planar::best_correspondence(y, v, r, true);
    EXPECT_TRUE(with.best.reversed);
    const auto without = planar::best_correspondence(y, v, r, false);
    EXPECT_GT(with.best_value, without.best_value + 10.0);
}

TEST(Correspondence, MarginalWithinLogCountOfMap)
{
    const std::vector<Complex> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto r = planar::Regulators{};
    r.corr_mode = planar::CorrespondenceMode::map;
    const double map = planar::best_correspondence(sq, sq, r, true).value;
    r.corr_mode = planar::CorrespondenceMode::marginal;
    const double marg = planar::best_correspondence(sq, sq, r, true).value;
    EXPECT_GE(marg, map - std::log(8.0));
    EXPECT_LE(marg, map);
}

TEST(Correspondence, MarginalIsLogMeanExpOverOffsets)
{
    std::mt19937_64 rng(12);
    const auto y = random_points(rng, 9);
    const auto v = random_points(rng, 9);
    auto r = absolute_regs(1e3, 1.0, 1e-2);
    std::vector<double> vals;
    for (int k = 0; k < 9; ++k)
        vals.push_back(naive_kernel(y, planar::permute(v, {k, false}), 1e3, 1.0, 1e-2));
    double m = *std::max_element(vals.begin(), vals.end());
    double s = 0;
    for (double x : vals)
        s += std::exp(x - m);
    EXPECT_NEAR(planar::best_correspondence(y, v, r, false).value, m + std::log(s / 9.0), 1e-9);
}

TEST(Correspondence, CountMismatch)
{
    std::vector<Complex> a{{0, 0}, {1, 0}, {0, 1}}, b{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    EXPECT_THROW(planar::best_correspondence(a, b, planar::Regulators{}, false), std::invalid_argument);
}
