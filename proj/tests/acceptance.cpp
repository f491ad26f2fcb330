// Acceptance checks: one PASS/FAIL/INFO line per criterion.
// Exit status is nonzero when a blocking check fails.

#include "shapemap/classifier.hpp"
#include "shapemap/harness.hpp"
#include "shapemap/oracles.hpp"
#include "shapemap/quat3d.hpp"
#include "shapemap/synth.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace shapemap;
using planar::Complex;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
    bool informational = false;
    bool skipped = false;
};

int failures = 0;

void check(const std::string& name, double time_limit_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (const std::exception& e)
    {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit_s > 0 && dt > time_limit_s && !o.skipped)
    {
        o.pass = false;
        o.detail += "; over time limit";
    }
    const char* tag = o.skipped ? "SKIP" : o.informational ? (o.pass ? "INFO" : "INFO-FAIL") : (o.pass ? "PASS" : "FAIL");
    std::printf("[%s] %s: %s (%.1f s)\n", tag, name.c_str(), o.detail.c_str(), dt);
    std::fflush(stdout);
    if (!o.pass && !o.informational && !o.skipped)
        ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::vector<Point3> random_points3(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    std::vector<Point3> p;
    for (int i = 0; i < n; ++i)
        p.emplace_back(g(rng), g(rng), g(rng));
    return p;
}

quat::Quaternion random_quaternion(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return quat::uniform_unit_quaternion({g(rng), g(rng), g(rng), g(rng)});
}

Outcome eq2()
{
    planar::Regulators regs;
    regs.zeta_relative = false;
    const auto r = oracle::verify_eq2(10, 3, 1e-3, 2024, regs);
    return {r.pass, fmt("max spread %.3g (tol 1e-3), max residual %.3g over 13 pairs", r.max_spread, r.max_residual)};
}

Outcome similarity_invariance()
{
    std::vector<std::pair<std::string, Shape2>> labeled;
    for (const auto* f : {"star", "letter_L", "ellipse", "cross", "letter_T"})
        for (double ph : {0.0, 0.33, 0.66})
            labeled.emplace_back(f, synth_shape(f, 0.0, 96, {}, 1, {ph / 20, ph}));
    const int n = 32;
    const auto models = classify::train(labeled, n);
    const auto& families = synthetic_families();

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    int changed = 0, total = 0;
    double drift_rigid = 0, drift_post = 0;
    for (int s = 0; s < 100; ++s)
    {
        const auto& f = families[s % families.size()];
        const auto y = synth_shape(f, 0.03, n, {}, 1000 + s, {0.1 * u(rng), u(rng)});
        const auto base = classify::classify(y, models);
        std::vector<double> raw;
        for (const auto& m : models)
            raw.push_back(classify::class_log_likelihood(planar::to_complex(y.points()), m));
        for (int t = 0; t < 100; ++t)
        {
            const double angle = 2 * std::numbers::pi * u(rng);
            const Point2 shift(200 * u(rng) - 100, 200 * u(rng) - 100);
            const SimilarityTransform2 g(angle, std::exp(6 * u(rng) - 3), shift);
            const auto r = classify::classify(apply_transform(y, g), models);
            ++total;
            if (r.winner != base.winner)
                ++changed;
            for (std::size_t i = 0; i < r.ranked.size(); ++i)
                drift_post = std::max(drift_post, std::abs(r.ranked[i].log_posterior - base.ranked[i].log_posterior));

            const auto moved = apply_transform(y, SimilarityTransform2(angle, 1.0, shift));
            const auto z = planar::to_complex(moved.points());
            for (std::size_t m = 0; m < models.size(); ++m)
                drift_rigid = std::max(drift_rigid, std::abs(classify::class_log_likelihood(z, models[m]) - raw[m]) /
                                                        std::max(1.0, std::abs(raw[m])));
        }
    }
    const bool ok = changed == 0 && drift_rigid < 1e-9;
    return {ok, fmt("winner changed %g of %g; rigid raw drift %.3g (rel, tol 1e-9)", changed, total, drift_rigid) +
                    fmt("; similarity posterior drift %.3g", drift_post)};
}

Outcome cauchy_schwarz()
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(3, 60);
    std::uniform_real_distribution<double> u(-1, 1), logscale(-8, 8);
    const planar::Regulators regs;
    long violations = 0;
    double worst = -HUGE_VAL;
    for (int t = 0; t < 100000; ++t)
    {
        const int n = count(rng);
        const double sy = std::exp(logscale(rng)), sv = std::exp(logscale(rng));
        std::vector<Complex> y, v;
        for (int i = 0; i < n; ++i)
        {
            const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
            y.emplace_back(sy * a, sy * b);
            v.emplace_back(sv * c, sv * d);
        }
        // every tenth instance is a near-copy, the tight end of the inequality
        if (t % 10 == 0)
            for (int i = 0; i < n; ++i)
                y[i] = v[i] * Complex(0.3, -1.2) + 1e-9 * sv * Complex(u(rng), u(rng));
        const auto st = planar::suff_stats(y, v);
        const double lhs = std::norm(st.cov_vy), rhs = st.var_y * st.var_v;
        worst = std::max(worst, (lhs - rhs) / std::max(rhs, 1e-300));
        if (lhs > rhs * (1 + 1e-12) || !(planar::bracket(st, regs) > 0))
            ++violations;
    }
    return {violations == 0, fmt("%g violations in 1e5 instances; worst (|cov|^2 - var_y var_v)/(var_y var_v) = %.3g",
                                 static_cast<double>(violations), worst)};
}

Outcome quadratic_form()
{
    std::mt19937_64 rng(8);
    double worst = 0;
    for (int pair = 0; pair < 20; ++pair)
    {
        const int n = 3 + pair % 6;
        const auto y = random_points3(rng, n), v = random_points3(rng, n);
        const auto K = quat::build_rotation_kernel(y, v, 0.5);
        for (int t = 0; t < 1000; ++t)
        {
            const auto q = random_quaternion(rng);
            const double d = quat::cross_correlation_direct(y, v, q);
            worst = std::max(worst, std::abs(K.quadratic_form(q) - d) / std::max(1.0, std::abs(d)));
        }
    }
    return {worst < 1e-9, fmt("max relative error %.3g over 2e4 evaluations (tol 1e-9)", worst)};
}

Outcome translation_3d()
{
    std::mt19937_64 rng(9);
    double worst = 0;
    for (int f = 0; f < 5; ++f)
    {
        const auto y = random_points3(rng, 4), v = random_points3(rng, 4);
        const double sigma = 0.2 + 0.15 * f;
        const double brute = oracle::brute_translation_marginal_3d(y, v, sigma).log_value;
        const double closed = quat::translation_marginal_exponent(y, v, sigma) +
                              1.5 * std::log(2 * std::numbers::pi * sigma * sigma / 4);
        worst = std::max(worst, std::abs(brute - closed));
    }
    return {worst < 1e-6, fmt("max |oracle - exponent - constant| %.3g (tol 1e-6)", worst)};
}

quat::RotationKernel mild_kernel()
{
    // eigenvalue spread 0.16 around a mean of 2.0, in a random orientation
    const Eigen::Vector4d lam(2.09, 2.02, 1.96, 1.93);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    Eigen::Matrix4d A;
    for (int i = 0; i < 16; ++i)
        A(i) = g(rng);
    const Eigen::Matrix4d Q = Eigen::HouseholderQR<Eigen::Matrix4d>(A).householderQ();
    const double sigma = 0.1, sf = 1 / (sigma * sigma);
    Eigen::Matrix4d N = Q * (lam / sf).asDiagonal() * Q.transpose();
    N = (N + N.transpose()) / 2;
    return quat::RotationKernel::from_matrix(N, 4, sigma);
}

Outcome series_vs_mc()
{
    const auto K = mild_kernel();
    const auto s = quat::rotation_marginal_series(K, 4);
    const auto mc = quat::rotation_marginal_mc(K, 10000000, 1);
    const double diff = std::abs(s.log_value - mc.log_value);
    const double tol = std::max(1e-3 * std::abs(mc.log_value), 3 * mc.std_error);
    return {diff <= tol, fmt("series %.8f, MC %.8f, |diff| %.3g", s.log_value, mc.log_value, diff) +
                             fmt(" (tol %.3g, SE %.3g)", tol, mc.std_error)};
}

Outcome haar()
{
    std::mt19937_64 rng(31);
    const auto y = random_points3(rng, 5), v = random_points3(rng, 5);
    const double sigma = 1.2;
    // a larger reference budget keeps the shared reference from dominating
    // the five comparisons
    const auto base = quat::rotation_marginal_mc(quat::build_rotation_kernel(y, v, sigma), 10000000, 1);
    double worst_z = 0;
    for (int t = 0; t < 5; ++t)
    {
        const auto q = random_quaternion(rng);
        std::vector<Point3> yr;
        for (const auto& p : y)
            yr.push_back(quat::rotate(q, p));
        const auto m = quat::rotation_marginal_mc(quat::build_rotation_kernel(yr, v, sigma), 1000000, 2 + t);
        worst_z = std::max(worst_z, std::abs(m.log_value - base.log_value) / std::hypot(m.std_error, base.std_error));
    }
    const auto half = quat::rotation_marginal_mc(quat::build_rotation_kernel(y, v, sigma), 1000000, 99,
                                                 quat::SphereDomain::hemisphere);
    const double hz = std::abs(half.log_value - base.log_value) / std::hypot(half.std_error, base.std_error);
    return {worst_z <= 3 && hz <= 3,
            fmt("rotated-data max deviation %.2f SE, hemisphere deviation %.2f SE (limit 3)", worst_z, hz)};
}

Outcome trend()
{
    bench::BenchmarkSpec s;
    s.families = {"circle", "ellipse:0.6", "square", "rectangle:0.6"};
    s.noise_sigma = 0.02;
    s.n_points = {10, 25, 50, 100};
    s.runs = 10;
    s.synthetic_per_class = 20;
    s.shapes_per_run = 10;
    s.seed = 1;
    const auto r = bench::sweep_sample_count(s);
    std::ostringstream d;
    d << "top-1 by n:";
    for (const auto& e : r.per_n)
        d << " " << e.n << "=" << e.top1_mean;
    d << "; spearman " << r.spearman << " (min 0.8); n=100 needs >= 0.9";
    return {r.spearman >= 0.8 && r.per_n.back().top1_mean >= 0.9, d.str()};
}

Outcome kimia()
{
    const char* dir = std::getenv("SHAPEMAP_KIMIA");
    if (!dir || !*dir)
        return {false, "set SHAPEMAP_KIMIA to a directory of per-class silhouettes to run", true, true};
    bench::BenchmarkSpec s;
    s.dataset_dir = dir;
    s.n_points = {30};
    s.runs = 10;
    s.shapes_per_run = 10;
    const auto r = bench::run_benchmark(s);
    const double m = r.per_n[0].top1_mean;
    return {m >= 0.45 && m <= 0.73, fmt("mean top-1 %.3g (std %.3g), expected range [0.45, 0.73]", m, r.per_n[0].top1_std),
            true};
}

} // namespace

int main()
{
    check("eq2 oracle equivalence", 300, eq2);
    check("similarity invariance", 60, similarity_invariance);
    check("cauchy-schwarz and bracket positivity", 0, cauchy_schwarz);
    check("3d quadratic form fidelity", 0, quadratic_form);
    check("3d translation marginal", 0, translation_3d);
    check("series vs monte carlo", 120, series_vs_mc);
    check("haar and double cover", 0, haar);
    check("sample-count trend", 600, trend);
    check("kimia accuracy", 0, kimia);
    std::printf("%d blocking failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
