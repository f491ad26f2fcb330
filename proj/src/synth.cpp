#include "shapemap/synth.hpp"
#include "shapemap/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace shapemap
{

namespace
{

constexpr int kDenseSamples = 720;

using Outline = std::vector<Point2>;

Outline smooth_curve(int m, auto&& radius_at)
{
    Outline pts;
    pts.reserve(m);
    for (int i = 0; i < m; ++i)
    {
        const double t = 2.0 * std::numbers::pi * i / m;
        pts.push_back(radius_at(t));
    }
    return pts;
}

Outline polygon(std::initializer_list<std::pair<double, double>> v)
{
    Outline pts;
    for (auto [x, y] : v)
        pts.emplace_back(x, y);
    return pts;
}

Outline family_outline(const std::string& family, double p)
{
    const double jit = 1.0 + p;
    if (family == "circle" || family == "ellipse")
    {
        const double aspect = (family == "circle" ? 1.0 : 0.6) * jit;
        return smooth_curve(2048, [&](double t) { return Point2(std::cos(t), aspect * std::sin(t)); });
    }
    if (family == "square" || family == "rectangle")
    {
        const double h = (family == "square" ? 1.0 : 0.6) * jit;
        return polygon({{-1, -h}, {1, -h}, {1, h}, {-1, h}});
    }
    if (family == "triangle")
    {
        // apex height relative to an equilateral triangle
        const double apex = std::sqrt(3.0) * jit;
        return polygon({{-1, 0}, {1, 0}, {0, apex}});
    }
    if (family == "star")
    {
        const double inner = 0.5 * jit;
        Outline pts;
        for (int i = 0; i < 10; ++i)
        {
            const double r = i % 2 == 0 ? 1.0 : inner;
            const double t = std::numbers::pi / 2 + std::numbers::pi * i / 5;
            pts.emplace_back(r * std::cos(t), r * std::sin(t));
        }
        return pts;
    }
    if (family == "cross")
    {
        const double w = 0.35 * jit;
        return polygon({{w, -1}, {w, -w}, {1, -w}, {1, w}, {w, w}, {w, 1},
                        {-w, 1}, {-w, w}, {-1, w}, {-1, -w}, {-w, -w}, {-w, -1}});
    }
    if (family == "letter_L")
    {
        const double t = 0.35 * jit;
        return polygon({{0, 0}, {1, 0}, {1, t}, {t, t}, {t, 1.6}, {0, 1.6}});
    }
    if (family == "letter_T")
    {
        const double t = 0.35 * jit;
        return polygon({{-t / 2, 0}, {t / 2, 0}, {t / 2, 1.6 - t}, {0.7, 1.6 - t}, {0.7, 1.6},
                        {-0.7, 1.6}, {-0.7, 1.6 - t}, {-t / 2, 1.6 - t}});
    }
    if (family == "letter_U")
    {
        const double t = 0.3 * jit;
        return polygon({{-0.7, 0}, {0.7, 0}, {0.7, 1.4}, {0.7 - t, 1.4}, {0.7 - t, t},
                        {-0.7 + t, t}, {-0.7 + t, 1.4}, {-0.7, 1.4}});
    }
    throw std::invalid_argument("unknown synthetic family: " + family);
}

/// Equal-arc samples of a closed outline starting at arc fraction `phase`.
Outline sample_from_phase(const Outline& verts, double phase, int m)
{
    std::vector<double> cum{0.0};
    for (std::size_t i = 0; i < verts.size(); ++i)
        cum.push_back(cum.back() + (verts[(i + 1) % verts.size()] - verts[i]).norm());
    const double L = cum.back();
    Outline out;
    out.reserve(m);
    std::size_t seg = 0;
    const double start = (phase - std::floor(phase)) * L;
    for (int i = 0; i < m; ++i)
    {
        double t = start + L * i / m;
        if (t >= L)
            t -= L;
        seg = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), t) - cum.begin()) - 1;
        seg = std::min(seg, verts.size() - 1);
        const double len = cum[seg + 1] - cum[seg];
        const double u = (t - cum[seg]) / len;
        out.push_back(verts[seg] + u * (verts[(seg + 1) % verts.size()] - verts[seg]));
    }
    return out;
}

// "name" or "name:offset"; the offset is added to the shape parameter.
std::pair<std::string, double> split_family(const std::string& family)
{
    const auto colon = family.find(':');
    if (colon == std::string::npos)
        return {family, 0.0};
    const std::string tail = family.substr(colon + 1);
    std::size_t used = 0;
    double offset = 0.0;
    try
    {
        offset = std::stod(tail, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != tail.size() || !std::isfinite(offset))
        throw std::invalid_argument("bad family parameter in '" + family + "'");
    return {family.substr(0, colon), offset};
}

} // namespace

bool is_synthetic_family(const std::string& family)
{
    try
    {
        const auto name = split_family(family).first;
        const auto& known = synthetic_families();
        return std::find(known.begin(), known.end(), name) != known.end();
    }
    catch (const std::invalid_argument&)
    {
        return false;
    }
}

const std::vector<std::string>& synthetic_families()
{
    static const std::vector<std::string> names{"circle",   "ellipse", "square",   "rectangle", "triangle",
                                                "star",     "cross",   "letter_L", "letter_T",  "letter_U"};
    return names;
}

Shape2 family_template(const std::string& family, const FamilyVariation& var)
{
    const auto [name, offset] = split_family(family);
    Outline verts = family_outline(name, offset + var.shape_param);
    if (signed_area(verts) < 0.0)
        std::reverse(verts.begin(), verts.end());
    Outline pts = sample_from_phase(verts, var.phase, kDenseSamples);

    Point2 centroid = Point2::Zero();
    for (const auto& p : pts)
        centroid += p;
    centroid /= static_cast<double>(pts.size());
    double ss = 0.0;
    for (auto& p : pts)
    {
        p -= centroid;
        ss += p.squaredNorm();
    }
    const double rms = std::sqrt(ss / static_cast<double>(pts.size()));
    for (auto& p : pts)
        p /= rms;
    return Shape2(std::move(pts), true, family);
}

Shape2 synth_shape(const std::string& family, double noise_sigma, int n, const SimilarityTransform2& g,
                   std::uint64_t seed, const FamilyVariation& var)
{
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw std::invalid_argument("noise_sigma must be nonnegative");
    const Shape2 base = apply_transform(resample_arclength(family_template(family, var), n), g);
    if (noise_sigma == 0.0)
        return base;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise_sigma);
    std::vector<Point2> pts(base.points().begin(), base.points().end());
    for (auto& p : pts)
    {
        const double dx = gauss(rng);
        const double dy = gauss(rng);
        p += Point2(dx, dy);
    }
    return Shape2(std::move(pts), true, family);
}

} // namespace shapemap
