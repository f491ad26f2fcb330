#include "shapemap/planar_likelihood.hpp"
#include "shapemap/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shapemap::planar
{

namespace
{

Complex compensated_mean(std::span<const Complex> z)
{
    CompensatedSum re, im;
    for (const auto& p : z)
    {
        re += p.real();
        im += p.imag();
    }
    const double n = static_cast<double>(z.size());
    return {re.value() / n, im.value() / n};
}

std::vector<Complex> centred(std::span<const Complex> z)
{
    const Complex m = compensated_mean(z);
    std::vector<Complex> out(z.begin(), z.end());
    for (auto& p : out)
        p -= m;
    return out;
}

double sum_sq(std::span<const Complex> z)
{
    CompensatedSum s;
    for (const auto& p : z)
        s += std::norm(p);
    return s.value();
}

double diameter_sq(std::span<const Complex> z)
{
    double best = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            best = std::max(best, std::norm(z[i] - z[j]));
    return best;
}

double effective_count(std::size_t n, EffectiveCount mode)
{
    switch (mode)
    {
    case EffectiveCount::equal_n:
        return static_cast<double>(n);
    }
    throw std::invalid_argument("unknown effective count mode");
}

// sum_i a[(i + offset) mod n] * conj(b[i]), or a[(offset - i) mod n] when reversed.
Complex cross_sum(std::span<const Complex> a, std::span<const Complex> b, const Correspondence& c)
{
    const std::size_t n = a.size();
    CompensatedSum re, im;
    for (std::size_t i = 0; i < n; ++i)
    {
        const std::size_t k = c.reversed ? (c.cyclic_offset + n - i) % n : (i + c.cyclic_offset) % n;
        const Complex t = a[k] * std::conj(b[i]);
        re += t.real();
        im += t.imag();
    }
    return {re.value(), im.value()};
}

void check_pair(std::size_t ny, std::size_t nv)
{
    if (ny != nv)
        throw std::invalid_argument("point counts differ: " + std::to_string(ny) + " vs " + std::to_string(nv));
    if (ny == 0)
        throw std::invalid_argument("empty point set");
}

} // namespace

void Regulators::validate() const
{
    if (!(B > 0.0) || !std::isfinite(B))
        throw std::invalid_argument("regulator B must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("regulator alpha must be positive");
    if (!(zeta > 0.0) || !std::isfinite(zeta))
        throw std::invalid_argument("regulator zeta must be positive");
}

std::string_view to_string(CorrespondenceMode m)
{
    return m == CorrespondenceMode::map ? "map" : "marginal";
}

CorrespondenceMode parse_corr_mode(std::string_view s)
{
    if (s == "map")
        return CorrespondenceMode::map;
    if (s == "marginal")
        return CorrespondenceMode::marginal;
    throw std::invalid_argument("unknown correspondence mode: " + std::string(s));
}

std::vector<Complex> to_complex(std::span<const Point2> pts)
{
    std::vector<Complex> out;
    out.reserve(pts.size());
    for (const auto& p : pts)
        out.emplace_back(p.x(), p.y());
    return out;
}

SufficientStats suff_stats(std::span<const Complex> y, std::span<const Complex> v, EffectiveCount mode)
{
    check_pair(y.size(), v.size());
    const auto yc = centred(y);
    const auto vc = centred(v);
    const double nt = effective_count(y.size(), mode);

    SufficientStats s;
    s.n_tilde = nt;
    s.var_y = sum_sq(yc) / nt;
    s.var_v = sum_sq(vc) / nt;
    s.cov_vy = cross_sum(vc, yc, {}) / nt;
    s.data_scale_sq = diameter_sq(y);
    return s;
}

SufficientStats suff_stats(const Shape2& y, const Shape2& v, EffectiveCount mode)
{
    const auto yz = to_complex(y.points());
    const auto vz = to_complex(v.points());
    return suff_stats(yz, vz, mode);
}

double bracket(const SufficientStats& s, const Regulators& regs)
{
    const double nt = s.n_tilde;
    const double inv_b2 = 1.0 / (regs.B * regs.B);
    return nt * s.var_y - nt * nt * std::norm(s.cov_vy) / (nt * s.var_v + inv_b2) +
           2.0 * regs.effective_zeta(s.data_scale_sq);
}

double log_marginal_kernel(const SufficientStats& stats, int n, const Regulators& regs)
{
    const double b = bracket(stats, regs);
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::domain_error("regulator underflow");
    return -(n + regs.alpha) * std::log(b);
}

std::vector<Complex> permute(std::span<const Complex> v, const Correspondence& c)
{
    const std::size_t n = v.size();
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = v[c.reversed ? (c.cyclic_offset + n - i) % n : (i + c.cyclic_offset) % n];
    return out;
}

CorrespondenceResult best_correspondence(std::span<const Complex> y, std::span<const Complex> v,
                                         const Regulators& regs, bool allow_reversal)
{
    check_pair(y.size(), v.size());
    regs.validate();
    const int n = static_cast<int>(y.size());
    const auto yc = centred(y);
    const auto vc = centred(v);

    SufficientStats s;
    s.n_tilde = effective_count(y.size(), regs.count_mode);
    s.var_y = sum_sq(yc) / s.n_tilde;
    s.var_v = sum_sq(vc) / s.n_tilde;
    s.data_scale_sq = diameter_sq(y);

    std::vector<double> values;
    values.reserve(allow_reversal ? 2 * n : n);
    CorrespondenceResult result;
    result.best_value = -std::numeric_limits<double>::infinity();
    for (int rev = 0; rev < (allow_reversal ? 2 : 1); ++rev)
        for (int offset = 0; offset < n; ++offset)
        {
            const Correspondence c{offset, rev == 1};
            s.cov_vy = cross_sum(vc, yc, c) / s.n_tilde;
            const double value = log_marginal_kernel(s, n, regs);
            values.push_back(value);
            if (value > result.best_value)
            {
                result.best_value = value;
                result.best = c;
            }
        }

    result.value = regs.corr_mode == CorrespondenceMode::map ? result.best_value : log_mean_exp(values);
    return result;
}

CorrespondenceResult best_correspondence(const Shape2& y, const Shape2& v, const Regulators& regs,
                                         bool allow_reversal)
{
    const auto yz = to_complex(y.points());
    const auto vz = to_complex(v.points());
    return best_correspondence(yz, vz, regs, allow_reversal);
}

} // namespace shapemap::planar
