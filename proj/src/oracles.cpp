#include "shapemap/oracles.hpp"
#include "shapemap/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace shapemap::oracle
{

using planar::Complex;

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Accumulates log(sum_k w_k exp(x_k)) without overflow.
class LogAccumulator
{
public:
    void add(double log_term)
    {
        if (log_term == -std::numeric_limits<double>::infinity())
            return;
        if (log_term > shift_)
        {
            sum_ *= std::exp(shift_ - log_term);
            shift_ = log_term;
        }
        sum_ += std::exp(log_term - shift_);
    }
    double value() const { return shift_ + std::log(sum_); }

private:
    double shift_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

// log int exp(-sum_i (r_i - t)^2 / (2 sigma^2)) dt over [lo, hi], trapezoid.
double log_axis_integral(std::span<const double> r, double sigma, double lo, double hi, int steps)
{
    const double h = (hi - lo) / steps;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    LogAccumulator acc;
    for (int j = 0; j <= steps; ++j)
    {
        const double t = lo + h * j;
        double ss = 0.0;
        for (double ri : r)
            ss += (ri - t) * (ri - t);
        const double w = (j == 0 || j == steps) ? 0.5 * h : h;
        acc.add(std::log(w) - ss * inv);
    }
    return acc.value();
}

double log_marginal_2d_grid(std::span<const Complex> y, std::span<const Complex> v, const planar::Regulators& regs,
                            const QuadratureSpec& spec)
{
    const std::size_t n = y.size();
    const double nd = static_cast<double>(n);
    const double eps = 1.0 / (regs.B * regs.B);

    Complex ym(0, 0), vm(0, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        ym += y[i];
        vm += v[i];
    }
    ym /= nd;
    vm /= nd;
    double s_vv = 0.0, s_yy = 0.0;
    Complex c(0, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        s_vv += std::norm(v[i] - vm);
        s_yy += std::norm(y[i] - ym);
        c += std::conj(v[i] - vm) * (y[i] - ym);
    }
    // grid placement only: conditional mode of the scale/rotation parameter
    const Complex a_mode = c / (s_vv + eps);

    Interval srange = spec.sigma_range;
    if (srange.empty())
    {
        // the precision posterior is roughly Gamma(n + alpha, bracket / 2)
        const double residual = std::max(0.0, s_yy - std::norm(c) / (s_vv + eps)) + 2.0 * regs.zeta;
        const double mode = std::sqrt(residual / (2.0 * (nd + regs.alpha)));
        const double ceiling = std::sqrt((s_yy + 2.0 * regs.zeta) / (2.0 * (nd + regs.alpha)));
        srange = {mode / 20.0, 20.0 * ceiling};
    }
    const double l_lo = std::log(srange.lo);
    const double l_hi = std::log(srange.hi);
    const double dl = (l_hi - l_lo) / spec.sigma_steps;

    std::vector<double> rx(n), ry(n);
    LogAccumulator total;

    for (int is = 0; is <= spec.sigma_steps; ++is)
    {
        const double ell = l_lo + dl * is;
        const double sigma = std::exp(ell);
        const double tau = 1.0 / (sigma * sigma);

        const double sigma_a = sigma / std::sqrt(s_vv + eps);
        const double centre = std::abs(a_mode);
        const double half = spec.scale_halfwidth * sigma_a;
        const double s_lo = std::max(0.0, centre - half);
        const double s_hi = centre + half;
        const double t_half = spec.translation_halfwidth * sigma / std::sqrt(nd);

        const double log_prior_group = -4.0 * ell + std::log(s_vv + eps);
        const double log_lik_norm = -nd * std::log(kTwoPi * sigma * sigma);

        LogAccumulator inner;
        for (int js = 0; js <= spec.scale_steps; ++js)
        {
            // s = s_lo + (s_hi - s_lo) phi(u), phi(u) = u - sin(2 pi u) / (2 pi)
            const double u = static_cast<double>(js) / spec.scale_steps;
            const double dphi = 1.0 - std::cos(kTwoPi * u);
            if (dphi <= 0.0)
                continue;
            const double s = s_lo + (s_hi - s_lo) * (u - std::sin(kTwoPi * u) / kTwoPi);
            if (s <= 0.0)
                continue;
            const double w_s = (s_hi - s_lo) * dphi / spec.scale_steps;
            const double log_s_terms =
                std::log(w_s) + std::log(s) - s * s / (2.0 * sigma * sigma * regs.B * regs.B);

            for (int jt = 0; jt < spec.rotation_steps; ++jt)
            {
                const double theta = kTwoPi * jt / spec.rotation_steps;
                const Complex a = std::polar(s, theta);
                double mx = 0.0, my = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const Complex r = y[i] - a * v[i];
                    rx[i] = r.real();
                    ry[i] = r.imag();
                    mx += rx[i];
                    my += ry[i];
                }
                mx /= nd;
                my /= nd;
                const double log_t = log_axis_integral(rx, sigma, mx - t_half, mx + t_half, spec.translation_steps) +
                                     log_axis_integral(ry, sigma, my - t_half, my + t_half, spec.translation_steps);
                inner.add(log_s_terms + std::log(kTwoPi / spec.rotation_steps) + log_t);
            }
        }

        const double w_l = (is == 0 || is == spec.sigma_steps) ? 0.5 * dl : dl;
        // tau^(alpha - 1) dtau = 2 tau^alpha d(log sigma)
        total.add(std::log(2.0 * w_l) + regs.alpha * std::log(tau) - regs.zeta * tau + log_prior_group +
                  log_lik_norm + inner.value());
    }
    return total.value();
}

QuadratureSpec coarsened(const QuadratureSpec& s)
{
    QuadratureSpec c = s;
    c.rotation_steps /= 2;
    c.scale_steps /= 2;
    c.translation_steps /= 2;
    c.sigma_steps /= 2;
    return c;
}

[[noreturn]] void not_converged(double err, double tol)
{
    std::ostringstream msg;
    msg << "quadrature not converged: Richardson error estimate " << err << " exceeds tolerance " << tol
        << "; refine the grid (e.g. double every step count)";
    throw std::runtime_error(msg.str());
}

} // namespace

void QuadratureSpec::validate() const
{
    if (rotation_steps < 8 || scale_steps < 8 || translation_steps < 8 || sigma_steps < 8)
        throw std::invalid_argument("quadrature step counts must be at least 8");
    if (!(scale_halfwidth > 0.0) || !(translation_halfwidth > 0.0))
        throw std::invalid_argument("quadrature half-widths must be positive");
    if (!sigma_range.empty() && !(sigma_range.lo > 0.0 && std::isfinite(sigma_range.hi)))
        throw std::invalid_argument("sigma range must be positive and finite");
    if (translation_range && (translation_range->empty() || !std::isfinite(translation_range->lo) ||
                              !std::isfinite(translation_range->hi)))
        throw std::invalid_argument("translation range must be a finite nonempty interval");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("quadrature tolerance must be positive");
}

QuadratureSpec QuadratureSpec::refined() const
{
    QuadratureSpec r = *this;
    r.rotation_steps *= 2;
    r.scale_steps *= 2;
    r.translation_steps *= 2;
    r.sigma_steps *= 2;
    return r;
}

double closed_form_offset_2d(int n, double alpha)
{
    const double nd = n;
    return (2.0 - nd) * std::log(kTwoPi) - std::log(nd) + std::lgamma(nd + alpha) + (nd + alpha) * std::log(2.0);
}

OracleResult brute_marginal_2d(std::span<const Complex> y, std::span<const Complex> v,
                               const planar::Regulators& regs, const QuadratureSpec& spec)
{
    if (y.size() != v.size())
        throw std::invalid_argument("point counts differ");
    if (y.size() < 2)
        throw std::invalid_argument("need at least 2 points");
    regs.validate();
    spec.validate();

    const double fine = log_marginal_2d_grid(y, v, regs, spec);
    const double coarse = log_marginal_2d_grid(y, v, regs, coarsened(spec));
    const double err = std::abs(fine - coarse) / 3.0;
    if (!(err <= spec.tolerance))
        not_converged(err, spec.tolerance);
    return {fine, err};
}

OracleResult brute_translation_marginal_3d(std::span<const Point3> y, std::span<const Point3> v_rot, double sigma,
                                           const QuadratureSpec& spec)
{
    if (y.size() != v_rot.size() || y.empty())
        throw std::invalid_argument("point counts differ or are zero");
    if (!(sigma > 0.0))
        throw std::invalid_argument("sigma must be positive");
    spec.validate();

    auto evaluate = [&](int steps) {
        double total = 0.0;
        std::vector<double> r(y.size());
        for (int axis = 0; axis < 3; ++axis)
        {
            for (std::size_t i = 0; i < y.size(); ++i)
                r[i] = y[i][axis] - v_rot[i][axis];
            const auto [mn, mx] = std::minmax_element(r.begin(), r.end());
            const double need_lo = *mn - 6.0 * sigma;
            const double need_hi = *mx + 6.0 * sigma;
            double lo = need_lo, hi = need_hi;
            if (spec.translation_range)
            {
                lo = spec.translation_range->lo;
                hi = spec.translation_range->hi;
                if (lo > need_lo || hi < need_hi)
                    throw std::invalid_argument("translation range does not cover the residual span plus 6 sigma");
            }
            // the integrand is a Gaussian of width sigma / sqrt(n); keep at least
            // four nodes per width even on the coarse pass
            const double width = sigma / std::sqrt(static_cast<double>(y.size()));
            const int dense = static_cast<int>(std::ceil(4.0 * (hi - lo) / width));
            total += log_axis_integral(r, sigma, lo, hi, std::max(steps, dense * steps / spec.translation_steps));
        }
        return total;
    };

    const double fine = evaluate(spec.translation_steps);
    const double coarse = evaluate(spec.translation_steps / 2);
    const double err = std::abs(fine - coarse) / 3.0;
    if (!(err <= spec.tolerance))
        not_converged(err, spec.tolerance);
    return {fine, err};
}

Eq2Report verify_eq2(int trials, int trials_5, double tol, std::uint64_t seed, const planar::Regulators& regs,
                     const QuadratureSpec& spec)
{
    if (trials < 2)
        throw std::invalid_argument("verify eq2 needs at least 2 trials");
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
    planar::Regulators absolute = regs;
    absolute.zeta_relative = false;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    auto random_points = [&](int n) {
        std::vector<Complex> z;
        for (int i = 0; i < n; ++i)
        {
            const double x = coord(rng);
            const double y = coord(rng);
            z.emplace_back(x, y);
        }
        return z;
    };

    Eq2Report report;
    report.tolerance = tol;
    std::map<int, std::pair<double, double>> range;
    for (int t = 0; t < trials + trials_5; ++t)
    {
        const int n = t < trials ? 3 : 5;
        const auto y = random_points(n);
        const auto v = random_points(n);
        const auto stats = planar::suff_stats(y, v);
        Eq2Trial tr;
        tr.n = n;
        tr.closed_form = planar::log_marginal_kernel(stats, n, absolute);
        const auto brute = brute_marginal_2d(y, v, absolute, spec);
        tr.brute = brute.log_value;
        tr.error_estimate = brute.error_estimate;
        const double diff = tr.brute - tr.closed_form;
        tr.residual = diff - closed_form_offset_2d(n, absolute.alpha);
        auto [it, fresh] = range.try_emplace(n, diff, diff);
        if (!fresh)
        {
            it->second.first = std::min(it->second.first, diff);
            it->second.second = std::max(it->second.second, diff);
        }
        report.max_residual = std::max(report.max_residual, std::abs(tr.residual));
        report.trials.push_back(tr);
    }
    for (const auto& [n, r] : range)
        report.max_spread = std::max(report.max_spread, r.second - r.first);
    report.pass = report.max_spread <= tol;
    return report;
}

} // namespace shapemap::oracle
