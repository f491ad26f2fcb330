#pragma once

#include "shapemap/planar_likelihood.hpp"
#include "shapemap/shape.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shapemap::oracle
{

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return !(hi > lo); }
};

/// Tensor-product trapezoid grid for the brute-force integrators.
///
/// Scale and translation ranges are half-widths in units of the conditional
/// posterior standard deviation around the conditional mode, so the grid
/// follows the integrand as sigma varies. `sigma_range` is absolute and is
/// chosen from the data when left empty. `translation_range` (3D only) is an
/// absolute per-axis interval, defaulting to the residual span plus 6 sigma.
/// In 3D the translation step count is raised where needed so the grid has at
/// least four nodes per posterior width sigma / sqrt(n).
struct QuadratureSpec
{
    int rotation_steps = 256;
    int scale_steps = 64;
    int translation_steps = 32;
    int sigma_steps = 96;
    double scale_halfwidth = 9.0;
    double translation_halfwidth = 9.0;
    Interval sigma_range{};
    std::optional<Interval> translation_range{};
    /// Maximum accepted Richardson error estimate of the log value.
    double tolerance = 1e-4;

    void validate() const;
    /// Every count doubled.
    QuadratureSpec refined() const;
};

struct OracleResult
{
    double log_value = 0.0;
    /// |I(h) - I(2h)| / 3 on the log scale.
    double error_estimate = 0.0;
};

/// log of the numerically integrated marginal likelihood of 2D data y given
/// template v, over rotation, scale, translation and noise level:
///
///   int dtau tau^(alpha-1) e^(-zeta tau)
///     int d^2t ds dtheta  s sigma^-4 (S_vv + 1/B^2) exp(-s^2 / (2 sigma^2 B^2))
///       (2 pi sigma^2)^-n exp(-sum |y_i - s e^(i theta) v_i - t|^2 / (2 sigma^2))
///
/// with tau = 1/sigma^2 and S_vv the centred template sum of squares. This
/// is the flat-translation, regularized Jeffreys-type group prior together
/// with a Gamma(alpha, zeta) precision prior; integrated in closed form it
/// equals the planar kernel plus
///   (2 - n) log(2 pi) - log n + lgamma(n + alpha) + (n + alpha) log 2,
/// a constant in the data and template.
///
/// `regs.zeta` is used as an absolute value here.
/// Throws std::runtime_error when the Richardson error estimate exceeds
/// `spec.tolerance`.
OracleResult brute_marginal_2d(std::span<const planar::Complex> y, std::span<const planar::Complex> v,
                               const planar::Regulators& regs, const QuadratureSpec& spec = {});

/// The additive constant separating brute_marginal_2d from the closed form.
double closed_form_offset_2d(int n, double alpha);

/// log int d^3t exp(-sum |y_i - v_i - t|^2 / (2 sigma^2)), per-axis trapezoid.
/// Equals translation_marginal_exponent + (3/2) log(2 pi sigma^2 / n).
OracleResult brute_translation_marginal_3d(std::span<const Point3> y, std::span<const Point3> v_rot,
                                           double sigma, const QuadratureSpec& spec = {});

struct Eq2Trial
{
    int n = 0;
    double closed_form = 0.0;
    double brute = 0.0;
    double error_estimate = 0.0;
    /// brute - closed_form - closed_form_offset_2d(n, alpha)
    double residual = 0.0;
};

struct Eq2Report
{
    std::vector<Eq2Trial> trials;
    /// Largest spread (max - min) of brute - closed_form within one n.
    double max_spread = 0.0;
    /// Largest |residual|.
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Random pairs of 3-point shapes (`trials` of them) plus `trials_5`
/// 5-point pairs, compared between the planar kernel and brute_marginal_2d.
/// Passes when brute - closed_form is constant within each n to `tol`.
/// `regs.zeta` is taken as absolute.
Eq2Report verify_eq2(int trials, int trials_5, double tol, std::uint64_t seed,
                     const planar::Regulators& regs, const QuadratureSpec& spec = {});

} // namespace shapemap::oracle
