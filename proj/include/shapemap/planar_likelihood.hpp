#pragma once

#include "shapemap/shape.hpp"

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace shapemap::planar
{

using Complex = std::complex<double>;

enum class EffectiveCount
{
    equal_n, ///< n_tilde = number of points
};

/// How the sum over correspondences is reduced.
enum class CorrespondenceMode
{
    map,      ///< best single correspondence
    marginal, ///< log-mean-exp over all correspondences (uniform P(b))
};

/// Regularization constants of the closed-form marginal.
///
/// `B` damps the scale/rotation prior, `alpha` and `zeta` are the shape and
/// rate of the Gamma prior on the noise precision. With `zeta_relative` the
/// effective zeta is `zeta * diameter(y)^2`, which keeps the classifier
/// exactly invariant to the scale of the data.
struct Regulators
{
    double B = 1e3;
    double alpha = 1.0;
    double zeta = 1e-8;
    bool zeta_relative = true;
    EffectiveCount count_mode = EffectiveCount::equal_n;
    CorrespondenceMode corr_mode = CorrespondenceMode::marginal;

    /// Throws std::invalid_argument unless B, alpha, zeta are positive and finite.
    void validate() const;
    double effective_zeta(double data_scale_sq) const
    {
        return zeta_relative ? zeta * data_scale_sq : zeta;
    }
};

std::string_view to_string(CorrespondenceMode m);
CorrespondenceMode parse_corr_mode(std::string_view s);

/// Centred second moments of data y and template v, points read as complex
/// numbers z = x + i y.
struct SufficientStats
{
    double n_tilde = 0.0;
    double var_y = 0.0;
    double var_v = 0.0;
    /// (1/n~) [sum v_i conj(y_i) - (1/n~) sum_i sum_j v_i conj(y_j)]
    Complex cov_vy{0.0, 0.0};
    /// Squared diameter of y; scales zeta when it is relative.
    double data_scale_sq = 0.0;
};

std::vector<Complex> to_complex(std::span<const Point2> pts);

/// Throws std::invalid_argument on mismatched or empty inputs.
SufficientStats suff_stats(std::span<const Complex> y, std::span<const Complex> v,
                           EffectiveCount mode = EffectiveCount::equal_n);
SufficientStats suff_stats(const Shape2& y, const Shape2& v,
                           EffectiveCount mode = EffectiveCount::equal_n);

/// n~ Var(y) - n~^2 |Cov(v,y)|^2 / (n~ Var(v) + 1/B^2) + 2 zeta
double bracket(const SufficientStats& stats, const Regulators& regs);

/// -(n + alpha) log(bracket). The class-independent normalizer is omitted.
/// Throws std::domain_error("regulator underflow") for a nonpositive bracket.
double log_marginal_kernel(const SufficientStats& stats, int n, const Regulators& regs);

/// Restricted bijection: template index (i + offset) mod n, read backwards
/// from the same start when reversed, is paired with data index i.
struct Correspondence
{
    int cyclic_offset = 0;
    bool reversed = false;

    bool operator==(const Correspondence&) const = default;
};

struct CorrespondenceResult
{
    Correspondence best;
    /// Maximum over correspondences in `map` mode, log-mean-exp in `marginal`.
    double value = 0.0;
    /// Kernel value at `best`.
    double best_value = 0.0;
};

/// Template points reordered by a correspondence.
std::vector<Complex> permute(std::span<const Complex> v, const Correspondence& c);

/// Evaluates every cyclic offset (and reversed orientation when allowed).
/// Ties keep the smallest offset, forward before reversed.
/// Throws std::invalid_argument when point counts differ.
CorrespondenceResult best_correspondence(std::span<const Complex> y, std::span<const Complex> v,
                                         const Regulators& regs, bool allow_reversal);
CorrespondenceResult best_correspondence(const Shape2& y, const Shape2& v, const Regulators& regs,
                                         bool allow_reversal);

} // namespace shapemap::planar
