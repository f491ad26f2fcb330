#pragma once

#include "shapemap/shape.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstdint>
#include <span>

namespace shapemap::quat
{

/// a + b i + c j + d k
struct Quaternion
{
    double a = 1.0, b = 0.0, c = 0.0, d = 0.0;

    Quaternion() = default;
    Quaternion(double a, double b, double c, double d) : a(a), b(b), c(c), d(d) {}

    /// Normalized copy; throws std::invalid_argument for a zero or
    /// non-finite input.
    static Quaternion unit(double a, double b, double c, double d);
    static Quaternion from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

    Eigen::Vector4d vec() const { return {a, b, c, d}; }
    Point3 vector_part() const { return {b, c, d}; }
    double norm2() const { return a * a + b * b + c * c + d * d; }
    double norm() const;
    Quaternion conj() const { return {a, -b, -c, -d}; }

    Quaternion operator-(const Quaternion& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Quaternion operator-() const { return {-a, -b, -c, -d}; }
};

/// Hamilton product.
Quaternion quat_multiply(const Quaternion& p, const Quaternion& q);
inline Quaternion operator*(const Quaternion& p, const Quaternion& q) { return quat_multiply(p, q); }

/// p q - q p. Scalar part is zero; vector part is 2 (p_vec x q_vec).
Quaternion quat_commutator(const Quaternion& p, const Quaternion& q);

/// Vector part of q (0, p) conj(q). Throws std::invalid_argument unless
/// |q|^2 = 1 to 1e-12.
Point3 rotate(const Quaternion& q, const Point3& p);

Eigen::Matrix3d rotation_matrix(const Quaternion& q);

/// Exponent of the translation-marginalized Gaussian,
/// |sum Y_i|^2 / (2 n sigma^2) - sum |Y_i|^2 / (2 sigma^2), Y_i = y_i - v_i.
double translation_marginal_exponent(std::span<const Point3> y, std::span<const Point3> v_rotated,
                                     double sigma);

/// Rotation-dependent part of the data/template Gaussian after translation
/// marginalization.
///
/// `N` is the symmetric 4x4 matrix with q^T N q = sum_i y~_i . R(q) v~_i for
/// unit q (centred points), so the rotation-dependent exponent term is
/// `scale_factor * q^T N q` with `scale_factor = 1 / sigma^2`.
/// Eigenvalues are sorted descending, eigenvectors in matching columns.
struct RotationKernel
{
    Eigen::Matrix4d N = Eigen::Matrix4d::Zero();
    Eigen::Vector4d eigenvalues = Eigen::Vector4d::Zero();
    Eigen::Matrix4d eigenvectors = Eigen::Matrix4d::Identity();
    int n = 0;
    double sigma = 1.0;
    double scale_factor = 1.0;

    /// Kernel for an arbitrary symmetric N (throws if N is not symmetric to
    /// 1e-12 or sigma <= 0).
    static RotationKernel from_matrix(const Eigen::Matrix4d& N, int n, double sigma);

    double quadratic_form(const Quaternion& q) const { return q.vec().dot(N * q.vec()); }
};

/// Throws std::invalid_argument for mismatched counts, fewer than 3 points or
/// sigma <= 0.
RotationKernel build_rotation_kernel(std::span<const Point3> y, std::span<const Point3> v, double sigma);

/// sum_i y~_i . R(q) v~_i evaluated by rotating every template point.
double cross_correlation_direct(std::span<const Point3> y, std::span<const Point3> v, const Quaternion& q);

/// det(scale_factor * N + i k I) as the product of shifted eigenvalues.
std::complex<double> detM(const RotationKernel& kernel, double k);

/// Same determinant from a dense complex LU factorization.
std::complex<double> detM_dense(const RotationKernel& kernel, double k);

struct MarginalEstimate
{
    double log_value = 0.0;
    /// Standard error of log_value (delta method); zero for closed forms.
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

enum class SphereDomain
{
    full,
    hemisphere, ///< samples with a < 0 rejected
};

/// log E_{q ~ uniform S^3} exp(scale_factor q^T N q).
///
/// Uniform samples are normalized 4D standard Gaussians. The budget is split
/// over fixed seeded streams and recombined in order, so the result depends
/// only on (kernel, samples, seed, domain). Throws for samples < 1000.
MarginalEstimate rotation_marginal_mc(const RotationKernel& kernel, std::uint64_t samples,
                                      std::uint64_t seed, SphereDomain domain = SphereDomain::full);

/// Series approximation of the same quantity.
///
/// The inverse square root of det M(k) is expanded about the isotropic part
/// (mean eigenvalue) and the Fourier k-integral is taken term by term:
///   log E = mean(lambda') + log sum_{m=0}^{order} c_m / (m + 1)!
/// where c_m are the power-series coefficients of prod_i (1 + d_i z)^{-1/2}
/// and d_i = mean(lambda') - lambda'_i. c_1 vanishes identically.
///
/// Throws std::domain_error("series outside radius") when the last retained
/// term is not smaller than the one before it.
MarginalEstimate rotation_marginal_series(const RotationKernel& kernel, int order);

/// Coefficients c_0..c_order of prod_i (1 + d_i z)^{-1/2}.
std::vector<double> inverse_sqrt_product_coefficients(std::span<const double> d, int order);

/// Uniform unit quaternion from four standard normals.
Quaternion uniform_unit_quaternion(const std::array<double, 4>& gaussians);

} // namespace shapemap::quat
