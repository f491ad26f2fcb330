#include "shapemap/quat3d.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace shapemap::quat
{

namespace
{

constexpr int kStreams = 16;

Point3 mean_of(std::span<const Point3> pts)
{
    Point3 m = Point3::Zero();
    for (const auto& p : pts)
        m += p;
    return m / static_cast<double>(pts.size());
}

void check_pair(std::size_t ny, std::size_t nv, std::size_t min_count)
{
    if (ny != nv)
        throw std::invalid_argument("point counts differ: " + std::to_string(ny) + " vs " + std::to_string(nv));
    if (ny < min_count)
        throw std::invalid_argument("need at least " + std::to_string(min_count) + " points");
}

void check_sigma(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be positive");
}

// Streaming log-mean-exp with second moment, shifted by the running maximum.
struct ExpAccumulator
{
    double shift = -std::numeric_limits<double>::infinity();
    double s1 = 0.0;
    double s2 = 0.0;
    std::uint64_t count = 0;

    void add(double x)
    {
        if (x > shift)
        {
            const double r = std::exp(shift - x);
            s1 *= r;
            s2 *= r * r;
            shift = x;
        }
        const double e = std::exp(x - shift);
        s1 += e;
        s2 += e * e;
        ++count;
    }

    void merge(const ExpAccumulator& o)
    {
        if (o.count == 0)
            return;
        if (o.shift > shift)
        {
            const double r = std::exp(shift - o.shift);
            s1 *= r;
            s2 *= r * r;
            shift = o.shift;
        }
        const double r = std::exp(o.shift - shift);
        s1 += o.s1 * r;
        s2 += o.s2 * r * r;
        count += o.count;
    }
};

} // namespace

Quaternion Quaternion::unit(double a, double b, double c, double d)
{
    const Quaternion q(a, b, c, d);
    const double n = q.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("cannot normalize a zero or non-finite quaternion");
    return {a / n, b / n, c / n, d / n};
}

double Quaternion::norm() const { return std::sqrt(norm2()); }

Quaternion quat_multiply(const Quaternion& p, const Quaternion& q)
{
    return {p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a};
}

Quaternion quat_commutator(const Quaternion& p, const Quaternion& q)
{
    return p * q - q * p;
}

Point3 rotate(const Quaternion& q, const Point3& p)
{
    if (std::abs(q.norm2() - 1.0) > 1e-12)
        throw std::invalid_argument("rotation quaternion must have unit norm");
    const Quaternion r = q * Quaternion(0.0, p.x(), p.y(), p.z()) * q.conj();
    return r.vector_part();
}

Eigen::Matrix3d rotation_matrix(const Quaternion& q)
{
    Eigen::Matrix3d R;
    for (int k = 0; k < 3; ++k)
        R.col(k) = rotate(q, Point3::Unit(k));
    return R;
}

double translation_marginal_exponent(std::span<const Point3> y, std::span<const Point3> v_rotated, double sigma)
{
    check_pair(y.size(), v_rotated.size(), 1);
    check_sigma(sigma);
    // |sum Y|^2 / n - sum |Y|^2 == -sum |Y - mean Y|^2, evaluated in the
    // centred form to avoid cancellation.
    std::vector<Point3> residual(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        residual[i] = y[i] - v_rotated[i];
    const Point3 m = mean_of(residual);
    double ss = 0.0;
    for (const auto& r : residual)
        ss += (r - m).squaredNorm();
    return -ss / (2.0 * sigma * sigma);
}

RotationKernel RotationKernel::from_matrix(const Eigen::Matrix4d& N, int n, double sigma)
{
    check_sigma(sigma);
    const double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
    if ((N - N.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("rotation kernel matrix must be symmetric");

    RotationKernel k;
    k.N = 0.5 * (N + N.transpose());
    k.n = n;
    k.sigma = sigma;
    k.scale_factor = 1.0 / (sigma * sigma);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k.N);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigen-decomposition of the rotation kernel failed");
    // ascending -> descending
    for (int i = 0; i < 4; ++i)
    {
        k.eigenvalues[i] = es.eigenvalues()[3 - i];
        k.eigenvectors.col(i) = es.eigenvectors().col(3 - i);
    }
    return k;
}

RotationKernel build_rotation_kernel(std::span<const Point3> y, std::span<const Point3> v, double sigma)
{
    check_pair(y.size(), v.size(), 3);
    check_sigma(sigma);
    const Point3 my = mean_of(y);
    const Point3 mv = mean_of(v);

    // S(a, b) = sum_i v~_a y~_b
    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < y.size(); ++i)
        S += (v[i] - mv) * (y[i] - my).transpose();

    const double sxx = S(0, 0), sxy = S(0, 1), sxz = S(0, 2);
    const double syx = S(1, 0), syy = S(1, 1), syz = S(1, 2);
    const double szx = S(2, 0), szy = S(2, 1), szz = S(2, 2);

    Eigen::Matrix4d N;
    N << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
         syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
         szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
         sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;

    return RotationKernel::from_matrix(N, static_cast<int>(y.size()), sigma);
}

double cross_correlation_direct(std::span<const Point3> y, std::span<const Point3> v, const Quaternion& q)
{
    check_pair(y.size(), v.size(), 1);
    const Point3 my = mean_of(y);
    const Point3 mv = mean_of(v);
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        total += (y[i] - my).dot(rotate(q, v[i] - mv));
    return total;
}

std::complex<double> detM(const RotationKernel& kernel, double k)
{
    std::complex<double> det(1.0, 0.0);
    for (int i = 0; i < 4; ++i)
        det *= std::complex<double>(kernel.scale_factor * kernel.eigenvalues[i], k);
    return det;
}

std::complex<double> detM_dense(const RotationKernel& kernel, double k)
{
    Eigen::Matrix4cd M = (kernel.scale_factor * kernel.N).cast<std::complex<double>>();
    M.diagonal().array() += std::complex<double>(0.0, k);
    return M.partialPivLu().determinant();
}

Quaternion uniform_unit_quaternion(const std::array<double, 4>& g)
{
    return Quaternion::unit(g[0], g[1], g[2], g[3]);
}

MarginalEstimate rotation_marginal_mc(const RotationKernel& kernel, std::uint64_t samples, std::uint64_t seed,
                                      SphereDomain domain)
{
    if (samples < 1000)
        throw std::invalid_argument("rotation_marginal_mc needs at least 1000 samples");

    const Eigen::Matrix4d A = kernel.scale_factor * kernel.N;
    auto run_stream = [&](int stream, std::uint64_t quota) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> gauss;
        ExpAccumulator acc;
        while (acc.count < quota)
        {
            Eigen::Vector4d g;
            for (int c = 0; c < 4; ++c)
                g[c] = gauss(rng);
            const double norm = g.norm();
            if (!(norm > 0.0))
                continue;
            g /= norm;
            if (domain == SphereDomain::hemisphere && g[0] < 0.0)
                continue;
            acc.add(g.dot(A * g));
        }
        return acc;
    };

    std::vector<std::future<ExpAccumulator>> futures;
    for (int s = 0; s < kStreams; ++s)
    {
        const std::uint64_t quota = samples / kStreams + (static_cast<std::uint64_t>(s) < samples % kStreams ? 1 : 0);
        futures.push_back(std::async(std::launch::async, run_stream, s, quota));
    }
    ExpAccumulator total;
    for (auto& f : futures)
        total.merge(f.get());

    const double N = static_cast<double>(total.count);
    const double mean = total.s1 / N;
    const double var = std::max(0.0, total.s2 / N - mean * mean) * N / (N - 1.0);

    MarginalEstimate out;
    out.log_value = total.shift + std::log(mean);
    out.std_error = std::sqrt(var / N) / mean;
    out.samples = total.count;
    return out;
}

std::vector<double> inverse_sqrt_product_coefficients(std::span<const double> d, int order)
{
    // log prod (1 + d_i z)^(-1/2) = sum_j g_j z^j, g_j = (-1)^j p_j / (2 j)
    std::vector<double> g(order + 1, 0.0);
    for (int j = 1; j <= order; ++j)
    {
        double pj = 0.0;
        for (double di : d)
            pj += std::pow(di, j);
        g[j] = (j % 2 == 0 ? 1.0 : -1.0) * pj / (2.0 * j);
    }
    // exponentiate the series: m c_m = sum_j j g_j c_{m-j}
    std::vector<double> c(order + 1, 0.0);
    c[0] = 1.0;
    for (int m = 1; m <= order; ++m)
    {
        double acc = 0.0;
        for (int j = 1; j <= m; ++j)
            acc += j * g[j] * c[m - j];
        c[m] = acc / m;
    }
    return c;
}

MarginalEstimate rotation_marginal_series(const RotationKernel& kernel, int order)
{
    if (order < 1)
        throw std::invalid_argument("series order must be at least 1");

    std::array<double, 4> lambda;
    double mean = 0.0;
    for (int i = 0; i < 4; ++i)
    {
        lambda[i] = kernel.scale_factor * kernel.eigenvalues[i];
        mean += lambda[i] / 4.0;
    }
    std::array<double, 4> d;
    for (int i = 0; i < 4; ++i)
        d[i] = mean - lambda[i];

    const auto c = inverse_sqrt_product_coefficients(d, order);
    // term-by-term Fourier integral: int dk e^{-ik} (mu - ik)^{-(m+2)} ~ 1/(m+1)!
    std::vector<double> terms(order + 1);
    double factorial = 1.0;
    for (int m = 0; m <= order; ++m)
    {
        factorial *= (m + 1);
        terms[m] = c[m] / factorial;
    }

    // c_1 vanishes (sum d_i = 0) and odd terms vanish for symmetric
    // spectra; such round-off level terms are skipped in the ratio test.
    constexpr double kNegligible = 1e-14;
    const double last = std::abs(terms[order]);
    if (last > kNegligible)
    {
        int prev = order - 1;
        while (prev > 0 && std::abs(terms[prev]) <= kNegligible)
            --prev;
        if (last >= std::abs(terms[prev]))
            throw std::domain_error("series outside radius");
    }

    double sum = 0.0;
    for (int m = order; m >= 0; --m)
        sum += terms[m];
    if (!(sum > 0.0))
        throw std::domain_error("series outside radius");

    MarginalEstimate out;
    out.log_value = mean + std::log(sum);
    return out;
}

} // namespace shapemap::quat
