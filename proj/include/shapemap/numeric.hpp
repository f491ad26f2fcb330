#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace shapemap
{

/// Neumaier compensated summation. The result is, to working precision,
/// independent of the order in which terms are added.
class CompensatedSum
{
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double x)
    {
        add(x);
        return *this;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// log(sum(exp(x))), max-shifted. Returns -inf for an empty range.
inline double log_sum_exp(std::span<const double> xs)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs)
        m = std::max(m, x);
    if (!std::isfinite(m))
        return m;
    CompensatedSum s;
    for (double x : xs)
        s += std::exp(x - m);
    return m + std::log(s.value());
}

inline double log_mean_exp(std::span<const double> xs)
{
    return log_sum_exp(xs) - std::log(static_cast<double>(xs.size()));
}

} // namespace shapemap
