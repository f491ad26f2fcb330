#include "shapemap/shape.hpp"
#include "shapemap/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapemap
{

template <int Dim>
Shape<Dim>::Shape(std::vector<Point> points, bool closed, std::optional<std::string> label)
    : points_(std::move(points)), closed_(closed), label_(std::move(label))
{
    if (points_.size() < 3)
        throw std::invalid_argument("shape needs at least 3 points");
    for (const auto& p : points_)
        if (!p.allFinite())
            throw std::invalid_argument("shape has non-finite coordinates");
    for (std::size_t i = 1; i < points_.size(); ++i)
        if (points_[i] == points_[i - 1])
            throw std::invalid_argument("shape has identical consecutive points at index " +
                                        std::to_string(i));
    if (closed_ && points_.front() == points_.back())
        throw std::invalid_argument("closed shape repeats its first point at the end");
}

template class Shape<2>;
template class Shape<3>;

double signed_area(std::span<const Point2> pts)
{
    double a = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        const auto& p = pts[i];
        const auto& q = pts[(i + 1) % pts.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Shape2 reversed(const Shape2& s)
{
    std::vector<Point2> pts(s.points().begin(), s.points().end());
    std::reverse(pts.begin() + 1, pts.end());
    return Shape2(std::move(pts), s.closed(), s.label());
}

double diameter(std::span<const Point2> pts)
{
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    return std::sqrt(best);
}

SimilarityTransform2::SimilarityTransform2(double rotation, double scale, Point2 translation)
    : rotation(rotation), scale(scale), translation(std::move(translation))
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("similarity scale must be positive");
}

Point2 SimilarityTransform2::apply(const Point2& p) const
{
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return {scale * (c * p.x() - s * p.y()) + translation.x(),
            scale * (s * p.x() + c * p.y()) + translation.y()};
}

SimilarityTransform2 compose(const SimilarityTransform2& second, const SimilarityTransform2& first)
{
    SimilarityTransform2 out;
    out.rotation = first.rotation + second.rotation;
    out.scale = first.scale * second.scale;
    out.translation = second.apply(first.translation);
    return out;
}

Shape2 apply_transform(const Shape2& s, const SimilarityTransform2& g)
{
    std::vector<Point2> pts;
    pts.reserve(s.size());
    for (const auto& p : s.points())
        pts.push_back(g.apply(p));
    return Shape2(std::move(pts), s.closed(), s.label());
}

} // namespace shapemap
