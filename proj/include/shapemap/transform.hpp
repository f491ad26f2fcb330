#pragma once

#include "shapemap/shape.hpp"

namespace shapemap
{

/// Planar similarity g: p -> scale * R(rotation) * p + translation.
struct SimilarityTransform2
{
    double rotation = 0.0;
    double scale = 1.0;
    Point2 translation = Point2::Zero();

    SimilarityTransform2() = default;
    SimilarityTransform2(double rotation, double scale, Point2 translation);

    static SimilarityTransform2 identity() { return {}; }

    Point2 apply(const Point2& p) const;
};

/// Transform equivalent to applying `first`, then `second`.
SimilarityTransform2 compose(const SimilarityTransform2& second, const SimilarityTransform2& first);

Shape2 apply_transform(const Shape2& s, const SimilarityTransform2& g);

} // namespace shapemap
