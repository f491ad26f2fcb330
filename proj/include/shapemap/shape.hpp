#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace shapemap
{

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

/// Ordered boundary samples of a 2D or 3D outline.
///
/// Construction validates the invariants: at least three points, finite
/// coordinates, and no two consecutive points equal (for closed shapes the
/// last/first pair counts as consecutive). Numeric routines take
/// `std::span<const Point>` so that degenerate point sets, which are not
/// valid shapes, can still be passed to them.
template <int Dim>
class Shape
{
public:
    using Point = Eigen::Matrix<double, Dim, 1>;

    Shape(std::vector<Point> points, bool closed = true,
          std::optional<std::string> label = std::nullopt);

    static constexpr int dim() { return Dim; }

    std::span<const Point> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }

    bool closed() const { return closed_; }
    const std::optional<std::string>& label() const { return label_; }
    void set_label(std::optional<std::string> label) { label_ = std::move(label); }

private:
    std::vector<Point> points_;
    bool closed_;
    std::optional<std::string> label_;
};

using Shape2 = Shape<2>;
using Shape3 = Shape<3>;
using AnyShape = std::variant<Shape2, Shape3>;

extern template class Shape<2>;
extern template class Shape<3>;

/// Signed area of a closed 2D polyline (positive for counter-clockwise).
double signed_area(std::span<const Point2> pts);

/// Same points in the opposite traversal order, first point kept in place.
Shape2 reversed(const Shape2& s);

/// Largest pairwise distance between points.
double diameter(std::span<const Point2> pts);

} // namespace shapemap
