#include "shapemap/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace shapemap
{

namespace
{

template <int Dim>
class Polyline
{
public:
    using Point = Eigen::Matrix<double, Dim, 1>;

    explicit Polyline(const Shape<Dim>& s) : closed_(s.closed())
    {
        const auto pts = s.points();
        verts_.assign(pts.begin(), pts.end());
        if (closed_)
            verts_.push_back(pts.front());
        cumulative_.push_back(0.0);
        for (std::size_t i = 1; i < verts_.size(); ++i)
            cumulative_.push_back(cumulative_.back() + (verts_[i] - verts_[i - 1]).norm());
    }

    double length() const { return cumulative_.back(); }
    std::size_t segments() const { return verts_.size() - 1; }
    bool closed() const { return closed_; }

    /// Point at arc position t (wrapped for closed outlines).
    Point at(double t) const
    {
        const double L = length();
        if (closed_)
        {
            t = std::fmod(t, L);
            if (t < 0.0)
                t += L;
        }
        t = std::clamp(t, 0.0, L);
        std::size_t seg = segment_of(t);
        const double len = cumulative_[seg + 1] - cumulative_[seg];
        const double u = len > 0.0 ? (t - cumulative_[seg]) / len : 0.0;
        return verts_[seg] + u * (verts_[seg + 1] - verts_[seg]);
    }

private:
    std::size_t segment_of(double t) const
    {
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), t);
        std::size_t seg = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        return std::min(seg, segments() - 1);
    }

    std::vector<Point> verts_;
    std::vector<double> cumulative_;
    bool closed_;
};

template <int Dim>
void check_resample_args(int n, const Polyline<Dim>& line)
{
    if (n < 3)
        throw std::invalid_argument("resample count must be at least 3");
    if (!(line.length() > 0.0))
        throw std::invalid_argument("cannot resample a zero-length shape");
}

} // namespace

template <int Dim>
double arc_length(const Shape<Dim>& s)
{
    return Polyline<Dim>(s).length();
}

template <int Dim>
Shape<Dim> resample_equal_arc(const Shape<Dim>& s, int n)
{
    const Polyline<Dim> line(s);
    check_resample_args(n, line);
    const double step = line.length() / (s.closed() ? n : n - 1);
    std::vector<typename Shape<Dim>::Point> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(line.at(i * step));
    if (!s.closed())
        out.back() = s.points().back();
    return Shape<Dim>(std::move(out), s.closed(), s.label());
}

template <int Dim>
Shape<Dim> resample_arclength(const Shape<Dim>& s, int n)
{
    check_resample_args(n, Polyline<Dim>(s));
    if (static_cast<int>(s.size()) == n)
        return s;
    return resample_equal_arc(s, n);
}

template double arc_length(const Shape<2>&);
template double arc_length(const Shape<3>&);
template Shape<2> resample_arclength(const Shape<2>&, int);
template Shape<3> resample_arclength(const Shape<3>&, int);
template Shape<2> resample_equal_arc(const Shape<2>&, int);
template Shape<3> resample_equal_arc(const Shape<3>&, int);

} // namespace shapemap
