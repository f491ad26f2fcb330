#pragma once

#include "shapemap/shape.hpp"

#include <cstdint>
#include <vector>

namespace shapemap
{

/// Row-major boolean raster; `true` marks foreground.
class BinaryImage
{
public:
    BinaryImage(int width, int height);
    BinaryImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_ &&
               pixels_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v) { pixels_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    std::size_t count() const;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// Largest 8-connected foreground component as its own image.
BinaryImage largest_component(const BinaryImage& img);

/// Outer boundary of the largest 8-connected foreground component.
///
/// Moore-neighbour tracing with Jacob's stopping criterion, starting from the
/// top-left foreground pixel. Points are pixel centres in a y-up frame
/// (x = column, y = height - 1 - row), ordered counter-clockwise.
///
/// Throws std::invalid_argument("no foreground") on an empty image and
/// std::invalid_argument("degenerate region") when the trace has fewer than
/// three distinct points.
Shape2 extract_boundary(const BinaryImage& img);

/// Foreground pixels of `img` with at least one background 4-neighbour.
std::vector<std::pair<int, int>> boundary_pixels(const BinaryImage& img);

} // namespace shapemap
