#include "shapemap/boundary.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace shapemap
{

namespace
{

struct Offset
{
    int dx;
    int dy;
};

// Clockwise on screen (rows grow downwards), starting west.
constexpr std::array<Offset, 8> kMoore{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

int direction_of(int dx, int dy)
{
    for (int i = 0; i < 8; ++i)
        if (kMoore[i].dx == dx && kMoore[i].dy == dy)
            return i;
    throw std::logic_error("backtrack pixel is not a Moore neighbour");
}

} // namespace

BinaryImage::BinaryImage(int width, int height)
    : BinaryImage(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                                            static_cast<std::size_t>(std::max(height, 0))))
{
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels))
{
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("pixel buffer does not match image dimensions");
}

std::size_t BinaryImage::count() const
{
    return static_cast<std::size_t>(std::count_if(pixels_.begin(), pixels_.end(), [](auto p) { return p != 0; }));
}

BinaryImage largest_component(const BinaryImage& img)
{
    const int w = img.width();
    const int h = img.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::size_t> sizes;
    std::vector<std::pair<int, int>> stack;

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
        {
            if (!img.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0)
                continue;
            const int id = static_cast<int>(sizes.size());
            std::size_t size = 0;
            stack.push_back({x, y});
            label[static_cast<std::size_t>(y) * w + x] = id;
            while (!stack.empty())
            {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++size;
                for (const auto& o : kMoore)
                {
                    const int nx = cx + o.dx;
                    const int ny = cy + o.dy;
                    if (img.at(nx, ny) && label[static_cast<std::size_t>(ny) * w + nx] < 0)
                    {
                        label[static_cast<std::size_t>(ny) * w + nx] = id;
                        stack.push_back({nx, ny});
                    }
                }
            }
            sizes.push_back(size);
        }

    if (sizes.empty())
        throw std::invalid_argument("no foreground");

    // first component in raster order wins ties
    const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    BinaryImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (label[static_cast<std::size_t>(y) * w + x] == keep)
                out.set(x, y, true);
    return out;
}

Shape2 extract_boundary(const BinaryImage& img)
{
    const BinaryImage comp = largest_component(img);

    int sx = -1, sy = -1;
    for (int y = 0; y < comp.height() && sx < 0; ++y)
        for (int x = 0; x < comp.width(); ++x)
            if (comp.at(x, y))
            {
                sx = x;
                sy = y;
                break;
            }

    // Raster order guarantees the west neighbour of the start is background.
    const int start_bx = sx - 1;
    const int start_by = sy;

    std::vector<std::pair<int, int>> trace{{sx, sy}};
    int px = sx, py = sy, bx = start_bx, by = start_by;
    const std::size_t max_steps = 8 * comp.count() + 8;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(comp.width()) * comp.height(), 0);
    visited[static_cast<std::size_t>(sy) * comp.width() + sx] = 1u << direction_of(-1, 0);

    for (std::size_t step = 0; step < max_steps; ++step)
    {
        const int k = direction_of(bx - px, by - py);
        bool moved = false;
        for (int i = 1; i <= 8; ++i)
        {
            const auto& o = kMoore[(k + i) % 8];
            if (comp.at(px + o.dx, py + o.dy))
            {
                const auto& prev = kMoore[(k + i - 1) % 8];
                bx = px + prev.dx;
                by = py + prev.dy;
                px += o.dx;
                py += o.dy;
                moved = true;
                break;
            }
        }
        if (!moved)
            throw std::invalid_argument("degenerate region");
        // Jacob's criterion: stop on re-entering the start the same way.
        if (px == sx && py == sy && bx == start_bx && by == start_by)
            break;
        // Regions such as two-pixel strips never re-enter the start the same
        // way; any repeated (pixel, backtrack) state closes the loop.
        auto& seen = visited[static_cast<std::size_t>(py) * comp.width() + px];
        const auto bit = static_cast<std::uint8_t>(1u << direction_of(bx - px, by - py));
        if (seen & bit)
            break;
        seen |= bit;
        trace.push_back({px, py});
    }
    while (trace.size() > 1 && trace.back() == trace.front())
        trace.pop_back();

    if (trace.size() < 3)
        throw std::invalid_argument("degenerate region");

    std::vector<Point2> pts;
    pts.reserve(trace.size());
    for (auto [x, y] : trace)
        pts.emplace_back(static_cast<double>(x), static_cast<double>(comp.height() - 1 - y));

    Shape2 shape(std::move(pts), true);
    if (signed_area(shape.points()) < 0.0)
        return reversed(shape);
    return shape;
}

std::vector<std::pair<int, int>> boundary_pixels(const BinaryImage& img)
{
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (img.at(x, y) &&
                (!img.at(x - 1, y) || !img.at(x + 1, y) || !img.at(x, y - 1) || !img.at(x, y + 1)))
                out.push_back({x, y});
    return out;
}

} // namespace shapemap
