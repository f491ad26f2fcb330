#include "shapemap/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shapemap::io
{

namespace
{

template <int Dim>
nlohmann::json shape_json(const Shape<Dim>& s)
{
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points())
    {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < Dim; ++k)
            row.push_back(p[k]);
        pts.push_back(std::move(row));
    }
    nlohmann::json j{{"dim", Dim}, {"closed", s.closed()}, {"points", std::move(pts)}};
    if (s.label())
        j["label"] = *s.label();
    return j;
}

template <int Dim>
Shape<Dim> shape_from(const nlohmann::json& j)
{
    const int dim = j.value("dim", Dim);
    if (dim != Dim)
        throw std::invalid_argument("expected a " + std::to_string(Dim) + "D shape, got dim " + std::to_string(dim));
    const bool closed = j.value("closed", true);
    std::optional<std::string> label;
    if (j.contains("label") && j["label"].is_string())
        label = j["label"].get<std::string>();

    std::vector<typename Shape<Dim>::Point> pts;
    for (const auto& row : j.at("points"))
    {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(Dim))
            throw std::invalid_argument("point row does not have " + std::to_string(Dim) + " coordinates");
        typename Shape<Dim>::Point p;
        for (int k = 0; k < Dim; ++k)
            p[k] = row[k].get<double>();
        pts.push_back(p);
    }
    // tolerate an explicitly repeated closing point
    if (closed && pts.size() > 3 && pts.front() == pts.back())
        pts.pop_back();
    return Shape<Dim>(std::move(pts), closed, std::move(label));
}

// Next whitespace/comment-delimited token of a PGM header.
std::string pgm_token(std::istream& in)
{
    std::string tok;
    int c;
    while ((c = in.get()) != EOF)
    {
        if (c == '#')
        {
            while ((c = in.get()) != EOF && c != '\n')
                ;
            continue;
        }
        if (std::isspace(c))
        {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty())
        throw std::invalid_argument("truncated PGM header");
    return tok;
}

} // namespace

nlohmann::json to_json(const AnyShape& s)
{
    return std::visit([](const auto& shape) { return shape_json(shape); }, s);
}

AnyShape shape_from_json(const nlohmann::json& j)
{
    if (j.value("dim", 2) == 3)
        return shape_from<3>(j);
    return shape_from<2>(j);
}

Shape2 shape2_from_json(const nlohmann::json& j) { return shape_from<2>(j); }
Shape3 shape3_from_json(const nlohmann::json& j) { return shape_from<3>(j); }

Shape2 read_csv(std::istream& in)
{
    std::vector<Point2> pts;
    std::string line;
    bool first_row = true;
    while (std::getline(in, line))
    {
        line.erase(std::remove(line.begin(), line.end(), '\r'), line.end());
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, y;
        if (!(row >> x >> y))
        {
            if (first_row)
            {
                first_row = false;
                continue;
            }
            throw std::invalid_argument("malformed CSV row: " + line);
        }
        first_row = false;
        pts.emplace_back(x, y);
    }
    if (pts.size() > 3 && pts.front() == pts.back())
        pts.pop_back();
    return Shape2(std::move(pts), true);
}

BinaryImage read_pgm(std::istream& in, int threshold, bool invert)
{
    const std::string magic = pgm_token(in);
    if (magic != "P5" && magic != "P2")
        throw std::invalid_argument("not a PGM file (magic " + magic + ")");
    const int width = std::stoi(pgm_token(in));
    const int height = std::stoi(pgm_token(in));
    const int maxval = std::stoi(pgm_token(in));
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw std::invalid_argument("invalid PGM dimensions");

    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> pixels(count);
    auto classify = [&](int v) -> std::uint8_t { return ((v < threshold) != invert) ? 1 : 0; };

    if (magic == "P2")
    {
        for (std::size_t i = 0; i < count; ++i)
            pixels[i] = classify(std::stoi(pgm_token(in)));
    }
    else
    {
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> raw(count * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw std::invalid_argument("truncated PGM raster");
        for (std::size_t i = 0; i < count; ++i)
        {
            const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
            pixels[i] = classify(v);
        }
    }
    return BinaryImage(width, height, std::move(pixels));
}

void write_pgm(std::ostream& out, const BinaryImage& img)
{
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.put(static_cast<char>(img.at(x, y) ? 0 : 255));
}

bool is_shape_file(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".json" || ext == ".csv" || ext == ".pgm";
}

AnyShape load_shape(const std::filesystem::path& path, const LoadOptions& opts)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());

    if (ext == ".json")
        return shape_from_json(nlohmann::json::parse(in));
    if (ext == ".csv")
        return read_csv(in);
    if (ext == ".pgm")
        return extract_boundary(read_pgm(in, opts.threshold, opts.invert));
    throw std::invalid_argument("unsupported shape file: " + path.string());
}

Shape2 load_shape2(const std::filesystem::path& path, const LoadOptions& opts)
{
    auto s = load_shape(path, opts);
    if (auto* s2 = std::get_if<Shape2>(&s))
        return std::move(*s2);
    throw std::invalid_argument(path.string() + " is not a 2D shape");
}

Shape3 load_shape3(const std::filesystem::path& path)
{
    auto s = load_shape(path);
    if (auto* s3 = std::get_if<Shape3>(&s))
        return std::move(*s3);
    throw std::invalid_argument(path.string() + " is not a 3D shape");
}

void save_shape(const std::filesystem::path& path, const AnyShape& s)
{
    const bool csv = path.extension() == ".csv";
    if (csv && !std::holds_alternative<Shape2>(s))
        throw std::invalid_argument("CSV output supports 2D shapes only");
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    if (!csv)
    {
        out << to_json(s).dump(2) << '\n';
        return;
    }
    out.precision(17);
    out << "x,y\n";
    for (const auto& p : std::get<Shape2>(s).points())
        out << p.x() << ',' << p.y() << '\n';
}

} // namespace shapemap::io
