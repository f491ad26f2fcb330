#pragma once

#include "shapemap/boundary.hpp"
#include "shapemap/shape.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace shapemap::io
{

/// {"dim": 2|3, "closed": bool, "label": str?, "points": [[x, y(, z)], ...]}
nlohmann::json to_json(const AnyShape& s);
AnyShape shape_from_json(const nlohmann::json& j);

Shape2 shape2_from_json(const nlohmann::json& j);
Shape3 shape3_from_json(const nlohmann::json& j);

/// Plain 2D CSV, one "x,y" row per point. Lines starting with '#' and a
/// non-numeric header row are skipped. Shapes read from CSV are closed.
Shape2 read_csv(std::istream& in);

/// PGM (P2 or P5, maxval <= 65535). Pixels below `threshold` are foreground,
/// or at/above it when `invert` is set.
BinaryImage read_pgm(std::istream& in, int threshold = 128, bool invert = false);
void write_pgm(std::ostream& out, const BinaryImage& img);

struct LoadOptions
{
    int threshold = 128;
    bool invert = false;
};

/// Dispatch on extension: .json, .csv, .pgm (boundary extracted).
AnyShape load_shape(const std::filesystem::path& path, const LoadOptions& opts = {});
Shape2 load_shape2(const std::filesystem::path& path, const LoadOptions& opts = {});
Shape3 load_shape3(const std::filesystem::path& path);

/// .csv writes an "x,y" header and one row per point (2D only); anything
/// else is written as JSON.
void save_shape(const std::filesystem::path& path, const AnyShape& s);

bool is_shape_file(const std::filesystem::path& path);

} // namespace shapemap::io
