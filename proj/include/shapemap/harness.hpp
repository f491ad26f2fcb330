#pragma once

#include "shapemap/classifier.hpp"
#include "shapemap/shape.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace shapemap::bench
{

/// Benchmark configuration. A dataset is either a directory with one
/// sub-directory of shape files (.pgm/.json/.csv) per class, or a list of
/// synthetic families.
struct BenchmarkSpec
{
    int runs = 10;
    int shapes_per_run = 10;
    std::vector<int> n_points{50};
    double noise_sigma = 0.01;

    std::optional<std::filesystem::path> dataset_dir;
    std::vector<std::string> families{"ellipse", "rectangle"};
    /// Synthetic shapes generated per class and run.
    int synthetic_per_class = 10;
    /// Relative jitter of each family's shape parameter per instance.
    double shape_jitter = 0.0;
    /// Random similarity transform and sampling phase on synthetic shapes.
    bool random_pose = true;

    /// Fraction of each class used for training.
    double split = 0.5;
    /// Classify the training shapes themselves (sanity mode).
    bool test_on_train = false;
    std::uint64_t seed = 1;

    int pgm_threshold = 128;
    bool pgm_invert = false;

    classify::ClassifierOptions options{};

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct SampleCountStats
{
    int n = 0;
    /// Top-1 accuracy per run ("classification rate").
    std::vector<double> top1_per_run;
    /// Top-2 accuracy per run ("success rate").
    std::vector<double> top2_per_run;
    double top1_mean = 0.0;
    double top1_std = 0.0;
    double top2_mean = 0.0;
    double top2_std = 0.0;
};

struct BenchmarkReport
{
    std::vector<SampleCountStats> per_n;
    /// Spearman correlation of n against mean top-1 accuracy; NaN when fewer
    /// than two sample counts or a constant accuracy series.
    double spearman = 0.0;
    std::vector<std::string> warnings;
    nlohmann::json config;
    double wall_time_s = 0.0;
};

/// Mean and sample standard deviation (zero for a single value).
std::pair<double, double> mean_std(const std::vector<double>& xs);

/// Spearman rank correlation with average ranks for ties; NaN if either
/// series is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Repeated train/test evaluation at every n in spec.n_points.
/// Deterministic in (spec, seed). Throws std::invalid_argument when a class
/// has too few shapes for the split; the message names the class.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

/// run_benchmark over an ascending n sweep, with the Spearman trend filled in.
BenchmarkReport sweep_sample_count(const BenchmarkSpec& spec);

nlohmann::json to_json(const BenchmarkSpec& spec);
BenchmarkSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BenchmarkReport& report);
/// One "n,run,top1,top2" row per run.
std::string report_csv(const BenchmarkReport& report);

/// Resolves a relative dataset path against $SHAPEMAP_DATA when set.
std::filesystem::path resolve_dataset(const std::filesystem::path& p);

} // namespace shapemap::bench
