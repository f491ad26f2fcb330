#include "shapemap/harness.hpp"
#include "shapemap/io.hpp"
#include "shapemap/resample.hpp"
#include "shapemap/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace shapemap::bench
{

namespace
{

namespace fs = std::filesystem;

struct Item
{
    std::string label;
    // Loaded outline (directory datasets) or synthesis recipe.
    std::optional<Shape2> shape;
    FamilyVariation variation{};
    SimilarityTransform2 pose{};
    std::uint64_t noise_seed = 0;
};

struct RunOutcome
{
    std::vector<double> top1; // per n
    std::vector<double> top2;
    std::vector<std::string> warnings;
};

std::mt19937_64 run_rng(std::uint64_t seed, int run, std::uint32_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run), salt};
    return std::mt19937_64(seq);
}

std::vector<Item> load_directory(const BenchmarkSpec& spec)
{
    const fs::path root = resolve_dataset(*spec.dataset_dir);
    if (!fs::is_directory(root))
        throw std::invalid_argument("dataset directory not found: " + root.string());

    std::vector<fs::path> class_dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory())
            class_dirs.push_back(e.path());
    std::sort(class_dirs.begin(), class_dirs.end());

    const io::LoadOptions opts{spec.pgm_threshold, spec.pgm_invert};
    std::vector<Item> items;
    for (const auto& dir : class_dirs)
    {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && io::is_shape_file(e.path()))
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files)
            items.push_back({dir.filename().string(), io::load_shape2(f, opts), {}, {}, 0});
    }
    if (items.empty())
        throw std::invalid_argument("dataset directory has no shape files: " + root.string());
    return items;
}

std::vector<Item> synthetic_items(const BenchmarkSpec& spec, int run)
{
    auto rng = run_rng(spec.seed, run, 0x5157);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Item> items;
    for (const auto& family : spec.families)
        for (int i = 0; i < spec.synthetic_per_class; ++i)
        {
            Item it;
            it.label = family;
            it.variation.shape_param = spec.shape_jitter * (2.0 * unit(rng) - 1.0);
            if (spec.random_pose)
            {
                it.variation.phase = unit(rng);
                const double angle = 2.0 * std::numbers::pi * unit(rng);
                const double scale = std::exp(std::log(0.5) + std::log(4.0) * unit(rng));
                const double tx = 10.0 * unit(rng) - 5.0;
                const double ty = 10.0 * unit(rng) - 5.0;
                it.pose = SimilarityTransform2(angle, scale, Point2(tx, ty));
            }
            it.noise_seed = rng();
            items.push_back(std::move(it));
        }
    return items;
}

Shape2 add_noise(const Shape2& s, double sigma, std::uint64_t seed)
{
    if (sigma == 0.0)
        return s;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<Point2> pts(s.points().begin(), s.points().end());
    for (auto& p : pts)
    {
        const double dx = gauss(rng);
        const double dy = gauss(rng);
        p += Point2(dx, dy);
    }
    return Shape2(std::move(pts), s.closed(), s.label());
}

double rms_radius(const Shape2& s)
{
    Point2 c = Point2::Zero();
    for (const auto& p : s.points())
        c += p;
    c /= static_cast<double>(s.size());
    double ss = 0.0;
    for (const auto& p : s.points())
        ss += (p - c).squaredNorm();
    return std::sqrt(ss / static_cast<double>(s.size()));
}

// Shape at n points: synthesized directly, or resampled and perturbed by
// noise proportional to the outline's RMS radius.
Shape2 realize(const Item& it, const BenchmarkSpec& spec, int n, bool noisy)
{
    const double sigma = noisy ? spec.noise_sigma : 0.0;
    if (!it.shape)
        return synth_shape(it.label, sigma * it.pose.scale, n, it.pose, it.noise_seed, it.variation);
    const Shape2 r = resample_arclength(*it.shape, n);
    return add_noise(r, sigma * rms_radius(r), it.noise_seed);
}

RunOutcome run_once(const BenchmarkSpec& spec, int run, const std::vector<Item>* loaded)
{
    const std::vector<Item> items = loaded ? *loaded : synthetic_items(spec, run);
    auto rng = run_rng(spec.seed, run, 0x7e57);

    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < items.size(); ++i)
        by_label[items[i].label].push_back(i);

    std::vector<std::size_t> train_idx, test_pool;
    for (auto& [label, idx] : by_label)
    {
        std::shuffle(idx.begin(), idx.end(), rng);
        if (spec.test_on_train)
        {
            train_idx.insert(train_idx.end(), idx.begin(), idx.end());
            test_pool.insert(test_pool.end(), idx.begin(), idx.end());
            continue;
        }
        const auto n_train = static_cast<std::size_t>(std::lround(spec.split * static_cast<double>(idx.size())));
        if (n_train < 1 || n_train >= idx.size())
            throw std::invalid_argument("class '" + label + "' has too few shapes (" + std::to_string(idx.size()) +
                                        ") for split " + std::to_string(spec.split));
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_pool.insert(test_pool.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }

    RunOutcome out;
    std::shuffle(test_pool.begin(), test_pool.end(), rng);
    if (static_cast<int>(test_pool.size()) < spec.shapes_per_run)
        out.warnings.push_back("run " + std::to_string(run) + ": only " + std::to_string(test_pool.size()) +
                               " held-out shapes available");
    test_pool.resize(std::min<std::size_t>(test_pool.size(), static_cast<std::size_t>(spec.shapes_per_run)));

    for (int n : spec.n_points)
    {
        std::vector<std::pair<std::string, Shape2>> labeled;
        for (auto i : train_idx)
            labeled.emplace_back(items[i].label, realize(items[i], spec, n, !spec.test_on_train));
        const auto models = classify::train(labeled, n, spec.options);

        int hit1 = 0, hit2 = 0;
        for (auto i : test_pool)
        {
            const auto res = classify::classify(realize(items[i], spec, n, !spec.test_on_train), models);
            if (res.winner == items[i].label)
                ++hit1;
            for (std::size_t r = 0; r < std::min<std::size_t>(2, res.ranked.size()); ++r)
                if (res.ranked[r].label == items[i].label)
                    ++hit2;
        }
        const double denom = static_cast<double>(test_pool.size());
        out.top1.push_back(denom > 0 ? hit1 / denom : 0.0);
        out.top2.push_back(denom > 0 ? hit2 / denom : 0.0);
    }
    return out;
}

} // namespace

void BenchmarkSpec::validate() const
{
    if (runs < 1)
        throw std::invalid_argument("runs must be at least 1");
    if (shapes_per_run < 1)
        throw std::invalid_argument("shapes_per_run must be at least 1");
    if (n_points.empty())
        throw std::invalid_argument("n_points must not be empty");
    for (int n : n_points)
        if (n < 3)
            throw std::invalid_argument("every n must be at least 3");
    if (!(noise_sigma >= 0.0))
        throw std::invalid_argument("noise_sigma must be nonnegative");
    if (!(split > 0.0 && split < 1.0))
        throw std::invalid_argument("split must lie in (0, 1)");
    if (!dataset_dir)
    {
        if (families.empty())
            throw std::invalid_argument("no synthetic families given");
        if (synthetic_per_class < 1)
            throw std::invalid_argument("synthetic_per_class must be at least 1");
        for (const auto& f : families)
            if (!is_synthetic_family(f))
                throw std::invalid_argument("unknown synthetic family: " + f);
    }
    options.regs.validate();
}

std::pair<double, double> mean_std(const std::vector<double>& xs)
{
    if (xs.empty())
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() == 1)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

namespace
{

std::vector<double> average_ranks(const std::vector<double>& x)
{
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();)
    {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: series lengths differ");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (x.size() < 2)
        return nan;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const auto [mx, sx] = mean_std(rx);
    const auto [my, sy] = mean_std(ry);
    if (sx == 0.0 || sy == 0.0)
        return nan;
    double cov = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
        cov += (rx[i] - mx) * (ry[i] - my);
    cov /= static_cast<double>(rx.size() - 1);
    return std::clamp(cov / (sx * sy), -1.0, 1.0);
}

BenchmarkReport run_benchmark(const BenchmarkSpec& spec)
{
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();

    std::optional<std::vector<Item>> loaded;
    if (spec.dataset_dir)
        loaded = load_directory(spec);

    std::vector<std::future<RunOutcome>> futures;
    for (int r = 0; r < spec.runs; ++r)
        futures.push_back(std::async(std::launch::async, run_once, std::cref(spec), r,
                                     loaded ? &*loaded : nullptr));

    std::vector<RunOutcome> outcomes;
    for (auto& f : futures)
        outcomes.push_back(f.get());

    BenchmarkReport report;
    report.config = to_json(spec);
    std::map<std::string, int> labels;
    if (loaded)
        for (const auto& it : *loaded)
            labels[it.label]++;
    else
        for (const auto& f : spec.families)
            labels[f]++;
    if (labels.size() < 2)
        report.warnings.push_back("single-class dataset: accuracy is trivially 1");

    for (std::size_t k = 0; k < spec.n_points.size(); ++k)
    {
        SampleCountStats st;
        st.n = spec.n_points[k];
        for (const auto& o : outcomes)
        {
            st.top1_per_run.push_back(o.top1[k]);
            st.top2_per_run.push_back(o.top2[k]);
        }
        std::tie(st.top1_mean, st.top1_std) = mean_std(st.top1_per_run);
        std::tie(st.top2_mean, st.top2_std) = mean_std(st.top2_per_run);
        report.per_n.push_back(std::move(st));
    }
    for (const auto& o : outcomes)
        report.warnings.insert(report.warnings.end(), o.warnings.begin(), o.warnings.end());

    std::vector<double> ns, acc;
    for (const auto& st : report.per_n)
    {
        ns.push_back(st.n);
        acc.push_back(st.top1_mean);
    }
    report.spearman = spearman(ns, acc);
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

BenchmarkReport sweep_sample_count(const BenchmarkSpec& spec)
{
    if (spec.n_points.empty())
        throw std::invalid_argument("sweep needs at least one n");
    for (std::size_t i = 1; i < spec.n_points.size(); ++i)
        if (spec.n_points[i] <= spec.n_points[i - 1])
            throw std::invalid_argument("sweep list must be strictly ascending");
    return run_benchmark(spec);
}

nlohmann::json to_json(const BenchmarkSpec& spec)
{
    nlohmann::json j{{"runs", spec.runs},
                     {"shapes_per_run", spec.shapes_per_run},
                     {"n_points", spec.n_points},
                     {"noise_sigma", spec.noise_sigma},
                     {"families", spec.families},
                     {"synthetic_per_class", spec.synthetic_per_class},
                     {"shape_jitter", spec.shape_jitter},
                     {"random_pose", spec.random_pose},
                     {"split", spec.split},
                     {"test_on_train", spec.test_on_train},
                     {"seed", spec.seed},
                     {"pgm_threshold", spec.pgm_threshold},
                     {"pgm_invert", spec.pgm_invert},
                     {"regs", classify::to_json(spec.options)}};
    j["dataset"] = spec.dataset_dir ? nlohmann::json(spec.dataset_dir->string()) : nlohmann::json(nullptr);
    return j;
}

BenchmarkSpec spec_from_json(const nlohmann::json& j)
{
    BenchmarkSpec s;
    s.runs = j.value("runs", s.runs);
    s.shapes_per_run = j.value("shapes_per_run", s.shapes_per_run);
    if (j.contains("n_points"))
    {
        if (j["n_points"].is_array())
            s.n_points = j["n_points"].get<std::vector<int>>();
        else
            s.n_points = {j["n_points"].get<int>()};
    }
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    if (j.contains("dataset") && j["dataset"].is_string())
        s.dataset_dir = j["dataset"].get<std::string>();
    if (j.contains("families"))
        s.families = j["families"].get<std::vector<std::string>>();
    s.synthetic_per_class = j.value("synthetic_per_class", s.synthetic_per_class);
    s.shape_jitter = j.value("shape_jitter", s.shape_jitter);
    s.random_pose = j.value("random_pose", s.random_pose);
    s.split = j.value("split", s.split);
    s.test_on_train = j.value("test_on_train", s.test_on_train);
    s.seed = j.value("seed", s.seed);
    s.pgm_threshold = j.value("pgm_threshold", s.pgm_threshold);
    s.pgm_invert = j.value("pgm_invert", s.pgm_invert);
    if (j.contains("regs"))
        s.options = classify::options_from_json(j["regs"]);
    return s;
}

nlohmann::json to_json(const BenchmarkReport& report)
{
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json per_n = nlohmann::json::array();
    for (const auto& st : report.per_n)
        per_n.push_back({{"n", st.n},
                         {"classification_rate", {{"metric", "top1"}, {"mean", st.top1_mean}, {"std", st.top1_std}}},
                         {"success_rate", {{"metric", "top2"}, {"mean", st.top2_mean}, {"std", st.top2_std}}},
                         {"top1_per_run", st.top1_per_run},
                         {"top2_per_run", st.top2_per_run}});
    return {{"config", report.config},
            {"per_n", per_n},
            {"spearman_n_vs_top1", num(report.spearman)},
            {"warnings", report.warnings},
            {"wall_time_s", report.wall_time_s}};
}

std::string report_csv(const BenchmarkReport& report)
{
    std::ostringstream out;
    out.precision(17);
    out << "n,run,top1,top2\n";
    for (const auto& st : report.per_n)
        for (std::size_t r = 0; r < st.top1_per_run.size(); ++r)
            out << st.n << ',' << r << ',' << st.top1_per_run[r] << ',' << st.top2_per_run[r] << '\n';
    return out.str();
}

std::filesystem::path resolve_dataset(const std::filesystem::path& p)
{
    if (p.is_absolute())
        return p;
    if (const char* root = std::getenv("SHAPEMAP_DATA"); root && *root)
    {
        const auto candidate = std::filesystem::path(root) / p;
        if (std::filesystem::exists(candidate) || !std::filesystem::exists(p))
            return candidate;
    }
    return p;
}

} // namespace shapemap::bench
