#include "shapemap/classifier.hpp"
#include "shapemap/harness.hpp"
#include "shapemap/io.hpp"
#include "shapemap/oracles.hpp"
#include "shapemap/quat3d.hpp"
#include "shapemap/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>

namespace fs = std::filesystem;
using namespace shapemap;
using nlohmann::json;

namespace
{

// Regulator flags shared by train, classify, benchmark and sweep. Unset flags
// leave the underlying options untouched.
struct RegFlags
{
    std::optional<double> B, alpha, zeta;
    std::optional<std::string> corr_mode;
    std::optional<std::string> aggregate;
    bool absolute_zeta = false;
    bool allow_reversal = false;

    void attach(CLI::App* app)
    {
        app->add_option("--reg-b", B, "Scale/rotation prior regulator B");
        app->add_option("--reg-alpha", alpha, "Gamma shape regulator alpha");
        app->add_option("--reg-zeta", zeta, "Gamma rate regulator zeta (relative to squared data diameter)");
        app->add_flag("--absolute-zeta", absolute_zeta, "Use --reg-zeta as an absolute value");
        app->add_option("--corr-mode", corr_mode, "Correspondence reduction")
            ->check(CLI::IsMember({"map", "marginal"}));
        app->add_flag("--allow-reversal", allow_reversal, "Also match the reversed template orientation");
        app->add_option("--aggregate", aggregate, "Exemplar aggregation")->check(CLI::IsMember({"mean", "max"}));
    }

    void apply(classify::ClassifierOptions& o) const
    {
        if (B)
            o.regs.B = *B;
        if (alpha)
            o.regs.alpha = *alpha;
        if (zeta)
            o.regs.zeta = *zeta;
        if (absolute_zeta)
            o.regs.zeta_relative = false;
        if (corr_mode)
            o.regs.corr_mode = planar::parse_corr_mode(*corr_mode);
        if (allow_reversal)
            o.allow_reversal = true;
        if (aggregate)
            o.aggregate = *aggregate == "max" ? classify::Aggregate::max : classify::Aggregate::mean;
        o.regs.validate();
    }
};

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    return json::parse(in);
}

void write_text(const std::optional<std::string>& path, const std::string& text)
{
    if (!path || *path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream out(*path);
    if (!out)
        throw std::runtime_error("cannot write " + *path);
    out << text;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bayesian shape classification with closed-form marginal likelihoods"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "Build class models from a directory of labeled shapes");
    std::string train_in, train_out;
    int train_n = 50;
    int threshold = 128;
    bool invert = false;
    RegFlags train_regs;
    train->add_option("--in", train_in, "Directory with one sub-directory per class")->required();
    train->add_option("--n", train_n, "Points per resampled contour")->check(CLI::PositiveNumber);
    train->add_option("--out", train_out, "Model file")->required();
    train->add_option("--threshold", threshold, "PGM foreground threshold");
    train->add_flag("--invert", invert, "PGM foreground is at or above the threshold");
    train_regs.attach(train);

    // classify
    auto* cls = app.add_subcommand("classify", "Rank class labels for a shape");
    std::string model_path, cls_in;
    int top = 0;
    RegFlags cls_regs;
    cls->add_option("--model", model_path, "Model file")->required();
    cls->add_option("--in", cls_in, "Shape file (.json, .csv, .pgm)")->required();
    cls->add_option("--top", top, "Print only the k best labels");
    cls->add_option("--threshold", threshold, "PGM foreground threshold");
    cls->add_flag("--invert", invert, "PGM foreground is at or above the threshold");
    cls_regs.attach(cls);

    // benchmark / sweep
    std::string spec_path;
    std::optional<std::string> report_out, csv_out, dataset;
    std::vector<int> ns;
    std::optional<int> runs, shapes;
    std::optional<std::uint64_t> seed_override;
    std::optional<double> noise;
    RegFlags bench_regs;
    auto add_bench_flags = [&](CLI::App* sub) {
        sub->add_option("--spec", spec_path, "Benchmark spec JSON (fields default when omitted)");
        sub->add_option("--out", report_out, "Report JSON (stdout when omitted)");
        sub->add_option("--csv", csv_out, "Per-run CSV rows");
        sub->add_option("--dataset", dataset, "Dataset directory (relative paths resolve against SHAPEMAP_DATA)");
        sub->add_option("--runs", runs);
        sub->add_option("--shapes-per-run", shapes);
        sub->add_option("--noise", noise);
        sub->add_option("--seed", seed_override);
        sub->add_option("--threshold", threshold, "PGM foreground threshold");
        sub->add_flag("--invert", invert, "PGM foreground is at or above the threshold");
        bench_regs.attach(sub);
    };
    auto* bench = app.add_subcommand("benchmark", "Repeated train/test evaluation");
    add_bench_flags(bench);
    bench->add_option("--n", ns, "Points per contour");
    auto* sweep = app.add_subcommand("sweep", "Accuracy against number of points");
    add_bench_flags(sweep);
    sweep->add_option("--n", ns, "Ascending list of point counts")->delimiter(',');

    // verify
    auto* verify = app.add_subcommand("verify", "Numerical cross-checks");
    auto* eq2 = verify->add_subcommand("eq2", "Closed-form planar marginal against brute-force quadrature");
    verify->require_subcommand(1);
    int trials = 10, trials5 = 3;
    double tol = 1e-3;
    std::uint64_t verify_seed = 1;
    double v_alpha = 1.0, v_B = 1e3, v_zeta = 1e-8;
    eq2->add_option("--trials", trials, "Random 3-point pairs");
    eq2->add_option("--trials-5", trials5, "Random 5-point pairs");
    eq2->add_option("--tol", tol, "Allowed spread of the offset");
    eq2->add_option("--seed", verify_seed);
    eq2->add_option("--reg-b", v_B);
    eq2->add_option("--reg-alpha", v_alpha);
    eq2->add_option("--reg-zeta", v_zeta, "Absolute zeta");

    // synth
    auto* syn = app.add_subcommand("synth", "Write a synthetic shape");
    std::string family, synth_out;
    int synth_n = 50;
    double synth_noise = 0.0, rot = 0.0, scale = 1.0, tx = 0.0, ty = 0.0, phase = 0.0, param = 0.0;
    std::uint64_t synth_seed = 1;
    bool list_families = false;
    syn->add_flag("--list", list_families, "Print the available families");
    syn->add_option("--family", family);
    syn->add_option("--n", synth_n);
    syn->add_option("--noise", synth_noise);
    syn->add_option("--seed", synth_seed);
    syn->add_option("--rotation", rot, "Radians");
    syn->add_option("--scale", scale);
    syn->add_option("--tx", tx);
    syn->add_option("--ty", ty);
    syn->add_option("--phase", phase, "Start point as a fraction of the perimeter");
    syn->add_option("--shape-param", param, "Relative change of the family parameter");
    syn->add_option("--out", synth_out, "Output file (.json or .csv); stdout when omitted");

    // quat3d
    auto* q3 = app.add_subcommand("quat3d", "3D rotation marginal");
    auto* qm = q3->add_subcommand("marginal", "log E_q exp(q^T N q / sigma^2) for a 3D data/template pair");
    q3->require_subcommand(1);
    std::string data_path, template_path, method = "series";
    double sigma = 0.05;
    std::uint64_t samples = 1000000, q_seed = 1;
    int order = 4;
    bool hemisphere = false;
    qm->add_option("--data", data_path)->required();
    qm->add_option("--template", template_path)->required();
    qm->add_option("--sigma", sigma)->required();
    qm->add_option("--method", method)->check(CLI::IsMember({"mc", "series"}));
    qm->add_option("--samples", samples);
    qm->add_option("--order", order);
    qm->add_option("--seed", q_seed);
    qm->add_flag("--hemisphere", hemisphere, "Sample the a >= 0 half of the quaternion sphere");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*train)
        {
            const fs::path root = bench::resolve_dataset(train_in);
            if (!fs::is_directory(root))
                throw std::runtime_error("not a directory: " + root.string());
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(root))
                if (e.is_regular_file() && io::is_shape_file(e.path()))
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            std::vector<std::pair<std::string, Shape2>> labeled;
            for (const auto& f : files)
            {
                Shape2 s = io::load_shape2(f, {threshold, invert});
                std::string label = f.parent_path() == root ? s.label().value_or("") : f.parent_path().filename().string();
                if (label.empty())
                    throw std::runtime_error("cannot infer a label for " + f.string());
                labeled.emplace_back(label, std::move(s));
            }
            classify::ClassifierOptions opts;
            train_regs.apply(opts);
            const auto models = classify::train(labeled, train_n, opts);
            std::ofstream(train_out) << classify::models_to_json(models).dump(1) << '\n';
            std::cerr << "trained " << models.size() << " classes from " << labeled.size() << " shapes\n";
        }
        else if (*cls)
        {
            auto models = classify::models_from_json(read_json(model_path));
            classify::ClassifierOptions opts = models.front().options;
            cls_regs.apply(opts);
            for (auto& m : models)
                m.options = opts;
            const auto result = classify::classify(io::load_shape2(cls_in, {threshold, invert}), models);
            const std::size_t k = top > 0 ? std::min<std::size_t>(top, result.ranked.size()) : result.ranked.size();
            for (std::size_t i = 0; i < k; ++i)
                std::cout << json{{"rank", i + 1},
                                  {"label", result.ranked[i].label},
                                  {"log_posterior", result.ranked[i].log_posterior}}
                                 .dump()
                          << '\n';
        }
        else if (*bench || *sweep)
        {
            bench::BenchmarkSpec spec = spec_path.empty() ? bench::BenchmarkSpec{} : bench::spec_from_json(read_json(spec_path));
            if (!ns.empty())
                spec.n_points = ns;
            if (dataset)
                spec.dataset_dir = *dataset;
            else if (!spec.dataset_dir && spec_path.empty() && std::getenv("SHAPEMAP_DATA"))
                spec.dataset_dir = std::getenv("SHAPEMAP_DATA");
            if (runs)
                spec.runs = *runs;
            if (shapes)
                spec.shapes_per_run = *shapes;
            if (noise)
                spec.noise_sigma = *noise;
            if (seed_override)
                spec.seed = *seed_override;
            if (bench->count("--threshold") || sweep->count("--threshold"))
                spec.pgm_threshold = threshold;
            if (invert)
                spec.pgm_invert = true;
            bench_regs.apply(spec.options);
            const auto report = *sweep ? bench::sweep_sample_count(spec) : bench::run_benchmark(spec);
            write_text(report_out, bench::to_json(report).dump(2) + "\n");
            if (csv_out)
                write_text(csv_out, bench::report_csv(report));
            for (const auto& w : report.warnings)
                std::cerr << "warning: " << w << '\n';
        }
        else if (*verify)
        {
            planar::Regulators regs;
            regs.B = v_B;
            regs.alpha = v_alpha;
            regs.zeta = v_zeta;
            regs.zeta_relative = false;
            const auto rep = oracle::verify_eq2(trials, trials5, tol, verify_seed, regs);
            json rows = json::array();
            for (const auto& t : rep.trials)
                rows.push_back({{"n", t.n},
                                {"closed_form", t.closed_form},
                                {"brute", t.brute},
                                {"quadrature_error", t.error_estimate},
                                {"offset", t.brute - t.closed_form},
                                {"offset_minus_predicted", t.residual}});
            std::cout << json{{"check", "eq2"},
                              {"trials", rows},
                              {"max_spread", rep.max_spread},
                              {"max_offset_minus_predicted", rep.max_residual},
                              {"tolerance", rep.tolerance},
                              {"pass", rep.pass}}
                             .dump(2)
                      << '\n';
            return rep.pass ? 0 : 1;
        }
        else if (*syn)
        {
            if (list_families)
            {
                for (const auto& f : synthetic_families())
                    std::cout << f << '\n';
                return 0;
            }
            if (family.empty())
                throw std::runtime_error("--family is required");
            const SimilarityTransform2 g(rot, scale, Point2(tx, ty));
            const Shape2 s = synth_shape(family, synth_noise, synth_n, g, synth_seed, {param, phase});
            if (synth_out.empty())
                std::cout << io::to_json(s).dump() << '\n';
            else
                io::save_shape(synth_out, s);
        }
        else if (*q3)
        {
            const Shape3 y = io::load_shape3(data_path);
            const Shape3 v = io::load_shape3(template_path);
            const auto kernel = quat::build_rotation_kernel(y.points(), v.points(), sigma);
            json out{{"method", method}, {"sigma", sigma}, {"n", kernel.n}};
            out["eigenvalues"] = std::vector<double>(kernel.eigenvalues.data(), kernel.eigenvalues.data() + 4);
            out["scale_factor"] = kernel.scale_factor;
            if (method == "mc")
            {
                const auto est = quat::rotation_marginal_mc(
                    kernel, samples, q_seed, hemisphere ? quat::SphereDomain::hemisphere : quat::SphereDomain::full);
                out["log_marginal"] = est.log_value;
                out["std_error"] = est.std_error;
                out["samples"] = est.samples;
                out["seed"] = q_seed;
            }
            else
            {
                const auto est = quat::rotation_marginal_series(kernel, order);
                out["log_marginal"] = est.log_value;
                out["order"] = order;
            }
            out["log_marginal_per_point"] = finite_or_null(out["log_marginal"].get<double>() / kernel.n);
            std::cout << out.dump(2) << '\n';
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
