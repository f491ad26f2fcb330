#include "shapemap/boundary.hpp"
#include "shapemap/classifier.hpp"
#include "shapemap/harness.hpp"
#include "shapemap/io.hpp"
#include "shapemap/oracles.hpp"
#include "shapemap/quat3d.hpp"
#include "shapemap/resample.hpp"
#include "shapemap/synth.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

namespace py = pybind11;
using namespace shapemap;

namespace
{

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <int Dim>
Shape<Dim> to_shape(const Array& a)
{
    if (a.ndim() != 2 || a.shape(1) != Dim)
        throw std::invalid_argument("expected an array of shape (n, " + std::to_string(Dim) + ")");
    auto r = a.unchecked<2>();
    std::vector<typename Shape<Dim>::Point> pts;
    for (py::ssize_t i = 0; i < r.shape(0); ++i)
    {
        typename Shape<Dim>::Point p;
        for (int k = 0; k < Dim; ++k)
            p[k] = r(i, k);
        pts.push_back(p);
    }
    return Shape<Dim>(std::move(pts));
}

template <int Dim>
Array to_array(const Shape<Dim>& s)
{
    Array out({static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(Dim)});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (int k = 0; k < Dim; ++k)
            w(i, k) = s[i][k];
    return out;
}

std::vector<planar::Complex> to_complex(const Array& a)
{
    return planar::to_complex(to_shape<2>(a).points());
}

} // namespace

PYBIND11_MODULE(_shapemap, m)
{
    m.doc() = "Bayesian shape classification core";

    m.def("families", &synthetic_families);

    m.def(
        "synth",
        [](const std::string& family, int n, double noise, std::uint64_t seed, double rotation, double scale,
           double tx, double ty, double phase, double shape_param) {
            const SimilarityTransform2 g(rotation, scale, Point2(tx, ty));
            return to_array(synth_shape(family, noise, n, g, seed, {shape_param, phase}));
        },
        py::arg("family"), py::arg("n"), py::arg("noise") = 0.0, py::arg("seed") = 1, py::arg("rotation") = 0.0,
        py::arg("scale") = 1.0, py::arg("tx") = 0.0, py::arg("ty") = 0.0, py::arg("phase") = 0.0,
        py::arg("shape_param") = 0.0);

    m.def(
        "extract_boundary",
        [](py::array_t<bool, py::array::c_style | py::array::forcecast> mask) {
            if (mask.ndim() != 2)
                throw std::invalid_argument("mask must be two-dimensional");
            auto r = mask.unchecked<2>();
            BinaryImage img(static_cast<int>(r.shape(1)), static_cast<int>(r.shape(0)));
            for (py::ssize_t y = 0; y < r.shape(0); ++y)
                for (py::ssize_t x = 0; x < r.shape(1); ++x)
                    img.set(static_cast<int>(x), static_cast<int>(y), r(y, x));
            return to_array(extract_boundary(img));
        },
        py::arg("mask"), "Outline of the largest foreground component, (x, y) per row.");

    m.def(
        "resample", [](const Array& pts, int n) { return to_array(resample_arclength(to_shape<2>(pts), n)); },
        py::arg("points"), py::arg("n"));

    m.def("load_shape", [](const std::string& path) { return to_array(io::load_shape2(path)); }, py::arg("path"));

    m.def(
        "log_marginal",
        [](const Array& y, const Array& v, const std::string& regs_json, bool allow_reversal) {
            const auto regs = classify::regulators_from_json(nlohmann::json::parse(regs_json));
            const auto r = planar::best_correspondence(to_complex(y), to_complex(v), regs, allow_reversal);
            return py::make_tuple(r.value, r.best.cyclic_offset, r.best.reversed);
        },
        py::arg("y"), py::arg("v"), py::arg("regs_json") = "{}", py::arg("allow_reversal") = false);

    m.def(
        "train",
        [](const std::vector<std::pair<std::string, Array>>& labeled, int n, const std::string& options_json) {
            std::vector<std::pair<std::string, Shape2>> in;
            for (const auto& [label, pts] : labeled)
                in.emplace_back(label, to_shape<2>(pts));
            const auto opts = classify::options_from_json(nlohmann::json::parse(options_json));
            return classify::models_to_json(classify::train(in, n, opts)).dump();
        },
        py::arg("labeled"), py::arg("n"), py::arg("options_json") = "{}", "Returns the model file as JSON text.");

    m.def(
        "classify",
        [](const Array& pts, const std::string& models_json) {
            const auto models = classify::models_from_json(nlohmann::json::parse(models_json));
            const auto r = classify::classify(to_shape<2>(pts), models);
            std::vector<std::pair<std::string, double>> out;
            for (const auto& e : r.ranked)
                out.emplace_back(e.label, e.log_posterior);
            return out;
        },
        py::arg("points"), py::arg("models_json"));

    m.def(
        "verify_eq2",
        [](int trials, int trials_5, double tol, std::uint64_t seed) {
            planar::Regulators regs;
            regs.zeta_relative = false;
            const auto r = oracle::verify_eq2(trials, trials_5, tol, seed, regs);
            return py::make_tuple(r.pass, r.max_spread, r.max_residual);
        },
        py::arg("trials") = 10, py::arg("trials_5") = 3, py::arg("tol") = 1e-3, py::arg("seed") = 1);

    m.def(
        "quat3d_marginal",
        [](const Array& y, const Array& v, double sigma, const std::string& method, std::uint64_t samples, int order,
           std::uint64_t seed) {
            const auto ys = to_shape<3>(y), vs = to_shape<3>(v);
            const auto K = quat::build_rotation_kernel(ys.points(), vs.points(), sigma);
            quat::MarginalEstimate e;
            if (method == "mc")
                e = quat::rotation_marginal_mc(K, samples, seed);
            else if (method == "series")
                e = quat::rotation_marginal_series(K, order);
            else
                throw std::invalid_argument("method must be mc or series");
            return py::make_tuple(e.log_value, e.std_error);
        },
        py::arg("y"), py::arg("v"), py::arg("sigma"), py::arg("method") = "series", py::arg("samples") = 1000000,
        py::arg("order") = 4, py::arg("seed") = 1, "log E over S^3 of exp(q^T N q / sigma^2) and its standard error.");

    m.def(
        "run_benchmark",
        [](const std::string& spec_json, bool sweep) {
            const auto spec = bench::spec_from_json(nlohmann::json::parse(spec_json));
            const auto r = sweep ? bench::sweep_sample_count(spec) : bench::run_benchmark(spec);
            return bench::to_json(r).dump();
        },
        py::arg("spec_json"), py::arg("sweep") = false, "Returns the report as JSON text.");
}
