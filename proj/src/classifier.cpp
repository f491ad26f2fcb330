#include "shapemap/classifier.hpp"
#include "shapemap/io.hpp"
#include "shapemap/numeric.hpp"
#include "shapemap/resample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace shapemap::classify
{

using planar::Complex;

bool ClassifierOptions::operator==(const ClassifierOptions& o) const
{
    return regs.B == o.regs.B && regs.alpha == o.regs.alpha && regs.zeta == o.regs.zeta &&
           regs.zeta_relative == o.regs.zeta_relative && regs.count_mode == o.regs.count_mode &&
           regs.corr_mode == o.regs.corr_mode && allow_reversal == o.allow_reversal && aggregate == o.aggregate;
}

std::vector<Complex> preprocess(const Shape2& s, int n)
{
    const Shape2 r = static_cast<int>(s.size()) == n ? s : resample_arclength(s, n);
    auto z = planar::to_complex(r.points());
    CompensatedSum re, im;
    for (const auto& p : z)
    {
        re += p.real();
        im += p.imag();
    }
    const Complex centroid(re.value() / n, im.value() / n);
    CompensatedSum ss;
    for (auto& p : z)
    {
        p -= centroid;
        ss += std::norm(p);
    }
    const double rms = std::sqrt(ss.value() / n);
    if (!(rms > 0.0))
        throw std::invalid_argument("cannot normalize a shape with zero spread");
    for (auto& p : z)
        p /= rms;
    return z;
}

std::vector<ClassModel> train(const std::vector<std::pair<std::string, Shape2>>& labeled, int n,
                              const ClassifierOptions& options)
{
    if (n < 3)
        throw std::invalid_argument("n must be at least 3");
    if (labeled.empty())
        throw std::invalid_argument("no training shapes");
    options.regs.validate();

    std::map<std::string, ClassModel> by_label;
    for (const auto& [label, shape] : labeled)
    {
        if (label.empty())
            throw std::invalid_argument("training shape without a label");
        auto& model = by_label[label];
        model.label = label;
        model.n = n;
        model.options = options;
        model.exemplars.push_back(preprocess(shape, n));
    }

    std::vector<ClassModel> models;
    for (auto& [label, model] : by_label)
    {
        if (model.exemplars.empty())
            throw std::invalid_argument("class '" + label + "' has no shapes");
        models.push_back(std::move(model));
    }
    return models;
}

double class_log_likelihood(std::span<const Complex> y, const ClassModel& model)
{
    if (static_cast<int>(y.size()) != model.n)
        throw std::invalid_argument("incomparable n");
    if (model.exemplars.empty())
        throw std::invalid_argument("class '" + model.label + "' has no exemplars");

    std::vector<double> values;
    values.reserve(model.exemplars.size());
    for (const auto& ex : model.exemplars)
        values.push_back(
            planar::best_correspondence(y, ex, model.options.regs, model.options.allow_reversal).value);

    if (model.options.aggregate == Aggregate::max)
        return *std::max_element(values.begin(), values.end());
    return log_mean_exp(values);
}

double class_log_likelihood(const Shape2& y, const ClassModel& model)
{
    const auto z = planar::to_complex(y.points());
    return class_log_likelihood(z, model);
}

ClassificationResult classify(const Shape2& y, const std::vector<ClassModel>& models)
{
    if (models.empty())
        throw std::invalid_argument("no class models");
    const int n = models.front().n;
    for (const auto& m : models)
    {
        if (m.n != n)
            throw std::invalid_argument("incomparable n across class models");
        if (!(m.options == models.front().options))
            throw std::invalid_argument("class models disagree on regulators/options");
    }

    const Shape2 ys = static_cast<int>(y.size()) == n ? y : resample_arclength(y, n);
    const auto z = planar::to_complex(ys.points());

    ClassificationResult result;
    std::vector<double> logl;
    for (const auto& m : models)
    {
        logl.push_back(class_log_likelihood(z, m));
        result.ranked.push_back({m.label, logl.back()});
    }
    // uniform class prior
    const double evidence = log_sum_exp(logl);
    for (auto& r : result.ranked)
        r.log_posterior -= evidence;

    std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedLabel& a, const RankedLabel& b) {
        if (a.log_posterior != b.log_posterior)
            return a.log_posterior > b.log_posterior;
        return a.label < b.label;
    });
    result.winner = result.ranked.front().label;
    return result;
}

nlohmann::json to_json(const planar::Regulators& r)
{
    return {{"B", r.B},
            {"alpha", r.alpha},
            {"zeta", r.zeta},
            {"zeta_relative", r.zeta_relative},
            {"effective_count_mode", "equal_n"},
            {"corr_mode", std::string(planar::to_string(r.corr_mode))}};
}

planar::Regulators regulators_from_json(const nlohmann::json& j)
{
    planar::Regulators r;
    r.B = j.value("B", r.B);
    r.alpha = j.value("alpha", r.alpha);
    r.zeta = j.value("zeta", r.zeta);
    r.zeta_relative = j.value("zeta_relative", r.zeta_relative);
    if (j.value("effective_count_mode", std::string("equal_n")) != "equal_n")
        throw std::invalid_argument("unsupported effective_count_mode");
    r.corr_mode = planar::parse_corr_mode(j.value("corr_mode", std::string("marginal")));
    r.validate();
    return r;
}

nlohmann::json to_json(const ClassifierOptions& o)
{
    auto j = to_json(o.regs);
    j["allow_reversal"] = o.allow_reversal;
    j["aggregate"] = o.aggregate == Aggregate::max ? "max" : "mean";
    return j;
}

ClassifierOptions options_from_json(const nlohmann::json& j)
{
    ClassifierOptions o;
    o.regs = regulators_from_json(j);
    o.allow_reversal = j.value("allow_reversal", false);
    const auto agg = j.value("aggregate", std::string("mean"));
    if (agg != "mean" && agg != "max")
        throw std::invalid_argument("unknown aggregate: " + agg);
    o.aggregate = agg == "max" ? Aggregate::max : Aggregate::mean;
    return o;
}

nlohmann::json models_to_json(const std::vector<ClassModel>& models)
{
    if (models.empty())
        throw std::invalid_argument("no class models");
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& m : models)
    {
        nlohmann::json ex = nlohmann::json::array();
        for (const auto& e : m.exemplars)
        {
            std::vector<Point2> pts;
            for (const auto& z : e)
                pts.emplace_back(z.real(), z.imag());
            ex.push_back(io::to_json(Shape2(std::move(pts), true)));
        }
        classes.push_back({{"label", m.label}, {"weight", m.weight}, {"exemplars", std::move(ex)}});
    }
    return {{"n", models.front().n}, {"regs", to_json(models.front().options)}, {"classes", classes}};
}

std::vector<ClassModel> models_from_json(const nlohmann::json& j)
{
    const int n = j.at("n").get<int>();
    if (n < 3)
        throw std::invalid_argument("model n must be at least 3");
    const ClassifierOptions options = options_from_json(j.value("regs", nlohmann::json::object()));
    std::vector<ClassModel> models;
    for (const auto& c : j.at("classes"))
    {
        ClassModel m;
        m.label = c.at("label").get<std::string>();
        m.weight = c.value("weight", 1.0);
        m.n = n;
        m.options = options;
        for (const auto& e : c.at("exemplars"))
        {
            const Shape2 s = io::shape2_from_json(e);
            if (static_cast<int>(s.size()) != n)
                throw std::invalid_argument("exemplar of '" + m.label + "' does not have n points");
            m.exemplars.push_back(planar::to_complex(s.points()));
        }
        if (m.exemplars.empty())
            throw std::invalid_argument("class '" + m.label + "' has no exemplars");
        models.push_back(std::move(m));
    }
    if (models.empty())
        throw std::invalid_argument("model file has no classes");
    return models;
}

} // namespace shapemap::classify
