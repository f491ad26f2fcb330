#pragma once

#include "shapemap/planar_likelihood.hpp"
#include "shapemap/shape.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace shapemap::classify
{

enum class Aggregate
{
    mean, ///< log-mean-exp over exemplars (empirical prior)
    max,  ///< nearest exemplar
};

struct ClassifierOptions
{
    planar::Regulators regs;
    bool allow_reversal = false;
    Aggregate aggregate = Aggregate::mean;

    bool operator==(const ClassifierOptions& o) const;
};

/// Exemplar set standing in for the class shape prior. Exemplars are
/// resampled to `n`, centred and scaled to unit RMS radius.
struct ClassModel
{
    std::string label;
    std::vector<std::vector<planar::Complex>> exemplars;
    int n = 0;
    ClassifierOptions options;
    /// Reserved prior weight; classification uses a uniform class prior.
    double weight = 1.0;
};

struct RankedLabel
{
    std::string label;
    double log_posterior = 0.0;
};

struct ClassificationResult
{
    std::vector<RankedLabel> ranked;
    std::string winner;
};

/// Resample, centre and unit-RMS normalize a shape.
std::vector<planar::Complex> preprocess(const Shape2& s, int n);

/// Throws std::invalid_argument for n < 3, empty input, or a label whose
/// shape list is empty.
std::vector<ClassModel> train(const std::vector<std::pair<std::string, Shape2>>& labeled, int n,
                              const ClassifierOptions& options = {});

/// log of the exemplar-mean (or max) of the correspondence-reduced kernel.
/// `y` must already have `model.n` points; throws
/// std::invalid_argument("incomparable n") otherwise.
double class_log_likelihood(std::span<const planar::Complex> y, const ClassModel& model);
double class_log_likelihood(const Shape2& y, const ClassModel& model);

/// Ranks classes by log-likelihood under a uniform class prior, normalized
/// to log-posteriors. Ties are broken by label. `y` is resampled to the
/// models' n only when its point count differs. Throws
/// std::invalid_argument for an empty model list or models that disagree on
/// n or options.
ClassificationResult classify(const Shape2& y, const std::vector<ClassModel>& models);

nlohmann::json to_json(const planar::Regulators& r);
planar::Regulators regulators_from_json(const nlohmann::json& j);
/// Regulators plus "allow_reversal" and "aggregate".
nlohmann::json to_json(const ClassifierOptions& o);
ClassifierOptions options_from_json(const nlohmann::json& j);

/// {"n": int, "regs": {...}, "classes": [{"label", "weight", "exemplars": [shape, ...]}]}
nlohmann::json models_to_json(const std::vector<ClassModel>& models);
std::vector<ClassModel> models_from_json(const nlohmann::json& j);

} // namespace shapemap::classify
