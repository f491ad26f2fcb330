#pragma once

#include "shapemap/shape.hpp"
#include "shapemap/transform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shapemap
{

/// Per-instance variation of a synthetic family.
struct FamilyVariation
{
    /// Relative perturbation of the family's shape parameter (aspect ratio,
    /// inner radius, ...). Zero gives the canonical template.
    double shape_param = 0.0;
    /// Fraction of the perimeter at which sampling starts, in [0, 1).
    double phase = 0.0;
};

/// Names accepted by `family_template` and `synth_shape`.
const std::vector<std::string>& synthetic_families();

/// A family name, optionally suffixed ":offset" to shift its shape parameter
/// (e.g. "ellipse:0.4" is an ellipse with 1.4 times the default aspect).
bool is_synthetic_family(const std::string& family);

/// Densely sampled, counter-clockwise, centred, unit-RMS outline of a family.
/// Throws std::invalid_argument for an unknown family.
Shape2 family_template(const std::string& family, const FamilyVariation& var = {});

/// Template resampled to n points, mapped by g, then perturbed by i.i.d.
/// isotropic Gaussian noise of standard deviation `noise_sigma` per point.
/// Deterministic in `seed`.
Shape2 synth_shape(const std::string& family, double noise_sigma, int n,
                   const SimilarityTransform2& g, std::uint64_t seed,
                   const FamilyVariation& var = {});

} // namespace shapemap
