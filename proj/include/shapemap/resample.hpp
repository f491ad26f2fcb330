#pragma once

#include "shapemap/shape.hpp"

namespace shapemap
{

/// Total polyline length, including the closing segment for closed shapes.
template <int Dim>
double arc_length(const Shape<Dim>& s);

/// Resample to `n` points equally spaced by arc length, starting at the
/// first vertex. An outline that already has `n` points is returned as is,
/// so resampling twice at the same `n` is a no-op.
///
/// Throws std::invalid_argument for n < 3 or a zero-length shape.
template <int Dim>
Shape<Dim> resample_arclength(const Shape<Dim>& s, int n);

/// Plain equal-arc-length placement along the original polyline.
template <int Dim>
Shape<Dim> resample_equal_arc(const Shape<Dim>& s, int n);

} // namespace shapemap
