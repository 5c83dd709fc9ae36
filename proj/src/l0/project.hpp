#pragma once

#include "map.hpp"

namespace l0 {

/// Metric projection onto a ball at one atom: identity inside, radial pull to
/// the boundary outside. The scale factor is nudged down by ulps until the
/// image tests inside, which makes double application bit-stable.
std::vector<double> project_ball_point(std::span<const double> center, double radius,
                                       std::span<const double> x);

/// Metric projection onto one atom's simplex: exhaustive minimum over the
/// affine projections onto all faces with nonnegative face coordinates.
/// Exact in the rational backend.
template <class T>
std::vector<T> project_simplex_point(const std::vector<std::vector<T>>& vertices, std::span<const T> x);

/// Pointwise metric projection onto the domain. Ball domains are float-only.
Vector<double> project_convex(const Domain& g, const Vector<double>& x);
Vector<Rat> project_convex(const Domain& g, const Vector<Rat>& x);

}  // namespace l0
