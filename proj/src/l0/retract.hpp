#pragma once

#include "map.hpp"

namespace l0 {

/// Sphere retraction built from a map without a fixed point at x: follow the
/// ray from f(x) through x to the unit sphere. h(x) = x + lambda (f(x) - x)
/// with lambda the smaller root of
///   |u|^2 lambda^2 + 2 <x,u> lambda + |x|^2 - 1 = 0,   u = f(x) - x.
/// Requires the unit ball at the origin as domain; float backend. Points on
/// the sphere map to themselves; f(x) = x at any atom is an error naming it.
Vector<double> borsuk_retraction(const AtomwiseMap& f, const Vector<double>& x);

/// Single-atom core, exposed for tests: x and fx are one atom's rows.
std::vector<double> borsuk_point(std::span<const double> x, std::span<const double> fx,
                                 std::size_t atom);

}  // namespace l0
