#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "labeling.hpp"
#include "map.hpp"

namespace l0 {

struct SolveOptions {
    double epsilon = 1e-4;
    std::size_t max_iter = 256;
    Arith mode = Arith::rational;
    unsigned threads = 1;
    bool record_trace = false;
};

/// One refinement level: the simplex that was refined, its pointwise squared
/// diameter, and the subdivision cell chosen per atom (-1 where the atom had
/// already converged and kept its row unchanged).
struct TraceLevel {
    Simplex simplex;
    Scalar<Rat> diameter_sq;
    std::vector<long> cell_of_atom;
};

struct SolveTrace {
    std::vector<TraceLevel> levels;
};

struct SolveOutcome {
    Vector<Rat> fixed_point;                 // barycenter of the final simplex
    Scalar<double> residual;                 // per-atom |f(x*) - x*|
    std::optional<Scalar<Rat>> residual_sq;  // exact backend only
    std::vector<std::size_t> iterations;     // refinement levels per atom
    std::vector<std::uint8_t> converged_atoms;
    bool converged = false;
    Simplex final_simplex;
    SolveTrace trace;  // empty unless SolveOptions::record_trace
};

/// Smallest 1-based i with lambda_i > 0 and lambda_i >= mu_i. Exists for any
/// pair of coordinate vectors with lambda >= 0 and equal sums.
int pick_label_exact(std::span<const Rat> lambda, std::span<const Rat> mu);

/// Float rule: same test; if rounding leaves no index qualifying, fall back
/// to argmax(lambda_i - mu_i) over the numerically positive support
/// (lambda_i > 1e-12), first index on ties.
int pick_label_float(std::span<const double> lambda, std::span<const double> mu);

/// Labeling induced by a map: registry vertex y gets the smallest label i
/// with lambda_i > 0 and lambda_i >= mu_i, where lambda are y's coordinates
/// in the reference simplex s and mu those of f(y). Every registry vertex
/// must lie in s per atom; the result is proper or an error.
L0Labeling label_from_map(const Simplex& s, const AtomwiseMap& f, const SubdivisionPtr& sub,
                          Arith mode = Arith::rational);

/// Iterated-refinement fixed-point search: subdivide, label from the map in
/// the ORIGINAL simplex coordinates, keep the first completely labeled cell
/// per atom (reindexed so vertex slot j carries label j+1), until the
/// diameter is at most epsilon at the atom. Atoms converge and freeze
/// independently, so a multi-atom run is the splice of its single-atom runs.
SolveOutcome solve_on_simplex(const Simplex& s, const AtomwiseMap& f, const SolveOptions& opts);

/// Ball domains: circumscribe with a rational corner simplex, solve
/// f composed with the ball projection on it, then project the answer back
/// onto the ball. Float backend only.
SolveOutcome solve_on_convex(const Ball& ball, const AtomwiseMap& f, const SolveOptions& opts);

/// Corner simplex containing the ball at every atom; the containment is
/// certified exactly in rational arithmetic.
Simplex circumscribing_simplex(const Ball& ball);

}  // namespace l0
