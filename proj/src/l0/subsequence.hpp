#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "values.hpp"

namespace l0 {

/// Atom-indexed family of strictly increasing index sequences into a source
/// sequence: rows[k][atom] is the k-th selected index at that atom.
struct RandomSubsequence {
    SpacePtr space;
    std::size_t source_len = 0;
    std::vector<std::vector<std::size_t>> rows;

    std::size_t term_count() const { return rows.size(); }
    std::size_t index_at(std::size_t k, std::size_t atom) const { return rows[k][atom]; }
};

template <class T>
struct BwExtraction {
    RandomSubsequence subsequence;
    /// Per-atom accumulation point (center of the final bisection box).
    Vector<T> limit;
};

/// Bolzano-Weierstrass extraction, run independently per atom: round-robin
/// coordinate bisection of a bounding box, keeping the half with more points
/// (lower half on ties) until the box diameter is at most tol. The selected
/// indices are every surviving index in order, truncated across atoms to a
/// common length.
template <class T>
BwExtraction<T> random_subsequence_bw(const std::vector<Vector<T>>& seq, const T& tol) {
    if (seq.empty()) throw ValidationError("bolzano-weierstrass extraction needs a non-empty sequence");
    if (!(tol > T(0))) throw ValidationError("tolerance must be positive");
    const SpacePtr& space = seq.front().space();
    const std::size_t dim = seq.front().dim();
    for (const Vector<T>& x : seq) {
        require_same_space(space, x.space(), "bolzano-weierstrass extraction");
        if (x.dim() != dim) throw StructuralError("sequence entries have mixed dimensions");
    }
    const std::size_t K = space->atom_count();
    const T tol_sq = T(tol * tol);

    std::vector<std::vector<std::size_t>> survivors(K);
    std::vector<T> limit_data(K * dim);
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<T> lo(seq.front().row(a).begin(), seq.front().row(a).end());
        std::vector<T> hi = lo;
        for (const Vector<T>& x : seq) {
            auto r = x.row(a);
            for (std::size_t i = 0; i < dim; ++i) {
                lo[i] = std::min(lo[i], r[i]);
                hi[i] = std::max(hi[i], r[i]);
            }
        }
        std::vector<std::size_t> idx(seq.size());
        for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;

        auto box_diam_sq = [&] {
            T s = T(0);
            for (std::size_t i = 0; i < dim; ++i) s = T(s + (hi[i] - lo[i]) * (hi[i] - lo[i]));
            return s;
        };
        std::size_t c = 0;
        while (box_diam_sq() > tol_sq) {
            T mid = T((lo[c] + hi[c]) / 2);
            std::vector<std::size_t> lower, upper;
            for (std::size_t j : idx) {
                if (seq[j].at(a, c) <= mid)
                    lower.push_back(j);
                else
                    upper.push_back(j);
            }
            if (lower.size() >= upper.size()) {
                idx = std::move(lower);
                hi[c] = mid;
            } else {
                idx = std::move(upper);
                lo[c] = mid;
            }
            c = (c + 1) % dim;
        }
        survivors[a] = std::move(idx);
        for (std::size_t i = 0; i < dim; ++i) limit_data[a * dim + i] = T((lo[i] + hi[i]) / 2);
    }

    std::size_t terms = survivors.front().size();
    for (const auto& s : survivors) terms = std::min(terms, s.size());
    RandomSubsequence sub;
    sub.space = space;
    sub.source_len = seq.size();
    sub.rows.resize(terms, std::vector<std::size_t>(K));
    for (std::size_t k = 0; k < terms; ++k)
        for (std::size_t a = 0; a < K; ++a) sub.rows[k][a] = survivors[a][k];
    return BwExtraction<T>{std::move(sub), Vector<T>(space, dim, std::move(limit_data))};
}

}  // namespace l0
