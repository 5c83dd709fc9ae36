#include "project.hpp"

#include <cmath>

namespace l0 {

std::vector<double> project_ball_point(std::span<const double> center, double radius,
                                       std::span<const double> x) {
    const std::size_t d = x.size();
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist_sq += (x[i] - center[i]) * (x[i] - center[i]);
    std::vector<double> out(x.begin(), x.end());
    if (dist_sq <= radius * radius) return out;
    double s = radius / std::sqrt(dist_sq);
    for (;;) {
        double back = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            out[i] = center[i] + s * (x[i] - center[i]);
            back += (out[i] - center[i]) * (out[i] - center[i]);
        }
        if (back <= radius * radius) return out;
        s = std::nextafter(s, 0.0);  // rounding pushed the image outside; step back one ulp
    }
}

template <class T>
std::vector<T> project_simplex_point(const std::vector<std::vector<T>>& vertices, std::span<const T> x) {
    const std::size_t n = vertices.size();
    const std::size_t d = x.size();
    std::vector<T> best;
    T best_dist_sq = T(0);
    bool have_best = false;

    std::vector<std::size_t> face;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        face.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (mask >> j & 1u) face.push_back(j);
        const std::size_t k = face.size();

        // Affine projection onto the face's hull via the Gram system of the
        // difference vectors, then a nonnegativity check on face coordinates.
        std::vector<T> p(d);
        bool feasible = true;
        if (k == 1) {
            for (std::size_t i = 0; i < d; ++i) p[i] = vertices[face[0]][i];
        } else {
            Mat<T> diff(d, k - 1);
            for (std::size_t c = 0; c + 1 < k; ++c)
                for (std::size_t r = 0; r < d; ++r)
                    diff.at(r, c) = T(vertices[face[c + 1]][r] - vertices[face[0]][r]);
            std::vector<T> rhs(d);
            for (std::size_t r = 0; r < d; ++r) rhs[r] = T(x[r] - vertices[face[0]][r]);
            Lu<T> lu = Lu<T>::factor(diff.gram());
            if (lu.singular()) continue;
            std::vector<T> mu = lu.solve(diff.transposed().mul(rhs));
            T rest = T(0);
            for (const T& m : mu) {
                if (m < T(0)) feasible = false;
                rest = T(rest + m);
            }
            if (T(1) - rest < T(0)) feasible = false;
            if (!feasible) continue;
            for (std::size_t r = 0; r < d; ++r) {
                T acc = vertices[face[0]][r];
                for (std::size_t c = 0; c + 1 < k; ++c) acc = T(acc + mu[c] * diff.at(r, c));
                p[r] = std::move(acc);
            }
        }
        T dist_sq = T(0);
        for (std::size_t i = 0; i < d; ++i) dist_sq = T(dist_sq + (x[i] - p[i]) * (x[i] - p[i]));
        if (!have_best || dist_sq < best_dist_sq) {
            best = std::move(p);
            best_dist_sq = std::move(dist_sq);
            have_best = true;
        }
    }
    return best;
}

template std::vector<Rat> project_simplex_point<Rat>(const std::vector<std::vector<Rat>>&, std::span<const Rat>);
template std::vector<double> project_simplex_point<double>(const std::vector<std::vector<double>>&,
                                                           std::span<const double>);

Vector<double> project_convex(const Domain& g, const Vector<double>& x) {
    require_same_space(g.space(), x.space(), "projection");
    if (x.dim() != g.dim()) throw StructuralError("projection: point dimension differs from domain");
    const std::size_t K = g.space()->atom_count();
    const std::size_t d = g.dim();
    std::vector<double> data(K * d);
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<double> p;
        if (g.is_ball()) {
            p = project_ball_point(g.as_ball().center_d().row(a), g.as_ball().radius_d().at(a), x.row(a));
        } else {
            std::vector<std::vector<double>> verts;
            for (const auto& v : g.as_simplex().vertices()) {
                auto row = v.row(a);
                std::vector<double> vr(row.size());
                for (std::size_t i = 0; i < vr.size(); ++i) vr[i] = rat_to_double(row[i]);
                verts.push_back(std::move(vr));
            }
            p = project_simplex_point<double>(verts, x.row(a));
        }
        for (std::size_t i = 0; i < d; ++i) data[a * d + i] = p[i];
    }
    return Vector<double>(g.space(), d, std::move(data));
}

Vector<Rat> project_convex(const Domain& g, const Vector<Rat>& x) {
    if (g.is_ball())
        throw ValidationError("ball projection needs square roots; use the float backend");
    require_same_space(g.space(), x.space(), "projection");
    if (x.dim() != g.dim()) throw StructuralError("projection: point dimension differs from domain");
    const std::size_t K = g.space()->atom_count();
    const std::size_t d = g.dim();
    std::vector<Rat> data(K * d);
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<std::vector<Rat>> verts;
        for (const auto& v : g.as_simplex().vertices()) {
            auto row = v.row(a);
            verts.emplace_back(row.begin(), row.end());
        }
        std::vector<Rat> p = project_simplex_point<Rat>(verts, x.row(a));
        for (std::size_t i = 0; i < d; ++i) data[a * d + i] = std::move(p[i]);
    }
    return Vector<Rat>(g.space(), d, std::move(data));
}

}  // namespace l0
