#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <vector>

#include "rational.hpp"

namespace l0 {

/// Dense row-major matrix for the tiny systems this library solves (order of
/// the simplex vertex count, so at most a handful of rows).
template <class T>
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, T(0)) {}
    T& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    Mat<T> transposed() const {
        Mat<T> t(cols, rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
        return t;
    }
    /// Gram matrix A^T A.
    Mat<T> gram() const {
        Mat<T> g(cols, cols);
        for (std::size_t i = 0; i < cols; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                T s = T(0);
                for (std::size_t r = 0; r < rows; ++r) s = T(s + at(r, i) * at(r, j));
                g.at(i, j) = std::move(s);
            }
        return g;
    }
    std::vector<T> mul(const std::vector<T>& x) const {
        std::vector<T> y(rows, T(0));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) y[r] = T(y[r] + at(r, c) * x[c]);
        return y;
    }
};

namespace detail {
template <class T>
double pivot_weight(const T& x) {
    if constexpr (std::is_same_v<T, double>)
        return std::abs(x);
    else
        return sgn(x) != 0 ? 1.0 : 0.0;  // exact backend: any nonzero pivot works
}
}  // namespace detail

/// LU factorization with row pivoting. In the exact backend the first nonzero
/// pivot is taken (deterministic and division-safe); in doubles the largest.
template <class T>
class Lu {
  public:
    static Lu factor(Mat<T> m) {
        Lu f;
        f.n_ = m.rows;
        f.piv_.resize(f.n_);
        for (std::size_t i = 0; i < f.n_; ++i) f.piv_[i] = i;
        for (std::size_t k = 0; k < f.n_; ++k) {
            std::size_t best = k;
            double bw = detail::pivot_weight(m.at(k, k));
            for (std::size_t r = k + 1; r < f.n_; ++r) {
                double w = detail::pivot_weight(m.at(r, k));
                if constexpr (std::is_same_v<T, double>) {
                    if (w > bw) {
                        bw = w;
                        best = r;
                    }
                } else {
                    if (bw == 0.0 && w > 0.0) {
                        bw = w;
                        best = r;
                    }
                }
            }
            if (bw == 0.0) {
                f.singular_ = true;
                break;
            }
            if (best != k) {
                for (std::size_t c = 0; c < f.n_; ++c) std::swap(m.at(k, c), m.at(best, c));
                std::swap(f.piv_[k], f.piv_[best]);
            }
            for (std::size_t r = k + 1; r < f.n_; ++r) {
                T factor = T(m.at(r, k) / m.at(k, k));
                m.at(r, k) = factor;
                for (std::size_t c = k + 1; c < f.n_; ++c)
                    m.at(r, c) = T(m.at(r, c) - factor * m.at(k, c));
            }
        }
        f.lu_ = std::move(m);
        return f;
    }

    bool singular() const { return singular_; }

    std::vector<T> solve(const std::vector<T>& b) const {
        std::vector<T> y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            T s = b[piv_[i]];
            for (std::size_t j = 0; j < i; ++j) s = T(s - lu_.at(i, j) * y[j]);
            y[i] = std::move(s);
        }
        for (std::size_t i = n_; i-- > 0;) {
            T s = std::move(y[i]);
            for (std::size_t j = i + 1; j < n_; ++j) s = T(s - lu_.at(i, j) * y[j]);
            y[i] = T(s / lu_.at(i, i));
        }
        return y;
    }

  private:
    std::size_t n_ = 0;
    Mat<T> lu_;
    std::vector<std::size_t> piv_;
    bool singular_ = false;
};

/// Exact rank via Gaussian elimination.
inline std::size_t rank(Mat<Rat> m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t p = r;
        while (p < m.rows && sgn(m.at(p, c)) == 0) ++p;
        if (p == m.rows) continue;
        for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(p, j));
        for (std::size_t i = r + 1; i < m.rows; ++i) {
            if (sgn(m.at(i, c)) == 0) continue;
            Rat f = m.at(i, c) / m.at(r, c);
            for (std::size_t j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        ++r;
    }
    return r;
}

/// Nonzero kernel vector of A (A x = 0), if the kernel is nontrivial.
inline std::optional<std::vector<Rat>> kernel_vector(Mat<Rat> m) {
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t p = r;
        while (p < m.rows && sgn(m.at(p, c)) == 0) ++p;
        if (p == m.rows) continue;
        for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(r, j), m.at(p, j));
        Rat inv = m.at(r, c);
        for (std::size_t j = 0; j < m.cols; ++j) m.at(r, j) /= inv;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || sgn(m.at(i, c)) == 0) continue;
            Rat f = m.at(i, c);
            for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
        }
        pivot_col.push_back(c);
        ++r;
    }
    if (pivot_col.size() == m.cols) return std::nullopt;
    std::size_t free_col = 0;
    while (free_col < m.cols) {
        bool is_pivot = false;
        for (std::size_t pc : pivot_col)
            if (pc == free_col) is_pivot = true;
        if (!is_pivot) break;
        ++free_col;
    }
    std::vector<Rat> x(m.cols, Rat(0));
    x[free_col] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = -m.at(i, free_col);
    return x;
}

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
/// Sizes here are tiny, so the plain quadratic sweep is fine.
inline double sym_min_eigenvalue(Mat<double> g) {
    const std::size_t n = g.rows;
    if (n == 0) return 0.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += g.at(p, q) * g.at(p, q);
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(g.at(p, q)) < 1e-300) continue;
                double theta = (g.at(q, q) - g.at(p, p)) / (2.0 * g.at(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double gkp = g.at(k, p), gkq = g.at(k, q);
                    g.at(k, p) = c * gkp - s * gkq;
                    g.at(k, q) = s * gkp + c * gkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double gpk = g.at(p, k), gqk = g.at(q, k);
                    g.at(p, k) = c * gpk - s * gqk;
                    g.at(q, k) = s * gpk + c * gqk;
                }
            }
    }
    double mn = g.at(0, 0);
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, g.at(i, i));
    return mn;
}

}  // namespace l0
