#pragma once

#include <optional>
#include <vector>

#include "linalg.hpp"
#include "values.hpp"

namespace l0 {

/// One atom's simplex: n affinely independent points in R^dim.
struct ClassicalSimplex {
    std::size_t dim = 0;
    std::vector<std::vector<Rat>> vertices;
    std::size_t order() const { return vertices.size(); }
};

/// Affine-dependence witness at one atom: coefficients over the vertices, not
/// all zero, with sum(coeffs) = 0 and sum(coeffs_i * v_i) = 0.
struct DependenceWitness {
    std::size_t atom = 0;
    std::vector<Rat> coeffs;
};

/// Exact per-atom affine independence test. Returns the first witness found,
/// or nullopt when the vertices are independent at every atom.
std::optional<DependenceWitness> affine_dependence(const std::vector<Vector<Rat>>& vertices);

/// Float-backend variant: an atom fails when the smallest singular value of
/// the difference matrix is at most 1e-9 times its Frobenius norm.
std::optional<std::size_t> affine_dependence(const std::vector<Vector<double>>& vertices);

/// Atom-indexed simplex: n vertices, affinely independent at every atom.
/// Vertex coordinates are always exact rationals.
class Simplex {
  public:
    static Simplex make(std::vector<Vector<Rat>> vertices);

    const SpacePtr& space() const { return verts_.front().space(); }
    std::size_t order() const { return verts_.size(); }  // vertex count n
    std::size_t dim() const { return verts_.front().dim(); }
    const Vector<Rat>& vertex(std::size_t j) const { return verts_[j]; }
    const std::vector<Vector<Rat>>& vertices() const { return verts_; }

    ClassicalSimplex at_atom(std::size_t atom) const;

    /// Pointwise squared diameter: max over vertex pairs of |v_i - v_j|^2.
    Scalar<Rat> diameter_sq() const;
    Scalar<double> diameter() const;
    Vector<Rat> barycenter() const;

    bool operator==(const Simplex& o) const;

  private:
    friend Simplex concatenate_simplexes(const std::vector<Simplex>&, const PartitionOfUnity&);
    explicit Simplex(std::vector<Vector<Rat>> vertices) : verts_(std::move(vertices)) {}
    std::vector<Vector<Rat>> verts_;
};

/// Splice along a partition, vertex slot by vertex slot. Independence holds
/// per atom because each atom's rows come from a single input simplex.
Simplex concatenate_simplexes(const std::vector<Simplex>& items, const PartitionOfUnity& p);

/// Per-atom factorization of a simplex's difference matrix, reused across the
/// many coordinate solves a subdivision or labeling pass performs.
class BarycentricSolver {
  public:
    explicit BarycentricSolver(const Simplex& s);

    /// Affine coordinates (sum 1, possibly negative) of a point at one atom;
    /// nullopt when the point is outside the affine hull.
    std::optional<std::vector<Rat>> affine_at(std::size_t atom, std::span<const Rat> point) const;

    /// Float path. The least-squares residual must stay below 1e-9 * scale,
    /// otherwise the point is treated as outside the affine hull.
    std::optional<std::vector<double>> affine_at(std::size_t atom, std::span<const double> point) const;

    const Simplex& simplex() const { return simplex_; }

  private:
    Simplex simplex_;
    std::vector<Lu<Rat>> lu_exact_;      // per atom
    std::vector<Lu<double>> lu_float_;   // per atom
    std::vector<Mat<Rat>> diff_exact_;   // d x (n-1), columns v_j+1 - v_1
    std::vector<Mat<double>> diff_float_;
    std::vector<double> scale_;
    bool square_ = false;
};

/// Exact barycentric coordinates of x in s, as an atom-indexed point in R^n.
/// Throws MembershipError naming the atom and the violated constraint when x
/// lies outside the simplex at some atom.
Vector<Rat> barycentric_coordinates(const Simplex& s, const Vector<Rat>& x);

/// Non-throwing membership probe: nullopt when x is outside at any atom.
std::optional<Vector<Rat>> try_barycentric_coordinates(const Simplex& s, const Vector<Rat>& x);

}  // namespace l0
