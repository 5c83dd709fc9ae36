#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simplex.hpp"

namespace l0 {

/// Atom-indexed closed ball. Center and radius are stored exactly; double
/// views are cached for the float-only operations (projection, retraction).
class Ball {
  public:
    Ball(Vector<Rat> center, Scalar<Rat> radius);

    const SpacePtr& space() const { return center_.space(); }
    std::size_t dim() const { return center_.dim(); }
    const Vector<Rat>& center() const { return center_; }
    const Scalar<Rat>& radius() const { return radius_; }
    const Vector<double>& center_d() const { return center_d_; }
    const Scalar<double>& radius_d() const { return radius_d_; }

    /// Exact membership; returns the first violating atom.
    std::optional<std::size_t> first_outside(const Vector<Rat>& x) const;

  private:
    Vector<Rat> center_;
    Scalar<Rat> radius_;
    Vector<double> center_d_;
    Scalar<double> radius_d_;
};

/// Convex solve domain: an atom-indexed simplex or ball.
class Domain {
  public:
    static Domain simplex(Simplex s);
    static Domain ball(Ball b);

    bool is_simplex() const { return static_cast<bool>(simplex_); }
    bool is_ball() const { return static_cast<bool>(ball_); }
    const Simplex& as_simplex() const;
    const Ball& as_ball() const;
    const SpacePtr& space() const { return space_; }
    std::size_t dim() const { return dim_; }

    /// Exact membership; returns the first violating atom.
    std::optional<std::size_t> first_outside(const Vector<Rat>& x) const;

    /// Float membership with 1e-9 slack at one atom. In-slack violations are
    /// repaired in place (clamped back onto the domain); beyond-slack
    /// violations return false.
    bool check_or_repair(std::size_t atom, std::vector<double>& point) const;

    /// Shared coordinate solver for simplex domains.
    const BarycentricSolver& solver() const;

  private:
    Domain() = default;
    SpacePtr space_;
    std::size_t dim_ = 0;
    std::shared_ptr<const Simplex> simplex_;
    std::shared_ptr<const Ball> ball_;
    std::shared_ptr<const BarycentricSolver> solver_;
};

/// Self-map of a domain, defined independently at every atom (the locality
/// that makes concatenation commute with evaluation). Exact evaluation is
/// optional: families built from irrational data support only the float
/// backend. Every evaluation checks that the image stays in the domain.
class AtomwiseMap {
  public:
    using ExactFn = std::function<std::vector<Rat>(std::size_t, std::span<const Rat>)>;
    using FloatFn = std::function<std::vector<double>(std::size_t, std::span<const double>)>;

    const Domain& domain() const { return domain_; }
    const std::string& family() const { return family_; }
    bool supports_exact() const { return static_cast<bool>(exact_); }

    /// Exact evaluation; the image must lie in the domain exactly.
    std::vector<Rat> eval_exact(std::size_t atom, std::span<const Rat> x) const;

    /// Float evaluation; images within 1e-9 of the domain are repaired onto
    /// it, anything further is a membership error.
    std::vector<double> eval(std::size_t atom, std::span<const double> x) const;

    /// Per-atom Lipschitz constant when the family knows one.
    std::optional<double> lipschitz(std::size_t atom) const;

    static AtomwiseMap constant(Domain domain, Vector<Rat> value);
    static AtomwiseMap affine(Domain domain, std::vector<Mat<Rat>> matrix, Vector<Rat> offset);
    /// x -> x + t (c - x), t in [0,1] per atom.
    static AtomwiseMap contraction_to_point(Domain domain, Scalar<Rat> t, Vector<Rat> c);
    /// Rotation about the ball center by a per-atom angle; d = 2, ball
    /// domains, float backend only.
    static AtomwiseMap rotation(Domain domain, std::vector<double> angle);
    /// Permutes barycentric coordinates in the domain simplex: coordinate i
    /// of the image equals coordinate perm[i] of the argument (perm 1-based).
    static AtomwiseMap coordinate_permutation(Domain domain, std::vector<std::vector<int>> perm);
    /// Unvalidated family for tests and composition; runtime domain checks
    /// still apply.
    static AtomwiseMap custom(Domain domain, std::string family, ExactFn exact, FloatFn flt,
                              std::vector<std::optional<double>> lipschitz = {});
    /// f composed with the metric projection onto the ball, as a self-map of
    /// the given simplex domain (which must contain the ball). Float only.
    static AtomwiseMap compose_ball_projection(Domain simplex_domain, Ball ball, const AtomwiseMap& f);

  private:
    AtomwiseMap(Domain domain, std::string family) : domain_(std::move(domain)), family_(std::move(family)) {}
    Domain domain_;
    std::string family_;
    ExactFn exact_;
    FloatFn float_;
    std::vector<std::optional<double>> lipschitz_;
};

}  // namespace l0
