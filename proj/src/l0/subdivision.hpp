#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "simplex.hpp"

namespace l0 {

/// Simplicial subdivision of an atom-indexed simplex. The combinatorial
/// structure (registry ids, cells) is shared by all atoms; only the registry
/// point coordinates vary per atom. Every registry vertex is the barycenter
/// of a nonempty subset of parent vertices, encoded as a bitmask, so its
/// coordinates in the parent are 1/|T| on the subset and 0 elsewhere at every
/// atom.
class Subdivision {
  public:
    Subdivision(Simplex parent, std::vector<std::uint32_t> masks, std::vector<std::vector<std::uint32_t>> cells);

    const Simplex& parent() const { return parent_; }
    const SpacePtr& space() const { return parent_.space(); }
    std::size_t order() const { return parent_.order(); }

    std::size_t registry_size() const { return masks_.size(); }
    std::size_t cell_count() const { return cells_.size(); }
    const std::vector<std::vector<std::uint32_t>>& cells() const { return cells_; }
    const std::vector<std::uint32_t>& cell(std::size_t cid) const { return cells_[cid]; }

    const Vector<Rat>& registry_point(std::uint32_t vid) const { return registry_[vid]; }
    std::uint32_t mask(std::uint32_t vid) const { return masks_[vid]; }

    /// Coordinates of a registry vertex in the parent simplex (same at every
    /// atom): 1/|T| on the defining subset.
    std::vector<Rat> parent_coords(std::uint32_t vid) const;

    /// Support of the parent coordinates, as 1-based labels.
    std::vector<int> chi(std::uint32_t vid) const;

    Simplex cell_simplex(std::size_t cid) const;

    /// Pointwise max of cell diameters.
    Scalar<Rat> diameter_sq() const;

    /// First cell (canonical order) containing x, independently per atom;
    /// nullopt at an atom when no cell contains it there.
    std::vector<std::optional<std::size_t>> locate_cell(const Vector<Rat>& x) const;

  private:
    Simplex parent_;
    std::vector<std::uint32_t> masks_;
    std::vector<std::vector<std::uint32_t>> cells_;
    std::vector<Vector<Rat>> registry_;
};

using SubdivisionPtr = std::shared_ptr<const Subdivision>;

/// Barycentric subdivision: one cell per permutation of the vertices (in
/// lexicographic order), cell vertices are the barycenters of the permutation
/// prefixes. Registry lists all nonempty vertex subsets in size-then-lex
/// order.
SubdivisionPtr barycentric_subdivision(const Simplex& s);

/// Edge-midpoint subdivision of a 2-simplex: three corner cells plus the
/// central midpoint cell.
SubdivisionPtr midpoint_subdivision(const Simplex& s);

/// Lazy family of all concatenations of a finite point registry along
/// atom-to-id assignments. Never materialized: membership resolves per atom,
/// enumeration decodes mixed-radix indices on demand.
class ExtremeFamily {
  public:
    ExtremeFamily(SpacePtr space, std::vector<Vector<Rat>> points);

    std::size_t registry_size() const { return points_.size(); }
    const Vector<Rat>& registry_point(std::uint32_t vid) const { return points_[vid]; }

    /// Total member count, |registry|^K.
    mpz_class count() const;

    /// Per-atom registry ids identifying x, or nullopt if x is not a member.
    std::optional<std::vector<std::uint32_t>> member(const Vector<Rat>& x) const;

    /// Concatenation selected by an explicit atom-to-id assignment.
    Vector<Rat> at_assignment(const std::vector<std::uint32_t>& ids) const;

    /// Mixed-radix enumeration, index in [0, count()).
    Vector<Rat> at_index(const mpz_class& index) const;

  private:
    SpacePtr space_;
    std::vector<Vector<Rat>> points_;
};

ExtremeFamily extreme_points(const Simplex& s);
ExtremeFamily extreme_points(const Subdivision& sub);

/// Leaf cells of depth-many iterated barycentric subdivisions, with a
/// deduplicated per-level vertex registry for tracing.
struct SubdivisionLevel {
    std::vector<Vector<Rat>> registry;
    std::vector<std::vector<std::uint32_t>> cells;
    Scalar<Rat> max_diameter_sq;
};
std::vector<SubdivisionLevel> iterated_barycentric(const Simplex& s, int depth, std::size_t max_cells = 100000);

}  // namespace l0
