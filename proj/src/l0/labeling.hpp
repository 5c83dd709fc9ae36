#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subdivision.hpp"

namespace l0 {

/// Labeling of one atom's subdivision: one label in {1..n} per registry
/// vertex. Construction enforces properness, i.e. every vertex's label lies
/// in the support of its parent coordinates.
class ClassicalLabeling {
  public:
    static ClassicalLabeling make(SubdivisionPtr sub, std::vector<int> labels);

    const SubdivisionPtr& subdivision() const { return sub_; }
    int label(std::uint32_t vid) const { return labels_[vid]; }
    const std::vector<int>& labels() const { return labels_; }

  private:
    ClassicalLabeling(SubdivisionPtr sub, std::vector<int> labels)
        : sub_(std::move(sub)), labels_(std::move(labels)) {}
    SubdivisionPtr sub_;
    std::vector<int> labels_;
};

struct LabelingViolation {
    std::uint32_t vertex;
    std::size_t atom;
    int label;
};

/// Atom-indexed labeling of a subdivision's registry. Extends to the whole
/// lazy extreme-point family atom by atom.
class L0Labeling {
  public:
    /// Validates shape and label range only; properness is a separate check.
    L0Labeling(SubdivisionPtr sub, std::vector<std::vector<int>> labels);

    const SubdivisionPtr& subdivision() const { return sub_; }
    const SpacePtr& space() const { return sub_->space(); }
    int label(std::uint32_t vid, std::size_t atom) const { return labels_[vid][atom]; }
    const std::vector<std::vector<int>>& labels() const { return labels_; }

    /// First properness violation against the parent-coordinate supports, or
    /// nullopt when proper.
    std::optional<LabelingViolation> properness_violation() const;
    bool is_proper() const { return !properness_violation().has_value(); }

    /// Sigma-stable extension: label of the family member selected by an
    /// atom-to-registry-id assignment.
    Label value_at(const std::vector<std::uint32_t>& assignment) const;

  private:
    SubdivisionPtr sub_;
    std::vector<std::vector<int>> labels_;  // [vid][atom]
};

/// Cells whose vertex labels are exactly {1..n}, in canonical cell order.
/// Pure combinatorics; properness is the caller's contract.
std::vector<std::size_t> completely_labeled_cells(const Subdivision& sub, const std::vector<int>& labels);

/// Same, for a validated classical labeling, asserting the classical Sperner
/// parity: the count must be odd.
std::vector<std::size_t> enumerate_completely_labeled(const ClassicalLabeling& psi);

/// Partition of the atoms by full label tuple, each part carrying its
/// classical labeling. Parts appear in order of first atom occurrence.
struct SpernerDecomposition {
    PartitionOfUnity partition;
    std::vector<ClassicalLabeling> parts;
};

SpernerDecomposition decompose_labeling(const L0Labeling& phi);

struct SpernerSearchResult {
    SpernerDecomposition decomposition;
    /// Chosen completely labeled cell per part (first in canonical order).
    std::vector<std::size_t> cell_of_part;
    /// Per part: registry ids reindexed so position j carries label j+1.
    std::vector<std::vector<std::uint32_t>> vertices_of_part;
    /// Per vertex slot j: the atom-to-registry-id assignment of the
    /// concatenated vertex.
    std::vector<std::vector<std::uint32_t>> assignment;
    /// Concatenated simplex; vertex slot j has constant label j+1 under phi.
    Simplex simplex;
};

/// Random Sperner search: decompose, enumerate per part, pick the first
/// completely labeled cell, reindex by label, and concatenate along the
/// partition.
SpernerSearchResult sperner_search(const L0Labeling& phi);

}  // namespace l0
