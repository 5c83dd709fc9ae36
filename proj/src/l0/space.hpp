#pragma once

#include <memory>
#include <vector>

#include "bitset.hpp"
#include "rational.hpp"

namespace l0 {

class Space;
using SpacePtr = std::shared_ptr<const Space>;

/// Finite atomic probability space: atoms 0..K-1 with strictly positive
/// weights. Weights are stored exactly; `exact_weights` records whether they
/// were given as rationals (sum must be exactly 1) or as floats (sum must be
/// within 1e-12 of 1 after exact dyadic conversion).
class Space {
  public:
    static SpacePtr make(std::vector<Rat> weights, bool exact_weights = true);

    std::size_t atom_count() const { return weights_.size(); }
    const Rat& weight(std::size_t atom) const { return weights_[atom]; }
    const std::vector<Rat>& weights() const { return weights_; }
    bool exact_weights() const { return exact_; }

    /// Identity test used by every cross-object guard: two objects interoperate
    /// only if they hold the same Space instance.
    static bool same(const SpacePtr& a, const SpacePtr& b) { return a.get() == b.get(); }

  private:
    Space(std::vector<Rat> weights, bool exact) : weights_(std::move(weights)), exact_(exact) {}
    std::vector<Rat> weights_;
    bool exact_;
};

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what);

/// Measurable set, i.e. a set of atoms. Immutable value.
class Event {
  public:
    Event(SpacePtr space, Bits bits);

    static Event zero(const SpacePtr& space) { return Event(space, Bits(space->atom_count())); }
    static Event one(const SpacePtr& space) { return Event(space, Bits(space->atom_count(), true)); }
    static Event singleton(const SpacePtr& space, std::size_t atom);
    static Event from_atoms(const SpacePtr& space, const std::vector<std::size_t>& atoms);

    const SpacePtr& space() const { return space_; }
    const Bits& bits() const { return bits_; }

    bool contains(std::size_t atom) const { return bits_.test(atom); }
    bool is_zero() const { return bits_.none(); }
    bool is_one() const { return bits_.all(); }
    std::size_t atom_count() const { return bits_.count(); }
    std::vector<std::size_t> atoms() const;

    Event meet(const Event& o) const;
    Event join(const Event& o) const;
    Event complement() const;
    /// Set difference: this and not o.
    Event difference(const Event& o) const;

    bool operator==(const Event& o) const;
    bool operator!=(const Event& o) const { return !(*this == o); }
    bool subset_of(const Event& o) const;
    bool disjoint_from(const Event& o) const;

    /// Exact sum of atom weights.
    Rat probability() const;

  private:
    SpacePtr space_;
    Bits bits_;
};

/// Finite partition of unity: pairwise disjoint events whose join is the sure
/// event. Empty parts are dropped at construction; at least one part remains.
class PartitionOfUnity {
  public:
    PartitionOfUnity(SpacePtr space, std::vector<Event> parts);

    static PartitionOfUnity trivial(const SpacePtr& space);
    /// One part per atom, in atom order.
    static PartitionOfUnity atoms(const SpacePtr& space);

    const SpacePtr& space() const { return space_; }
    const std::vector<Event>& parts() const { return parts_; }
    std::size_t part_count() const { return parts_.size(); }

    /// Index of the unique part containing the atom.
    std::size_t part_of_atom(std::size_t atom) const;

    /// Common refinement: pairwise meets in lexicographic (i, j) order with
    /// empty meets dropped.
    PartitionOfUnity refine(const PartitionOfUnity& o) const;

  private:
    SpacePtr space_;
    std::vector<Event> parts_;
};

}  // namespace l0
