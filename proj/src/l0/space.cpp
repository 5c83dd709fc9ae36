#include "space.hpp"

#include <cmath>

#include "errors.hpp"

namespace l0 {

SpacePtr Space::make(std::vector<Rat> weights, bool exact_weights) {
    if (weights.empty()) throw ValidationError("space needs at least one atom");
    Rat sum = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (sgn(weights[i]) <= 0)
            throw ValidationError("atom " + std::to_string(i) + " has non-positive weight");
        sum += weights[i];
    }
    if (exact_weights) {
        if (sum != 1) throw ValidationError("weights must sum to 1, got " + rat_to_string(sum));
    } else {
        if (std::abs(rat_to_double(sum) - 1.0) > 1e-12)
            throw ValidationError("float weights must sum to 1 within 1e-12");
    }
    return SpacePtr(new Space(std::move(weights), exact_weights));
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
    if (!Space::same(a, b)) throw StructuralError(std::string(what) + ": operands live on different spaces");
}

Event::Event(SpacePtr space, Bits bits) : space_(std::move(space)), bits_(std::move(bits)) {
    if (!space_) throw StructuralError("event without a space");
    if (bits_.size() != space_->atom_count()) throw StructuralError("event bit width does not match atom count");
}

Event Event::singleton(const SpacePtr& space, std::size_t atom) {
    if (atom >= space->atom_count()) throw StructuralError("atom index out of range");
    Bits b(space->atom_count());
    b.set(atom);
    return Event(space, std::move(b));
}

Event Event::from_atoms(const SpacePtr& space, const std::vector<std::size_t>& atoms) {
    Bits b(space->atom_count());
    for (std::size_t a : atoms) {
        if (a >= space->atom_count()) throw StructuralError("atom index out of range");
        b.set(a);
    }
    return Event(space, std::move(b));
}

std::vector<std::size_t> Event::atoms() const {
    std::vector<std::size_t> out;
    bits_.for_each([&](std::size_t i) { out.push_back(i); });
    return out;
}

Event Event::meet(const Event& o) const {
    require_same_space(space_, o.space_, "meet");
    return Event(space_, bits_ & o.bits_);
}
Event Event::join(const Event& o) const {
    require_same_space(space_, o.space_, "join");
    return Event(space_, bits_ | o.bits_);
}
Event Event::complement() const { return Event(space_, ~bits_); }
Event Event::difference(const Event& o) const {
    require_same_space(space_, o.space_, "difference");
    return Event(space_, bits_ - o.bits_);
}

bool Event::operator==(const Event& o) const {
    require_same_space(space_, o.space_, "event equality");
    return bits_ == o.bits_;
}
bool Event::subset_of(const Event& o) const {
    require_same_space(space_, o.space_, "subset test");
    return bits_.is_subset_of(o.bits_);
}
bool Event::disjoint_from(const Event& o) const {
    require_same_space(space_, o.space_, "disjointness test");
    return !bits_.intersects(o.bits_);
}

Rat Event::probability() const {
    Rat p = 0;
    bits_.for_each([&](std::size_t i) { p += space_->weight(i); });
    return p;
}

PartitionOfUnity::PartitionOfUnity(SpacePtr space, std::vector<Event> parts) : space_(std::move(space)) {
    if (!space_) throw StructuralError("partition without a space");
    Bits seen(space_->atom_count());
    for (Event& e : parts) {
        require_same_space(space_, e.space(), "partition");
        if (e.is_zero()) continue;  // drop empty parts
        if (seen.intersects(e.bits())) throw StructuralError("partition parts overlap");
        seen = seen | e.bits();
        parts_.push_back(std::move(e));
    }
    if (!seen.all()) throw StructuralError("partition parts do not cover the space");
}

PartitionOfUnity PartitionOfUnity::trivial(const SpacePtr& space) {
    return PartitionOfUnity(space, {Event::one(space)});
}

PartitionOfUnity PartitionOfUnity::atoms(const SpacePtr& space) {
    std::vector<Event> parts;
    for (std::size_t a = 0; a < space->atom_count(); ++a) parts.push_back(Event::singleton(space, a));
    return PartitionOfUnity(space, std::move(parts));
}

std::size_t PartitionOfUnity::part_of_atom(std::size_t atom) const {
    for (std::size_t i = 0; i < parts_.size(); ++i)
        if (parts_[i].contains(atom)) return i;
    throw StructuralError("atom index out of range");
}

PartitionOfUnity PartitionOfUnity::refine(const PartitionOfUnity& o) const {
    require_same_space(space_, o.space_, "refine");
    std::vector<Event> out;
    for (const Event& a : parts_)
        for (const Event& b : o.parts_) {
            Event m = a.meet(b);
            if (!m.is_zero()) out.push_back(std::move(m));
        }
    return PartitionOfUnity(space_, std::move(out));
}

}  // namespace l0
