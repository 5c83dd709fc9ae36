#include "doctest.h"

#include <cstdint>
#include <random>
#include <vector>

#include "l0/space.hpp"

using namespace l0;

namespace {

SpacePtr uniform_space(std::size_t k) {
    return Space::make(std::vector<Rat>(k, Rat(1, static_cast<long>(k))));
}

Event random_event(const SpacePtr& s, std::mt19937_64& rng) {
    Bits b(s->atom_count());
    for (std::size_t i = 0; i < s->atom_count(); ++i)
        if (rng() & 1) b.set(i);
    return Event(s, std::move(b));
}

}  // namespace

TEST_CASE("space construction validates weights") {
    CHECK_NOTHROW(Space::make({Rat(1, 3), Rat(2, 3)}));
    CHECK_THROWS_AS(Space::make({}), ValidationError);
    CHECK_THROWS_AS(Space::make({Rat(1, 2), Rat(1, 3)}), ValidationError);
    CHECK_THROWS_AS(Space::make({Rat(0), Rat(1)}), ValidationError);
    CHECK_THROWS_AS(Space::make({Rat(-1, 2), Rat(3, 2)}), ValidationError);

    // The message has to name the offending field so CLI errors stay usable.
    try {
        Space::make({Rat(1, 2), Rat(1, 3)});
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("weights") != std::string::npos);
    }
}

TEST_CASE("space float weights allow tiny drift") {
    // Dyadic conversions of 0.1+0.2+0.7 miss 1 by well under 1e-12.
    std::vector<Rat> w = {rat_from_double(0.1), rat_from_double(0.2), rat_from_double(0.7)};
    CHECK_THROWS_AS(Space::make(w, true), ValidationError);
    SpacePtr s = Space::make(w, false);
    CHECK(s->atom_count() == 3);
    CHECK_FALSE(s->exact_weights());
}

TEST_CASE("event constructors and basic queries") {
    SpacePtr s = uniform_space(3);
    Event a = Event::from_atoms(s, {0, 1});
    CHECK(a.contains(0));
    CHECK(a.contains(1));
    CHECK_FALSE(a.contains(2));
    CHECK(a.atom_count() == 2);
    CHECK(a.atoms() == std::vector<std::size_t>{0, 1});
    CHECK(Event::zero(s).is_zero());
    CHECK(Event::one(s).is_one());
    CHECK(Event::singleton(s, 2).atoms() == std::vector<std::size_t>{2});
}

TEST_CASE("event algebra identities") {
    SpacePtr s = uniform_space(3);
    Event a = Event::from_atoms(s, {0, 1});
    Event b = Event::from_atoms(s, {1, 2});
    Event one = Event::one(s);

    CHECK(one.meet(a) == a);
    CHECK(a.join(a.complement()) == one);
    CHECK(a.meet(b) == Event::singleton(s, 1));
    CHECK(a.difference(b) == Event::singleton(s, 0));

    // Same weights, different instance: identity matters, not equality.
    SpacePtr other = uniform_space(3);
    CHECK_THROWS_AS(a.meet(Event::one(other)), StructuralError);
}

TEST_CASE("boolean algebra laws on random events") {
    SpacePtr s = uniform_space(9);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        Event a = random_event(s, rng);
        Event b = random_event(s, rng);
        Event c = random_event(s, rng);

        CHECK(a.meet(b.meet(c)) == a.meet(b).meet(c));
        CHECK(a.join(b.join(c)) == a.join(b).join(c));
        CHECK(a.meet(b.join(c)) == a.meet(b).join(a.meet(c)));
        CHECK(a.join(b.meet(c)) == a.join(b).meet(a.join(c)));
        CHECK(a.meet(b).complement() == a.complement().join(b.complement()));
        CHECK(a.join(b).complement() == a.complement().meet(b.complement()));
        CHECK(a.complement().complement() == a);
        CHECK(a.subset_of(a.join(b)));
        CHECK(a.meet(b).subset_of(a));
    }
}

TEST_CASE("probability is an exact weighted sum") {
    SpacePtr s = Space::make({Rat(1, 6), Rat(1, 3), Rat(1, 2)});
    CHECK(Event::one(s).probability() == Rat(1));
    CHECK(Event::zero(s).probability() == Rat(0));
    CHECK(Event::singleton(s, 1).probability() == Rat(1, 3));
    CHECK(Event::from_atoms(s, {0, 2}).probability() == Rat(2, 3));
}

TEST_CASE("partition construction enforces disjoint cover") {
    SpacePtr s = uniform_space(4);
    Event a = Event::from_atoms(s, {0, 1});
    Event b = Event::from_atoms(s, {2, 3});
    CHECK_NOTHROW(PartitionOfUnity(s, {a, b}));
    CHECK_THROWS_AS(PartitionOfUnity(s, {a, Event::from_atoms(s, {1, 2, 3})}), StructuralError);
    CHECK_THROWS_AS(PartitionOfUnity(s, {a, Event::singleton(s, 2)}), StructuralError);

    // Empty parts are dropped, not kept as placeholders.
    PartitionOfUnity p(s, {a, Event::zero(s), b});
    CHECK(p.part_count() == 2);

    PartitionOfUnity atoms = PartitionOfUnity::atoms(s);
    CHECK(atoms.part_count() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(atoms.part_of_atom(i) == i);
    CHECK(PartitionOfUnity::trivial(s).part_count() == 1);
}

TEST_CASE("refine against the trivial partition is identity") {
    SpacePtr s = uniform_space(4);
    PartitionOfUnity p(s, {Event::from_atoms(s, {0, 1}), Event::from_atoms(s, {2, 3})});
    PartitionOfUnity r = p.refine(PartitionOfUnity::trivial(s));
    REQUIRE(r.part_count() == p.part_count());
    for (std::size_t i = 0; i < r.part_count(); ++i) CHECK(r.parts()[i] == p.parts()[i]);
}

TEST_CASE("refine of crossing pair splits into atoms in lex order") {
    SpacePtr s = uniform_space(4);
    PartitionOfUnity p(s, {Event::from_atoms(s, {0, 1}), Event::from_atoms(s, {2, 3})});
    PartitionOfUnity q(s, {Event::from_atoms(s, {0, 2}), Event::from_atoms(s, {1, 3})});
    PartitionOfUnity r = p.refine(q);
    REQUIRE(r.part_count() == 4);
    CHECK(r.parts()[0] == Event::singleton(s, 0));
    CHECK(r.parts()[1] == Event::singleton(s, 1));
    CHECK(r.parts()[2] == Event::singleton(s, 2));
    CHECK(r.parts()[3] == Event::singleton(s, 3));
}

TEST_CASE("refine is idempotent and finer than both inputs") {
    SpacePtr s = uniform_space(10);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        // Random partition: assign each atom to one of three buckets, drop empties.
        auto random_partition = [&] {
            std::vector<Bits> buckets(3, Bits(10));
            for (std::size_t i = 0; i < 10; ++i) buckets[rng() % 3].set(i);
            std::vector<Event> parts;
            for (Bits& b : buckets)
                if (b.any()) parts.emplace_back(s, b);
            return PartitionOfUnity(s, parts);
        };
        PartitionOfUnity p = random_partition();
        PartitionOfUnity q = random_partition();
        PartitionOfUnity r = p.refine(q);

        PartitionOfUnity rr = p.refine(p);
        REQUIRE(rr.part_count() == p.part_count());
        for (std::size_t i = 0; i < p.part_count(); ++i) CHECK(rr.parts()[i] == p.parts()[i]);

        Rat total(0);
        for (const Event& part : r.parts()) {
            total += part.probability();
            bool in_p = false, in_q = false;
            for (const Event& pp : p.parts()) in_p = in_p || part.subset_of(pp);
            for (const Event& qq : q.parts()) in_q = in_q || part.subset_of(qq);
            CHECK(in_p);
            CHECK(in_q);
        }
        CHECK(total == Rat(1));
    }
}
