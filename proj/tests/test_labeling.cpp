#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "l0/labeling.hpp"

using namespace l0;

namespace {

SpacePtr uniform_space(std::size_t k) {
    return Space::make(std::vector<Rat>(k, Rat(1, static_cast<long>(k))));
}

Simplex corner_triangle(const SpacePtr& s) {
    return Simplex::make({Vector<Rat>::constant(s, {Rat(0), Rat(0)}),
                          Vector<Rat>::constant(s, {Rat(1), Rat(0)}),
                          Vector<Rat>::constant(s, {Rat(0), Rat(1)})});
}

// Reference count of completely labeled cells: walk every cell, compare the
// label set against {1..n} directly.
std::size_t oracle_cl_count(const Subdivision& sub, const std::vector<int>& labels) {
    std::size_t count = 0;
    for (std::size_t cid = 0; cid < sub.cell_count(); ++cid) {
        std::vector<int> got;
        for (std::uint32_t vid : sub.cell(cid)) got.push_back(labels[vid]);
        std::sort(got.begin(), got.end());
        bool complete = got.size() == sub.order();
        for (std::size_t j = 0; j < got.size(); ++j) complete = complete && got[j] == static_cast<int>(j) + 1;
        if (complete) ++count;
    }
    return count;
}

// All proper label choices per registry vertex, i.e. the chi support.
std::vector<std::vector<int>> proper_choices(const Subdivision& sub) {
    std::vector<std::vector<int>> out;
    for (std::uint32_t vid = 0; vid < sub.registry_size(); ++vid) out.push_back(sub.chi(vid));
    return out;
}

}  // namespace

TEST_CASE("classical labeling construction enforces properness") {
    SpacePtr s = uniform_space(1);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));

    // Vertex order: x1 x2 x3, y12 y13 y23, barycenter.
    CHECK_NOTHROW(ClassicalLabeling::make(sub, {1, 2, 3, 1, 1, 2, 3}));
    // Parent vertex x1 cannot carry label 2.
    CHECK_THROWS_AS(ClassicalLabeling::make(sub, {2, 2, 3, 1, 1, 2, 3}), ValidationError);
    // Midpoint y12 cannot carry label 3.
    CHECK_THROWS_AS(ClassicalLabeling::make(sub, {1, 2, 3, 3, 1, 2, 3}), ValidationError);
    // Out-of-range label.
    CHECK_THROWS_AS(ClassicalLabeling::make(sub, {1, 2, 3, 1, 1, 2, 4}), ValidationError);
    CHECK_THROWS_AS(ClassicalLabeling::make(sub, {1, 2, 3}), StructuralError);
}

TEST_CASE("hand-worked fixed labeling has exactly one completely labeled cell") {
    // psi(x_i) = i, psi(y_ij) = min(i, j), psi(barycenter) = 3. Walking the
    // six permutation cells by hand: only the cell of permutation (2,1,3),
    // with vertices {x2, y12, barycenter} and labels {2, 1, 3}, is complete.
    SpacePtr s = uniform_space(1);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    ClassicalLabeling psi = ClassicalLabeling::make(sub, {1, 2, 3, 1, 1, 2, 3});

    std::vector<std::size_t> cl = enumerate_completely_labeled(psi);
    REQUIRE(cl.size() == 1);

    // Permutations in lex order: (1,2,3) (1,3,2) (2,1,3) ... so cell id 2.
    CHECK(cl[0] == 2);
    std::vector<int> labels_of_cell;
    for (std::uint32_t vid : sub->cell(cl[0])) labels_of_cell.push_back(psi.label(vid));
    std::sort(labels_of_cell.begin(), labels_of_cell.end());
    CHECK(labels_of_cell == std::vector<int>{1, 2, 3});
}

TEST_CASE("all 24 proper labelings of the subdivided triangle have odd counts") {
    SpacePtr s = uniform_space(1);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    auto choices = proper_choices(*sub);

    // |chi| product: 1*1*1 * 2*2*2 * 3 = 24 proper labelings in total.
    std::size_t total = 1;
    for (const auto& c : choices) total *= c.size();
    REQUIRE(total == 24);

    std::size_t checked = 0;
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
        std::vector<int> labels;
        for (std::size_t vid = 0; vid < choices.size(); ++vid)
            labels.push_back(choices[vid][pick[vid]]);
        ClassicalLabeling psi = ClassicalLabeling::make(sub, labels);
        std::vector<std::size_t> cl = enumerate_completely_labeled(psi);
        CHECK(cl.size() % 2 == 1);
        CHECK(cl.size() == oracle_cl_count(*sub, labels));
        ++checked;

        // Mixed-radix increment over the choice table.
        std::size_t pos = 0;
        while (pos < pick.size() && ++pick[pos] == choices[pos].size()) pick[pos++] = 0;
        if (pos == pick.size()) break;
    }
    CHECK(checked == 24);
}

TEST_CASE("odd-count law holds for random proper labelings at n = 4") {
    SpacePtr s = uniform_space(1);
    std::mt19937_64 rng(59);
    std::vector<Vector<Rat>> verts;
    for (int j = 0; j < 4; ++j) {
        std::vector<Rat> coords(3, Rat(0));
        if (j > 0) coords[j - 1] = Rat(1);
        verts.push_back(Vector<Rat>::constant(s, coords));
    }
    SubdivisionPtr sub = barycentric_subdivision(Simplex::make(verts));
    auto choices = proper_choices(*sub);

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> labels;
        for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid)
            labels.push_back(choices[vid][rng() % choices[vid].size()]);
        ClassicalLabeling psi = ClassicalLabeling::make(sub, labels);
        std::vector<std::size_t> cl = enumerate_completely_labeled(psi);
        CHECK(cl.size() % 2 == 1);
        CHECK(cl.size() == oracle_cl_count(*sub, labels));
    }
}

TEST_CASE("L0 labeling properness is checked per atom") {
    SpacePtr s = uniform_space(2);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));

    // Proper at atom 0, improper at atom 1 (midpoint y12 labeled 3 there).
    std::vector<std::vector<int>> labels = {
        {1, 1}, {2, 2}, {3, 3}, {1, 3}, {1, 1}, {2, 2}, {3, 3}};
    L0Labeling phi(sub, labels);
    auto violation = phi.properness_violation();
    REQUIRE(violation.has_value());
    CHECK(violation->vertex == 3);
    CHECK(violation->atom == 1);
    CHECK(violation->label == 3);

    labels[3] = {1, 2};
    CHECK(L0Labeling(sub, labels).is_proper());
}

TEST_CASE("sigma-stable extension evaluates assignments atom by atom") {
    SpacePtr s = uniform_space(2);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    std::vector<std::vector<int>> labels = {
        {1, 1}, {2, 2}, {3, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 1}};
    L0Labeling phi(sub, labels);
    REQUIRE(phi.is_proper());

    Label v = phi.value_at({3, 6});  // atom 0 reads y12, atom 1 the barycenter
    CHECK(v.at(0) == 1);
    CHECK(v.at(1) == 1);
    Label w = phi.value_at({6, 5});
    CHECK(w.at(0) == 3);
    CHECK(w.at(1) == 3);
}

TEST_CASE("decomposition groups atoms by label tuple and reconstructs exactly") {
    SpacePtr s = uniform_space(3);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));

    // Atoms 0 and 2 share a tuple, atom 1 differs.
    std::vector<std::vector<int>> labels = {
        {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {1, 2, 1}, {1, 1, 1}, {2, 3, 2}, {3, 1, 3}};
    L0Labeling phi(sub, labels);
    SpernerDecomposition dec = decompose_labeling(phi);

    REQUIRE(dec.parts.size() == 2);
    CHECK(dec.partition.parts()[0] == Event::from_atoms(s, {0, 2}));
    CHECK(dec.partition.parts()[1] == Event::from_atoms(s, {1}));

    // Reconstruction: phi(y) at atom a equals the part labeling at that atom.
    for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid)
        for (std::size_t a = 0; a < 3; ++a) {
            std::size_t m = dec.partition.part_of_atom(a);
            CHECK(dec.parts[m].label(vid) == phi.label(vid, a));
        }

    // Constant labeling collapses to a single part.
    std::vector<std::vector<int>> const_labels = {
        {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {1, 1, 1}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
    SpernerDecomposition one = decompose_labeling(L0Labeling(sub, const_labels));
    CHECK(one.parts.size() == 1);
    CHECK(one.partition.parts()[0].is_one());
}

TEST_CASE("decomposition round-trips 100 random proper labelings") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t K = 1 + trial % 4;
        SpacePtr s = uniform_space(K);
        SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
        auto choices = proper_choices(*sub);

        std::vector<std::vector<int>> labels(sub->registry_size());
        for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid)
            for (std::size_t a = 0; a < K; ++a)
                labels[vid].push_back(choices[vid][rng() % choices[vid].size()]);
        L0Labeling phi(sub, labels);
        REQUIRE(phi.is_proper());

        SpernerDecomposition dec = decompose_labeling(phi);
        CHECK(dec.parts.size() <= K);

        // Parts tile the atoms; each part's labeling is classically proper
        // (construction of ClassicalLabeling already asserts it) and matches
        // phi on its atoms.
        Rat total(0);
        for (const Event& part : dec.partition.parts()) total += part.probability();
        CHECK(total == Rat(1));
        for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid)
            for (std::size_t a = 0; a < K; ++a)
                CHECK(dec.parts[dec.partition.part_of_atom(a)].label(vid) == phi.label(vid, a));

        // Distinct parts carry distinct tuples (the grouping is maximal).
        for (std::size_t m1 = 0; m1 < dec.parts.size(); ++m1)
            for (std::size_t m2 = m1 + 1; m2 < dec.parts.size(); ++m2)
                CHECK(dec.parts[m1].labels() != dec.parts[m2].labels());
    }
}

TEST_CASE("sperner search concatenates first completely labeled cells") {
    SpacePtr s = uniform_space(2);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));

    // Different proper tuples per atom force a genuine two-part splice.
    std::vector<std::vector<int>> labels = {
        {1, 1}, {2, 2}, {3, 3}, {1, 2}, {1, 3}, {2, 3}, {3, 2}};
    L0Labeling phi(sub, labels);
    REQUIRE(phi.is_proper());

    SpernerSearchResult res = sperner_search(phi);
    CHECK(res.decomposition.parts.size() == 2);
    REQUIRE(res.cell_of_part.size() == 2);

    // Chosen cell is the first completely labeled one per part.
    for (std::size_t m = 0; m < 2; ++m) {
        std::vector<std::size_t> cl = enumerate_completely_labeled(res.decomposition.parts[m]);
        REQUIRE(!cl.empty());
        CHECK(res.cell_of_part[m] == cl.front());
        // Reindexing: slot j of the part's vertex list carries label j+1.
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(res.decomposition.parts[m].label(res.vertices_of_part[m][j]) == static_cast<int>(j) + 1);
    }

    // Postcondition: the spliced simplex's vertex slot j has constant label
    // j+1 under phi's extension rule.
    for (std::size_t j = 0; j < 3; ++j) {
        Label lab = phi.value_at(res.assignment[j]);
        for (std::size_t a = 0; a < 2; ++a) CHECK(lab.at(a) == static_cast<int>(j) + 1);
    }

    // The spliced simplex is independent and lives inside the parent.
    CHECK_FALSE(affine_dependence(res.simplex.vertices()).has_value());
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(try_barycentric_coordinates(sub->parent(), res.simplex.vertex(j)).has_value());

    // Its vertices are members of the subdivision's extreme family.
    ExtremeFamily fam = extreme_points(*sub);
    for (std::size_t j = 0; j < 3; ++j) {
        auto ids = fam.member(res.simplex.vertex(j));
        REQUIRE(ids.has_value());
        CHECK(*ids == res.assignment[j]);
    }

    // Diameter of the result never exceeds the subdivision diameter per atom.
    for (std::size_t a = 0; a < 2; ++a)
        CHECK(res.simplex.diameter_sq().at(a) <= sub->diameter_sq().at(a));
}

TEST_CASE("single-atom search reduces to classical Sperner selection") {
    SpacePtr s = uniform_space(1);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    ClassicalLabeling psi = ClassicalLabeling::make(sub, {1, 2, 3, 1, 1, 2, 3});

    std::vector<std::vector<int>> labels;
    for (std::uint32_t vid = 0; vid < 7; ++vid) labels.push_back({psi.label(vid)});
    SpernerSearchResult res = sperner_search(L0Labeling(sub, labels));

    REQUIRE(res.decomposition.parts.size() == 1);
    std::size_t cid = enumerate_completely_labeled(psi).front();
    CHECK(res.cell_of_part[0] == cid);
    // Vertex slot j carries label j+1, so the result is the cell reordered by label.
    for (std::uint32_t vid : sub->cell(cid))
        CHECK(res.simplex.vertex(static_cast<std::size_t>(psi.label(vid)) - 1) ==
              sub->registry_point(vid));
}

TEST_CASE("improper labelings are rejected by search and enumeration") {
    SpacePtr s = uniform_space(2);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    std::vector<std::vector<int>> labels = {
        {1, 1}, {2, 2}, {3, 3}, {3, 2}, {1, 1}, {2, 2}, {3, 3}};
    L0Labeling phi(sub, labels);
    CHECK_THROWS_AS(decompose_labeling(phi), ValidationError);
    CHECK_THROWS_AS(sperner_search(phi), ValidationError);
}
