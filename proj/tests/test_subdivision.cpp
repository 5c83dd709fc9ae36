#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "l0/linalg.hpp"
#include "l0/subdivision.hpp"

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

Rat random_rat(std::mt19937_64& rng, long lo = -6, long hi = 6) {
    long num = lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
    long den = 1 + static_cast<long>(rng() % 5);
    Rat r(num, den);
    r.canonicalize();
    return r;
}

Simplex random_simplex(const SpacePtr& s, std::size_t order, std::size_t dim, std::mt19937_64& rng) {
    while (true) {
        std::vector<Vector<Rat>> verts;
        for (std::size_t j = 0; j < order; ++j) {
            std::vector<Rat> data;
            for (std::size_t c = 0; c < s->atom_count() * dim; ++c) data.push_back(random_rat(rng));
            verts.emplace_back(s, dim, std::move(data));
        }
        if (!affine_dependence(verts).has_value()) return Simplex::make(verts);
    }
}

// Exact solve of M z = rhs for full-column-rank M via normal equations,
// with an exact consistency check. Returns nullopt when inconsistent.
std::optional<std::vector<Rat>> solve_full_rank(const Mat<Rat>& m, const std::vector<Rat>& rhs) {
    Mat<Rat> g = m.gram();
    Lu<Rat> lu = Lu<Rat>::factor(g);
    if (lu.singular()) return std::nullopt;
    std::vector<Rat> mtb(m.cols, Rat(0));
    for (std::size_t c = 0; c < m.cols; ++c)
        for (std::size_t r = 0; r < m.rows; ++r) mtb[c] += Rat(m.at(r, c) * rhs[r]);
    std::vector<Rat> z = lu.solve(mtb);
    std::vector<Rat> back = m.mul(z);
    for (std::size_t r = 0; r < m.rows; ++r)
        if (back[r] != rhs[r]) return std::nullopt;
    return z;
}

// x in conv(points), decided exactly. The points need not be independent;
// every support subset with independent columns is tried.
bool in_convex_hull(const std::vector<std::vector<Rat>>& points, const std::vector<Rat>& x) {
    if (points.empty()) return false;
    std::size_t d = x.size(), q = points.size();
    Mat<Rat> m(d + 1, q);
    for (std::size_t j = 0; j < q; ++j) {
        for (std::size_t c = 0; c < d; ++c) m.at(c, j) = points[j][c];
        m.at(d, j) = Rat(1);
    }
    std::vector<Rat> rhs(x);
    rhs.push_back(Rat(1));
    for (std::uint32_t support = 1; support < (1u << q); ++support) {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < q; ++j)
            if ((support >> j) & 1u) cols.push_back(j);
        Mat<Rat> sub(d + 1, cols.size());
        for (std::size_t jj = 0; jj < cols.size(); ++jj)
            for (std::size_t r = 0; r < d + 1; ++r) sub.at(r, jj) = m.at(r, cols[jj]);
        auto z = solve_full_rank(sub, rhs);
        if (!z) continue;
        bool nonneg = true;
        for (const Rat& v : *z) nonneg = nonneg && sgn(v) >= 0;
        if (nonneg) return true;
    }
    return false;
}

// All vertices of conv(U) ∩ conv(V), enumerated exactly as the basic
// feasible solutions of
//   sum a_i U_i - sum b_j V_j = 0,  sum a_i = 1,  sum b_j = 1,  a, b >= 0.
// Every polytope vertex has a support whose system columns are independent,
// so sweeping all supports finds them all. Bounded polytope: no vertex found
// means the intersection is empty.
std::vector<std::vector<Rat>> intersection_vertices(const std::vector<std::vector<Rat>>& U,
                                                    const std::vector<std::vector<Rat>>& V,
                                                    std::size_t d) {
    std::size_t p = U.size(), q = V.size(), n_cols = p + q;
    Mat<Rat> m(d + 2, n_cols);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t c = 0; c < d; ++c) m.at(c, j) = U[j][c];
        m.at(d, j) = Rat(1);
    }
    for (std::size_t j = 0; j < q; ++j) {
        for (std::size_t c = 0; c < d; ++c) m.at(c, p + j) = Rat(-V[j][c]);
        m.at(d + 1, p + j) = Rat(1);
    }
    std::vector<Rat> rhs(d + 2, Rat(0));
    rhs[d] = Rat(1);
    rhs[d + 1] = Rat(1);

    std::vector<std::vector<Rat>> found;
    for (std::uint32_t support = 1; support < (1u << n_cols); ++support) {
        std::vector<std::size_t> cols;
        for (std::size_t j = 0; j < n_cols; ++j)
            if ((support >> j) & 1u) cols.push_back(j);
        if (cols.size() > d + 2) continue;  // dependent columns for sure once past row count
        Mat<Rat> sub(d + 2, cols.size());
        for (std::size_t jj = 0; jj < cols.size(); ++jj)
            for (std::size_t r = 0; r < d + 2; ++r) sub.at(r, jj) = m.at(r, cols[jj]);
        auto z = solve_full_rank(sub, rhs);
        if (!z) continue;
        bool nonneg = true;
        for (const Rat& v : *z) nonneg = nonneg && sgn(v) >= 0;
        if (!nonneg) continue;
        std::vector<Rat> x(d, Rat(0));
        for (std::size_t jj = 0; jj < cols.size(); ++jj) {
            if (cols[jj] >= p) continue;
            for (std::size_t c = 0; c < d; ++c) x[c] += Rat((*z)[jj] * U[cols[jj]][c]);
        }
        found.push_back(std::move(x));
    }
    return found;
}

std::vector<std::vector<Rat>> cell_points_at(const Subdivision& sub, std::size_t cid, std::size_t atom) {
    std::vector<std::vector<Rat>> pts;
    for (std::uint32_t vid : sub.cell(cid)) {
        auto row = sub.registry_point(vid).row(atom);
        pts.emplace_back(row.begin(), row.end());
    }
    return pts;
}

// Invariant: every pairwise cell intersection equals the hull of the shared
// vertices. conv(shared) is inside both cells by construction, so it is
// enough that every intersection vertex lies in conv(shared).
void check_common_face_property(const Subdivision& sub) {
    std::size_t d = sub.parent().dim();
    for (std::size_t a = 0; a < sub.space()->atom_count(); ++a) {
        for (std::size_t c1 = 0; c1 < sub.cell_count(); ++c1)
            for (std::size_t c2 = c1 + 1; c2 < sub.cell_count(); ++c2) {
                std::vector<std::uint32_t> ids1 = sub.cell(c1), ids2 = sub.cell(c2);
                std::sort(ids1.begin(), ids1.end());
                std::sort(ids2.begin(), ids2.end());
                std::vector<std::uint32_t> shared;
                std::set_intersection(ids1.begin(), ids1.end(), ids2.begin(), ids2.end(),
                                      std::back_inserter(shared));
                std::vector<std::vector<Rat>> face_pts;
                for (std::uint32_t vid : shared) {
                    auto row = sub.registry_point(vid).row(a);
                    face_pts.emplace_back(row.begin(), row.end());
                }
                auto verts = intersection_vertices(cell_points_at(sub, c1, a),
                                                   cell_points_at(sub, c2, a), d);
                if (shared.empty()) {
                    CHECK(verts.empty());
                    continue;
                }
                for (const auto& x : verts) {
                    INFO("cells ", c1, " and ", c2, " at atom ", a);
                    CHECK(in_convex_hull(face_pts, x));
                }
            }
    }
}

}  // namespace

TEST_CASE("barycentric subdivision counts and registry order") {
    SpacePtr s = uniform_space(1);

    Simplex pt = Simplex::make({Vector<Rat>::constant(s, {Rat(2)})});
    SubdivisionPtr sub1 = barycentric_subdivision(pt);
    CHECK(sub1->cell_count() == 1);
    CHECK(sub1->registry_size() == 1);

    Simplex seg = Simplex::make({Vector<Rat>::constant(s, {Rat(0)}),
                                 Vector<Rat>::constant(s, {Rat(1)})});
    SubdivisionPtr sub2 = barycentric_subdivision(seg);
    CHECK(sub2->cell_count() == 2);
    CHECK(sub2->registry_size() == 3);

    SubdivisionPtr sub3 = barycentric_subdivision(corner_triangle(s));
    CHECK(sub3->cell_count() == 6);
    CHECK(sub3->registry_size() == 7);

    // Registry masks come in size-then-value order: singletons, pairs, full.
    std::vector<std::uint32_t> masks;
    for (std::uint32_t vid = 0; vid < 7; ++vid) masks.push_back(sub3->mask(vid));
    CHECK(masks == std::vector<std::uint32_t>{1, 2, 4, 3, 5, 6, 7});

    std::mt19937_64 rng(3);
    Simplex s4 = random_simplex(uniform_space(2), 4, 3, rng);
    SubdivisionPtr sub4 = barycentric_subdivision(s4);
    CHECK(sub4->cell_count() == 24);
    CHECK(sub4->registry_size() == 15);
}

TEST_CASE("cells are nested-prefix chains in lexicographic permutation order") {
    SpacePtr s = uniform_space(1);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));
    for (std::size_t cid = 0; cid < sub->cell_count(); ++cid) {
        const auto& cell = sub->cell(cid);
        REQUIRE(cell.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            std::uint32_t mask = sub->mask(cell[k]);
            CHECK(static_cast<std::size_t>(__builtin_popcount(mask)) == k + 1);
            if (k > 0) CHECK((sub->mask(cell[k - 1]) & ~mask) == 0u);
        }
    }
    // First permutation (1,2,3): prefixes {1}, {1,2}, {1,2,3}.
    CHECK(sub->mask(sub->cell(0)[0]) == 1u);
    CHECK(sub->mask(sub->cell(0)[1]) == 3u);
    CHECK(sub->mask(sub->cell(0)[2]) == 7u);
    // Last permutation (3,2,1): prefixes {3}, {2,3}, {1,2,3}.
    CHECK(sub->mask(sub->cell(5)[0]) == 4u);
    CHECK(sub->mask(sub->cell(5)[1]) == 6u);
    CHECK(sub->mask(sub->cell(5)[2]) == 7u);
}

TEST_CASE("parent coordinates and chi supports of registry vertices") {
    SpacePtr s = uniform_space(2);
    SubdivisionPtr sub = barycentric_subdivision(corner_triangle(s));

    // Parent vertex x_2 (mask 2): coordinates e_2, support {2}.
    CHECK(sub->parent_coords(1) == std::vector<Rat>{Rat(0), Rat(1), Rat(0)});
    CHECK(sub->chi(1) == std::vector<int>{2});

    // Edge midpoint {1,2} (vid 3): coordinates (1/2, 1/2, 0), support {1,2}.
    CHECK(sub->parent_coords(3) == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(0)});
    CHECK(sub->chi(3) == std::vector<int>{1, 2});

    // Barycenter (vid 6): uniform coordinates, full support.
    CHECK(sub->parent_coords(6) == std::vector<Rat>(3, Rat(1, 3)));
    CHECK(sub->chi(6) == std::vector<int>{1, 2, 3});

    // Registry coordinates match the parent-coordinate combination per atom.
    for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid) {
        std::vector<Rat> pc = sub->parent_coords(vid);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t c = 0; c < 2; ++c) {
                Rat expect(0);
                for (std::size_t j = 0; j < 3; ++j)
                    expect += Rat(pc[j] * sub->parent().vertex(j).at(a, c));
                CHECK(sub->registry_point(vid).at(a, c) == expect);
            }
    }
}

TEST_CASE("subdivision diameter contracts by (n-1)/n exactly") {
    std::mt19937_64 rng(17);
    for (std::size_t n = 2; n <= 4; ++n) {
        SpacePtr s = uniform_space(2);
        for (int trial = 0; trial < 5; ++trial) {
            Simplex sim = random_simplex(s, n, n - 1, rng);
            SubdivisionPtr sub = barycentric_subdivision(sim);
            Rat ratio_sq(static_cast<long>((n - 1) * (n - 1)), static_cast<long>(n * n));
            for (std::size_t a = 0; a < 2; ++a) {
                CHECK(sub->diameter_sq().at(a) <= Rat(ratio_sq * sim.diameter_sq().at(a)));
                for (std::size_t cid = 0; cid < sub->cell_count(); ++cid)
                    CHECK(sub->cell_simplex(cid).diameter_sq().at(a) <=
                          Rat(ratio_sq * sim.diameter_sq().at(a)));
            }
        }
    }
}

TEST_CASE("sampled parent points are covered by some cell per atom") {
    SpacePtr s = uniform_space(2);
    std::mt19937_64 rng(29);
    Simplex sim = random_simplex(s, 3, 2, rng);
    SubdivisionPtr sub = barycentric_subdivision(sim);

    for (int sample = 0; sample < 1000; ++sample) {
        // Random rational convex combination of the parent vertices per atom.
        std::vector<Rat> data(2 * 2, Rat(0));
        for (std::size_t a = 0; a < 2; ++a) {
            std::vector<long> w(3);
            long total = 0;
            for (long& x : w) {
                x = static_cast<long>(rng() % 7);
                total += x;
            }
            if (total == 0) {
                w[1] = 1;
                total = 1;
            }
            for (std::size_t j = 0; j < 3; ++j) {
                Rat frac(w[j], total);
                frac.canonicalize();
                for (std::size_t c = 0; c < 2; ++c)
                    data[a * 2 + c] += Rat(frac * sim.vertex(j).at(a, c));
            }
        }
        Vector<Rat> x(s, 2, std::move(data));
        auto located = sub->locate_cell(x);
        for (std::size_t a = 0; a < 2; ++a) {
            REQUIRE(located[a].has_value());
            // The located cell really contains the point at that atom.
            Simplex cell = sub->cell_simplex(*located[a]);
            BarycentricSolver solver(cell);
            auto lam = solver.affine_at(a, x.row(a));
            REQUIRE(lam.has_value());
            for (const Rat& l : *lam) CHECK(sgn(l) >= 0);
        }
    }

    // A point outside the parent is located nowhere.
    Vector<Rat> far = Vector<Rat>::constant(s, {Rat(1000), Rat(1000)});
    auto located = sub->locate_cell(far);
    CHECK_FALSE(located[0].has_value());
    CHECK_FALSE(located[1].has_value());
}

TEST_CASE("pairwise cell intersections are common faces (exact, n = 2, 3)") {
    SpacePtr s = uniform_space(2);
    std::mt19937_64 rng(41);
    check_common_face_property(*barycentric_subdivision(random_simplex(s, 2, 2, rng)));
    check_common_face_property(*barycentric_subdivision(random_simplex(s, 3, 2, rng)));
}

TEST_CASE("pairwise cell intersections are common faces (exact, n = 4)") {
    SpacePtr s = uniform_space(1);
    std::mt19937_64 rng(43);
    check_common_face_property(*barycentric_subdivision(random_simplex(s, 4, 3, rng)));
}

TEST_CASE("midpoint subdivision of a triangle") {
    SpacePtr s = uniform_space(2);
    Simplex tri = corner_triangle(s);
    SubdivisionPtr sub = midpoint_subdivision(tri);
    CHECK(sub->cell_count() == 4);
    CHECK(sub->registry_size() == 6);
    CHECK_THROWS_AS(midpoint_subdivision(Simplex::make(
                        {Vector<Rat>::constant(s, {Rat(0)}), Vector<Rat>::constant(s, {Rat(1)})})),
                    ValidationError);

    // Identify the central cell: all three vertices are edge midpoints.
    std::size_t central = 4;
    for (std::size_t cid = 0; cid < 4; ++cid) {
        bool all_mid = true;
        for (std::uint32_t vid : sub->cell(cid)) all_mid = all_mid && __builtin_popcount(sub->mask(vid)) == 2;
        if (all_mid) central = cid;
    }
    REQUIRE(central < 4);

    for (std::size_t cid = 0; cid < 4; ++cid) {
        if (cid == central) continue;
        std::vector<std::uint32_t> a = sub->cell(cid), b = sub->cell(central);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        std::vector<std::uint32_t> shared;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
        // Corner cell meets the central cell in a full edge (two midpoints).
        CHECK(shared.size() == 2);
        for (std::uint32_t vid : shared) CHECK(__builtin_popcount(sub->mask(vid)) == 2);
    }
    // Corner cells meet each other in exactly one midpoint.
    std::vector<std::size_t> corners;
    for (std::size_t cid = 0; cid < 4; ++cid)
        if (cid != central) corners.push_back(cid);
    for (std::size_t i = 0; i < corners.size(); ++i)
        for (std::size_t j = i + 1; j < corners.size(); ++j) {
            std::vector<std::uint32_t> a = sub->cell(corners[i]), b = sub->cell(corners[j]);
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            std::vector<std::uint32_t> shared;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared));
            REQUIRE(shared.size() == 1);
            CHECK(__builtin_popcount(sub->mask(shared[0])) == 2);
        }

    // The full geometric common-face law holds here too.
    check_common_face_property(*sub);

    // Midpoint cells halve the diameter exactly.
    for (std::size_t a = 0; a < 2; ++a)
        CHECK(sub->diameter_sq().at(a) == Rat(tri.diameter_sq().at(a) / 4));
}

TEST_CASE("iterated subdivision of a segment halves diameters per level") {
    SpacePtr s = uniform_space(2);
    Simplex seg = Simplex::make({Vector<Rat>::constant(s, {Rat(0)}),
                                 Vector<Rat>::constant(s, {Rat(1)})});
    auto levels = iterated_barycentric(seg, 3);
    REQUIRE(levels.size() == 4);
    CHECK(levels[0].cells.size() == 1);
    CHECK(levels[1].cells.size() == 2);
    CHECK(levels[2].cells.size() == 4);
    CHECK(levels[3].cells.size() == 8);
    for (int m = 0; m <= 3; ++m) {
        Rat expect(1, 1 << (2 * m));  // squared halving
        CHECK(levels[m].max_diameter_sq.at(0) == expect);
        CHECK(levels[m].max_diameter_sq.at(1) == expect);
    }
    // Deduplicated registry of the deepest level: 9 distinct points on a line.
    CHECK(levels[3].registry.size() == 9);

    CHECK_THROWS_AS(iterated_barycentric(seg, 40, 1000), ValidationError);
    CHECK_THROWS_AS(iterated_barycentric(seg, -1), ValidationError);
}

TEST_CASE("extreme family enumerates sigma-hull assignments lazily") {
    SpacePtr s = uniform_space(3);
    Simplex tri = corner_triangle(s);
    ExtremeFamily fam = extreme_points(tri);
    CHECK(fam.registry_size() == 3);
    CHECK(fam.count() == mpz_class(27));  // 3^3 assignments

    // Assignment round-trip.
    std::vector<std::uint32_t> assign = {2, 0, 1};
    Vector<Rat> member = fam.at_assignment(assign);
    auto back = fam.member(member);
    REQUIRE(back.has_value());
    CHECK(*back == assign);

    // Mixed-radix enumeration hits every assignment exactly once.
    std::map<std::vector<Rat>, int> seen;
    for (long i = 0; i < 27; ++i) seen[fam.at_index(mpz_class(i)).data()]++;
    CHECK(seen.size() == 27);

    // The barycenter is not a per-atom mix of vertices.
    CHECK_FALSE(fam.member(tri.barycenter()).has_value());

    // Subdivision registry family: 7^K members for the triangle.
    ExtremeFamily sub_fam = extreme_points(*barycentric_subdivision(tri));
    CHECK(sub_fam.registry_size() == 7);
    CHECK(sub_fam.count() == mpz_class(343));
}
