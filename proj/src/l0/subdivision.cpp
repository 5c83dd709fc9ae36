#include "subdivision.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace l0 {

namespace {

int popcount(std::uint32_t m) { return __builtin_popcount(m); }

Vector<Rat> subset_barycenter(const Simplex& parent, std::uint32_t mask) {
    std::optional<Vector<Rat>> sum;
    int size = 0;
    for (std::size_t j = 0; j < parent.order(); ++j) {
        if (!(mask >> j & 1u)) continue;
        sum = sum ? *sum + parent.vertex(j) : parent.vertex(j);
        ++size;
    }
    return sum->scaled(Rat(1, static_cast<unsigned long>(size)));
}

}  // namespace

Subdivision::Subdivision(Simplex parent, std::vector<std::uint32_t> masks,
                         std::vector<std::vector<std::uint32_t>> cells)
    : parent_(std::move(parent)), masks_(std::move(masks)), cells_(std::move(cells)) {
    if (parent_.order() > 31) throw StructuralError("subdivision supports at most 31 vertices");
    registry_.reserve(masks_.size());
    for (std::uint32_t m : masks_) {
        if (m == 0 || m >= (1u << parent_.order())) throw StructuralError("bad registry subset mask");
        registry_.push_back(subset_barycenter(parent_, m));
    }
    for (const auto& cell : cells_) {
        if (cell.size() != parent_.order()) throw StructuralError("cell vertex count differs from parent order");
        for (std::uint32_t vid : cell)
            if (vid >= masks_.size()) throw StructuralError("cell references unknown registry vertex");
    }
}

std::vector<Rat> Subdivision::parent_coords(std::uint32_t vid) const {
    std::uint32_t m = masks_[vid];
    Rat share(1, static_cast<unsigned long>(popcount(m)));
    std::vector<Rat> coords(parent_.order(), Rat(0));
    for (std::size_t j = 0; j < parent_.order(); ++j)
        if (m >> j & 1u) coords[j] = share;
    return coords;
}

std::vector<int> Subdivision::chi(std::uint32_t vid) const {
    std::vector<int> out;
    for (std::size_t j = 0; j < parent_.order(); ++j)
        if (masks_[vid] >> j & 1u) out.push_back(static_cast<int>(j) + 1);
    return out;
}

Simplex Subdivision::cell_simplex(std::size_t cid) const {
    std::vector<Vector<Rat>> verts;
    verts.reserve(cells_[cid].size());
    for (std::uint32_t vid : cells_[cid]) verts.push_back(registry_[vid]);
    return Simplex::make(std::move(verts));
}

Scalar<Rat> Subdivision::diameter_sq() const {
    const std::size_t K = space()->atom_count();
    const std::size_t d = parent_.dim();
    std::vector<Rat> out(K, Rat(0));
    for (const auto& cell : cells_)
        for (std::size_t i = 0; i < cell.size(); ++i)
            for (std::size_t j = i + 1; j < cell.size(); ++j) {
                const Vector<Rat>& vi = registry_[cell[i]];
                const Vector<Rat>& vj = registry_[cell[j]];
                for (std::size_t a = 0; a < K; ++a) {
                    Rat s(0);
                    for (std::size_t c = 0; c < d; ++c) {
                        Rat diff = vi.at(a, c) - vj.at(a, c);
                        s += diff * diff;
                    }
                    if (s > out[a]) out[a] = s;
                }
            }
    return Scalar<Rat>(space(), std::move(out));
}

std::vector<std::optional<std::size_t>> Subdivision::locate_cell(const Vector<Rat>& x) const {
    require_same_space(space(), x.space(), "locate");
    const std::size_t K = space()->atom_count();
    std::vector<std::optional<std::size_t>> found(K);
    for (std::size_t cid = 0; cid < cells_.size(); ++cid) {
        Simplex cell = cell_simplex(cid);
        BarycentricSolver solver(cell);
        for (std::size_t a = 0; a < K; ++a) {
            if (found[a]) continue;
            auto coords = solver.affine_at(a, x.row(a));
            if (!coords) continue;
            bool inside = std::all_of(coords->begin(), coords->end(), [](const Rat& c) { return sgn(c) >= 0; });
            if (inside) found[a] = cid;
        }
    }
    return found;
}

SubdivisionPtr barycentric_subdivision(const Simplex& s) {
    const std::size_t n = s.order();
    if (n > 12) throw StructuralError("barycentric subdivision limited to 12 vertices");

    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 1; m < (1u << n); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        return popcount(a) != popcount(b) ? popcount(a) < popcount(b) : a < b;
    });
    std::vector<std::uint32_t> id_of_mask(1u << n, 0);
    for (std::size_t i = 0; i < masks.size(); ++i) id_of_mask[masks[i]] = static_cast<std::uint32_t>(i);

    std::vector<std::vector<std::uint32_t>> cells;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<std::uint32_t> cell;
        std::uint32_t prefix = 0;
        for (std::size_t k = 0; k < n; ++k) {
            prefix |= 1u << perm[k];
            cell.push_back(id_of_mask[prefix]);
        }
        cells.push_back(std::move(cell));
    } while (std::next_permutation(perm.begin(), perm.end()));

    return std::make_shared<Subdivision>(s, std::move(masks), std::move(cells));
}

SubdivisionPtr midpoint_subdivision(const Simplex& s) {
    if (s.order() != 3) throw ValidationError("midpoint subdivision is defined for 2-simplexes");
    std::vector<std::uint32_t> masks = {0b001, 0b010, 0b100, 0b011, 0b101, 0b110};
    std::vector<std::vector<std::uint32_t>> cells = {
        {0, 3, 4},  // x1, m12, m13
        {1, 3, 5},  // x2, m12, m23
        {2, 4, 5},  // x3, m13, m23
        {3, 4, 5},  // central midpoint cell
    };
    return std::make_shared<Subdivision>(s, std::move(masks), std::move(cells));
}

ExtremeFamily::ExtremeFamily(SpacePtr space, std::vector<Vector<Rat>> points)
    : space_(std::move(space)), points_(std::move(points)) {
    if (points_.empty()) throw StructuralError("extreme family needs at least one point");
    for (const auto& p : points_) require_same_space(space_, p.space(), "extreme family");
}

mpz_class ExtremeFamily::count() const {
    mpz_class c;
    mpz_ui_pow_ui(c.get_mpz_t(), points_.size(), space_->atom_count());
    return c;
}

std::optional<std::vector<std::uint32_t>> ExtremeFamily::member(const Vector<Rat>& x) const {
    require_same_space(space_, x.space(), "extreme family membership");
    const std::size_t K = space_->atom_count();
    std::vector<std::uint32_t> ids(K);
    for (std::size_t a = 0; a < K; ++a) {
        bool hit = false;
        for (std::uint32_t vid = 0; vid < points_.size() && !hit; ++vid) {
            auto pr = points_[vid].row(a);
            auto xr = x.row(a);
            bool eq = pr.size() == xr.size();
            for (std::size_t i = 0; eq && i < pr.size(); ++i) eq = (pr[i] == xr[i]);
            if (eq) {
                ids[a] = vid;
                hit = true;
            }
        }
        if (!hit) return std::nullopt;
    }
    return ids;
}

Vector<Rat> ExtremeFamily::at_assignment(const std::vector<std::uint32_t>& ids) const {
    const std::size_t K = space_->atom_count();
    if (ids.size() != K) throw StructuralError("assignment length does not match atom count");
    const std::size_t d = points_.front().dim();
    std::vector<Rat> data(K * d);
    for (std::size_t a = 0; a < K; ++a) {
        if (ids[a] >= points_.size()) throw StructuralError("assignment references unknown registry vertex");
        auto row = points_[ids[a]].row(a);
        for (std::size_t i = 0; i < d; ++i) data[a * d + i] = row[i];
    }
    return Vector<Rat>(space_, d, std::move(data));
}

Vector<Rat> ExtremeFamily::at_index(const mpz_class& index) const {
    if (sgn(index) < 0 || index >= count()) throw StructuralError("enumeration index out of range");
    const std::size_t K = space_->atom_count();
    std::vector<std::uint32_t> ids(K);
    mpz_class rest = index;
    for (std::size_t a = 0; a < K; ++a) {
        mpz_class q, r;
        mpz_fdiv_qr_ui(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), points_.size());
        ids[a] = static_cast<std::uint32_t>(r.get_ui());
        rest = q;
    }
    return at_assignment(ids);
}

ExtremeFamily extreme_points(const Simplex& s) { return ExtremeFamily(s.space(), s.vertices()); }

ExtremeFamily extreme_points(const Subdivision& sub) {
    std::vector<Vector<Rat>> pts;
    pts.reserve(sub.registry_size());
    for (std::uint32_t vid = 0; vid < sub.registry_size(); ++vid) pts.push_back(sub.registry_point(vid));
    return ExtremeFamily(sub.space(), std::move(pts));
}

std::vector<SubdivisionLevel> iterated_barycentric(const Simplex& s, int depth, std::size_t max_cells) {
    if (depth < 0) throw ValidationError("depth must be non-negative");
    std::vector<SubdivisionLevel> levels;

    auto pack_level = [&](const std::vector<Simplex>& cells) {
        SubdivisionLevel lvl{{}, {}, cells.front().diameter_sq()};
        std::map<std::vector<Rat>, std::uint32_t> seen;
        std::vector<Rat> max_sq(s.space()->atom_count(), Rat(0));
        for (const Simplex& cell : cells) {
            std::vector<std::uint32_t> ids;
            for (const auto& v : cell.vertices()) {
                auto [it, inserted] = seen.emplace(v.data(), static_cast<std::uint32_t>(lvl.registry.size()));
                if (inserted) lvl.registry.push_back(v);
                ids.push_back(it->second);
            }
            lvl.cells.push_back(std::move(ids));
            Scalar<Rat> d = cell.diameter_sq();
            for (std::size_t a = 0; a < max_sq.size(); ++a)
                if (d.at(a) > max_sq[a]) max_sq[a] = d.at(a);
        }
        lvl.max_diameter_sq = Scalar<Rat>(s.space(), std::move(max_sq));
        return lvl;
    };

    std::vector<Simplex> current = {s};
    levels.push_back(pack_level(current));
    for (int level = 1; level <= depth; ++level) {
        std::vector<Simplex> next;
        for (const Simplex& cell : current) {
            SubdivisionPtr sub = barycentric_subdivision(cell);
            for (std::size_t cid = 0; cid < sub->cell_count(); ++cid) next.push_back(sub->cell_simplex(cid));
            if (next.size() > max_cells) throw ValidationError("subdivision depth produces too many cells");
        }
        current = std::move(next);
        levels.push_back(pack_level(current));
    }
    return levels;
}

}  // namespace l0
