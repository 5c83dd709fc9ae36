#include "simplex.hpp"

#include <cmath>
#include <sstream>

namespace l0 {

namespace {

template <class T>
Mat<T> difference_matrix(const std::vector<Vector<T>>& vertices, std::size_t atom) {
    const std::size_t n = vertices.size();
    const std::size_t d = vertices.front().dim();
    Mat<T> m(d, n - 1);
    auto v1 = vertices.front().row(atom);
    for (std::size_t j = 1; j < n; ++j) {
        auto vj = vertices[j].row(atom);
        for (std::size_t r = 0; r < d; ++r) m.at(r, j - 1) = T(vj[r] - v1[r]);
    }
    return m;
}

void check_vertex_shapes(const auto& vertices) {
    if (vertices.empty()) throw StructuralError("simplex needs at least one vertex");
    const auto& space = vertices.front().space();
    for (const auto& v : vertices) {
        require_same_space(space, v.space(), "simplex vertices");
        if (v.dim() != vertices.front().dim()) throw StructuralError("simplex vertices have mixed dimensions");
    }
    if (vertices.size() > vertices.front().dim() + 1)
        throw StructuralError("more vertices than an affinely independent set allows in this dimension");
}

}  // namespace

std::optional<DependenceWitness> affine_dependence(const std::vector<Vector<Rat>>& vertices) {
    check_vertex_shapes(vertices);
    const std::size_t n = vertices.size();
    if (n == 1) return std::nullopt;
    for (std::size_t a = 0; a < vertices.front().space()->atom_count(); ++a) {
        Mat<Rat> m = difference_matrix(vertices, a);
        auto mu = kernel_vector(m);
        if (!mu) continue;
        DependenceWitness w;
        w.atom = a;
        w.coeffs.resize(n, Rat(0));
        Rat total(0);
        for (std::size_t j = 0; j < n - 1; ++j) {
            w.coeffs[j + 1] = (*mu)[j];
            total += (*mu)[j];
        }
        w.coeffs[0] = -total;
        return w;
    }
    return std::nullopt;
}

std::optional<std::size_t> affine_dependence(const std::vector<Vector<double>>& vertices) {
    check_vertex_shapes(vertices);
    const std::size_t n = vertices.size();
    if (n == 1) return std::nullopt;
    for (std::size_t a = 0; a < vertices.front().space()->atom_count(); ++a) {
        Mat<double> m = difference_matrix(vertices, a);
        double frob_sq = 0.0;
        for (double x : m.a) frob_sq += x * x;
        double sigma_min_sq = sym_min_eigenvalue(m.gram());
        if (sigma_min_sq <= 1e-18 * frob_sq) return a;
    }
    return std::nullopt;
}

Simplex Simplex::make(std::vector<Vector<Rat>> vertices) {
    if (auto w = affine_dependence(vertices)) {
        std::ostringstream os;
        os << "vertices affinely dependent at atom " << w->atom << " (witness:";
        for (const Rat& c : w->coeffs) os << ' ' << rat_to_string(c);
        os << ")";
        throw IndependenceError(w->atom, os.str());
    }
    return Simplex(std::move(vertices));
}

ClassicalSimplex Simplex::at_atom(std::size_t atom) const {
    ClassicalSimplex c;
    c.dim = dim();
    for (const auto& v : verts_) {
        auto row = v.row(atom);
        c.vertices.emplace_back(row.begin(), row.end());
    }
    return c;
}

Scalar<Rat> Simplex::diameter_sq() const {
    const std::size_t K = space()->atom_count();
    std::vector<Rat> out(K, Rat(0));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t i = 0; i < verts_.size(); ++i)
            for (std::size_t j = i + 1; j < verts_.size(); ++j) {
                Rat s(0);
                auto vi = verts_[i].row(a);
                auto vj = verts_[j].row(a);
                for (std::size_t c = 0; c < dim(); ++c) {
                    Rat diff = vi[c] - vj[c];
                    s += diff * diff;
                }
                if (s > out[a]) out[a] = s;
            }
    return Scalar<Rat>(space(), std::move(out));
}

Scalar<double> Simplex::diameter() const {
    Scalar<Rat> sq = diameter_sq();
    std::vector<double> out;
    out.reserve(sq.atom_count());
    for (const Rat& r : sq.values()) out.push_back(std::sqrt(rat_to_double(r)));
    return Scalar<double>(space(), std::move(out));
}

Vector<Rat> Simplex::barycenter() const {
    Vector<Rat> sum = verts_.front();
    for (std::size_t j = 1; j < verts_.size(); ++j) sum = sum + verts_[j];
    return sum.scaled(Rat(1, static_cast<unsigned long>(verts_.size())));
}

bool Simplex::operator==(const Simplex& o) const {
    if (order() != o.order()) return false;
    for (std::size_t j = 0; j < order(); ++j)
        if (!(verts_[j] == o.verts_[j])) return false;
    return true;
}

Simplex concatenate_simplexes(const std::vector<Simplex>& items, const PartitionOfUnity& p) {
    if (items.size() != p.part_count())
        throw StructuralError("concatenate: simplex count does not match partition part count");
    const std::size_t n = items.front().order();
    for (const Simplex& s : items) {
        require_same_space(s.space(), p.space(), "concatenate");
        if (s.order() != n) throw StructuralError("concatenate: simplex orders differ");
        if (s.dim() != items.front().dim()) throw StructuralError("concatenate: simplex dimensions differ");
    }
    std::vector<Vector<Rat>> verts;
    verts.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Vector<Rat>> slot;
        slot.reserve(items.size());
        for (const Simplex& s : items) slot.push_back(s.vertex(j));
        verts.push_back(concatenate(slot, p));
    }
    return Simplex(std::move(verts));
}

BarycentricSolver::BarycentricSolver(const Simplex& s) : simplex_(s) {
    const std::size_t K = s.space()->atom_count();
    const std::size_t n = s.order();
    square_ = (s.dim() == n - 1);
    lu_exact_.reserve(K);
    lu_float_.reserve(K);
    for (std::size_t a = 0; a < K; ++a) {
        Mat<Rat> d = difference_matrix(s.vertices(), a);
        Mat<double> dd(d.rows, d.cols);
        for (std::size_t i = 0; i < d.a.size(); ++i) dd.a[i] = rat_to_double(d.a[i]);
        double frob_sq = 0.0;
        for (double x : dd.a) frob_sq += x * x;
        scale_.push_back(std::sqrt(frob_sq));
        if (n == 1) {
            diff_exact_.push_back(d);
            diff_float_.push_back(dd);
            lu_exact_.push_back(Lu<Rat>::factor(Mat<Rat>(0, 0)));
            lu_float_.push_back(Lu<double>::factor(Mat<double>(0, 0)));
            continue;
        }
        if (square_) {
            lu_exact_.push_back(Lu<Rat>::factor(d));
            lu_float_.push_back(Lu<double>::factor(dd));
        } else {
            lu_exact_.push_back(Lu<Rat>::factor(d.gram()));
            lu_float_.push_back(Lu<double>::factor(dd.gram()));
        }
        diff_exact_.push_back(std::move(d));
        diff_float_.push_back(std::move(dd));
    }
}

std::optional<std::vector<Rat>> BarycentricSolver::affine_at(std::size_t atom, std::span<const Rat> point) const {
    const std::size_t n = simplex_.order();
    auto v1 = simplex_.vertex(0).row(atom);
    std::vector<Rat> rhs(simplex_.dim());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = point[i] - v1[i];
    if (n == 1) {
        for (const Rat& r : rhs)
            if (sgn(r) != 0) return std::nullopt;
        return std::vector<Rat>{Rat(1)};
    }
    std::vector<Rat> lam;
    if (square_) {
        lam = lu_exact_[atom].solve(rhs);
    } else {
        lam = lu_exact_[atom].solve(diff_exact_[atom].transposed().mul(rhs));
        std::vector<Rat> back = diff_exact_[atom].mul(lam);
        for (std::size_t i = 0; i < rhs.size(); ++i)
            if (back[i] != rhs[i]) return std::nullopt;  // outside the affine hull
    }
    std::vector<Rat> coords(n);
    Rat rest(0);
    for (std::size_t j = 1; j < n; ++j) {
        coords[j] = lam[j - 1];
        rest += lam[j - 1];
    }
    coords[0] = Rat(1) - rest;
    return coords;
}

std::optional<std::vector<double>> BarycentricSolver::affine_at(std::size_t atom,
                                                                std::span<const double> point) const {
    const std::size_t n = simplex_.order();
    const Vector<Rat>& v1r = simplex_.vertex(0);
    std::vector<double> rhs(simplex_.dim());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = point[i] - rat_to_double(v1r.at(atom, i));
    if (n == 1) {
        for (double r : rhs)
            if (std::abs(r) > 1e-9 * (1.0 + scale_[atom])) return std::nullopt;
        return std::vector<double>{1.0};
    }
    std::vector<double> lam;
    if (square_) {
        lam = lu_float_[atom].solve(rhs);
    } else {
        lam = lu_float_[atom].solve(diff_float_[atom].transposed().mul(rhs));
        std::vector<double> back = diff_float_[atom].mul(lam);
        double err = 0.0;
        for (std::size_t i = 0; i < rhs.size(); ++i) err += (back[i] - rhs[i]) * (back[i] - rhs[i]);
        if (std::sqrt(err) > 1e-9 * (1.0 + scale_[atom])) return std::nullopt;
    }
    std::vector<double> coords(n);
    double rest = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        coords[j] = lam[j - 1];
        rest += lam[j - 1];
    }
    coords[0] = 1.0 - rest;
    return coords;
}

Vector<Rat> barycentric_coordinates(const Simplex& s, const Vector<Rat>& x) {
    require_same_space(s.space(), x.space(), "barycentric coordinates");
    if (x.dim() != s.dim()) throw StructuralError("barycentric coordinates: point dimension differs");
    BarycentricSolver solver(s);
    const std::size_t K = s.space()->atom_count();
    std::vector<Rat> data(K * s.order());
    for (std::size_t a = 0; a < K; ++a) {
        auto coords = solver.affine_at(a, x.row(a));
        if (!coords)
            throw MembershipError(a, "point lies outside the affine hull at atom " + std::to_string(a));
        for (std::size_t j = 0; j < s.order(); ++j) {
            if (sgn((*coords)[j]) < 0)
                throw MembershipError(a, "coordinate " + std::to_string(j) + " is negative at atom " +
                                             std::to_string(a) + " (" + rat_to_string((*coords)[j]) + ")");
            data[a * s.order() + j] = std::move((*coords)[j]);
        }
    }
    return Vector<Rat>(s.space(), s.order(), std::move(data));
}

std::optional<Vector<Rat>> try_barycentric_coordinates(const Simplex& s, const Vector<Rat>& x) {
    require_same_space(s.space(), x.space(), "barycentric coordinates");
    if (x.dim() != s.dim()) throw StructuralError("barycentric coordinates: point dimension differs");
    BarycentricSolver solver(s);
    const std::size_t K = s.space()->atom_count();
    std::vector<Rat> data(K * s.order());
    for (std::size_t a = 0; a < K; ++a) {
        auto coords = solver.affine_at(a, x.row(a));
        if (!coords) return std::nullopt;
        for (std::size_t j = 0; j < s.order(); ++j) {
            if (sgn((*coords)[j]) < 0) return std::nullopt;
            data[a * s.order() + j] = std::move((*coords)[j]);
        }
    }
    return Vector<Rat>(s.space(), s.order(), std::move(data));
}

}  // namespace l0
