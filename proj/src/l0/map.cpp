#include "map.hpp"

#include <cmath>

#include "project.hpp"

namespace l0 {

namespace {
constexpr double kDomainSlack = 1e-9;
}

Ball::Ball(Vector<Rat> center, Scalar<Rat> radius)
    : center_(std::move(center)),
      radius_(std::move(radius)),
      center_d_(to_double(center_)),
      radius_d_(to_double(radius_)) {
    require_same_space(center_.space(), radius_.space(), "ball");
    for (std::size_t a = 0; a < radius_.atom_count(); ++a)
        if (sgn(radius_.at(a)) <= 0)
            throw ValidationError("ball radius must be positive at every atom");
}

std::optional<std::size_t> Ball::first_outside(const Vector<Rat>& x) const {
    require_same_space(space(), x.space(), "ball membership");
    if (x.dim() != dim()) throw StructuralError("ball membership: dimension differs");
    for (std::size_t a = 0; a < x.atom_count(); ++a) {
        Rat dist_sq(0);
        for (std::size_t i = 0; i < dim(); ++i) {
            Rat diff = x.at(a, i) - center_.at(a, i);
            dist_sq += diff * diff;
        }
        if (dist_sq > radius_.at(a) * radius_.at(a)) return a;
    }
    return std::nullopt;
}

Domain Domain::simplex(Simplex s) {
    Domain d;
    d.space_ = s.space();
    d.dim_ = s.dim();
    d.solver_ = std::make_shared<BarycentricSolver>(s);
    d.simplex_ = std::make_shared<Simplex>(std::move(s));
    return d;
}

Domain Domain::ball(Ball b) {
    Domain d;
    d.space_ = b.space();
    d.dim_ = b.dim();
    d.ball_ = std::make_shared<Ball>(std::move(b));
    return d;
}

const Simplex& Domain::as_simplex() const {
    if (!simplex_) throw StructuralError("domain is not a simplex");
    return *simplex_;
}
const Ball& Domain::as_ball() const {
    if (!ball_) throw StructuralError("domain is not a ball");
    return *ball_;
}
const BarycentricSolver& Domain::solver() const {
    if (!solver_) throw StructuralError("domain is not a simplex");
    return *solver_;
}

std::optional<std::size_t> Domain::first_outside(const Vector<Rat>& x) const {
    if (is_ball()) return ball_->first_outside(x);
    require_same_space(space_, x.space(), "domain membership");
    for (std::size_t a = 0; a < x.atom_count(); ++a) {
        auto coords = solver_->affine_at(a, x.row(a));
        if (!coords) return a;
        for (const Rat& c : *coords)
            if (sgn(c) < 0) return a;
    }
    return std::nullopt;
}

bool Domain::check_or_repair(std::size_t atom, std::vector<double>& point) const {
    if (is_ball()) {
        const Ball& b = *ball_;
        double r = b.radius_d().at(atom);
        auto c = b.center_d().row(atom);
        double dist_sq = 0.0;
        for (std::size_t i = 0; i < point.size(); ++i)
            dist_sq += (point[i] - c[i]) * (point[i] - c[i]);
        if (dist_sq <= r * r) return true;
        double dist = std::sqrt(dist_sq);
        if (dist > r * (1.0 + kDomainSlack)) return false;
        point = project_ball_point(c, r, point);
        return true;
    }
    auto coords = solver_->affine_at(atom, std::span<const double>(point));
    if (!coords) return false;
    bool clean = true, in_slack = true;
    for (double l : *coords) {
        if (l < 0.0) clean = false;
        if (l < -kDomainSlack) in_slack = false;
    }
    if (clean) return true;
    if (!in_slack) return false;
    // Clamp the offending coordinates and rebuild the point on the simplex.
    double sum = 0.0;
    for (double& l : *coords) {
        if (l < 0.0) l = 0.0;
        sum += l;
    }
    const Simplex& s = *simplex_;
    for (std::size_t i = 0; i < point.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s.order(); ++j)
            acc += ((*coords)[j] / sum) * rat_to_double(s.vertex(j).at(atom, i));
        point[i] = acc;
    }
    return true;
}

std::vector<Rat> AtomwiseMap::eval_exact(std::size_t atom, std::span<const Rat> x) const {
    if (!exact_)
        throw ValidationError("map family '" + family_ + "' has no exact backend; use float arithmetic");
    std::vector<Rat> out = exact_(atom, x);
    if (out.size() != domain_.dim()) throw StructuralError("map image dimension differs from domain");
    if (domain_.is_ball()) {
        const Ball& b = domain_.as_ball();
        Rat dist_sq(0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            Rat diff = out[i] - b.center().at(atom, i);
            dist_sq += diff * diff;
        }
        if (dist_sq > b.radius().at(atom) * b.radius().at(atom))
            throw MembershipError(atom, "map image left the ball at atom " + std::to_string(atom));
    } else {
        auto coords = domain_.solver().affine_at(atom, std::span<const Rat>(out));
        bool ok = coords.has_value();
        if (ok)
            for (const Rat& c : *coords)
                if (sgn(c) < 0) ok = false;
        if (!ok) throw MembershipError(atom, "map image left the simplex at atom " + std::to_string(atom));
    }
    return out;
}

std::vector<double> AtomwiseMap::eval(std::size_t atom, std::span<const double> x) const {
    std::vector<double> out;
    if (float_) {
        out = float_(atom, x);
    } else {
        std::vector<Rat> xr(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xr[i] = rat_from_double(x[i]);
        std::vector<Rat> outr = exact_(atom, xr);
        out.resize(outr.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = rat_to_double(outr[i]);
    }
    if (out.size() != domain_.dim()) throw StructuralError("map image dimension differs from domain");
    if (!domain_.check_or_repair(atom, out))
        throw MembershipError(atom, "map image left the domain at atom " + std::to_string(atom) +
                                        " beyond the repair slack");
    return out;
}

std::optional<double> AtomwiseMap::lipschitz(std::size_t atom) const {
    if (lipschitz_.empty()) return std::nullopt;
    return lipschitz_[atom];
}

namespace {

void require_point_shape(const Domain& d, const Vector<Rat>& p, const char* what) {
    require_same_space(d.space(), p.space(), what);
    if (p.dim() != d.dim()) throw StructuralError(std::string(what) + ": dimension differs from domain");
}

}  // namespace

AtomwiseMap AtomwiseMap::constant(Domain domain, Vector<Rat> value) {
    require_point_shape(domain, value, "constant map");
    if (auto a = domain.first_outside(value))
        throw ValidationError("constant map value lies outside the domain at atom " + std::to_string(*a));
    AtomwiseMap m(std::move(domain), "constant");
    auto val = std::make_shared<Vector<Rat>>(std::move(value));
    m.exact_ = [val](std::size_t atom, std::span<const Rat>) {
        auto row = val->row(atom);
        return std::vector<Rat>(row.begin(), row.end());
    };
    auto val_d = std::make_shared<Vector<double>>(to_double(*val));
    m.float_ = [val_d](std::size_t atom, std::span<const double>) {
        auto row = val_d->row(atom);
        return std::vector<double>(row.begin(), row.end());
    };
    m.lipschitz_.assign(m.domain_.space()->atom_count(), 0.0);
    return m;
}

AtomwiseMap AtomwiseMap::affine(Domain domain, std::vector<Mat<Rat>> matrix, Vector<Rat> offset) {
    require_point_shape(domain, offset, "affine map");
    const std::size_t K = domain.space()->atom_count();
    const std::size_t d = domain.dim();
    if (matrix.size() != K) throw StructuralError("affine map needs one matrix per atom");
    for (const auto& m : matrix)
        if (m.rows != d || m.cols != d) throw StructuralError("affine map matrix must be dim x dim");

    auto mats = std::make_shared<std::vector<Mat<Rat>>>(std::move(matrix));
    auto off = std::make_shared<Vector<Rat>>(std::move(offset));
    auto apply = [mats, off, d](std::size_t atom, std::span<const Rat> x) {
        std::vector<Rat> out(d);
        const Mat<Rat>& A = (*mats)[atom];
        for (std::size_t r = 0; r < d; ++r) {
            Rat acc = off->at(atom, r);
            for (std::size_t c = 0; c < d; ++c) acc += A.at(r, c) * x[c];
            out[r] = std::move(acc);
        }
        return out;
    };

    // Self-map validation: vertex images for simplexes, operator-norm bound
    // for balls.
    std::vector<std::optional<double>> lip(K);
    for (std::size_t a = 0; a < K; ++a) {
        Mat<double> Ad(d, d);
        for (std::size_t i = 0; i < d * d; ++i) Ad.a[i] = rat_to_double((*mats)[a].a[i]);
        double sigma_sq = 0.0;
        {
            Mat<double> g = Ad.gram();
            // largest eigenvalue of A^T A via the trace bound refined by a few
            // power iterations
            std::vector<double> v(d, 1.0);
            for (int it = 0; it < 200; ++it) {
                std::vector<double> w = g.mul(v);
                double norm = 0.0;
                for (double x : w) norm += x * x;
                norm = std::sqrt(norm);
                if (norm == 0.0) break;
                for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / norm;
                sigma_sq = norm;
            }
        }
        lip[a] = std::sqrt(sigma_sq);
    }

    if (domain.is_simplex()) {
        const Simplex& s = domain.as_simplex();
        for (std::size_t j = 0; j < s.order(); ++j) {
            for (std::size_t a = 0; a < K; ++a) {
                std::vector<Rat> img = apply(a, s.vertex(j).row(a));
                auto coords = domain.solver().affine_at(a, std::span<const Rat>(img));
                bool ok = coords.has_value();
                if (ok)
                    for (const Rat& c : *coords)
                        if (sgn(c) < 0) ok = false;
                if (!ok)
                    throw ValidationError("affine map sends vertex " + std::to_string(j) +
                                          " outside the simplex at atom " + std::to_string(a));
            }
        }
    } else {
        const Ball& b = domain.as_ball();
        for (std::size_t a = 0; a < K; ++a) {
            std::vector<Rat> fc = apply(a, b.center().row(a));
            double drift = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                double diff = rat_to_double(fc[i]) - b.center_d().at(a, i);
                drift += diff * diff;
            }
            double r = b.radius_d().at(a);
            if (*lip[a] * r + std::sqrt(drift) > r * (1.0 + 1e-9))
                throw ValidationError("affine map is not a self-map of the ball at atom " + std::to_string(a));
        }
    }

    AtomwiseMap m(std::move(domain), "affine");
    m.exact_ = apply;
    m.lipschitz_ = std::move(lip);
    return m;
}

AtomwiseMap AtomwiseMap::contraction_to_point(Domain domain, Scalar<Rat> t, Vector<Rat> c) {
    require_point_shape(domain, c, "contraction map");
    require_same_space(domain.space(), t.space(), "contraction map");
    for (std::size_t a = 0; a < t.atom_count(); ++a)
        if (sgn(t.at(a)) < 0 || t.at(a) > 1)
            throw ValidationError("contraction factor must lie in [0,1] at every atom");
    if (auto a = domain.first_outside(c))
        throw ValidationError("contraction target lies outside the domain at atom " + std::to_string(*a));

    AtomwiseMap m(std::move(domain), "contraction-to-point");
    auto tt = std::make_shared<Scalar<Rat>>(std::move(t));
    auto cc = std::make_shared<Vector<Rat>>(std::move(c));
    m.exact_ = [tt, cc](std::size_t atom, std::span<const Rat> x) {
        std::vector<Rat> out(x.size());
        const Rat& f = tt->at(atom);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + f * (cc->at(atom, i) - x[i]);
        return out;
    };
    m.lipschitz_.resize(m.domain_.space()->atom_count());
    for (std::size_t a = 0; a < m.lipschitz_.size(); ++a)
        m.lipschitz_[a] = 1.0 - rat_to_double(tt->at(a));
    return m;
}

AtomwiseMap AtomwiseMap::rotation(Domain domain, std::vector<double> angle) {
    if (!domain.is_ball()) throw ValidationError("rotation maps need a ball domain");
    if (domain.dim() != 2) throw ValidationError("rotation maps are defined in dimension 2");
    if (angle.size() != domain.space()->atom_count())
        throw StructuralError("rotation needs one angle per atom");

    AtomwiseMap m(std::move(domain), "rotation");
    auto center = std::make_shared<Vector<double>>(m.domain_.as_ball().center_d());
    auto ang = std::make_shared<std::vector<double>>(std::move(angle));
    m.float_ = [center, ang](std::size_t atom, std::span<const double> x) {
        double c = std::cos((*ang)[atom]), s = std::sin((*ang)[atom]);
        double ux = x[0] - center->at(atom, 0), uy = x[1] - center->at(atom, 1);
        return std::vector<double>{center->at(atom, 0) + c * ux - s * uy,
                                   center->at(atom, 1) + s * ux + c * uy};
    };
    m.lipschitz_.assign(m.domain_.space()->atom_count(), 1.0);
    return m;
}

AtomwiseMap AtomwiseMap::coordinate_permutation(Domain domain, std::vector<std::vector<int>> perm) {
    if (!domain.is_simplex()) throw ValidationError("coordinate permutations need a simplex domain");
    const Simplex& s = domain.as_simplex();
    const std::size_t n = s.order();
    const std::size_t K = domain.space()->atom_count();
    if (perm.size() != K) throw StructuralError("permutation map needs one permutation per atom");
    for (const auto& p : perm) {
        if (p.size() != n) throw ValidationError("permutation length differs from vertex count");
        std::vector<bool> seen(n, false);
        for (int v : p) {
            if (v < 1 || v > static_cast<int>(n) || seen[v - 1])
                throw ValidationError("permutation entries must be a bijection of 1..n");
            seen[v - 1] = true;
        }
    }

    auto solver = std::make_shared<BarycentricSolver>(s);
    auto sx = std::make_shared<Simplex>(s);
    AtomwiseMap m(std::move(domain), "coordinate-permutation");
    auto pp = std::make_shared<std::vector<std::vector<int>>>(std::move(perm));
    m.exact_ = [pp, solver, sx, n](std::size_t atom, std::span<const Rat> x) {
        auto coords = solver->affine_at(atom, x);
        if (!coords) throw MembershipError(atom, "permutation argument outside the simplex hull");
        std::vector<Rat> out(sx->dim(), Rat(0));
        for (std::size_t i = 0; i < n; ++i) {
            const Rat& weight = (*coords)[(*pp)[atom][i] - 1];
            for (std::size_t r = 0; r < out.size(); ++r) out[r] += weight * sx->vertex(i).at(atom, r);
        }
        return out;
    };
    return m;
}

AtomwiseMap AtomwiseMap::custom(Domain domain, std::string family, ExactFn exact, FloatFn flt,
                                std::vector<std::optional<double>> lipschitz) {
    AtomwiseMap m(std::move(domain), std::move(family));
    m.exact_ = std::move(exact);
    m.float_ = std::move(flt);
    m.lipschitz_ = std::move(lipschitz);
    if (!m.exact_ && !m.float_) throw StructuralError("custom map needs at least one backend");
    return m;
}

AtomwiseMap AtomwiseMap::compose_ball_projection(Domain simplex_domain, Ball ball, const AtomwiseMap& f) {
    if (!simplex_domain.is_simplex()) throw StructuralError("projection composition needs a simplex domain");
    auto inner = std::make_shared<AtomwiseMap>(f);
    auto b = std::make_shared<Ball>(std::move(ball));
    AtomwiseMap m(std::move(simplex_domain), f.family() + "+ball-projection");
    m.float_ = [inner, b](std::size_t atom, std::span<const double> x) {
        std::vector<double> p = project_ball_point(b->center_d().row(atom), b->radius_d().at(atom), x);
        return inner->eval(atom, p);
    };
    m.lipschitz_.resize(m.domain_.space()->atom_count());
    for (std::size_t a = 0; a < m.lipschitz_.size(); ++a) m.lipschitz_[a] = inner->lipschitz(a);
    return m;
}

}  // namespace l0
