#include "solve.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <thread>

#include "project.hpp"

namespace l0 {

int pick_label_exact(std::span<const Rat> lambda, std::span<const Rat> mu) {
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (sgn(lambda[i]) > 0 && lambda[i] >= mu[i]) return static_cast<int>(i) + 1;
    throw Error("no admissible label: coordinate sums are inconsistent");
}

int pick_label_float(std::span<const double> lambda, std::span<const double> mu) {
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda[i] > 0.0 && lambda[i] >= mu[i]) return static_cast<int>(i) + 1;
    // Equal coordinate sums force a qualifying index in exact arithmetic;
    // under rounding take the best-margin index on the positive support.
    int best = -1;
    double best_gap = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] <= 1e-12) continue;
        double gap = lambda[i] - mu[i];
        if (best < 0 || gap > best_gap) {
            best = static_cast<int>(i) + 1;
            best_gap = gap;
        }
    }
    if (best < 0) throw Error("no admissible label under float arithmetic");
    return best;
}

namespace {

std::vector<double> row_to_double(std::span<const Rat> row) {
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) out[i] = rat_to_double(row[i]);
    return out;
}

int label_one_vertex(const BarycentricSolver& ref, const AtomwiseMap& f, Arith mode, std::size_t atom,
                     std::span<const Rat> point, std::span<const Rat> lambda) {
    if (mode == Arith::rational) {
        std::vector<Rat> fy = f.eval_exact(atom, point);
        auto mu = ref.affine_at(atom, std::span<const Rat>(fy));
        if (!mu) throw Error("map image left the affine hull of the reference simplex");
        return pick_label_exact(lambda, *mu);
    }
    std::vector<double> fy = f.eval(atom, row_to_double(point));
    auto mu = ref.affine_at(atom, std::span<const double>(fy));
    if (!mu) throw Error("map image left the affine hull of the reference simplex");
    return pick_label_float(row_to_double(lambda), *mu);
}

}  // namespace

L0Labeling label_from_map(const Simplex& s, const AtomwiseMap& f, const SubdivisionPtr& sub, Arith mode) {
    require_same_space(s.space(), sub->space(), "labeling from map");
    if (mode == Arith::rational && !f.supports_exact())
        throw ValidationError("map family '" + f.family() + "' has no exact backend; use float arithmetic");
    const std::size_t K = s.space()->atom_count();
    BarycentricSolver ref(s);
    std::vector<std::vector<int>> labels(sub->registry_size(), std::vector<int>(K, 0));
    for (std::uint32_t vid = 0; vid < sub->registry_size(); ++vid) {
        const Vector<Rat>& y = sub->registry_point(vid);
        Vector<Rat> lam = barycentric_coordinates(s, y);  // throws when y leaves s at some atom
        for (std::size_t a = 0; a < K; ++a) labels[vid][a] = label_one_vertex(ref, f, mode, a, y.row(a), lam.row(a));
    }
    L0Labeling out(sub, std::move(labels));
    if (auto v = out.properness_violation())
        throw Error("labeling from map is not proper: vertex " + std::to_string(v->vertex) + " at atom " +
                    std::to_string(v->atom) + " received label " + std::to_string(v->label) +
                    " outside its support");
    return out;
}

namespace {

struct AtomChoice {
    long cell = -1;
    std::vector<std::uint32_t> slots;       // registry ids; slot j carries label j+1
    std::vector<std::vector<Rat>> b_rows;   // reference coords of the new corners
};

/// Squared residual of f at the barycenter of one cell, used to rank cells
/// when no completely labeled one exists. Exact in rational mode.
Rat cell_residual_sq_exact(const Subdivision& sub, const AtomwiseMap& f, std::size_t atom, std::size_t cid) {
    const std::size_t d = sub.parent().dim();
    std::vector<Rat> x(d, Rat(0));
    for (std::uint32_t vid : sub.cell(cid)) {
        std::span<const Rat> p = sub.registry_point(vid).row(atom);
        for (std::size_t i = 0; i < d; ++i) x[i] += p[i];
    }
    for (Rat& c : x) c /= sub.order();
    std::vector<Rat> fx = f.eval_exact(atom, x);
    Rat acc(0);
    for (std::size_t i = 0; i < d; ++i) {
        Rat diff = fx[i] - x[i];
        acc += diff * diff;
    }
    return acc;
}

double cell_residual_sq_float(const Subdivision& sub, const AtomwiseMap& f, std::size_t atom, std::size_t cid) {
    const std::size_t d = sub.parent().dim();
    std::vector<double> x(d, 0.0);
    for (std::uint32_t vid : sub.cell(cid)) {
        std::span<const Rat> p = sub.registry_point(vid).row(atom);
        for (std::size_t i = 0; i < d; ++i) x[i] += rat_to_double(p[i]);
    }
    for (double& c : x) c /= static_cast<double>(sub.order());
    std::vector<double> fx = f.eval(atom, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += (fx[i] - x[i]) * (fx[i] - x[i]);
    return acc;
}

/// Cell of the subdivision containing the point whose coordinates in the
/// parent corners are beta (nonnegative, summing to one). Cells store their
/// vertex chain in prefix order, so a cell contains the point exactly when
/// beta is weakly decreasing along the chain's added corners; the scan keeps
/// the first such cell, which makes boundary ties deterministic.
template <class T>
std::optional<std::size_t> cell_containing_coords(const Subdivision& sub, const std::vector<T>& beta) {
    for (std::size_t cid = 0; cid < sub.cell_count(); ++cid) {
        std::uint32_t prev = 0;
        std::size_t last = 0;
        bool ok = true;
        for (std::uint32_t vid : sub.cell(cid)) {
            std::uint32_t mask = sub.mask(vid);
            std::size_t k = static_cast<std::size_t>(std::countr_zero(mask & ~prev));
            if (prev != 0 && beta[k] > beta[last]) {
                ok = false;
                break;
            }
            prev = mask;
            last = k;
        }
        if (ok) return cid;
    }
    return std::nullopt;
}

/// Affine interpolation step. The map is reconstructed from its values at the
/// window corners; a barycenter probe certifies that the window is affine
/// (an affine map sends the barycenter to the mean of the corner images).
/// When the interpolant has a unique fixed point lying inside the window, the
/// refinement descends into the cell containing it, which is what makes the
/// nested windows converge onto the fixed point itself rather than merely
/// shrink. Registry ids 0..n-1 are the corners and the last id is the
/// barycenter.
std::optional<std::size_t> model_cell_exact(const Subdivision& sub, const AtomwiseMap& f, std::size_t atom) {
    const std::size_t n = sub.order();
    const std::size_t d = sub.parent().dim();
    std::vector<std::vector<Rat>> F(n);
    for (std::size_t j = 0; j < n; ++j)
        F[j] = f.eval_exact(atom, sub.registry_point(static_cast<std::uint32_t>(j)).row(atom));
    std::vector<Rat> fb =
        f.eval_exact(atom, sub.registry_point(static_cast<std::uint32_t>(sub.registry_size() - 1)).row(atom));
    for (std::size_t i = 0; i < d; ++i) {
        Rat mean(0);
        for (std::size_t j = 0; j < n; ++j) mean += F[j][i];
        mean /= static_cast<long>(n);
        if (mean != fb[i]) return std::nullopt;
    }
    // Fixed point in corner coordinates: sum_j beta_j (F_j - w_j) = 0 with
    // sum_j beta_j = 1.
    Mat<Rat> m(n, n);
    std::vector<Rat> rhs(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
        std::span<const Rat> w = sub.registry_point(static_cast<std::uint32_t>(j)).row(atom);
        for (std::size_t i = 0; i < d; ++i) m.at(i, j) = Rat(F[j][i] - w[i]);
        m.at(d, j) = 1;
    }
    rhs[d] = 1;
    Lu<Rat> lu = Lu<Rat>::factor(std::move(m));
    if (lu.singular()) return std::nullopt;
    std::vector<Rat> beta = lu.solve(rhs);
    for (const Rat& bj : beta)
        if (sgn(bj) < 0) return std::nullopt;
    return cell_containing_coords(sub, beta);
}

std::optional<std::size_t> model_cell_float(const Subdivision& sub, const AtomwiseMap& f, std::size_t atom) {
    const std::size_t n = sub.order();
    const std::size_t d = sub.parent().dim();
    std::vector<std::vector<double>> w(n), F(n);
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = row_to_double(sub.registry_point(static_cast<std::uint32_t>(j)).row(atom));
        F[j] = f.eval(atom, w[j]);
        for (std::size_t i = 0; i < d; ++i) scale = std::max({scale, std::abs(w[j][i]), std::abs(F[j][i])});
    }
    std::vector<double> fb =
        f.eval(atom, row_to_double(sub.registry_point(static_cast<std::uint32_t>(sub.registry_size() - 1)).row(atom)));
    for (std::size_t i = 0; i < d; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += F[j][i];
        mean /= static_cast<double>(n);
        // Tight enough to reject genuinely curved windows, loose enough for
        // rounding noise in an affine evaluation.
        if (std::abs(mean - fb[i]) > 1e-9 * scale) return std::nullopt;
    }
    Mat<double> m(n, n);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < d; ++i) m.at(i, j) = F[j][i] - w[j][i];
        m.at(d, j) = 1.0;
    }
    rhs[d] = 1.0;
    Lu<double> lu = Lu<double>::factor(std::move(m));
    if (lu.singular()) return std::nullopt;
    std::vector<double> beta = lu.solve(rhs);
    for (double& bj : beta) {
        if (!std::isfinite(bj) || bj < -1e-10) return std::nullopt;
        bj = std::max(bj, 0.0);
    }
    return cell_containing_coords(sub, beta);
}

/// One active atom's refinement step, a three-rule chain.
///
/// 1. Affine interpolation: when a barycenter probe certifies the map as
///    affine on the window, descend into the cell containing the
///    interpolant's fixed point. Affine maps are tracked exactly from the
///    first level on, so the nested windows pin the fixed point to the final
///    diameter.
/// 2. Labels: label every registry vertex (coordinates taken in the original
///    simplex via the running coordinate matrix b) and keep the first cell
///    whose corners carry all n labels, reordered so corner j carries label
///    j+1. The oddness law guarantees such a cell on the first level; on
///    deeper levels labels stay proper in the original coordinates only, so
///    the sweep can miss.
/// 3. Residual greedy: the cell whose barycenter has the smallest residual,
///    which keeps the refinement near the fixed point when neither rule
///    above applies.
AtomChoice choose_cell_at_atom(const Subdivision& sub, const Mat<Rat>& b, const BarycentricSolver& ref,
                               const AtomwiseMap& f, Arith mode, std::size_t atom) {
    const std::size_t n = sub.order();
    const std::size_t R = sub.registry_size();
    // Coordinates of every registry vertex in the original simplex, averaged
    // from the running corner rows; feeds labels and the next level's corner
    // bookkeeping alike.
    std::vector<std::vector<Rat>> lam(R);
    for (std::uint32_t vid = 0; vid < R; ++vid) {
        std::uint32_t mask = sub.mask(vid);
        int size = 0;
        std::vector<Rat> l(n, Rat(0));
        for (std::size_t k = 0; k < n; ++k) {
            if (!((mask >> k) & 1u)) continue;
            ++size;
            for (std::size_t i = 0; i < n; ++i) l[i] += b.at(k, i);
        }
        for (Rat& x : l) x /= size;
        lam[vid] = std::move(l);
    }

    std::optional<std::size_t> modeled =
        mode == Arith::rational ? model_cell_exact(sub, f, atom) : model_cell_float(sub, f, atom);
    if (modeled) {
        AtomChoice choice;
        choice.cell = static_cast<long>(*modeled);
        choice.slots.assign(sub.cell(*modeled).begin(), sub.cell(*modeled).end());
        choice.b_rows.resize(n);
        for (std::size_t j = 0; j < n; ++j) choice.b_rows[j] = lam[choice.slots[j]];
        return choice;
    }

    std::vector<int> labels(R);
    for (std::uint32_t vid = 0; vid < R; ++vid)
        labels[vid] = label_one_vertex(ref, f, mode, atom, sub.registry_point(vid).row(atom), lam[vid]);

    const std::uint32_t full = (n >= 32) ? ~0u : ((1u << n) - 1u);
    for (std::size_t cid = 0; cid < sub.cell_count(); ++cid) {
        std::uint32_t seen = 0;
        for (std::uint32_t vid : sub.cell(cid)) seen |= 1u << (labels[vid] - 1);
        if (seen != full) continue;
        AtomChoice choice;
        choice.cell = static_cast<long>(cid);
        choice.slots.assign(n, 0);
        choice.b_rows.resize(n);
        for (std::uint32_t vid : sub.cell(cid)) {
            choice.slots[labels[vid] - 1] = vid;
            choice.b_rows[labels[vid] - 1] = lam[vid];
        }
        return choice;
    }

    std::size_t best = 0;
    if (mode == Arith::rational) {
        Rat best_sq = cell_residual_sq_exact(sub, f, atom, 0);
        for (std::size_t cid = 1; cid < sub.cell_count(); ++cid) {
            Rat sq = cell_residual_sq_exact(sub, f, atom, cid);
            if (sq < best_sq) {
                best_sq = std::move(sq);
                best = cid;
            }
        }
    } else {
        double best_sq = cell_residual_sq_float(sub, f, atom, 0);
        for (std::size_t cid = 1; cid < sub.cell_count(); ++cid) {
            double sq = cell_residual_sq_float(sub, f, atom, cid);
            if (sq < best_sq) {
                best_sq = sq;
                best = cid;
            }
        }
    }
    AtomChoice choice;
    choice.cell = static_cast<long>(best);
    choice.slots.assign(sub.cell(best).begin(), sub.cell(best).end());
    choice.b_rows.resize(n);
    for (std::size_t j = 0; j < n; ++j) choice.b_rows[j] = lam[choice.slots[j]];
    return choice;
}

void validate_options(const SolveOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
}

}  // namespace

SolveOutcome solve_on_simplex(const Simplex& s, const AtomwiseMap& f, const SolveOptions& opts) {
    validate_options(opts);
    if (!f.domain().is_simplex() || !(f.domain().as_simplex() == s))
        throw ValidationError("solver needs the map's domain to equal the refined simplex");
    if (opts.mode == Arith::rational && !f.supports_exact())
        throw ValidationError("map family '" + f.family() + "' has no exact backend; use float arithmetic");

    const SpacePtr& sp = s.space();
    const std::size_t K = sp->atom_count();
    const std::size_t n = s.order();
    const BarycentricSolver& ref = f.domain().solver();

    Rat eps = rat_from_double(opts.epsilon);
    Rat eps_sq = eps * eps;
    Rat ratio_sq = n >= 2 ? Rat(Rat(n - 1) * Rat(n - 1)) / Rat(Rat(n) * Rat(n)) : Rat(0);

    Simplex cur = s;
    Scalar<Rat> cur_dsq = cur.diameter_sq();
    // Reference coordinates of the current corners in s; starts as identity.
    std::vector<Mat<Rat>> b(K, Mat<Rat>(n, n));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t j = 0; j < n; ++j) b[a].at(j, j) = 1;

    std::vector<std::uint8_t> frozen(K);
    std::vector<std::size_t> iterations(K, 0);
    for (std::size_t a = 0; a < K; ++a) frozen[a] = cur_dsq.at(a) <= eps_sq;

    SolveTrace trace;
    std::size_t level = 0;
    auto any_active = [&] {
        for (std::size_t a = 0; a < K; ++a)
            if (!frozen[a]) return true;
        return false;
    };

    while (level < opts.max_iter && any_active()) {
        SubdivisionPtr sub = barycentric_subdivision(cur);
        std::vector<std::optional<AtomChoice>> choice(K);
        std::vector<std::size_t> active;
        for (std::size_t a = 0; a < K; ++a)
            if (!frozen[a]) active.push_back(a);

        unsigned workers = opts.threads == 0 ? 1u : opts.threads;
        if (workers <= 1 || active.size() <= 1) {
            for (std::size_t a : active) choice[a] = choose_cell_at_atom(*sub, b[a], ref, f, opts.mode, a);
        } else {
            std::vector<std::exception_ptr> errs(K);
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers && w < active.size(); ++w) {
                pool.emplace_back([&, w] {
                    for (std::size_t i = w; i < active.size(); i += workers) {
                        std::size_t a = active[i];
                        try {
                            choice[a] = choose_cell_at_atom(*sub, b[a], ref, f, opts.mode, a);
                        } catch (...) {
                            errs[a] = std::current_exception();
                        }
                    }
                });
            }
            for (std::thread& t : pool) t.join();
            for (std::size_t a = 0; a < K; ++a)
                if (errs[a]) std::rethrow_exception(errs[a]);
        }

        std::vector<long> cells(K, -1);
        std::vector<Vector<Rat>> verts;
        verts.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<Rat> data(K * s.dim());
            for (std::size_t a = 0; a < K; ++a) {
                std::span<const Rat> src = frozen[a] ? cur.vertex(j).row(a)
                                                     : sub->registry_point(choice[a]->slots[j]).row(a);
                for (std::size_t i = 0; i < s.dim(); ++i) data[a * s.dim() + i] = src[i];
            }
            verts.push_back(Vector<Rat>(sp, s.dim(), std::move(data)));
        }
        Simplex next = Simplex::make(std::move(verts));
        Scalar<Rat> next_dsq = next.diameter_sq();

        for (std::size_t a : active) {
            cells[a] = choice[a]->cell;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) b[a].at(j, i) = std::move(choice[a]->b_rows[j][i]);
            // Diameter lemma, asserted exactly at every step.
            if (next_dsq.at(a) > Rat(ratio_sq * cur_dsq.at(a)))
                throw Error("refinement violated the diameter contraction bound at atom " + std::to_string(a));
            iterations[a] = level + 1;
        }

        if (opts.record_trace) trace.levels.push_back({cur, cur_dsq, cells});
        cur = std::move(next);
        cur_dsq = std::move(next_dsq);
        for (std::size_t a : active)
            if (cur_dsq.at(a) <= eps_sq) frozen[a] = 1;
        ++level;
    }

    bool all = true;
    for (std::size_t a = 0; a < K; ++a) all = all && frozen[a];

    Vector<Rat> xstar = cur.barycenter();
    std::vector<double> res(K);
    std::optional<Scalar<Rat>> res_sq;
    if (opts.mode == Arith::rational) {
        std::vector<Rat> rs(K);
        for (std::size_t a = 0; a < K; ++a) {
            std::vector<Rat> fx = f.eval_exact(a, xstar.row(a));
            Rat acc(0);
            for (std::size_t i = 0; i < s.dim(); ++i) {
                Rat diff = fx[i] - xstar.at(a, i);
                acc += diff * diff;
            }
            res[a] = std::sqrt(rat_to_double(acc));
            rs[a] = std::move(acc);
        }
        res_sq = Scalar<Rat>(sp, std::move(rs));
    } else {
        Vector<double> xd = to_double(xstar);
        for (std::size_t a = 0; a < K; ++a) {
            std::vector<double> fx = f.eval(a, xd.row(a));
            double acc = 0.0;
            for (std::size_t i = 0; i < s.dim(); ++i) acc += (fx[i] - xd.at(a, i)) * (fx[i] - xd.at(a, i));
            res[a] = std::sqrt(acc);
        }
    }

    return SolveOutcome{std::move(xstar),
                        Scalar<double>(sp, std::move(res)),
                        std::move(res_sq),
                        std::move(iterations),
                        std::move(frozen),
                        all,
                        std::move(cur),
                        std::move(trace)};
}

Simplex circumscribing_simplex(const Ball& ball) {
    const std::size_t d = ball.dim();
    const SpacePtr& sp = ball.space();
    const std::size_t K = sp->atom_count();
    // scale >= sqrt(d) with an exact certificate scale^2 >= d.
    mpz_class root = ceil_sqrt(mpz_class(d) * 4096 * 4096);
    Rat scale(root, mpz_class(4096));
    scale.canonicalize();
    if (Rat(scale * scale) < Rat(static_cast<long>(d))) throw Error("circumscribing scale certificate failed");

    std::vector<std::vector<Rat>> rows(d + 1, std::vector<Rat>(K * d));
    for (std::size_t a = 0; a < K; ++a) {
        const Rat& r = ball.radius().at(a);
        Rat side = Rat(Rat(d) * r + Rat(scale * r));  // d*r + r*sqrt-ceil(d)
        for (std::size_t i = 0; i < d; ++i) {
            Rat w0 = ball.center().at(a, i) - r;
            for (std::size_t j = 0; j <= d; ++j) rows[j][a * d + i] = w0;
            rows[i + 1][a * d + i] += side;
        }
    }
    std::vector<Vector<Rat>> verts;
    verts.reserve(d + 1);
    for (std::size_t j = 0; j <= d; ++j) verts.push_back(Vector<Rat>(sp, d, std::move(rows[j])));
    return Simplex::make(std::move(verts));
}

SolveOutcome solve_on_convex(const Ball& ball, const AtomwiseMap& f, const SolveOptions& opts) {
    validate_options(opts);
    if (opts.mode == Arith::rational)
        throw ValidationError("ball domains need the float backend (the projection takes square roots)");
    if (!f.domain().is_ball()) throw ValidationError("solver needs the map's domain to equal the ball");
    const Ball& fb = f.domain().as_ball();
    if (!(fb.center() == ball.center()) || !(fb.radius() == ball.radius()))
        throw ValidationError("solver needs the map's domain to equal the ball");

    Simplex s = circumscribing_simplex(ball);
    AtomwiseMap fhat = AtomwiseMap::compose_ball_projection(Domain::simplex(s), ball, f);
    SolveOutcome out = solve_on_simplex(s, fhat, opts);

    // Pull the located point back onto the ball.
    Vector<double> xb = project_convex(Domain::ball(ball), to_double(out.fixed_point));
    const std::size_t K = ball.space()->atom_count();
    const std::size_t d = ball.dim();

    // Secant polish. The composed map bends across the sphere, so the nested
    // windows can stall at the scale of the ball rather than close in on the
    // fixed point; near the located point the original map is evaluated at
    // d+1 nearby probes, the affine map they determine is solved for its
    // fixed point, and the jump is kept only when it strictly improves the
    // residual. Where the map is affine around its fixed point (rotations,
    // contractions, constants) one jump lands on it to rounding error, and
    // rougher maps lose nothing.
    for (std::size_t a = 0; a < K; ++a) {
        const double r = rat_to_double(ball.radius().at(a));
        std::vector<double> cen(d);
        for (std::size_t i = 0; i < d; ++i) cen[i] = rat_to_double(ball.center().at(a, i));
        auto clip = [&](std::vector<double> p) {
            double dsq = 0.0;
            for (std::size_t i = 0; i < d; ++i) dsq += (p[i] - cen[i]) * (p[i] - cen[i]);
            if (dsq <= r * r) return p;
            double sc = (1.0 - 1e-12) * r / std::sqrt(dsq);
            for (std::size_t i = 0; i < d; ++i) p[i] = cen[i] + (p[i] - cen[i]) * sc;
            return p;
        };
        auto residual_at = [&](const std::vector<double>& p) {
            std::vector<double> fp = f.eval(a, p);
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) acc += (fp[i] - p[i]) * (fp[i] - p[i]);
            return std::sqrt(acc);
        };
        std::vector<double> cur(xb.row(a).begin(), xb.row(a).end());
        double cur_res = residual_at(cur);
        const double h = 1e-3 * r;
        for (int round = 0; round < 3 && cur_res > 0.0; ++round) {
            std::vector<double> q0 = clip(cur);
            std::vector<double> f0 = f.eval(a, q0);
            Mat<double> dq(d, d);  // row i holds probe offset q_i - q_0
            std::vector<std::vector<double>> df(d);
            for (std::size_t i = 0; i < d; ++i) {
                std::vector<double> qi = q0;
                qi[i] += h;
                qi = clip(qi);
                std::vector<double> fi = f.eval(a, qi);
                df[i].resize(d);
                for (std::size_t c = 0; c < d; ++c) {
                    dq.at(i, c) = qi[c] - q0[c];
                    df[i][c] = fi[c] - f0[c];
                }
            }
            Lu<double> lu = Lu<double>::factor(std::move(dq));
            if (lu.singular()) break;
            // Row-wise Jacobian recovery: dq * J_row = df column.
            Mat<double> jac(d, d);
            for (std::size_t rr = 0; rr < d; ++rr) {
                std::vector<double> rhs(d);
                for (std::size_t i = 0; i < d; ++i) rhs[i] = df[i][rr];
                std::vector<double> jr = lu.solve(rhs);
                for (std::size_t c = 0; c < d; ++c) jac.at(rr, c) = jr[c];
            }
            // Fixed point of the rebuilt affine map: (I - J) x = f0 - J q0.
            Mat<double> m(d, d);
            std::vector<double> rhs(d);
            for (std::size_t rr = 0; rr < d; ++rr) {
                double jq = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    m.at(rr, c) = (rr == c ? 1.0 : 0.0) - jac.at(rr, c);
                    jq += jac.at(rr, c) * q0[c];
                }
                rhs[rr] = f0[rr] - jq;
            }
            Lu<double> fx = Lu<double>::factor(std::move(m));
            if (fx.singular()) break;
            std::vector<double> y = fx.solve(rhs);
            bool finite = true;
            for (double v : y) finite = finite && std::isfinite(v);
            if (!finite) break;
            y = clip(std::move(y));
            double yres = residual_at(y);
            if (!(yres < cur_res)) break;
            cur = std::move(y);
            cur_res = yres;
        }
        for (std::size_t i = 0; i < d; ++i) xb.at(a, i) = cur[i];
    }

    // Residual of the original map at the polished point.
    std::vector<double> res(K);
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<double> fx = f.eval(a, xb.row(a));
        double acc = 0.0;
        for (std::size_t i = 0; i < ball.dim(); ++i) acc += (fx[i] - xb.at(a, i)) * (fx[i] - xb.at(a, i));
        res[a] = std::sqrt(acc);
    }
    // The float projection certifies membership only in double arithmetic.
    // Any atom landing exactly outside is pulled back along the radius by
    // t = r^2 / dist^2 < 1, which puts it strictly inside: the new squared
    // distance is r^4 / dist^2 < r^2.
    std::vector<Rat> exact(K * d);
    for (std::size_t a = 0; a < K; ++a) {
        Rat dsq(0);
        for (std::size_t i = 0; i < d; ++i) {
            Rat di = Rat(rat_from_double(xb.at(a, i)) - ball.center().at(a, i));
            exact[a * d + i] = Rat(ball.center().at(a, i) + di);
            dsq += Rat(di * di);
        }
        Rat rsq = Rat(ball.radius().at(a) * ball.radius().at(a));
        if (dsq <= rsq) continue;
        Rat t(rsq / dsq);
        for (std::size_t i = 0; i < d; ++i) {
            Rat di = Rat(exact[a * d + i] - ball.center().at(a, i));
            exact[a * d + i] = Rat(ball.center().at(a, i) + Rat(t * di));
        }
    }
    out.fixed_point = Vector<Rat>(ball.space(), d, std::move(exact));
    out.residual = Scalar<double>(ball.space(), std::move(res));
    out.residual_sq.reset();
    return out;
}

}  // namespace l0
