#include "retract.hpp"

#include <cmath>

namespace l0 {

std::vector<double> borsuk_point(std::span<const double> x, std::span<const double> fx,
                                 std::size_t atom) {
    const std::size_t d = x.size();
    std::vector<double> u(d);
    bool zero = true;
    for (std::size_t i = 0; i < d; ++i) {
        u[i] = fx[i] - x[i];
        if (u[i] != 0.0) zero = false;
    }
    if (zero)
        throw DegenerateDirectionError(atom, "retraction undefined: the map fixes the point at atom " +
                                                 std::to_string(atom));

    double nxsq = 0.0, nusq = 0.0, q = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        nxsq += x[i] * x[i];
        nusq += u[i] * u[i];
        q += x[i] * u[i];
    }
    if (nxsq > 1.0 + 1e-9)
        throw ValidationError("retraction argument lies outside the unit ball at atom " +
                              std::to_string(atom));
    std::vector<double> h(x.begin(), x.end());
    if (nxsq >= 1.0) return h;  // sphere points stay fixed

    // Smaller root; the discriminant is kept in the 1 - |x|^2 form so that a
    // point with |x|^2 == 1.0 in floats yields lambda = 0 exactly.
    double disc = q * q + nusq * (1.0 - nxsq);
    double lambda = (-q - std::sqrt(disc)) / nusq;
    for (std::size_t i = 0; i < d; ++i) h[i] = x[i] + lambda * u[i];
    return h;
}

Vector<double> borsuk_retraction(const AtomwiseMap& f, const Vector<double>& x) {
    const Domain& dom = f.domain();
    if (!dom.is_ball()) throw ValidationError("retraction needs the unit ball at the origin as domain");
    const Ball& b = dom.as_ball();
    for (std::size_t a = 0; a < b.space()->atom_count(); ++a) {
        if (b.radius().at(a) != 1)
            throw ValidationError("retraction needs the unit ball at the origin as domain");
        for (std::size_t i = 0; i < b.dim(); ++i)
            if (sgn(b.center().at(a, i)) != 0)
                throw ValidationError("retraction needs the unit ball at the origin as domain");
    }
    require_same_space(dom.space(), x.space(), "retraction");
    if (x.dim() != dom.dim()) throw StructuralError("retraction argument dimension differs from domain");

    const std::size_t K = x.space()->atom_count();
    std::vector<double> data(K * x.dim());
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<double> fx = f.eval(a, x.row(a));
        std::vector<double> h = borsuk_point(x.row(a), fx, a);
        for (std::size_t i = 0; i < x.dim(); ++i) data[a * x.dim() + i] = h[i];
    }
    return Vector<double>(x.space(), x.dim(), std::move(data));
}

}  // namespace l0
