#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "space.hpp"

namespace l0 {

/// Atom-indexed scalar: one value of T per atom. T is Rat (exact backend) or
/// double (float backend); the two never mix at the type level.
template <class T>
class Scalar {
  public:
    Scalar(SpacePtr space, std::vector<T> values) : space_(std::move(space)), v_(std::move(values)) {
        if (!space_) throw StructuralError("scalar without a space");
        if (v_.size() != space_->atom_count()) throw StructuralError("scalar length does not match atom count");
    }
    static Scalar constant(const SpacePtr& space, const T& value) {
        return Scalar(space, std::vector<T>(space->atom_count(), value));
    }

    const SpacePtr& space() const { return space_; }
    std::size_t atom_count() const { return v_.size(); }
    const T& at(std::size_t atom) const { return v_[atom]; }
    const std::vector<T>& values() const { return v_; }

    bool operator==(const Scalar& o) const {
        require_same_space(space_, o.space_, "scalar equality");
        return v_ == o.v_;
    }

  private:
    SpacePtr space_;
    std::vector<T> v_;
};

/// Atom-indexed point in R^dim, stored row-major: row(atom) is the point at
/// that atom.
template <class T>
class Vector {
  public:
    Vector(SpacePtr space, std::size_t dim, std::vector<T> data)
        : space_(std::move(space)), dim_(dim), data_(std::move(data)) {
        if (!space_) throw StructuralError("vector without a space");
        if (dim_ == 0) throw StructuralError("vector needs a positive dimension");
        if (data_.size() != space_->atom_count() * dim_)
            throw StructuralError("vector data length does not match atoms * dim");
    }
    /// Same point at every atom.
    static Vector constant(const SpacePtr& space, const std::vector<T>& point) {
        std::vector<T> data;
        data.reserve(space->atom_count() * point.size());
        for (std::size_t a = 0; a < space->atom_count(); ++a)
            data.insert(data.end(), point.begin(), point.end());
        return Vector(space, point.size(), std::move(data));
    }

    const SpacePtr& space() const { return space_; }
    std::size_t dim() const { return dim_; }
    std::size_t atom_count() const { return space_->atom_count(); }

    std::span<const T> row(std::size_t atom) const { return {data_.data() + atom * dim_, dim_}; }
    std::span<T> row(std::size_t atom) { return {data_.data() + atom * dim_, dim_}; }
    const T& at(std::size_t atom, std::size_t i) const { return data_[atom * dim_ + i]; }
    T& at(std::size_t atom, std::size_t i) { return data_[atom * dim_ + i]; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Vector& o) const {
        require_same_space(space_, o.space_, "vector equality");
        return dim_ == o.dim_ && data_ == o.data_;
    }
    bool operator!=(const Vector& o) const { return !(*this == o); }

    Vector operator+(const Vector& o) const { return zip(o, [](const T& a, const T& b) { return T(a + b); }); }
    Vector operator-(const Vector& o) const { return zip(o, [](const T& a, const T& b) { return T(a - b); }); }
    Vector scaled(const T& s) const {
        Vector r(*this);
        for (T& x : r.data_) x = T(x * s);
        return r;
    }
    /// Atom-wise scaling by an atom-indexed scalar.
    Vector scaled(const Scalar<T>& s) const {
        require_same_space(space_, s.space(), "scale");
        Vector r(*this);
        for (std::size_t a = 0; a < atom_count(); ++a)
            for (std::size_t i = 0; i < dim_; ++i) r.at(a, i) = T(at(a, i) * s.at(a));
        return r;
    }

  private:
    template <class Op>
    Vector zip(const Vector& o, Op op) const {
        require_same_space(space_, o.space_, "vector arithmetic");
        if (dim_ != o.dim_) throw StructuralError("vector dimensions differ");
        Vector r(*this);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = op(data_[i], o.data_[i]);
        return r;
    }

    SpacePtr space_;
    std::size_t dim_;
    std::vector<T> data_;
};

/// Atom-indexed label with values in {1..n}.
class Label {
  public:
    Label(SpacePtr space, int n, std::vector<int> values)
        : space_(std::move(space)), n_(n), v_(std::move(values)) {
        if (!space_) throw StructuralError("label without a space");
        if (n_ < 1) throw StructuralError("label range must be at least 1");
        if (v_.size() != space_->atom_count()) throw StructuralError("label length does not match atom count");
        for (int x : v_)
            if (x < 1 || x > n_) throw ValidationError("label value out of range 1.." + std::to_string(n_));
    }
    static Label constant(const SpacePtr& space, int n, int value) {
        return Label(space, n, std::vector<int>(space->atom_count(), value));
    }

    const SpacePtr& space() const { return space_; }
    int range() const { return n_; }
    int at(std::size_t atom) const { return v_[atom]; }
    const std::vector<int>& values() const { return v_; }
    bool operator==(const Label& o) const {
        require_same_space(space_, o.space_, "label equality");
        return n_ == o.n_ && v_ == o.v_;
    }

    /// Event where the label equals i.
    Event equals(int i) const {
        Bits b(space_->atom_count());
        for (std::size_t a = 0; a < v_.size(); ++a)
            if (v_[a] == i) b.set(a);
        return Event(space_, std::move(b));
    }

  private:
    SpacePtr space_;
    int n_;
    std::vector<int> v_;
};

namespace detail {
template <class Obj>
void check_concat_inputs(const std::vector<Obj>& items, const PartitionOfUnity& p) {
    if (items.size() != p.part_count())
        throw StructuralError("concatenate: item count does not match partition part count");
    for (const Obj& x : items) require_same_space(x.space(), p.space(), "concatenate");
}
}  // namespace detail

/// Splice along a partition: the result takes item m's value on part m. This
/// is the computational form of sigma-stability; the result is the unique
/// object agreeing with item m on part m.
template <class T>
Scalar<T> concatenate(const std::vector<Scalar<T>>& items, const PartitionOfUnity& p) {
    detail::check_concat_inputs(items, p);
    std::vector<T> out(p.space()->atom_count());
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = items[p.part_of_atom(a)].at(a);
    return Scalar<T>(p.space(), std::move(out));
}

template <class T>
Vector<T> concatenate(const std::vector<Vector<T>>& items, const PartitionOfUnity& p) {
    detail::check_concat_inputs(items, p);
    std::size_t dim = items.front().dim();
    for (const Vector<T>& x : items)
        if (x.dim() != dim) throw StructuralError("concatenate: vector dimensions differ");
    std::vector<T> out(p.space()->atom_count() * dim);
    for (std::size_t a = 0; a < p.space()->atom_count(); ++a) {
        auto row = items[p.part_of_atom(a)].row(a);
        for (std::size_t i = 0; i < dim; ++i) out[a * dim + i] = row[i];
    }
    return Vector<T>(p.space(), dim, std::move(out));
}

inline Label concatenate(const std::vector<Label>& items, const PartitionOfUnity& p) {
    detail::check_concat_inputs(items, p);
    int n = items.front().range();
    for (const Label& x : items)
        if (x.range() != n) throw StructuralError("concatenate: label ranges differ");
    std::vector<int> out(p.space()->atom_count());
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = items[p.part_of_atom(a)].at(a);
    return Label(p.space(), n, std::move(out));
}

enum class Rel { lt, le, eq, gt };

/// Default float-mode equality tolerance. Exact backend ignores it.
inline constexpr double kDefaultEqTol = 1e-12;

namespace detail {
inline bool rel_holds(const Rat& a, const Rat& b, Rel r, double) {
    switch (r) {
        case Rel::lt: return a < b;
        case Rel::le: return a <= b;
        case Rel::eq: return a == b;
        case Rel::gt: return a > b;
    }
    return false;
}
inline bool rel_holds(double a, double b, Rel r, double eq_tol) {
    switch (r) {
        case Rel::lt: return a < b;
        case Rel::le: return a <= b;
        case Rel::eq: return std::abs(a - b) <= eq_tol;
        case Rel::gt: return a > b;
    }
    return false;
}
}  // namespace detail

/// Event on which the pointwise relation holds.
template <class T>
Event compare_event(const Scalar<T>& a, const Scalar<T>& b, Rel rel, double eq_tol = kDefaultEqTol) {
    require_same_space(a.space(), b.space(), "compare");
    Bits bits(a.atom_count());
    for (std::size_t i = 0; i < a.atom_count(); ++i)
        if (detail::rel_holds(a.at(i), b.at(i), rel, eq_tol)) bits.set(i);
    return Event(a.space(), std::move(bits));
}

/// Pointwise squared Euclidean norm; exact in both backends.
template <class T>
Scalar<T> norm_sq(const Vector<T>& x) {
    std::vector<T> out;
    out.reserve(x.atom_count());
    for (std::size_t a = 0; a < x.atom_count(); ++a) {
        T s = T(0);
        for (const T& c : x.row(a)) s = T(s + c * c);
        out.push_back(std::move(s));
    }
    return Scalar<T>(x.space(), std::move(out));
}

/// Pointwise Euclidean norm, reported in doubles (the square stays exact in
/// the rational backend; the root generally does not exist there).
template <class T>
Scalar<double> norm(const Vector<T>& x) {
    std::vector<double> out;
    out.reserve(x.atom_count());
    for (std::size_t a = 0; a < x.atom_count(); ++a) {
        double s = 0.0;
        if constexpr (std::is_same_v<T, double>) {
            for (double c : x.row(a)) s += c * c;
        } else {
            Rat sq(0);
            for (const Rat& c : x.row(a)) sq += c * c;
            s = rat_to_double(sq);
        }
        out.push_back(std::sqrt(s));
    }
    return Scalar<double>(x.space(), std::move(out));
}

/// Pointwise inner product; exact in both backends.
template <class T>
Scalar<T> inner(const Vector<T>& x, const Vector<T>& y) {
    require_same_space(x.space(), y.space(), "inner");
    if (x.dim() != y.dim()) throw StructuralError("inner: dimensions differ");
    std::vector<T> out;
    out.reserve(x.atom_count());
    for (std::size_t a = 0; a < x.atom_count(); ++a) {
        T s = T(0);
        auto xr = x.row(a);
        auto yr = y.row(a);
        for (std::size_t i = 0; i < x.dim(); ++i) s = T(s + xr[i] * yr[i]);
        out.push_back(std::move(s));
    }
    return Scalar<T>(x.space(), std::move(out));
}

inline Vector<double> to_double(const Vector<Rat>& x) {
    std::vector<double> data;
    data.reserve(x.data().size());
    for (const Rat& r : x.data()) data.push_back(rat_to_double(r));
    return Vector<double>(x.space(), x.dim(), std::move(data));
}

inline Scalar<double> to_double(const Scalar<Rat>& x) {
    std::vector<double> v;
    v.reserve(x.atom_count());
    for (const Rat& r : x.values()) v.push_back(rat_to_double(r));
    return Scalar<double>(x.space(), std::move(v));
}

/// Exact embedding of doubles into rationals (every finite double is dyadic).
inline Vector<Rat> to_rational(const Vector<double>& x) {
    std::vector<Rat> data;
    data.reserve(x.data().size());
    for (double d : x.data()) data.push_back(rat_from_double(d));
    return Vector<Rat>(x.space(), x.dim(), std::move(data));
}

}  // namespace l0
