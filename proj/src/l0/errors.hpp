#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l0 {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape or wiring problems: mismatched spaces, wrong dimensions, bad cell ids.
struct StructuralError : Error {
    using Error::Error;
};

/// Semantically invalid input values (weights, labels, map parameters, JSON).
struct ValidationError : Error {
    using Error::Error;
};

/// A point failed a containment test. Carries the offending atom.
struct MembershipError : Error {
    std::size_t atom;
    MembershipError(std::size_t atom_, const std::string& what_)
        : Error(what_), atom(atom_) {}
};

/// Affine independence failed at some atom. The certificate holds coefficients
/// c (one per vertex, not all zero) with sum(c) = 0 and sum(c_i * v_i) = 0.
struct IndependenceError : Error {
    std::size_t atom;
    IndependenceError(std::size_t atom_, const std::string& what_)
        : Error(what_), atom(atom_) {}
};

/// The Borsuk retraction hit a fixed point of f (direction f(x) - x vanished).
struct DegenerateDirectionError : Error {
    std::size_t atom;
    DegenerateDirectionError(std::size_t atom_, const std::string& what_)
        : Error(what_), atom(atom_) {}
};

}  // namespace l0
