#pragma once

#include <gmpxx.h>

#include <string>

#include "errors.hpp"

namespace l0 {

/// Exact rational scalar. All simplex bookkeeping runs on this type; doubles
/// only enter through map evaluation in float mode.
using Rat = mpq_class;

enum class Arith { rational, floating };

inline std::string arith_name(Arith a) {
    return a == Arith::rational ? "rational" : "float";
}

/// Parses "p/q" or "p" (q > 0 after canonicalization). Rejects anything else.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw ValidationError("empty rational literal");
    std::size_t slash = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '/') {
            if (slash != std::string::npos || i == 0 || i + 1 == s.size())
                throw ValidationError("bad rational literal: " + s);
            slash = i;
        } else if (c == '-') {
            if (i != 0) throw ValidationError("bad rational literal: " + s);
        } else if (c < '0' || c > '9') {
            throw ValidationError("bad rational literal: " + s);
        }
    }
    Rat r;
    if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
        throw ValidationError("bad rational literal: " + s);
    mpz_class den(r.get_den());
    if (sgn(den) == 0) throw ValidationError("zero denominator: " + s);
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

/// Exact conversion; every finite double is a dyadic rational.
inline Rat rat_from_double(double x) { return Rat(x); }

inline double rat_to_double(const Rat& r) { return r.get_d(); }

/// Smallest integer k >= 0 with k*k >= n (n >= 0). Used for certified
/// rational over-approximations of square roots.
inline mpz_class ceil_sqrt(const mpz_class& n) {
    mpz_class root, rem;
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    if (sgn(rem) != 0) root += 1;
    return root;
}

inline Rat rat_abs(const Rat& r) { return sgn(r) < 0 ? Rat(-r) : r; }

}  // namespace l0
