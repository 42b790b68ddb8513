#pragma once

#include <cmath>
#include <type_traits>

#include "exactnum.hpp"

namespace flatrel {

/// Float-mode tolerances. `abs` applies to coordinates of area-one
/// surfaces, `rel` to collinearity tests scaled by vector lengths.
struct Tolerance {
    double abs = 1e-9;
    double rel = 1e-10;
};

inline Tolerance& float_tol() {
    static Tolerance t;
    return t;
}

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, QuadNum>;

inline int sgn(const QuadNum& x) { return x.sign(); }
inline int sgn(double x) {
    double t = float_tol().abs;
    return (x > t) - (x < -t);
}

inline double to_double(const QuadNum& x) { return x.to_double(); }
inline double to_double(double x) { return x; }

template <class S>
S from_rational(const Rational& q, long disc);
template <>
inline QuadNum from_rational<QuadNum>(const Rational& q, long disc) { return QuadNum(q, 0, disc); }
template <>
inline double from_rational<double>(const Rational& q, long) { return q.get_d(); }

inline QuadNum abs_val(const QuadNum& x) { return x.sign() < 0 ? -x : x; }
inline double abs_val(double x) { return std::fabs(x); }

inline bool is_zero(const QuadNum& x) { return x.sign() == 0; }
inline bool is_zero(double x) { return sgn(x) == 0; }

}  // namespace flatrel
