#pragma once

#include <cmath>
#include <stdexcept>

#include "numeric.hpp"

namespace flatrel {

template <class S>
struct Vec2 {
    S x{}, y{};

    Vec2() = default;
    Vec2(S x_, S y_) : x(std::move(x_)), y(std::move(y_)) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator-(const Vec2& a) { return Vec2(-a.x, -a.y); }
    friend Vec2 operator*(const S& s, const Vec2& a) { return Vec2(s * a.x, s * a.y); }
    friend bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }
};

template <class S>
S cross(const Vec2<S>& a, const Vec2<S>& b) { return a.x * b.y - a.y * b.x; }
template <class S>
S dot(const Vec2<S>& a, const Vec2<S>& b) { return a.x * b.x + a.y * b.y; }
template <class S>
S norm2(const Vec2<S>& a) { return dot(a, a); }

inline double length(const Vec2<double>& v) { return std::hypot(v.x, v.y); }
inline double length(const Vec2<QuadNum>& v) { return std::sqrt(to_double(norm2(v))); }

inline Vec2<double> to_double(const Vec2<QuadNum>& v) { return {v.x.to_double(), v.y.to_double()}; }
inline Vec2<double> to_double(const Vec2<double>& v) { return v; }

// Orientation of (a, b): +1 if b is counterclockwise of a.
inline int orient(const Vec2<QuadNum>& a, const Vec2<QuadNum>& b) { return cross(a, b).sign(); }
inline int orient(const Vec2<double>& a, const Vec2<double>& b) {
    double c = cross(a, b);
    double s = float_tol().rel * length(a) * length(b);
    return (c > s) - (c < -s);
}

template <class S>
bool vec_equal(const Vec2<S>& a, const Vec2<S>& b) {
    if constexpr (is_exact_v<S>) {
        return a.x == b.x && a.y == b.y;
    } else {
        double t = float_tol().abs;
        return std::fabs(a.x - b.x) <= t && std::fabs(a.y - b.y) <= t;
    }
}

// True when d lies in the half-open angular sector [u, w) of a corner
// whose opening angle is strictly less than pi.
template <class S>
bool in_corner(const Vec2<S>& u, const Vec2<S>& w, const Vec2<S>& d) {
    int su = orient(u, d);
    if (su == 0) return sgn(dot(u, d)) > 0;
    return su > 0 && orient(d, w) > 0;
}

// Same test with the sector closed at w instead of u: (u, w].
template <class S>
bool in_corner_upper(const Vec2<S>& u, const Vec2<S>& w, const Vec2<S>& d) {
    int sw = orient(d, w);
    if (sw == 0) return sgn(dot(w, d)) > 0;
    return sw > 0 && orient(u, d) > 0;
}

/// 2x2 matrix (a b; c d) acting on column vectors.
template <class S>
struct Mat2 {
    S a{1}, b{0}, c{0}, d{1};

    Mat2() = default;
    Mat2(S a_, S b_, S c_, S d_) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

    S det() const { return a * d - b * c; }
    Vec2<S> operator*(const Vec2<S>& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const {
        S dt = det();
        if (is_zero(dt)) throw std::domain_error("singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    static Mat2 horocycle(const S& s) { return {S(1), s, S(0), S(1)}; }
};

inline Mat2<double> geodesic(double t) { return {std::exp(t / 2), 0.0, 0.0, std::exp(-t / 2)}; }
inline Mat2<double> rotation(double th) { return {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)}; }

inline Mat2<double> to_double(const Mat2<QuadNum>& m) {
    return {m.a.to_double(), m.b.to_double(), m.c.to_double(), m.d.to_double()};
}

}  // namespace flatrel
