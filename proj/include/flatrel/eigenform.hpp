#pragma once

#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "homology.hpp"
#include "intlinalg.hpp"
#include "polygon.hpp"
#include "rel.hpp"
#include "surface.hpp"

namespace flatrel {

// ---------------------------------------------------------------------------
// Tori in one planar chart, for slit surgery

/// A torus C/(Z w1 + Z w2) triangulated inside the parallelogram spanned by
/// w1, w2 at the origin. Extra vertices are added by point insertion.
template <class S>
struct PlanarTorus {
    Vec2<S> w1, w2;
    std::vector<std::array<Vec2<S>, 3>> tris;  // counterclockwise positions
    std::vector<Vec2<S>> points;                // vertex classes: points[0] is the origin

    static PlanarTorus make(const Vec2<S>& w1, const Vec2<S>& w2) {
        if (sgn(cross(w1, w2)) <= 0) throw SurfaceError("torus basis must be positively oriented");
        PlanarTorus T{w1, w2, {}, {}};
        Vec2<S> o(S(0), S(0));
        T.tris.push_back({o, w1, w1 + w2});
        T.tris.push_back({o, w1 + w2, w2});
        T.points.push_back(o);
        return T;
    }

    // triangle strictly containing p, or -1
    int locate(const Vec2<S>& p) const {
        for (size_t t = 0; t < tris.size(); ++t) {
            const auto& q = tris[t];
            if (sgn(cross(q[1] - q[0], p - q[0])) > 0 && sgn(cross(q[2] - q[1], p - q[1])) > 0 &&
                sgn(cross(q[0] - q[2], p - q[2])) > 0)
                return static_cast<int>(t);
        }
        return -1;
    }

    // inserts p, splitting one triangle (interior point) or the two
    // triangles along an edge (edge point)
    bool insert(const Vec2<S>& p) {
        int t = locate(p);
        if (t < 0) return insert_on_edge(p);
        auto q = tris[t];
        tris[t] = {p, q[0], q[1]};
        tris.push_back({p, q[1], q[2]});
        tris.push_back({p, q[2], q[0]});
        points.push_back(p);
        return true;
    }

    bool insert_on_edge(const Vec2<S>& p) {
        auto on_open = [](const Vec2<S>& u, const Vec2<S>& v, const Vec2<S>& x) {
            if (!is_zero(cross(v - u, x - u))) return false;
            S d = dot(x - u, v - u);
            return sgn(d) > 0 && sgn(norm2(v - u) - d) > 0;
        };
        const Vec2<S> zero(S(0), S(0));
        const Vec2<S> shifts[9] = {zero, w1, -w1, w2, -w2, w1 + w2, -w1 - w2, w1 - w2, w2 - w1};
        for (size_t t = 0; t < tris.size(); ++t)
            for (int k = 0; k < 3; ++k) {
                auto q = tris[t];
                Vec2<S> u = q[k], v = q[(k + 1) % 3], w = q[(k + 2) % 3];
                if (!on_open(u, v, p)) continue;
                for (size_t t2 = 0; t2 < tris.size(); ++t2) {
                    if (t2 == t) continue;
                    for (int k2 = 0; k2 < 3; ++k2) {
                        auto r = tris[t2];
                        Vec2<S> u2 = r[k2], v2 = r[(k2 + 1) % 3], w2x = r[(k2 + 2) % 3];
                        for (auto& sh : shifts) {
                            if (!vec_equal(u2, v + sh) || !vec_equal(v2, u + sh)) continue;
                            Vec2<S> p2 = p + sh;
                            tris[t] = {u, p, w};
                            tris.push_back({p, v, w});
                            tris[t2] = {u2, p2, w2x};
                            tris.push_back({p2, v2, w2x});
                            points.push_back(p);
                            return true;
                        }
                    }
                }
            }
        return false;
    }

    // copies of a torus point at the parallelogram corners or itself
    std::vector<Vec2<S>> copies(const Vec2<S>& p) const {
        if (is_zero(p.x) && is_zero(p.y)) return {p, w1, w2, w1 + w2};
        return {p};
    }

    /// Raw slots: slot 3t+k from tris[t][k] to tris[t][k+1]. Twins matched
    /// by position up to the lattice translations.
    void raw(std::vector<int>& twin, std::vector<Vec2<S>>& hol, int offset) const {
        int n = static_cast<int>(tris.size()) * 3;
        std::vector<int> tw(n, -1);
        auto start = [&](int h) { return tris[h / 3][h % 3]; };
        auto end = [&](int h) { return tris[h / 3][(h % 3 + 1) % 3]; };
        const Vec2<S> zero(S(0), S(0));
        const Vec2<S> shifts[5] = {zero, w1, -w1, w2, -w2};
        for (int h = 0; h < n; ++h) {
            if (tw[h] >= 0) continue;
            for (int g = h + 1; g < n && tw[h] < 0; ++g) {
                if (tw[g] >= 0) continue;
                for (auto& k : shifts)
                    if (vec_equal(start(h), end(g) + k) && vec_equal(end(h), start(g) + k)) {
                        tw[h] = g;
                        tw[g] = h;
                        break;
                    }
            }
            if (tw[h] < 0) throw SurfaceError("planar torus edge without partner");
        }
        for (int h = 0; h < n; ++h) {
            twin.push_back(tw[h] + offset);
            hol.push_back(end(h) - start(h));
        }
    }

    // slot (relative) running from a copy of point p to p + (len, 0)
    int slit_slot(const Vec2<S>& p, const S& len) const {
        int n = static_cast<int>(tris.size()) * 3;
        for (auto& c : copies(p)) {
            Vec2<S> x = c + Vec2<S>(len, S(0));
            for (int h = 0; h < n; ++h)
                if (vec_equal(tris[h / 3][h % 3], c) && vec_equal(tris[h / 3][(h % 3 + 1) % 3], x)) return h;
        }
        return -1;
    }
};

namespace detail {

// Inserts the right endpoint of a horizontal slit of length `len` from a
// copy of p; returns false if no copy sees the slit inside one triangle.
template <class S>
bool insert_slit(PlanarTorus<S>& T, const Vec2<S>& p, const S& len) {
    for (auto& c : T.copies(p)) {
        Vec2<S> x = c + Vec2<S>(len, S(0));
        for (auto& q : T.tris) {
            bool has = false;
            for (auto& v : q) has = has || vec_equal(v, c);
            if (!has) continue;
            bool inside = sgn(cross(q[1] - q[0], x - q[0])) >= 0 && sgn(cross(q[2] - q[1], x - q[1])) >= 0 &&
                          sgn(cross(q[0] - q[2], x - q[2])) >= 0;
            bool vertex = vec_equal(x, q[0]) || vec_equal(x, q[1]) || vec_equal(x, q[2]);
            if (inside && !vertex) return T.insert(x);
        }
    }
    return false;
}

template <class S>
std::vector<std::array<int, 4>> unimodular_small(int r) {
    std::vector<std::array<int, 4>> out;
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b)
            for (int c = -r; c <= r; ++c)
                for (int d = -r; d <= r; ++d)
                    if (a * d - b * c == 1) out.push_back({a, b, c, d});
    std::stable_sort(out.begin(), out.end(), [](auto& x, auto& y) {
        auto w = [](auto& m) { return std::abs(m[0]) + std::abs(m[1]) + std::abs(m[2]) + std::abs(m[3]); };
        return w(x) < w(y);
    });
    return out;
}

template <class S>
bool horizontal(const Vec2<S>& v) { return is_zero(v.y); }

}  // namespace detail

/// Smallest positive horizontal lattice vector length, if any.
template <class S>
std::optional<S> horizontal_period(const Vec2<S>& w1, const Vec2<S>& w2) {
    if (detail::horizontal(w1)) return abs_val(w1.x);
    if (detail::horizontal(w2)) return abs_val(w2.x);
    S r = w2.y / w1.y;  // a w1.y + b w2.y = 0  <=>  a = -b r
    if constexpr (is_exact_v<S>) {
        if (!r.is_rational()) return std::nullopt;
        Rational q = r.rational_value();
        Integer p = q.get_num(), d = q.get_den();
        S x = S(Rational(-p)) * w1.x + S(Rational(d)) * w2.x;
        return abs_val(x);
    } else {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Prototypes and tori

struct Prototype {
    long e = 0, l = 1, m = 1;
    long D() const { return e * e + 4 * l * l * m; }
    /// Positive root of x^2 = e x + l^2 m.
    QuadNum lambda() const {
        long d = D();
        return QuadNum(Rational(e, 2), Rational(1, 2), d);
    }
    void check() const {
        if (l <= 0 || m <= 0) throw std::invalid_argument("prototype needs l, m > 0");
        if (std::gcd(l, m) != 1) throw std::invalid_argument("prototype needs gcd(l, m) = 1");
    }
};

/// Prototypes of discriminant D, |e| <= sqrt(D) in increasing |e| then e.
inline std::vector<Prototype> prototypes_for(long D) {
    std::vector<Prototype> out;
    long r = static_cast<long>(std::sqrt(static_cast<double>(D))) + 1;
    std::vector<long> es;
    for (long e = -r; e <= r; ++e)
        if (e * e <= D) es.push_back(e);
    std::stable_sort(es.begin(), es.end(), [](long a, long b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });
    for (long e : es) {
        long rest = D - e * e;
        if (rest <= 0 || rest % 4 != 0) continue;
        rest /= 4;
        for (long l = 1; l * l <= rest; ++l) {
            if (rest % (l * l) != 0) continue;
            long m = rest / (l * l);
            if (std::gcd(l, m) == 1) out.push_back({e, l, m});
        }
    }
    return out;
}

template <class S>
struct Lattice {
    Vec2<S> w1, w2;
    S covolume() const { return cross(w1, w2); }
    Lattice apply(const Mat2<S>& g) const { return {g * w1, g * w2}; }
};

template <class S>
TriSurface<S> torus_surface(const Lattice<S>& L, long disc, const std::string& name = "xi1") {
    auto T = PlanarTorus<S>::make(L.w1, L.w2);
    std::vector<int> tw;
    std::vector<Vec2<S>> hol;
    T.raw(tw, hol, 0);
    return TriSurface<S>::build(tw, hol, {{0, Singularity{name, 0}}}, disc);
}

template <class S>
struct TorusPair {
    Lattice<S> L1, L2;
    long isogeny_degree = 1;
    long disc = 0;
    TriSurface<S> E1() const { return torus_surface(L1, disc); }
    TriSurface<S> E2() const { return torus_surface(L2, disc); }
    TorusPair apply(const Mat2<S>& g) const { return {L1.apply(g), L2.apply(g), isogeny_degree, disc}; }
};

/// Lambda Z^2 and (l m) Z + (l) i Z.
inline TorusPair<QuadNum> prototype_pair(const Prototype& P) {
    P.check();
    long D = P.D();
    QuadNum lam = P.lambda();
    QuadNum z = QuadNum(0).with_disc(D);
    TorusPair<QuadNum> tp;
    tp.disc = D;
    tp.L1 = {{lam, z}, {z, lam}};
    tp.L2 = {{QuadNum(P.l * P.m).with_disc(D), z}, {z, QuadNum(P.l).with_disc(D)}};
    tp.isogeny_degree = P.l * P.l * P.m;
    return tp;
}

/// Index of the sublattice lambda L2 in L1 (the degree of z -> lambda z
/// from C/L2 onto C/L1), or nullopt if lambda L2 is not contained in L1.
inline std::optional<Integer> isogeny_index(const TorusPair<QuadNum>& tp, const QuadNum& lam) {
    // coordinates of lambda * L2 vectors in the L1 basis must be integers
    auto coords = [&](const Vec2<QuadNum>& v) {
        QuadNum det = cross(tp.L1.w1, tp.L1.w2);
        return std::pair<QuadNum, QuadNum>(cross(v, tp.L1.w2) / det, cross(tp.L1.w1, v) / det);
    };
    Integer M[2][2];
    int i = 0;
    for (auto& w : {tp.L2.w1, tp.L2.w2}) {
        auto [a, b] = coords(lam * w);
        if (!a.is_rational() || !b.is_rational()) return std::nullopt;
        Rational qa = a.rational_value(), qb = b.rational_value();
        if (qa.get_den() != 1 || qb.get_den() != 1) return std::nullopt;
        M[i][0] = qa.get_num();
        M[i][1] = qb.get_num();
        ++i;
    }
    Integer d = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    return abs(d);
}

namespace detail {

template <class S>
std::optional<Lattice<S>> basis_seeing(const Lattice<S>& L, const std::vector<Vec2<S>>& pts) {
    for (auto& u : unimodular_small<S>(3)) {
        Vec2<S> a = S(u[0]) * L.w1 + S(u[1]) * L.w2, b = S(u[2]) * L.w1 + S(u[3]) * L.w2;
        if (horizontal(a) || horizontal(b) || horizontal(a + b)) continue;
        auto T = PlanarTorus<S>::make(a, b);
        bool ok = true;
        for (auto& p : pts) {
            // reduce p into the parallelogram
            S det = cross(a, b);
            S al = cross(p, b) / det, be = cross(a, p) / det;
            if constexpr (is_exact_v<S>) {
                (void)al;
                (void)be;
            }
            if (T.locate(p) < 0) { ok = false; break; }
        }
        if (ok) return Lattice<S>{a, b};
    }
    return std::nullopt;
}

template <class S>
void require_slit_fits(const Lattice<S>& L, const S& len) {
    if (auto h = horizontal_period(L.w1, L.w2))
        if (sgn(*h - len) <= 0) throw RelDomainError("slit of this length does not embed: horizontal period " +
                                                      std::to_string(to_double(*h)));
}

// Grows the slit saddles from length s0 to len by Rel; xi1 is the left end.
template <class S>
TriSurface<S> grow_slits(const TriSurface<S>& M, const S& s0, const S& len, bool positive) {
    S rest = len - s0;
    if (is_zero(rest)) return M;
    // left end -> right end gains the Rel parameter when left = xi1
    return rel_apply(M, RelVector<S>::scalar(positive ? rest : -rest));
}

template <class S>
S initial_slit(const S& len) {
    S s0 = len;
    if (s0 > S(Rational(1, 8))) s0 = S(Rational(1, 8));
    return s0;
}

}  // namespace detail

/// Connected sum of two tori along horizontal slits of length |T| from the
/// marked points; xi1 on the left of the slit for T > 0, on the right for
/// T < 0.
template <class S>
TriSurface<S> connect_sum_tori(const TorusPair<S>& pair, const S& T) {
    if (is_zero(T)) throw std::invalid_argument("T must be nonzero");
    S len = abs_val(T);
    detail::require_slit_fits(pair.L1, len);
    detail::require_slit_fits(pair.L2, len);
    S s0 = detail::initial_slit(len);
    for (int attempt = 0; attempt < 40; ++attempt, s0 = s0 / S(2)) {
        std::vector<int> tw;
        std::vector<Vec2<S>> hol;
        int slits[2] = {-1, -1}, off = 0;
        bool ok = true;
        for (int i = 0; i < 2 && ok; ++i) {
            const auto& L = i == 0 ? pair.L1 : pair.L2;
            auto B = detail::basis_seeing(L, {});
            if (!B) { ok = false; break; }
            auto P = PlanarTorus<S>::make(B->w1, B->w2);
            Vec2<S> o(S(0), S(0));
            if (!detail::insert_slit(P, o, s0)) { ok = false; break; }
            slits[i] = P.slit_slot(o, s0) + off;
            P.raw(tw, hol, off);
            off += static_cast<int>(P.tris.size()) * 3;
        }
        if (!ok) continue;
        // cross-glue the two sides of the slits
        int a1 = slits[0], b1 = tw[a1], a2 = slits[1], b2 = tw[a2];
        tw[a1] = b2; tw[b2] = a1;
        tw[a2] = b1; tw[b1] = a2;
        bool pos = sgn(T) > 0;
        std::map<int, Singularity> lab;
        lab[a1] = Singularity{pos ? "xi1" : "xi2", 1};
        lab[b1] = Singularity{pos ? "xi2" : "xi1", 1};
        auto M = TriSurface<S>::build(tw, hol, lab, pair.disc);
        return detail::grow_slits(M, s0, len, pos);
    }
    throw SurfaceError("could not place the slits");
}

/// A torus with two marked points p = 0 and q differing by d-torsion.
template <class S>
struct TorsionTorus {
    Lattice<S> L;
    Vec2<S> q;
    int d = 1;
    long disc = 0;
};

/// Exact torsion order of q in C/L (0 if not torsion up to `limit`).
inline int torsion_order(const Lattice<QuadNum>& L, const Vec2<QuadNum>& q, int limit = 1000) {
    QuadNum det = cross(L.w1, L.w2);
    QuadNum a = cross(q, L.w2) / det, b = cross(L.w1, q) / det;
    if (!a.is_rational() || !b.is_rational()) return 0;
    Rational qa = a.rational_value(), qb = b.rational_value();
    Integer l;
    mpz_lcm(l.get_mpz_t(), qa.get_den_mpz_t(), qb.get_den_mpz_t());
    if (l > limit) return 0;
    return static_cast<int>(l.get_si());
}

/// Cuts two horizontal slits of length |T| with left endpoints p and q and
/// glues the boundary components crosswise.
template <class S>
TriSurface<S> self_connect_sum(const TorsionTorus<S>& E, const S& T) {
    if (is_zero(T)) throw std::invalid_argument("T must be nonzero");
    if (is_zero(E.q.x) && is_zero(E.q.y)) throw std::invalid_argument("p and q coincide");
    S len = abs_val(T);
    detail::require_slit_fits(E.L, len);
    S s0 = detail::initial_slit(len);
    for (int attempt = 0; attempt < 40; ++attempt, s0 = s0 / S(2)) {
        auto B = detail::basis_seeing(E.L, {});
        if (!B) break;
        // try bases until q lands strictly inside a triangle with both slits placed
        for (auto& u : detail::unimodular_small<S>(3)) {
            Vec2<S> a = S(u[0]) * E.L.w1 + S(u[1]) * E.L.w2, b = S(u[2]) * E.L.w1 + S(u[3]) * E.L.w2;
            if (detail::horizontal(a) || detail::horizontal(b) || detail::horizontal(a + b)) continue;
            auto P = PlanarTorus<S>::make(a, b);
            // q reduced into the parallelogram
            S det = cross(a, b);
            S al = cross(E.q, b) / det, be = cross(a, E.q) / det;
            auto frac = [](const S& x) {
                if constexpr (is_exact_v<S>) {
                    double f = std::floor(x.to_double());
                    S r = x - S(static_cast<long>(f));
                    while (sgn(r) < 0) r += S(1);
                    while (sgn(r - S(1)) >= 0) r -= S(1);
                    return r;
                } else {
                    return x - std::floor(x);
                }
            };
            Vec2<S> q = frac(al) * a + frac(be) * b;
            if (!P.insert(q)) continue;
            Vec2<S> o(S(0), S(0));
            if (!detail::insert_slit(P, o, s0) || !detail::insert_slit(P, q, s0)) continue;
            int sp = P.slit_slot(o, s0), sq = P.slit_slot(q, s0);
            if (sp < 0 || sq < 0) continue;
            std::vector<int> tw;
            std::vector<Vec2<S>> hol;
            P.raw(tw, hol, 0);
            int bp = tw[sp], bq = tw[sq];
            tw[sp] = bq; tw[bq] = sp;
            tw[sq] = bp; tw[bp] = sq;
            bool pos = sgn(T) > 0;
            std::map<int, Singularity> lab;
            lab[sp] = Singularity{pos ? "xi1" : "xi2", 1};
            lab[bp] = Singularity{pos ? "xi2" : "xi1", 1};
            auto M = TriSurface<S>::build(tw, hol, lab, E.disc);
            return detail::grow_slits(M, s0, len, pos);
        }
    }
    throw SurfaceError("could not place the slits");
}

// ---------------------------------------------------------------------------
// Fixtures

/// Square-tiled surface: square i has right neighbour h[i], top neighbour v[i].
inline ExactSurface square_tiled(const std::vector<int>& h, const std::vector<int>& v) {
    int n = static_cast<int>(h.size());
    if (n == 0 || static_cast<int>(v.size()) != n) throw std::invalid_argument("permutations of equal positive size needed");
    for (auto* p : {&h, &v}) {
        std::vector<int> seen(n, 0);
        for (int x : *p) {
            if (x < 0 || x >= n || seen[x]++) throw std::invalid_argument("not a permutation");
        }
    }
    // connectivity
    std::vector<int> comp(n, -1);
    std::vector<int> st{0};
    comp[0] = 0;
    while (!st.empty()) {
        int i = st.back();
        st.pop_back();
        for (int j : {h[i], v[i]})
            if (comp[j] < 0) { comp[j] = 0; st.push_back(j); }
    }
    for (int c : comp)
        if (c < 0) throw std::invalid_argument("disconnected origami");
    PolygonGluing<QuadNum> P;
    using V = Vec2<QuadNum>;
    for (int i = 0; i < n; ++i) P.polygons.push_back({V(0, 0), V(1, 0), V(1, 1), V(0, 1)});
    for (int i = 0; i < n; ++i) {
        P.glue.push_back({{i, 1}, {h[i], 3}});
        P.glue.push_back({{i, 2}, {v[i], 0}});
    }
    return build_from_polygons(P);
}

inline QuadNum golden() { return QuadNum(Rational(1, 2), Rational(1, 2), 5); }

/// Decagon with opposite sides glued, affinely normalized so coordinates lie
/// in Q(sqrt 5); two sides are horizontal of length 1.
inline ExactSurface decagon() {
    using Q = QuadNum;
    using V = Vec2<Q>;
    Q phi = golden(), one = Q(1).with_disc(5), zero = Q(0).with_disc(5);
    std::vector<V> e = {V(one, zero), V(phi / Q(2), one), V((phi - one) / Q(2), phi), V((one - phi) / Q(2), phi),
                        V(-phi / Q(2), one)};
    for (int k = 0; k < 5; ++k) e.push_back(-e[k]);
    std::vector<V> pts{V(zero, zero)};
    for (int k = 0; k < 9; ++k) pts.push_back(pts.back() + e[k]);
    PolygonGluing<Q> P;
    P.disc = 5;
    P.polygons.push_back(pts);
    for (int k = 0; k < 5; ++k) P.glue.push_back({{0, k}, {0, k + 5}});
    for (int k = 0; k < 10; ++k) P.labels[{0, k}] = Singularity{k % 2 == 0 ? "xi1" : "xi2", 1};
    return build_from_polygons(P);
}

/// The decagon sheared so that no horizontal saddle joins the two zeros.
inline ExactSurface tipped_decagon() {
    using Q = QuadNum;
    Q phi = golden();
    Q c = -(Q(1) / (Q(1).with_disc(5) + phi / Q(2)));
    return decagon().apply(Mat2<Q>(Q(1).with_disc(5), Q(0).with_disc(5), c, Q(1).with_disc(5)));
}

/// Regular decagon of circumradius 1 in float mode.
inline FloatSurface regular_decagon_float() {
    using V = Vec2<double>;
    PolygonGluing<double> P;
    std::vector<V> pts;
    for (int k = 0; k < 10; ++k) {
        double a = -M_PI / 2 + M_PI / 10 + 2 * M_PI * k / 10;
        pts.push_back(V(std::cos(a), std::sin(a)));
    }
    P.polygons.push_back(pts);
    for (int k = 0; k < 5; ++k) P.glue.push_back({{0, k}, {0, k + 5}});
    for (int k = 0; k < 10; ++k) P.labels[{0, k}] = Singularity{k % 2 == 0 ? "xi1" : "xi2", 1};
    return build_from_polygons(P);
}

/// Three-cylinder surface in the D = 8 eigenform locus: a non-convex
/// 10-gon with horizontal cylinders of heights h, 1-h and 1+sqrt2-h.
inline ExactSurface three_cylinder(const Rational& h = Rational(1, 2), const Rational& s = Rational(3, 10)) {
    using Q = QuadNum;
    using V = Vec2<Q>;
    const long D = 8;
    Q r2(0, Rational(1, 2), D);  // sqrt 2
    Q a = Q(1).with_disc(D) + r2, b = Q(1).with_disc(D), c = Q(1 - h).with_disc(D), d = Q(h).with_disc(D),
      e = a - Q(h), sh = Q(s).with_disc(D), z = Q(0).with_disc(D);
    V A(a + sh, z), B(a + b + sh, z), E(a + b, c), H(a + b + sh, c + d), G(a + sh, c + d), J(a, c + d + e),
        I(z, c + d + e), F(sh, c + d), C(z, c), Dv(a, c);
    PolygonGluing<Q> P;
    P.disc = D;
    P.polygons.push_back({A, B, E, H, G, J, I, F, C, Dv});
    // edges: 0 AB, 1 BE, 2 EH, 3 HG, 4 GJ, 5 JI, 6 IF, 7 FC, 8 CD, 9 DA
    P.glue = {{{0, 0}, {0, 3}}, {{0, 8}, {0, 5}}, {{0, 1}, {0, 9}}, {{0, 2}, {0, 7}}, {{0, 4}, {0, 6}}};
    for (int k : {0, 1, 3, 4, 7}) P.labels[{0, k}] = Singularity{"xi1", 1};
    for (int k : {2, 5, 6, 8, 9}) P.labels[{0, k}] = Singularity{"xi2", 1};
    return build_from_polygons(P);
}

/// Unit-square torus.
inline ExactSurface square_torus() { return square_tiled({0}, {0}); }

/// Torus whose y-periods 1 and sqrt 2 are rationally independent, so its
/// horizontal flow has no closed leaf.
inline ExactSurface irrational_torus() {
    using Q = QuadNum;
    Q r2(0, Rational(1, 2), 8);
    return torus_surface(Lattice<Q>{{Q(1).with_disc(8), Q(1).with_disc(8)}, {Q(0).with_disc(8), r2}}, 8);
}

// ---------------------------------------------------------------------------
// Real multiplication

struct RMResult {
    bool eigenform = false;
    long D = 0;
    int b = 0;
    Integer c;
    ZMatrix generator;  // rho0 of the order generator, acting on basis coordinates
    QuadNum eigenvalue;
    int lattice_rank = 0;
    std::string reason;
};

namespace detail {

inline ZMatrix zmul(const ZMatrix& A, const ZMatrix& B) {
    size_t n = A.size();
    ZMatrix C(n, std::vector<Integer>(n, Integer(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k)
            for (size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    return C;
}

}  // namespace detail

/// Checks hol(X gamma) = mu hol(gamma) on the homology basis.
inline bool satisfies_eigen_equation(const ExactSurface& M, const Homology<QuadNum>& H, const ZMatrix& X,
                                     const QuadNum& mu) {
    auto per = H.periods(M);
    int n = static_cast<int>(per.size());
    for (int j = 0; j < n; ++j) {
        Vec2<QuadNum> lhs(QuadNum(0), QuadNum(0));
        for (int i = 0; i < n; ++i) lhs += QuadNum(Rational(X[i][j])) * per[i];
        Vec2<QuadNum> rhs = mu * per[j];
        if (!(lhs.x == rhs.x && lhs.y == rhs.y)) return false;
    }
    return true;
}

/// Searches for real multiplication with the one-form as eigenvector.
inline RMResult detect_rm(const ExactSurface& M) {
    if (M.genus() != 2) throw std::invalid_argument("detect_rm needs genus 2, got genus " + std::to_string(M.genus()));
    auto H = Homology<QuadNum>::compute(M);
    auto per = H.periods(M);
    const int n = 4;
    bool rational_field = true;
    for (auto& p : per)
        for (auto* c : {&p.x, &p.y})
            if (!c->is_rational()) rational_field = false;
    // unknowns: X_ij (16) then mu components (1 or 2)
    int nmu = rational_field ? 1 : 2;
    int nv = 16 + nmu;
    long disc = M.disc();
    QMatrix A;
    auto comps = [&](const QuadNum& q) -> std::pair<Rational, Rational> {
        if (rational_field) return {q.rational_value(), Rational(0)};
        if (q.disc() != 0 && q.disc() != disc) throw std::invalid_argument("mixed fields in periods");
        return {q.a(), q.b()};
    };
    for (int j = 0; j < n; ++j)
        for (int coord = 0; coord < 2; ++coord) {
            // sum_i X_ij v_i - mu v_j = 0, split into rational and sqrt parts
            for (int part = 0; part < (rational_field ? 1 : 2); ++part) {
                std::vector<Rational> row(nv, Rational(0));
                for (int i = 0; i < n; ++i) {
                    auto [a, b] = comps(coord == 0 ? per[i].x : per[i].y);
                    row[4 * i + j] = part == 0 ? a : b;
                }
                auto [a, b] = comps(coord == 0 ? per[j].x : per[j].y);
                if (rational_field) {
                    row[16] = -a;
                } else {
                    // (p + q r)(a + b r) = (pa + qbD) + (pb + qa) r
                    if (part == 0) { row[16] = -a; row[17] = -b * Rational(disc); }
                    else { row[16] = -b; row[17] = -a; }
                }
                A.push_back(row);
            }
        }
    // self-adjointness J X = X^T J
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            std::vector<Rational> row(nv, Rational(0));
            for (int k = 0; k < n; ++k) {
                row[4 * k + c] += H.J[r][k];
                row[4 * k + r] -= H.J[k][c];
            }
            A.push_back(row);
        }
    auto V = nullspace_q(A, nv);
    QMatrix VX;
    for (auto& v : V) VX.push_back(std::vector<Rational>(v.begin(), v.begin() + 16));
    RMResult R;
    R.lattice_rank = rank_q(VX);
    if (R.lattice_rank <= 1) {
        R.reason = "only scalar endomorphisms satisfy the eigenform equations";
        return R;
    }
    if (R.lattice_rank > 2) {
        R.reason = "solution space of rank " + std::to_string(R.lattice_rank) + ", ambiguous";
        return R;
    }
    // integer points of span(VX): kernel of the complement equations
    auto comp = nullspace_q(VX, 16);
    ZMatrix C = to_integer_rows(comp);
    auto Lz = kernel_z(C, 16);
    if (Lz.size() != 2) throw std::logic_error("saturated lattice has wrong rank");
    // coordinates of I in the lattice basis
    std::vector<Integer> Iv(16, Integer(0));
    for (int i = 0; i < n; ++i) Iv[4 * i + i] = 1;
    ZMatrix Bm(16, std::vector<Integer>(2));
    for (int k = 0; k < 16; ++k) { Bm[k][0] = Lz[0][k]; Bm[k][1] = Lz[1][k]; }
    auto ab = solve_z(Bm, Iv, 2);
    if (!ab) throw std::logic_error("identity outside the endomorphism lattice");
    Integer a = (*ab)[0], b = (*ab)[1], g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    // a t' - b s' = 1 with (s', t') = (-t, s)
    Integer cc = -t, dd = s;
    if (g != 1) throw std::logic_error("identity is not primitive in the lattice");
    ZMatrix X(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) X[i][j] = cc * Lz[0][4 * i + j] + dd * Lz[1][4 * i + j];
    // X^2 = alpha I + beta X
    auto X2 = detail::zmul(X, X);
    // solve using two entries: pick (i,j) with X off-diagonal nonzero or diagonal difference
    Integer alpha, beta;
    {
        QMatrix S2;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                S2.push_back({Rational(i == j ? 1 : 0), Rational(X[i][j]), Rational(X2[i][j])});
        auto piv = rref(S2);
        if (piv.size() != 2 || piv[0] != 0 || piv[1] != 1) throw std::logic_error("generator does not satisfy a quadratic");
        Rational al = S2[0][2], be = S2[1][2];
        if (al.get_den() != 1 || be.get_den() != 1) throw std::logic_error("non-integral quadratic relation");
        alpha = al.get_num();
        beta = be.get_num();
    }
    // X^2 + bX + c = 0 with b = -beta, c = -alpha; shift to b in {0,1}
    Integer bq = -beta, cq = -alpha;
    Integer k;
    mpz_fdiv_q_2exp(k.get_mpz_t(), bq.get_mpz_t(), 1);
    // X' = X + k: b' = b - 2k, c' = c - k b + k^2
    Integer b2 = bq - 2 * k, c2 = cq - k * bq + k * k;
    for (int i = 0; i < n; ++i) X[i][i] += k;
    Integer Dz = b2 * b2 - 4 * c2;
    if (!Dz.fits_slong_p()) throw std::overflow_error("discriminant too large");
    long Dd = Dz.get_si();
    R.D = Dd;
    R.b = static_cast<int>(b2.get_si());
    R.c = c2;
    // eigenvalue of X on the form
    int jn = -1;
    for (int j = 0; j < n; ++j)
        if (!(is_zero(per[j].x) && is_zero(per[j].y))) { jn = j; break; }
    auto eig = [&](const ZMatrix& Y) {
        Vec2<QuadNum> lhs(QuadNum(0), QuadNum(0));
        for (int i = 0; i < n; ++i) lhs += QuadNum(Rational(Y[i][jn])) * per[i];
        return is_zero(per[jn].x) ? lhs.y / per[jn].y : lhs.x / per[jn].x;
    };
    QuadNum mu = eig(X);
    long root = exact_isqrt(Dd);
    QuadNum target = root >= 0 ? QuadNum(Rational(-R.b + root, 2)) : QuadNum(Rational(-R.b, 2), Rational(1, 2), Dd);
    if (mu != target) {
        // the other root: -X - b
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) X[i][j] = -X[i][j] - (i == j ? Integer(R.b) : Integer(0));
        mu = eig(X);
    }
    if (mu != target) throw std::logic_error("eigenvalue does not match the normalized root: " + mu.str() + " vs " + target.str() + " D=" + std::to_string(Dd));
    if (!satisfies_eigen_equation(M, H, X, mu)) throw std::logic_error("eigen equation fails for generator");
    R.eigenform = true;
    R.generator = X;
    R.eigenvalue = mu;
    return R;
}

}  // namespace flatrel
