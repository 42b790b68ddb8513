#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iso.hpp"
#include "scan.hpp"
#include "surface.hpp"

namespace flatrel {

inline int compare(double a, double b) { return sgn(a - b); }

/// Parameter outside the set where the surgery is defined.
struct RelDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Horizontal displacement per singularity, indexed like M.sings(); only
/// differences matter. For two singularities the scalar t moves xi2 by t
/// relative to xi1.
template <class S>
struct RelVector {
    std::vector<S> zbar;

    static RelVector scalar(const S& t) { return RelVector{{S(0), t}}; }
    S z(int i, int j) const { return zbar[j] - zbar[i]; }
    RelVector scaled(const S& c) const {
        RelVector r(*this);
        for (auto& x : r.zbar) x = c * x;
        return r;
    }
    RelVector operator+(const RelVector& o) const {
        RelVector r(*this);
        for (size_t i = 0; i < r.zbar.size(); ++i) r.zbar[i] += o.zbar[i];
        return r;
    }
    RelVector operator-() const { return scaled(S(-1)); }
    bool is_zero_vec() const {
        for (auto& x : zbar)
            if (!is_zero(x - zbar[0])) return false;
        return true;
    }
};

/// The component of 0 of the Rel parameters, two-singularity case.
template <class S>
struct RelDomain {
    std::optional<S> lo, hi;  // nullopt: unbounded on that side (if determined)
    bool lo_determined = true, hi_determined = true;
    S budget{};

    bool contains(const S& t) const {
        if (sgn(t) < 0) {
            if (lo) return sgn(t - *lo) > 0;
            if (lo_determined || sgn(-t - budget) <= 0) return true;
        } else {
            if (hi) return sgn(*hi - t) > 0;
            if (hi_determined || sgn(t - budget) <= 0) return true;
        }
        throw RelDomainError("Rel domain undetermined beyond separatrix budget");
    }

    std::string str() const {
        std::ostringstream os;
        auto put = [&](const std::optional<S>& v, bool det, const char* inf) {
            if (v) os << *v;
            else if (det) os << inf;
            else os << "undetermined";
        };
        os << "(";
        put(lo, lo_determined, "-inf");
        os << ", ";
        put(hi, hi_determined, "inf");
        os << ")";
        return os.str();
    }
};

/// Horizontal saddles joining distinct singularities, rightward, within the
/// budget, together with the completeness flag of the scan.
template <class S>
std::pair<std::vector<SaddleConnection<S>>, bool> distinct_horizontal(const TriSurface<S>& M, const S& budget) {
    auto hs = horizontal_saddles(M, std::optional<S>(budget));
    std::vector<SaddleConnection<S>> out;
    for (auto& s : hs.saddles)
        if (s.from != s.to) out.push_back(s);
    return {out, hs.complete};
}

template <class S>
RelDomain<S> rel_domain(const TriSurface<S>& M, std::optional<S> budget = std::nullopt) {
    if (M.num_vertices() != 2) throw std::invalid_argument("rel_domain interval form needs two singularities");
    RelDomain<S> D;
    D.budget = budget ? *budget : default_budget(M);
    auto [sads, complete] = distinct_horizontal(M, D.budget);
    // signed c of each saddle written from xi2 to xi1
    for (auto& s : sads) {
        S c = s.from == 1 ? s.hol.x : -s.hol.x;
        if (sgn(c) < 0) {
            if (!D.lo || c > *D.lo) D.lo = c;
        } else {
            if (!D.hi || c < *D.hi) D.hi = c;
        }
    }
    D.lo_determined = D.lo.has_value() || complete;
    D.hi_determined = D.hi.has_value() || complete;
    return D;
}

/// A horizontal saddle blocking the straight Rel path to z, if any.
template <class S>
std::optional<SaddleConnection<S>> rel_blocker(const TriSurface<S>& M, const RelVector<S>& z) {
    S reach(0);
    int k = M.num_vertices();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            S d = abs_val(z.z(i, j));
            if (d > reach) reach = d;
        }
    if (is_zero(reach)) return std::nullopt;
    S budget = reach + longest_edge(M);
    auto [sads, complete] = distinct_horizontal(M, budget);
    std::optional<SaddleConnection<S>> best;
    S best_frac(2);
    for (auto& s : sads) {
        // c + u*z_ij = 0 for some u in (0, 1]
        S zij = z.z(s.from, s.to);
        if (is_zero(zij)) continue;
        S u = -s.hol.x / zij;
        if (sgn(u) > 0 && sgn(u - S(1)) <= 0 && u < best_frac) {
            best = s;
            best_frac = u;
        }
    }
    (void)complete;  // saddles longer than the budget cannot block
    return best;
}

namespace detail {

template <class S>
Vec2<S> rel_shift(const TriSurface<S>& M, const RelVector<S>& z, int h) {
    return Vec2<S>(z.z(M.origin(h), M.target(h)), S(0));
}

// Smallest u > 0 at which some triangle degenerates along hol + u*disp.
template <class S>
std::optional<S> first_degeneracy(const TriSurface<S>& M, const std::vector<Vec2<S>>& disp) {
    std::optional<S> best;
    for (int t = 0; t < M.num_triangles(); ++t) {
        const auto& a = M.hol(3 * t);
        const auto& b = M.hol(3 * t + 1);
        S c0 = cross(a, b);
        S slope = cross(disp[3 * t], b) + cross(a, disp[3 * t + 1]);
        if (sgn(slope) >= 0) continue;
        S u = -c0 / slope;
        if (!best || u < *best) best = u;
    }
    return best;
}

template <class S>
void shift_hols(TriSurface<S>& M, const std::vector<Vec2<S>>& disp, const S& u) {
    auto& H = M.mut_hols();
    for (size_t h = 0; h < H.size(); ++h) H[h] += u * disp[h];
}

}  // namespace detail

/// Rel_z M by straight-line motion in period coordinates, re-triangulating
/// (Delaunay) before any triangle degenerates.
template <class S>
TriSurface<S> rel_apply(const TriSurface<S>& M0, const RelVector<S>& z, int max_steps = 5000) {
    if (static_cast<int>(z.zbar.size()) != M0.num_vertices())
        throw std::invalid_argument("Rel vector has " + std::to_string(z.zbar.size()) + " entries for " +
                                    std::to_string(M0.num_vertices()) + " singularities");
    if (z.is_zero_vec()) return M0;
    if (auto b = rel_blocker(M0, z)) {
        std::ostringstream os;
        os << "outside Rel domain: horizontal saddle " << M0.sing(b->from).name << "->" << M0.sing(b->to).name
           << " of length " << b->length() << " collapses";
        if (M0.num_vertices() == 2) os << "; domain " << rel_domain(M0, std::optional<S>(longest_edge(M0) + abs_val(z.z(0, 1)))).str();
        throw RelDomainError(os.str());
    }
    TriSurface<S> M = M0;
    M.make_delaunay();
    S rem(1);
    for (int step = 0; step < max_steps; ++step) {
        std::vector<Vec2<S>> disp(M.num_slots());
        for (int h = 0; h < M.num_slots(); ++h) disp[h] = rem * detail::rel_shift(M, z, h);
        auto u = detail::first_degeneracy(M, disp);
        if (!u || sgn(*u - S(1)) > 0) {
            detail::shift_hols(M, disp, S(1));
            M.validate();
            return M;
        }
        S half = *u / S(2);
        detail::shift_hols(M, disp, half);
        rem = rem * (S(1) - half);
        M.make_delaunay();
    }
    std::ostringstream os;
    os << "Rel path stalled at parameter fraction " << to_double(S(1) - rem);
    throw RelDomainError(os.str());
}

template <class S>
TriSurface<S> rel_apply(const TriSurface<S>& M, const S& t) {
    return rel_apply(M, RelVector<S>::scalar(t));
}

/// (b, z) . M = Rel_z(b M) for upper triangular b of determinant one.
template <class S>
TriSurface<S> n_act(const Mat2<S>& b, const RelVector<S>& z, const TriSurface<S>& M) {
    if (!is_zero(b.c)) throw std::invalid_argument("n_act needs an upper triangular matrix");
    if constexpr (is_exact_v<S>) {
        if (b.det() != S(1)) throw std::invalid_argument("n_act needs determinant one");
    } else {
        if (std::fabs(b.det() - 1) > 1e-12) throw std::invalid_argument("n_act needs determinant one");
    }
    return rel_apply(M.apply(b), z);
}

// ---------------------------------------------------------------------------
// Collapse and split

template <class S>
struct FramedH2Surface {
    TriSurface<S> surface;
    int selected_prong = 0;  // index among the right prongs of prongs(v), 0..2

    int vertex() const {
        for (int v = 0; v < surface.num_vertices(); ++v)
            if (surface.sing(v).order == 2) return v;
        throw SurfaceError("framed surface has no order-2 singularity");
    }
    int selected_corner() const { return surface.prongs(vertex())[2 * selected_prong].corner; }
};

/// Same surface and same selected prong.
template <class S>
bool framed_equal(const FramedH2Surface<S>& F1, const FramedH2Surface<S>& F2) {
    TriSurface<S> A = F1.surface, B = F2.surface;
    std::vector<Prong> ta{{F1.selected_corner(), true}}, tb{{F2.selected_corner(), true}};
    A.make_delaunay(&ta);
    B.make_delaunay(&tb);
    auto [a, k] = detail::prong_anchor(A, ta[0].corner);
    auto f = delaunay_isomorphism(A, B, [&](const std::vector<int>& m) {
        return detail::prong_at(B, m[a], k) == tb[0].corner;
    });
    return f.has_value();
}

template <class S>
TriSurface<S> relabel(const TriSurface<S>& M, const std::map<std::string, std::string>& names) {
    std::map<int, Singularity> lab;
    for (int v = 0; v < M.num_vertices(); ++v) {
        Singularity s = M.sing(v);
        auto it = names.find(s.name);
        if (it != names.end()) s.name = it->second;
        for (int h = 0; h < M.num_slots(); ++h)
            if (M.origin(h) == v) { lab[h] = s; break; }
    }
    return TriSurface<S>::build(M.twins(), M.hols(), lab, M.disc());
}

/// The rightward horizontal saddle realizing delta' for collapse at T.
template <class S>
SaddleConnection<S> collapse_saddle(const TriSurface<S>& M, const S& T) {
    if (M.stratum() != "H(1,1)") throw std::invalid_argument("collapse needs a surface in H(1,1), got " + M.stratum());
    if (is_zero(T)) throw std::invalid_argument("T must be nonzero");
    S len = abs_val(T);
    auto [sads, complete] = distinct_horizontal(M, len + longest_edge(M));
    // delta' runs xi2 -> xi1 with hol (T,0); rightward it leaves `L` for `R`
    int L = sgn(T) > 0 ? 1 : 0, R = 1 - L;
    std::vector<SaddleConnection<S>> hits;
    for (auto& s : sads) {
        if (s.from != L || s.to != R) continue;
        int c = compare(s.hol.x, len);
        if (c < 0) throw RelDomainError("not in H''_T: shorter horizontal saddle blocks the collapse");
        if (c == 0) hits.push_back(s);
    }
    if (hits.size() != 1)
        throw RelDomainError("not in H''_T: " + std::to_string(hits.size()) + " saddles of holonomy (T,0) from xi2 to xi1");
    return hits[0];
}

/// Collapses the unique horizontal saddle of holonomy (T,0) from xi2 to xi1,
/// landing in H(2) with the prong at angle pi counterclockwise from the
/// saddle's terminal prong selected.
template <class S>
FramedH2Surface<S> collapse(const TriSurface<S>& M0, const S& T, int max_rounds = 200) {
    collapse_saddle(M0, T);
    S len = abs_val(T);
    int Lv = sgn(T) > 0 ? 1 : 0, Rv = 1 - Lv;
    S frac = S(1) / S(2);
    for (int round = 0; round < max_rounds; ++round, frac = frac / S(2)) {
        // Rel_s with s = T (1 - frac) leaves delta' of length |T| frac
        TriSurface<S> M = rel_apply(M0, RelVector<S>::scalar(T - frac * T));
        M.make_delaunay();
        int e = -1;
        for (int h = 0; h < M.num_slots(); ++h)
            if (M.origin(h) == Lv && M.target(h) == Rv && is_zero(M.hol(h).y) && sgn(M.hol(h).x) > 0 &&
                is_zero(M.hol(h).x - frac * len)) {
                e = h;
                break;
            }
        if (e < 0) continue;
        // the remaining motion to T
        RelVector<S> z = RelVector<S>::scalar(frac * T);
        std::vector<Vec2<S>> disp(M.num_slots());
        for (int h = 0; h < M.num_slots(); ++h) disp[h] = detail::rel_shift(M, z, h);
        int g = M.twin(e);
        int t1 = TriSurface<S>::tri(e), t2 = TriSurface<S>::tri(g);
        bool ok = t1 != t2;
        for (int t = 0; t < M.num_triangles() && ok; ++t) {
            S c = cross(M.hol(3 * t) + disp[3 * t], M.hol(3 * t + 1) + disp[3 * t + 1]);
            if (t == t1 || t == t2) ok = is_zero(c);
            else ok = sgn(c) > 0;
        }
        if (!ok) continue;
        auto inside = [&](int h) { return TriSurface<S>::tri(h) == t1 || TriSurface<S>::tri(h) == t2; };
        // selected prong: at R, the one after the terminal (left) prong of e
        int p_in = M.prong_index(Rv, g, false);
        auto ps = M.prongs(Rv);
        int sel = ps[(p_in + 1) % ps.size()].corner;
        // a corner of a flattened triangle closes up; the prong then starts the next corner
        for (int guard = 0; guard < 6 && inside(sel); ++guard) sel = M.rot(sel);
        if (inside(sel)) continue;
        // Each flattened triangle identifies its two other sides. Those sides,
        // linked through any further gluing between t1 and t2, form chains
        // with two outer ends whose neighbours get glued together.
        std::vector<int> tw = M.twins();
        std::map<int, std::vector<int>> link;
        for (int s : {e, g}) {
            int n = TriSurface<S>::next(s), p = TriSurface<S>::prev(s);
            link[n].push_back(p);
            link[p].push_back(n);
        }
        for (int s : {e, g})
            for (int x : {TriSurface<S>::next(s), TriSurface<S>::prev(s)})
                if (inside(tw[x]) && tw[x] != e && tw[x] != g) link[x].push_back(tw[x]);
        std::set<int> seen;
        for (auto& [x0, unused] : link) {
            if (seen.count(x0)) continue;
            std::vector<int> comp{x0}, outer;
            seen.insert(x0);
            for (size_t i = 0; i < comp.size(); ++i) {
                if (!inside(tw[comp[i]])) outer.push_back(comp[i]);
                for (int y : link[comp[i]])
                    if (seen.insert(y).second) comp.push_back(y);
            }
            if (outer.empty()) continue;
            if (outer.size() != 2) {
                ok = false;
                break;
            }
            int a = tw[outer[0]], b = tw[outer[1]];
            tw[a] = b;
            tw[b] = a;
        }
        if (!ok) continue;
        detail::shift_hols(M, disp, S(1));
        std::vector<int> newid(M.num_slots(), -1);
        int k = 0;
        for (int t = 0; t < M.num_triangles(); ++t) {
            if (t == t1 || t == t2) continue;
            for (int j = 0; j < 3; ++j) newid[3 * t + j] = k++;
        }
        std::vector<int> twin2(k);
        std::vector<Vec2<S>> hol2(k);
        for (int h = 0; h < M.num_slots(); ++h) {
            if (newid[h] < 0) continue;
            twin2[newid[h]] = newid[tw[h]];
            hol2[newid[h]] = M.hol(h);
        }
        std::map<int, Singularity> lab;
        lab[newid[sel]] = Singularity{"xi1", 2};
        for (int v = 0; v < M.num_vertices(); ++v) {
            if (v == 0 || v == 1) continue;
            for (int h = 0; h < M.num_slots(); ++h)
                if (newid[h] >= 0 && M.origin(h) == v) { lab[newid[h]] = M.sing(v); break; }
        }
        FramedH2Surface<S> F;
        F.surface = TriSurface<S>::build(std::move(twin2), std::move(hol2), lab, M.disc());
        int v = F.vertex();
        int idx = F.surface.prong_index(v, newid[sel], true);
        F.selected_prong = idx / 2;
        return F;
    }
    throw RelDomainError("collapse did not isolate the short saddle");
}

/// Splits the order-2 singularity of a framed H(2) surface into two simple
/// zeros joined by a horizontal saddle of holonomy (T,0) from xi2 to xi1.
template <class S>
TriSurface<S> split(const FramedH2Surface<S>& F, const S& T) {
    if (is_zero(T)) throw std::invalid_argument("T must be nonzero");
    const TriSurface<S>& M = F.surface;
    if (M.stratum().rfind("H(2)", 0) != 0) throw std::invalid_argument("split needs a surface in H(2)");
    int v = F.vertex();
    auto ps = M.prongs(v);
    S len = abs_val(T);
    // no horizontal saddle of length <= |T| from q1 or q3 to q4 or q6
    for (int q : {0, 2}) {
        auto tr = trace_separatrix(M, v, ps[q], len);
        if (!tr.closed || tr.saddle.to != v) continue;
        int pin = M.prong_index(v, tr.saddle.end_corner, false);
        if ((pin == 3 || pin == 5) && sgn(tr.saddle.hol.x - len) <= 0)
            throw RelDomainError("blocking horizontal saddle of length " + std::to_string(tr.saddle.length()) +
                                 " between the split prongs");
    }
    int c1 = ps[2 * F.selected_prong].corner;
    // slot directions in half turns counted from the selected prong
    struct Dir {
        int slot, cnt;
        bool on_prong;
    };
    std::vector<Dir> dirs;
    const Vec2<S> ex(S(1), S(0)), wx(S(-1), S(0));
    int cnt = 1;
    for (int h = M.rot(c1);; h = M.rot(h)) {
        bool on = is_zero(M.hol(h).y);
        if (h == c1) {
            if (!on) dirs.push_back({h, 6, false});
            break;
        }
        dirs.push_back({h, cnt, on});
        cnt += in_corner(M.corner_start(h), M.corner_end(h), ex) + in_corner(M.corner_start(h), M.corner_end(h), wx);
    }
    int h1 = -1, h2 = -1;
    for (auto& d1 : dirs) {
        if (d1.on_prong || d1.cnt != 3) continue;
        for (auto& d2 : dirs) {
            if (d2.on_prong || d2.cnt != 6 || d2.slot == M.twin(d1.slot)) continue;
            h1 = d1.slot;
            h2 = d2.slot;
            break;
        }
        if (h1 >= 0) break;
    }
    if (h1 < 0) throw SurfaceError("no admissible pair of edges to split along");
    int n = M.num_slots(), nt = M.num_triangles();
    std::vector<int> tw = M.twins();
    std::vector<Vec2<S>> hol = M.hols();
    tw.resize(n + 6);
    hol.resize(n + 6);
    int AB = n, BC = n + 1, CA = n + 2, BA = n + 3, AD = n + 4, DB = n + 5;
    int g1 = tw[h1], g2 = tw[h2];
    const Vec2<S> zero(S(0), S(0));
    hol[AB] = zero;
    hol[BA] = zero;
    hol[BC] = M.hol(h1);
    hol[CA] = -M.hol(h1);
    hol[AD] = M.hol(h2);
    hol[DB] = -M.hol(h2);
    auto pair = [&](int a, int b) { tw[a] = b; tw[b] = a; };
    pair(AB, BA);
    pair(CA, h1);
    pair(BC, g1);
    pair(AD, g2);
    pair(DB, h2);
    (void)nt;
    // vertex classes of the new complex
    int N = n + 6;
    std::vector<int> cls(N, -1);
    int ncls = 0;
    for (int h0 = 0; h0 < N; ++h0) {
        if (cls[h0] >= 0) continue;
        for (int h = h0; cls[h] < 0; h = tw[TriSurface<S>::prev(h)]) cls[h] = ncls;
        ++ncls;
    }
    int cA = cls[AB], cB = cls[BA];
    if (cA == cB) throw SurfaceError("split did not separate the singularity");
    std::vector<S> zc(ncls, S(0));
    zc[cB] = S(1);
    std::vector<Vec2<S>> disp(N);
    for (int h = 0; h < N; ++h) disp[h] = Vec2<S>(zc[cls[TriSurface<S>::next(h)]] - zc[cls[h]], S(0));
    // smallest positive s keeping every triangle positive
    std::optional<S> smax;
    for (int t = 0; t < N / 3; ++t) {
        S c0 = cross(hol[3 * t], hol[3 * t + 1]);
        S slope = cross(disp[3 * t], hol[3 * t + 1]) + cross(hol[3 * t], disp[3 * t + 1]);
        if (is_zero(c0)) {
            if (sgn(slope) <= 0) throw SurfaceError("split triangles open with the wrong orientation");
            continue;
        }
        if (sgn(slope) < 0) {
            S u = -c0 / slope;
            if (!smax || u < *smax) smax = u;
        }
    }
    S s0 = len / S(2);
    if (smax && *smax / S(2) < s0) s0 = *smax / S(2);
    for (int h = 0; h < N; ++h) hol[h] += s0 * disp[h];
    std::map<int, Singularity> lab;
    bool pos = sgn(T) > 0;
    lab[AB] = Singularity{pos ? "xi2" : "xi1", 1};
    lab[BA] = Singularity{pos ? "xi1" : "xi2", 1};
    for (int w = 0; w < M.num_vertices(); ++w) {
        if (w == v) continue;
        for (int h = 0; h < n; ++h)
            if (M.origin(h) == w) { lab[h] = M.sing(w); break; }
    }
    TriSurface<S> out = TriSurface<S>::build(std::move(tw), std::move(hol), lab, M.disc());
    // grow A->B from s0 to |T|; A->B runs xi2->xi1 for T>0 and xi1->xi2 for T<0
    S rest = len - s0;
    if (is_zero(rest)) return out;
    return rel_apply(out, RelVector<S>::scalar(pos ? -rest : rest));
}

}  // namespace flatrel
