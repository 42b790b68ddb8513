#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "homology.hpp"
#include "intlinalg.hpp"
#include "surface.hpp"

namespace flatrel {

struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class S>
struct SaddleConnection {
    Vec2<S> hol;
    int from = -1, to = -1;  // vertex indices
    int start_corner = -1;   // corner slot containing the initial direction
    std::vector<int> path;   // slots crossed, each in the triangle being entered
    int prong_out = -1, prong_in = -1;  // horizontal prong indices, -1 otherwise
    int end_corner = -1;

    double length() const { return flatrel::length(hol); }
};

template <class S>
bool saddle_order(const SaddleConnection<S>& a, const SaddleConnection<S>& b) {
    auto la = norm2(a.hol), lb = norm2(b.hol);
    if (la != lb) return la < lb;
    Vec2<double> da = to_double(a.hol), db = to_double(b.hol);
    double aa = std::atan2(da.y, da.x), ab = std::atan2(db.y, db.x);
    if (aa != ab) return aa < ab;
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
}

struct ScanOptions {
    long max_nodes = 50'000'000;  // cap on unfolded triangles
    int threads = 1;
    bool keep_paths = true;
};

namespace detail {

inline constexpr long kNodeChunk = 256;

template <class S>
S seg_dist2(const Vec2<S>& X, const Vec2<S>& Y) {
    Vec2<S> d = Y - X;
    S dd = norm2(d);
    S t = -dot(X, d);
    if (sgn(t) <= 0) return norm2(X);
    if (t >= dd) return norm2(Y);
    Vec2<S> p = X + (t / dd) * d;
    return norm2(p);
}

template <class S>
void explore_corner(const TriSurface<S>& M, int h, const S& L2, const ScanOptions& opt, std::atomic<long>& nodes,
                    std::vector<SaddleConnection<S>>& out) {
    using V = Vec2<S>;
    struct Node {
        int e;
        V Y, X, r, l;
        int parent;
    };
    std::vector<Node> nodes_v;
    std::vector<int> stack;
    int v0 = M.origin(h);
    V B = M.hol(h), C = -M.hol(M.prev(h));
    if (norm2(B) <= L2) {
        SaddleConnection<S> sc;
        sc.hol = B;
        sc.from = v0;
        sc.to = M.target(h);
        sc.start_corner = h;
        out.push_back(std::move(sc));
    }
    nodes_v.push_back({M.twin(TriSurface<S>::next(h)), C, B, B, C, -1});
    stack.push_back(0);
    long local = 0;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        Node nd = nodes_v[id];
        if (seg_dist2(nd.X, nd.Y) > L2) continue;
        if (++local % kNodeChunk == 0) {
            if (nodes.fetch_add(kNodeChunk) + kNodeChunk > opt.max_nodes) throw ResourceLimit("unfolding cap exceeded");
        }
        int ne = TriSurface<S>::next(nd.e), pe = TriSurface<S>::prev(nd.e);
        V Vp = nd.X + M.hol(ne);
        int sr = orient(nd.r, Vp), sl = orient(Vp, nd.l);
        if (sr > 0 && sl > 0) {
            if (norm2(Vp) <= L2) {
                SaddleConnection<S> sc;
                sc.hol = Vp;
                sc.from = v0;
                sc.to = M.origin(pe);
                sc.start_corner = h;
                if (opt.keep_paths) {
                    for (int p = id; p >= 0; p = nodes_v[p].parent) sc.path.push_back(nodes_v[p].e);
                    std::reverse(sc.path.begin(), sc.path.end());
                }
                out.push_back(std::move(sc));
            }
            nodes_v.push_back({M.twin(ne), Vp, nd.X, nd.r, Vp, id});
            stack.push_back(static_cast<int>(nodes_v.size()) - 1);
            nodes_v.push_back({M.twin(pe), nd.Y, Vp, Vp, nd.l, id});
            stack.push_back(static_cast<int>(nodes_v.size()) - 1);
        } else if (sr <= 0) {
            nodes_v.push_back({M.twin(pe), nd.Y, Vp, nd.r, nd.l, id});
            stack.push_back(static_cast<int>(nodes_v.size()) - 1);
        } else {
            nodes_v.push_back({M.twin(ne), Vp, nd.X, nd.r, nd.l, id});
            stack.push_back(static_cast<int>(nodes_v.size()) - 1);
        }
    }
    if (nodes.fetch_add(local % kNodeChunk) + local % kNodeChunk > opt.max_nodes)
        throw ResourceLimit("unfolding cap exceeded");
}

}  // namespace detail

/// All saddle connections with |hol| <= L, once per orientation, sorted by
/// (length, angle, source, target).
template <class S>
std::vector<SaddleConnection<S>> saddle_connections(const TriSurface<S>& M, const S& L,
                                                    const ScanOptions& opt = {}) {
    if (sgn(L) <= 0) throw std::invalid_argument("L must be positive");
    S L2 = L * L;
    std::atomic<long> nodes{0};
    int ns = M.num_slots();
    int nt = std::max(1, std::min(opt.threads, ns));
    std::vector<std::vector<SaddleConnection<S>>> parts(ns);
    if (nt == 1) {
        for (int h = 0; h < ns; ++h) detail::explore_corner(M, h, L2, opt, nodes, parts[h]);
    } else {
        std::atomic<int> nexth{0};
        std::exception_ptr err;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i)
            pool.emplace_back([&] {
                try {
                    for (int h = nexth++; h < ns; h = nexth++) detail::explore_corner(M, h, L2, opt, nodes, parts[h]);
                } catch (...) {
                    std::lock_guard<std::mutex> g(mu);
                    err = std::current_exception();
                    nexth = ns;
                }
            });
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    }
    std::vector<SaddleConnection<S>> all;
    for (auto& p : parts)
        for (auto& s : p) all.push_back(std::move(s));
    std::stable_sort(all.begin(), all.end(), saddle_order<S>);
    return all;
}

/// Number of saddle connections with length <= L, without storing paths.
template <class S>
long count_saddles(const TriSurface<S>& M, const S& L, ScanOptions opt = {}) {
    opt.keep_paths = false;
    return static_cast<long>(saddle_connections(M, L, opt).size());
}

// ---------------------------------------------------------------------------
// Horizontal separatrices

template <class S>
struct TraceResult {
    bool closed = false;
    SaddleConnection<S> saddle;  // valid when closed
};

/// Follows the horizontal ray leaving prong `pr` at vertex v until it hits a
/// singularity or runs past `budget`.
template <class S>
TraceResult<S> trace_separatrix(const TriSurface<S>& M, int v, const Prong& pr, const S& budget,
                                long max_steps = 10'000'000) {
    using V = Vec2<S>;
    const V d(S(pr.right ? 1 : -1), S(0));
    TraceResult<S> res;
    auto& sc = res.saddle;
    sc.from = v;
    sc.start_corner = pr.corner;
    int h = pr.corner;
    V u = M.hol(h);
    if (orient(u, d) == 0 && sgn(dot(u, d)) > 0) {
        if (sgn(dot(u, d) - budget) > 0) return res;
        sc.hol = u;
        sc.to = M.target(h);
        sc.end_corner = M.twin(h);
        res.closed = true;
        return res;
    }
    // e runs from C = -hol(prev h) to B = u
    int e = M.twin(TriSurface<S>::next(h));
    V X = u, Y = -M.hol(TriSurface<S>::prev(h));
    for (long step = 0; step < max_steps; ++step) {
        sc.path.push_back(e);
        S ax = dot(X, d), ay = dot(Y, d);
        S amin = ax < ay ? ax : ay;
        if (sgn(amin - budget) > 0) {
            sc.path.clear();
            return res;
        }
        int ne = TriSurface<S>::next(e), pe = TriSurface<S>::prev(e);
        V Vp = X + M.hol(ne);
        int sv = sgn(cross(d, Vp));
        if (sv == 0) {
            if (sgn(dot(Vp, d) - budget) > 0) {
                sc.path.clear();
                return res;
            }
            sc.hol = Vp;
            sc.to = M.origin(pe);
            sc.end_corner = pe;
            res.closed = true;
            return res;
        }
        int sx = sgn(cross(d, X));
        if (sv == sx) {
            e = M.twin(pe);
            X = Vp;
        } else {
            e = M.twin(ne);
            Y = Vp;
        }
    }
    throw ResourceLimit("separatrix step cap exceeded");
}

template <class S>
struct HorizontalScan {
    std::vector<SaddleConnection<S>> saddles;  // rightward, from right prongs
    bool complete = false;                     // every separatrix closed within budget
    int unclosed = 0;
    S budget{};
};

template <class S>
S longest_edge(const TriSurface<S>& M) {
    S best(0);
    for (int h = 0; h < M.num_slots(); ++h) {
        S n = norm2(M.hol(h));
        if (n > best) best = n;
    }
    // a rational bound >= the true length keeps the exact mode exact
    if constexpr (is_exact_v<S>) {
        double b = std::sqrt(best.to_double()) * (1 + 1e-9) + 1e-9;
        Rational q(static_cast<long>(std::ceil(b * 1024)), 1024);
        return QuadNum(q).with_disc(M.disc());
    } else {
        return std::sqrt(best);
    }
}

template <class S>
S default_budget(const TriSurface<S>& M) { return S(100) * longest_edge(M); }

/// Traces every horizontal separatrix. Saddles are reported rightward with
/// prong indices at both ends.
template <class S>
HorizontalScan<S> horizontal_saddles(const TriSurface<S>& M, std::optional<S> budget = std::nullopt) {
    HorizontalScan<S> hs;
    hs.budget = budget ? *budget : default_budget(M);
    hs.complete = true;
    for (int v = 0; v < M.num_vertices(); ++v) {
        auto ps = M.prongs(v);
        for (size_t i = 0; i < ps.size(); ++i) {
            auto tr = trace_separatrix(M, v, ps[i], hs.budget);
            if (!tr.closed) {
                hs.complete = false;
                ++hs.unclosed;
                continue;
            }
            if (!ps[i].right) continue;
            auto sc = std::move(tr.saddle);
            sc.prong_out = static_cast<int>(i);
            sc.prong_in = M.prong_index(sc.to, sc.end_corner, false);
            hs.saddles.push_back(std::move(sc));
        }
    }
    std::stable_sort(hs.saddles.begin(), hs.saddles.end(), saddle_order<S>);
    return hs;
}

// ---------------------------------------------------------------------------
// Developing saddle paths

template <class S>
struct DevTriangle {
    int t;
    Vec2<S> p[3];  // developed positions of the triangle's vertices 0,1,2
};

template <class S>
void place_triangle(const TriSurface<S>& M, int t, int k, const Vec2<S>& at, DevTriangle<S>& out) {
    // vertex k of triangle t placed at `at`
    out.t = t;
    out.p[k] = at;
    out.p[(k + 1) % 3] = at + M.hol(3 * t + k);
    out.p[(k + 2) % 3] = out.p[(k + 1) % 3] + M.hol(3 * t + (k + 1) % 3);
}

/// Developed triangles along a saddle, starting vertex at the origin.
template <class S>
std::vector<DevTriangle<S>> develop(const TriSurface<S>& M, const SaddleConnection<S>& sc) {
    std::vector<DevTriangle<S>> out;
    DevTriangle<S> d;
    int h = sc.start_corner;
    place_triangle(M, TriSurface<S>::tri(h), h % 3, Vec2<S>(S(0), S(0)), d);
    out.push_back(d);
    for (int e : sc.path) {
        // e enters triangle tri(e); its twin lies in the previous triangle
        int f = M.twin(e);
        const auto& prevd = out.back();
        Vec2<S> at = prevd.p[(f % 3 + 1) % 3];  // target of f = origin of e
        DevTriangle<S> nd;
        place_triangle(M, TriSurface<S>::tri(e), e % 3, at, nd);
        out.push_back(nd);
    }
    return out;
}

/// An edge chain homotopic rel endpoints to the saddle connection.
template <class S>
Chain saddle_chain(const TriSurface<S>& M, const SaddleConnection<S>& sc) {
    Chain c(M.num_slots());
    if (sc.path.empty()) {
        c.add_slot(M, sc.start_corner);
        return c;
    }
    auto dev = develop(M, sc);
    Vec2<S> dir = sc.hol;
    auto move = [&](int t, int a, int b) {
        if (a == b) return;
        if (b == (a + 1) % 3) c.add_slot(M, 3 * t + a, 1);
        else c.add_slot(M, 3 * t + b, -1);
    };
    int k = sc.start_corner % 3;
    for (size_t i = 0; i < sc.path.size(); ++i) {
        int e = sc.path[i];
        int f = M.twin(e);
        const auto& pd = dev[i];
        int a = f % 3, b = (a + 1) % 3;
        int right = sgn(cross(dir, pd.p[a])) < 0 ? a : b;
        move(pd.t, k, right);
        // same vertex inside the next triangle: f goes a->b, e goes b->a
        k = right == a ? (e % 3 + 1) % 3 : e % 3;
    }
    int end = TriSurface<S>::prev(sc.path.back()) % 3;
    move(dev.back().t, k, end);
    return c;
}

// ---------------------------------------------------------------------------
// Cylinders

template <class S>
struct Cylinder {
    Vec2<S> direction;  // direction as given
    S circumference{}, height{};
    std::vector<int> bottom, top;  // indices into the horizontal saddle list
    S modulus() const { return height / circumference; }
};

template <class S>
struct CylinderResult {
    enum Verdict { Periodic, Nonperiodic, Undetermined } verdict = Undetermined;
    std::vector<Cylinder<S>> cylinders;
    HorizontalScan<S> scan;
    std::string note;
};

namespace detail {

struct Chord {
    int saddle;
    int t;
};

template <class S>
struct ChordGeom {
    int saddle;
    S y, x0, x1;  // triangle-local, vertex 0 at the origin
};

template <class S>
std::vector<std::vector<ChordGeom<S>>> horizontal_chords(const TriSurface<S>& M,
                                                        const std::vector<SaddleConnection<S>>& sads) {
    std::vector<std::vector<ChordGeom<S>>> per(M.num_triangles());
    for (size_t i = 0; i < sads.size(); ++i) {
        const auto& sc = sads[i];
        if (sc.path.empty()) {
            int h = sc.start_corner;
            for (int s : {h, M.twin(h)}) {
                int t = TriSurface<S>::tri(s);
                DevTriangle<S> d;
                place_triangle(M, t, 0, Vec2<S>(S(0), S(0)), d);
                Vec2<S> a = d.p[s % 3], b = d.p[(s % 3 + 1) % 3];
                per[t].push_back({static_cast<int>(i), a.y, a.x < b.x ? a.x : b.x, a.x < b.x ? b.x : a.x});
            }
            continue;
        }
        auto dev = develop(M, sc);
        for (auto& d : dev) {
            std::vector<S> xs;
            for (int k = 0; k < 3; ++k) {
                const auto& a = d.p[k];
                const auto& b = d.p[(k + 1) % 3];
                int sa = sgn(a.y), sb = sgn(b.y);
                if (sa == 0) xs.push_back(a.x);
                if (sa * sb < 0) xs.push_back(a.x + (b.x - a.x) * (-a.y) / (b.y - a.y));
            }
            if (xs.size() < 2) continue;
            S lo = xs[0], hi = xs[0];
            for (auto& x : xs) {
                if (x < lo) lo = x;
                if (x > hi) hi = x;
            }
            Vec2<S> off = d.p[0];
            per[d.t].push_back({static_cast<int>(i), -off.y, lo - off.x, hi - off.x});
        }
    }
    return per;
}

// Upward vertical ray from local point P of triangle t. Returns (rise, saddle)
// or nullopt when the ray meets a vertex first.
template <class S>
std::optional<std::pair<S, int>> rise_to_chord(const TriSurface<S>& M, int t, Vec2<S> P,
                                                const std::vector<std::vector<ChordGeom<S>>>& chords,
                                                long max_steps = 1'000'000) {
    S total(0);
    for (long step = 0; step < max_steps; ++step) {
        DevTriangle<S> d;
        place_triangle(M, t, 0, Vec2<S>(S(0), S(0)), d);
        std::optional<S> best;
        int best_s = -1;
        for (auto& c : chords[t]) {
            if (sgn(c.y - P.y) <= 0) continue;
            if (sgn(P.x - c.x0) < 0 || sgn(c.x1 - P.x) < 0) continue;
            if (!best || c.y < *best) { best = c.y; best_s = c.saddle; }
        }
        for (int k = 0; k < 3; ++k)
            if (sgn(d.p[k].x - P.x) == 0 && sgn(d.p[k].y - P.y) > 0) {
                if (!best || d.p[k].y <= *best) return std::nullopt;
            }
        std::optional<S> exit_y;
        int exit_slot = -1;
        for (int k = 0; k < 3; ++k) {
            const auto& a = d.p[k];
            const auto& b = d.p[(k + 1) % 3];
            int sa = sgn(a.x - P.x), sb = sgn(b.x - P.x);
            if (sa * sb >= 0) continue;
            S y = a.y + (b.y - a.y) * (P.x - a.x) / (b.x - a.x);
            if (sgn(y - P.y) <= 0) continue;
            exit_y = y;
            exit_slot = 3 * t + k;
        }
        if (best && (!exit_y || sgn(*best - *exit_y) <= 0)) return std::make_pair(total + (*best - P.y), best_s);
        if (!exit_y) throw SurfaceError("vertical ray left no exit");
        total += *exit_y - P.y;
        Vec2<S> Q(P.x, *exit_y);
        // move into the neighbour: local coordinates of the shared vertex
        int g = M.twin(exit_slot);
        int t2 = TriSurface<S>::tri(g);
        DevTriangle<S> d2;
        place_triangle(M, t2, 0, Vec2<S>(S(0), S(0)), d2);
        Vec2<S> a1 = d.p[exit_slot % 3];    // origin of exit slot in t
        Vec2<S> a2 = d2.p[(g % 3 + 1) % 3];  // same point = target of g in t2
        P = Q - a1 + a2;
        t = t2;
    }
    throw ResourceLimit("vertical trace step cap exceeded");
}

}  // namespace detail

/// Horizontal cylinder decomposition from a complete separatrix scan.
template <class S>
CylinderResult<S> horizontal_cylinders(const TriSurface<S>& M, std::optional<S> budget = std::nullopt) {
    CylinderResult<S> R;
    R.scan = horizontal_saddles(M, budget);
    if (!R.scan.complete) {
        R.verdict = CylinderResult<S>::Undetermined;
        R.note = std::to_string(R.scan.unclosed) + " separatrices unclosed within budget";
        return R;
    }
    const auto& sads = R.scan.saddles;
    int n = static_cast<int>(sads.size());
    std::map<std::pair<int, int>, int> by_out;
    for (int i = 0; i < n; ++i) by_out[{sads[i].from, sads[i].prong_out}] = i;
    auto np = [&](int v) { return 2 * (M.sing(v).order + 1); };
    std::vector<int> bot(n), top(n);
    for (int i = 0; i < n; ++i) {
        int v = sads[i].to, p = sads[i].prong_in;
        auto b = by_out.find({v, (p - 1 + np(v)) % np(v)});
        auto t = by_out.find({v, (p + 1) % np(v)});
        if (b == by_out.end() || t == by_out.end()) throw SurfaceError("complete scan with unoccupied right prong");
        bot[i] = b->second;
        top[i] = t->second;
    }
    std::vector<int> top_cycle(n, -1);
    int ntc = 0;
    for (int i = 0; i < n; ++i) {
        if (top_cycle[i] >= 0) continue;
        for (int j = i; top_cycle[j] < 0; j = top[j]) top_cycle[j] = ntc;
        ++ntc;
    }
    std::vector<std::vector<int>> top_members(ntc);
    for (int i = 0; i < n; ++i) top_members[top_cycle[i]].push_back(i);
    auto chords = detail::horizontal_chords(M, sads);
    std::vector<char> used(n, 0);
    S total_area(0);
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        Cylinder<S> cyl;
        cyl.direction = Vec2<S>(S(1), S(0));
        cyl.circumference = S(0);
        for (int j = i; !used[j]; j = bot[j]) {
            used[j] = 1;
            cyl.bottom.push_back(j);
            cyl.circumference += sads[j].hol.x;
        }
        // height from the first chord of the bottom saddle
        const auto& sc = sads[cyl.bottom[0]];
        std::optional<std::pair<S, int>> hit;
        const Rational fr[] = {Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(3, 7), Rational(5, 11)};
        for (const auto& f : fr) {
            int h = sc.start_corner;
            int t = TriSurface<S>::tri(h);
            DevTriangle<S> d;
            place_triangle(M, t, 0, Vec2<S>(S(0), S(0)), d);
            Vec2<S> a = d.p[h % 3];
            Vec2<S> end;
            if (sc.path.empty()) {
                end = d.p[(h % 3 + 1) % 3];
            } else {
                int ne = TriSurface<S>::next(h);
                Vec2<S> b = d.p[ne % 3], c = d.p[(ne % 3 + 1) % 3];
                // intersection of the horizontal through a with segment bc
                end = Vec2<S>(b.x + (c.x - b.x) * (a.y - b.y) / (c.y - b.y), a.y);
            }
            S fs = from_rational<S>(f, M.disc());
            Vec2<S> P(a.x + fs * (end.x - a.x), a.y);
            hit = detail::rise_to_chord(M, t, P, chords);
            if (hit) break;
        }
        if (!hit) throw SurfaceError("height trace kept meeting vertices");
        cyl.height = hit->first;
        cyl.top = top_members[top_cycle[hit->second]];
        total_area += cyl.circumference * cyl.height;
        R.cylinders.push_back(std::move(cyl));
    }
    R.verdict = CylinderResult<S>::Periodic;
    if constexpr (is_exact_v<S>) {
        if (total_area != M.area()) throw SurfaceError("cylinder areas do not sum to the surface area");
    } else {
        if (std::fabs(total_area - M.area()) > 1e-7 * std::max(1.0, M.area()))
            throw SurfaceError("cylinder areas do not sum to the surface area");
    }
    return R;
}

/// Cylinder decomposition in direction `dir`. Lengths are reported in the
/// frame g M with g = (dx dy; -dy dx), i.e. scaled by |dir|.
template <class S>
CylinderResult<S> cylinder_decomposition(const TriSurface<S>& M, const Vec2<S>& dir,
                                         std::optional<S> budget = std::nullopt) {
    if (is_zero(dir.x) && is_zero(dir.y)) throw std::invalid_argument("direction must be nonzero");
    Mat2<S> g(dir.x, dir.y, -dir.y, dir.x);
    TriSurface<S> N = M.apply(g);
    N.make_delaunay();
    auto R = horizontal_cylinders(N, budget);
    for (auto& c : R.cylinders) c.direction = dir;
    return R;
}

/// Dimension of the Q-span of exact moduli.
inline int moduli_rational_rank(const std::vector<QuadNum>& moduli) {
    QMatrix A;
    for (auto& m : moduli) {
        if (m.is_rational()) A.push_back({m.rational_value(), Rational(0)});
        else A.push_back({m.a(), m.b()});
    }
    if (A.empty()) return 0;
    return rank_q(A);
}

inline int moduli_rational_rank(const std::vector<double>&) {
    throw std::domain_error("rational rank of float moduli is ill-posed; use exact mode");
}

template <class S>
std::vector<S> moduli(const std::vector<Cylinder<S>>& cyls) {
    std::vector<S> m;
    for (auto& c : cyls) m.push_back(c.modulus());
    return m;
}

// ---------------------------------------------------------------------------
// Horizontal data diagrams

struct DiagramEdge {
    int from, to, prong_out, prong_in;
    double length;
};

struct HorizontalDiagram {
    std::vector<Singularity> vertices;
    std::vector<DiagramEdge> edges;
    // per vertex: 'o' occupied-out, 'i' occupied-in, 'r' free-right, 'l' free-left
    std::vector<std::string> occupancy;
    int cylinders = -1;  // when the horizontal direction is periodic
    std::string type;    // catalog name for H(1,1), "" if none applies
    bool slit_separating = false;  // for two parallel edges between distinct zeros
};

struct DiagramError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string classify_h11(const HorizontalDiagram& D) {
    if (D.vertices.size() != 2 || D.vertices[0].order != 1 || D.vertices[1].order != 1) return "";
    int loops[2] = {0, 0}, e01 = 0, e10 = 0;
    for (auto& e : D.edges) {
        if (e.from == e.to) ++loops[e.from];
        else if (e.from == 0) ++e01;
        else ++e10;
    }
    int nl = loops[0] + loops[1], ne = e01 + e10;
    if (nl + ne == 4) {
        if (nl == 4) return "A";
        if (nl == 0) return D.cylinders == 1 ? "D" : "B";
        if (loops[0] == 1 && loops[1] == 1) return "C";
        return "";
    }
    if (loops[0] == 1 && loops[1] == 1 && ne == 0) return "1";
    if (loops[0] == 1 && loops[1] == 1 && ne == 1) return "2";
    if (nl == 0 && e01 == 1 && e10 == 1) return "3";
    if (nl == 0 && ne == 1) return "4";
    if (nl == 0 && (e01 == 2 || e10 == 2) && ne == 2) return "5";
    return "";
}

template <class S>
HorizontalDiagram horizontal_diagram(const TriSurface<S>& M, std::optional<S> budget = std::nullopt) {
    auto hs = horizontal_saddles(M, budget);
    HorizontalDiagram D;
    D.vertices = M.sings();
    for (auto& s : hs.saddles) D.edges.push_back({s.from, s.to, s.prong_out, s.prong_in, s.length()});
    for (int v = 0; v < M.num_vertices(); ++v) {
        int n = 2 * (M.sing(v).order + 1);
        std::string w(n, ' ');
        for (int i = 0; i < n; ++i) w[i] = i % 2 == 0 ? 'r' : 'l';
        for (auto& e : D.edges) {
            if (e.from == v) w[e.prong_out] = 'o';
            if (e.to == v) w[e.prong_in] = 'i';
        }
        D.occupancy.push_back(w);
    }
    if (hs.complete) {
        auto cr = horizontal_cylinders(M, budget);
        D.cylinders = static_cast<int>(cr.cylinders.size());
    } else {
        // free right prongs whose separatrix did not close are legitimate in
        // non-periodic directions; only a closed-but-unrecorded case is an error
    }
    D.type = classify_h11(D);
    if (D.type == "5") {
        // is the union of the two parallel saddles separating?
        const auto& a = hs.saddles[0];
        const auto& b = hs.saddles[1];
        Chain c = saddle_chain(M, a);
        c -= saddle_chain(M, b);
        auto H = Homology<S>::compute(M);
        auto p = H.pairing(M, c);
        D.slit_separating = std::all_of(p.begin(), p.end(), [](int x) { return x == 0; });
    }
    return D;
}

/// Label-, orientation- and cyclic-order-preserving isomorphism of diagrams.
inline bool diagram_isomorphic(const HorizontalDiagram& A, const HorizontalDiagram& B) {
    if (A.vertices.size() != B.vertices.size() || A.edges.size() != B.edges.size()) return false;
    int n = static_cast<int>(A.vertices.size());
    std::vector<int> f(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (B.vertices[j].name == A.vertices[i].name && B.vertices[j].order == A.vertices[i].order) f[i] = j;
        if (f[i] < 0) return false;
    }
    // try every even rotation per vertex
    std::vector<int> rot(n, 0);
    std::function<bool(int)> go = [&](int v) -> bool {
        if (v == n) {
            std::vector<std::tuple<int, int, int, int>> ea, eb;
            for (auto& e : A.edges) {
                int na = 2 * (A.vertices[e.from].order + 1), nb = 2 * (A.vertices[e.to].order + 1);
                ea.emplace_back(f[e.from], (e.prong_out + rot[e.from]) % na, f[e.to], (e.prong_in + rot[e.to]) % nb);
            }
            for (auto& e : B.edges) eb.emplace_back(e.from, e.prong_out, e.to, e.prong_in);
            std::sort(ea.begin(), ea.end());
            std::sort(eb.begin(), eb.end());
            return ea == eb;
        }
        int np = 2 * (A.vertices[v].order + 1);
        for (int r = 0; r < np; r += 2) {
            rot[v] = r;
            if (go(v + 1)) return true;
        }
        return false;
    };
    return go(0);
}

inline std::string diagram_dot(const HorizontalDiagram& D) {
    std::ostringstream os;
    os << "digraph horizontal {\n";
    for (size_t v = 0; v < D.vertices.size(); ++v)
        os << "  " << D.vertices[v].name << " [label=\"" << D.vertices[v].name << " (" << D.occupancy[v] << ")\"];\n";
    for (auto& e : D.edges)
        os << "  " << D.vertices[e.from].name << " -> " << D.vertices[e.to].name << " [label=\"" << e.prong_out << ":"
           << e.prong_in << " len=" << e.length << "\"];\n";
    os << "}\n";
    return os.str();
}

template <class S>
std::string saddles_csv(const TriSurface<S>& M, const std::vector<SaddleConnection<S>>& sads) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,length,from,to\n";
    for (auto& s : sads) {
        auto h = to_double(s.hol);
        os << h.x << "," << h.y << "," << s.length() << "," << M.sing(s.from).name << "," << M.sing(s.to).name << "\n";
    }
    return os.str();
}

}  // namespace flatrel
