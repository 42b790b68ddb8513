#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "surface.hpp"

namespace flatrel {

/// Slot map between the Delaunay cell boundaries of two Delaunay surfaces
/// matching holonomy and vertex names; nullopt when none exists. If
/// `anchor` is given only isomorphisms sending anchor->(some slot of B)
/// passing `accept` are returned.
template <class S, class Accept>
std::optional<std::vector<int>> delaunay_isomorphism(const TriSurface<S>& A, const TriSurface<S>& B, Accept accept) {
    if (A.num_vertices() != B.num_vertices()) return std::nullopt;
    int na = A.num_slots(), nb = B.num_slots();
    std::vector<char> bA(na), bB(nb);
    int ca = 0, cb = 0;
    for (int h = 0; h < na; ++h) ca += bA[h] = A.cell_edge(h);
    for (int h = 0; h < nb; ++h) cb += bB[h] = B.cell_edge(h);
    if (ca != cb || ca == 0) return std::nullopt;
    int a0 = -1;
    for (int h = 0; h < na; ++h)
        if (bA[h]) { a0 = h; break; }
    std::vector<int> nextA(na, -1), nextB(nb, -1);
    for (int h = 0; h < na; ++h)
        if (bA[h]) nextA[h] = A.next_in_cell(h);
    for (int h = 0; h < nb; ++h)
        if (bB[h]) nextB[h] = B.next_in_cell(h);
    auto same = [&](int a, int b) {
        return vec_equal(A.hol(a), B.hol(b)) && A.sing(A.origin(a)).name == B.sing(B.origin(b)).name &&
               A.sing(A.origin(a)).order == B.sing(B.origin(b)).order;
    };
    for (int b0 = 0; b0 < nb; ++b0) {
        if (!bB[b0] || !same(a0, b0)) continue;
        std::vector<int> f(na, -1), g(nb, -1);
        std::deque<int> q{a0};
        f[a0] = b0;
        g[b0] = a0;
        bool ok = true;
        while (!q.empty() && ok) {
            int a = q.front();
            q.pop_front();
            int b = f[a];
            std::pair<int, int> nb2[2] = {{nextA[a], nextB[b]}, {A.twin(a), B.twin(b)}};
            for (auto [x, y] : nb2) {
                if (f[x] < 0 && g[y] < 0) {
                    if (!same(x, y)) { ok = false; break; }
                    f[x] = y;
                    g[y] = x;
                    q.push_back(x);
                } else if (f[x] != y || g[y] != x) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;
        int mapped = 0;
        for (int h = 0; h < na; ++h) mapped += f[h] >= 0;
        if (mapped != ca) continue;
        if (accept(f)) return f;
    }
    return std::nullopt;
}

template <class S>
std::optional<std::vector<int>> delaunay_isomorphism(const TriSurface<S>& A, const TriSurface<S>& B) {
    return delaunay_isomorphism(A, B, [](const std::vector<int>&) { return true; });
}

/// True when A and B are the same labelled translation surface (any
/// triangulations).
template <class S>
bool same_surface(TriSurface<S> A, TriSurface<S> B) {
    A.make_delaunay();
    B.make_delaunay();
    return delaunay_isomorphism(A, B).has_value();
}

namespace detail {

// Right prong position relative to the Delaunay boundary slot at or
// clockwise-before the corner.
template <class S>
std::pair<int, int> prong_anchor(const TriSurface<S>& M, int corner) {
    int a = corner;
    int guard = 0;
    while (!M.cell_edge(a)) {
        a = M.rot_cw(a);
        if (++guard > M.num_slots()) throw SurfaceError("vertex without Delaunay boundary slot");
    }
    const Vec2<S> ex(S(1), S(0));
    int k = 0;
    for (int h = a;; h = M.rot(h)) {
        if (in_corner(M.corner_start(h), M.corner_end(h), ex)) {
            if (h == corner) break;
            ++k;
        }
        if (M.rot(h) == a) throw SurfaceError("prong corner not found in fan");
    }
    return {a, k};
}

template <class S>
int prong_at(const TriSurface<S>& M, int a, int k) {
    const Vec2<S> ex(S(1), S(0));
    int h = a;
    do {
        if (in_corner(M.corner_start(h), M.corner_end(h), ex)) {
            if (k == 0) return h;
            --k;
        }
        h = M.rot(h);
    } while (h != a);
    throw SurfaceError("prong index out of range");
}

}  // namespace detail

}  // namespace flatrel
