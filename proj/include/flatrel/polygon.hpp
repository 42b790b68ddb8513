#pragma once

#include <map>
#include <utility>
#include <vector>

#include "surface.hpp"

namespace flatrel {

/// Polygons with edge identifications; edge k of a polygon runs from its
/// vertex k to vertex k+1 (vertices counterclockwise).
template <class S>
struct PolygonGluing {
    std::vector<std::vector<Vec2<S>>> polygons;
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> glue;  // ((poly, edge), (poly, edge))
    std::map<std::pair<int, int>, Singularity> labels;                      // (poly, vertex) -> label
    long disc = 0;
};

namespace detail {

template <class S>
bool in_closed_triangle(const Vec2<S>& a, const Vec2<S>& b, const Vec2<S>& c, const Vec2<S>& q) {
    return sgn(cross(b - a, q - a)) >= 0 && sgn(cross(c - b, q - b)) >= 0 && sgn(cross(a - c, q - c)) >= 0;
}

}  // namespace detail

/// Triangulates each polygon by ear clipping and glues the pieces.
template <class S>
TriSurface<S> build_from_polygons(const PolygonGluing<S>& P) {
    using V = Vec2<S>;
    std::vector<int> twin;
    std::vector<V> hol;
    std::map<std::pair<int, int>, int> edge_slot;
    std::vector<std::pair<int, int>> diag;  // paired diagonal slots
    for (size_t p = 0; p < P.polygons.size(); ++p) {
        const auto& poly = P.polygons[p];
        int n = static_cast<int>(poly.size());
        if (n < 3) throw SurfaceError("polygon with fewer than 3 vertices");
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        // open boundary "edges" of the remaining polygon: for consecutive
        // remaining vertices (i, j) the slot that will carry i -> j, or a
        // pending diagonal
        std::map<std::pair<int, int>, int> pending;  // (i, j) -> slot holding j -> i
        auto emit = [&](int i, int j) {
            int s = static_cast<int>(hol.size());
            hol.push_back(poly[j] - poly[i]);
            twin.push_back(-1);
            if (j == (i + 1) % n) {
                edge_slot[{static_cast<int>(p), i}] = s;
            } else {
                auto it = pending.find({i, j});
                if (it != pending.end()) {
                    diag.push_back({s, it->second});
                    pending.erase(it);
                } else {
                    pending[{j, i}] = s;
                }
            }
        };
        while (idx.size() > 3) {
            int m = static_cast<int>(idx.size());
            bool clipped = false;
            for (int k = 0; k < m && !clipped; ++k) {
                int a = idx[(k + m - 1) % m], b = idx[k], c = idx[(k + 1) % m];
                if (sgn(cross(poly[b] - poly[a], poly[c] - poly[b])) <= 0) continue;
                bool ok = true;
                for (int q : idx)
                    if (q != a && q != b && q != c && detail::in_closed_triangle(poly[a], poly[b], poly[c], poly[q])) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                emit(a, b);
                emit(b, c);
                emit(c, a);
                idx.erase(idx.begin() + k);
                clipped = true;
            }
            if (!clipped) throw SurfaceError("polygon " + std::to_string(p) + " is not simple or is degenerate");
        }
        if (sgn(cross(poly[idx[1]] - poly[idx[0]], poly[idx[2]] - poly[idx[1]])) <= 0)
            throw SurfaceError("degenerate final triangle in polygon " + std::to_string(p));
        emit(idx[0], idx[1]);
        emit(idx[1], idx[2]);
        emit(idx[2], idx[0]);
        if (!pending.empty()) throw SurfaceError("internal triangulation error");
    }
    for (auto [a, b] : diag) {
        twin[a] = b;
        twin[b] = a;
    }
    for (auto& [e1, e2] : P.glue) {
        auto i1 = edge_slot.find(e1), i2 = edge_slot.find(e2);
        if (i1 == edge_slot.end() || i2 == edge_slot.end()) throw SurfaceError("gluing names a missing polygon edge");
        int a = i1->second, b = i2->second;
        if (twin[a] != -1 || twin[b] != -1) throw SurfaceError("polygon edge glued twice");
        twin[a] = b;
        twin[b] = a;
    }
    for (int t : twin)
        if (t < 0) throw SurfaceError("unglued polygon edge");
    std::map<int, Singularity> labels;
    for (auto& [pv, s] : P.labels) {
        auto it = edge_slot.find(pv);
        if (it == edge_slot.end()) throw SurfaceError("label on missing polygon vertex");
        labels[it->second] = s;
    }
    return TriSurface<S>::build(std::move(twin), std::move(hol), labels, P.disc);
}

}  // namespace flatrel
