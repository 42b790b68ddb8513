#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "geom.hpp"

namespace flatrel {

/// Raised for inputs that violate the surface invariants.
struct SurfaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Singularity {
    std::string name;
    int order = 0;
};

/// A horizontal prong at a vertex: the corner containing it and whether it
/// points right (+x) or left (-x).
struct Prong {
    int corner = -1;
    bool right = true;
};

/// Triangulated translation surface. Slot 3t+k is the edge of triangle t
/// from its vertex k to vertex k+1, triangles counterclockwise.
template <class S>
class TriSurface {
public:
    using Scalar = S;
    using V = Vec2<S>;

    TriSurface() = default;

    /// Builds and validates. `labels` maps any slot of a vertex class to its
    /// label; unlabelled classes get fresh names. A negative label order means
    /// "compute from prongs".
    static TriSurface build(std::vector<int> twin, std::vector<V> hol, const std::map<int, Singularity>& labels,
                            long disc) {
        TriSurface M;
        if (twin.size() % 3 != 0 || twin.empty()) throw SurfaceError("slot count must be a positive multiple of 3");
        if (hol.size() != twin.size()) throw SurfaceError("holonomy count differs from slot count");
        M.twin_ = std::move(twin);
        M.hol_ = std::move(hol);
        M.disc_ = disc;
        M.check_pairing();
        auto cls = M.vertex_orbits();
        std::vector<int> cls_of(M.twin_.size());
        for (size_t c = 0; c < cls.size(); ++c)
            for (int h : cls[c]) cls_of[h] = static_cast<int>(c);
        std::vector<std::optional<Singularity>> lab(cls.size());
        for (auto& [slot, s] : labels) {
            if (slot < 0 || slot >= static_cast<int>(M.twin_.size()))
                throw SurfaceError("label references missing slot " + std::to_string(slot));
            auto& l = lab[cls_of[slot]];
            if (l && l->name != s.name) throw SurfaceError("conflicting labels on one vertex: " + l->name + ", " + s.name);
            l = s;
        }
        std::set<std::string> used;
        for (auto& l : lab)
            if (l) {
                if (!used.insert(l->name).second) throw SurfaceError("label used on two vertices: " + l->name);
            }
        int fresh = 1;
        for (auto& l : lab)
            if (!l) {
                std::string nm;
                do nm = "xi" + std::to_string(fresh++);
                while (used.count(nm));
                used.insert(nm);
                l = Singularity{nm, -1};
            }
        // vertices sorted by name for a stable index
        std::vector<int> order(cls.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return lab[a]->name < lab[b]->name; });
        std::vector<int> rank(cls.size());
        for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
        M.sings_.resize(cls.size());
        for (size_t c = 0; c < cls.size(); ++c) M.sings_[rank[c]] = *lab[c];
        M.vert_.assign(M.twin_.size(), -1);
        for (size_t c = 0; c < cls.size(); ++c)
            for (int h : cls[c]) M.vert_[h] = rank[c];
        M.validate(true);
        return M;
    }

    // ---- combinatorics
    int num_slots() const { return static_cast<int>(twin_.size()); }
    int num_triangles() const { return num_slots() / 3; }
    int num_vertices() const { return static_cast<int>(sings_.size()); }
    static int tri(int h) { return h / 3; }
    static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
    static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
    int twin(int h) const { return twin_[h]; }
    // Next outgoing slot counterclockwise around the origin of h.
    int rot(int h) const { return twin_[prev(h)]; }
    // Next outgoing slot clockwise.
    int rot_cw(int h) const { return next(twin_[h]); }
    const V& hol(int h) const { return hol_[h]; }
    int origin(int h) const { return vert_[h]; }
    int target(int h) const { return vert_[next(h)]; }
    const std::vector<Singularity>& sings() const { return sings_; }
    const Singularity& sing(int v) const { return sings_[v]; }
    long disc() const { return disc_; }
    const std::vector<int>& twins() const { return twin_; }
    const std::vector<V>& hols() const { return hol_; }
    const std::vector<int>& verts() const { return vert_; }

    int vertex_index(const std::string& name) const {
        for (int v = 0; v < num_vertices(); ++v)
            if (sings_[v].name == name) return v;
        throw SurfaceError("no vertex named " + name);
    }

    // Corner at the origin of h spans [hol(h), -hol(prev h)).
    V corner_start(int h) const { return hol_[h]; }
    V corner_end(int h) const { return -hol_[prev(h)]; }

    // Outgoing slots at v, counterclockwise from the smallest slot.
    std::vector<int> fan(int v) const {
        int h0 = -1;
        for (int h = 0; h < num_slots(); ++h)
            if (vert_[h] == v) { h0 = h; break; }
        std::vector<int> out;
        if (h0 < 0) return out;
        int h = h0;
        do {
            out.push_back(h);
            h = rot(h);
        } while (h != h0);
        return out;
    }

    std::vector<int> fan_from(int h0) const {
        std::vector<int> out;
        int h = h0;
        do {
            out.push_back(h);
            h = rot(h);
        } while (h != h0);
        return out;
    }

    // Horizontal prongs at v in counterclockwise order, starting with a
    // right prong; even indices point right.
    std::vector<Prong> prongs(int v) const { return prongs_from(fan(v)); }

    std::vector<Prong> prongs_from(const std::vector<int>& fan_slots) const {
        const V ex(S(1), S(0)), wx(S(-1), S(0));
        std::vector<Prong> ps;
        for (int h : fan_slots) {
            V u = corner_start(h), w = corner_end(h);
            if (in_corner(u, w, ex)) ps.push_back({h, true});
            if (in_corner(u, w, wx)) ps.push_back({h, false});
        }
        auto it = std::find_if(ps.begin(), ps.end(), [](const Prong& p) { return p.right; });
        std::rotate(ps.begin(), it, ps.end());
        return ps;
    }

    int count_prongs(int v) const {
        int n = 0;
        for (auto& p : prongs(v)) n += p.right;
        return n;
    }

    // Index in prongs(v) of the prong with given corner and direction.
    int prong_index(int v, int corner, bool right) const {
        auto ps = prongs(v);
        for (size_t i = 0; i < ps.size(); ++i)
            if (ps[i].corner == corner && ps[i].right == right) return static_cast<int>(i);
        throw SurfaceError("corner holds no such prong");
    }

    // Corner at the origin of h0's vertex containing direction d, searching
    // counterclockwise from h0.
    int corner_containing(int h0, const V& d) const {
        int h = h0;
        do {
            if (in_corner(corner_start(h), corner_end(h), d)) return h;
            h = rot(h);
        } while (h != h0);
        throw SurfaceError("direction in no corner");
    }

    int genus() const {
        int chi = num_vertices() - num_slots() / 2 + num_triangles();
        return (2 - chi) / 2;
    }

    S area() const {
        S a(0);
        for (int t = 0; t < num_triangles(); ++t) a += cross(hol_[3 * t], hol_[3 * t + 1]);
        return a / S(2);
    }

    S triangle_cross(int t) const { return cross(hol_[3 * t], hol_[3 * t + 1]); }

    std::string stratum() const {
        std::vector<int> ords;
        int marked = 0;
        for (auto& s : sings_) {
            if (s.order > 0) ords.push_back(s.order);
            else ++marked;
        }
        std::sort(ords.rbegin(), ords.rend());
        std::string r = "H(";
        for (size_t i = 0; i < ords.size(); ++i) r += (i ? "," : "") + std::to_string(ords[i]);
        if (ords.empty()) r += "0";
        r += ")";
        if (marked && !ords.empty()) r += " with " + std::to_string(marked) + " marked point" + (marked > 1 ? "s" : "");
        return r;
    }

    // ---- validation
    void validate(bool assign_orders = false) {
        check_pairing();
        for (int t = 0; t < num_triangles(); ++t) {
            V s = hol_[3 * t] + hol_[3 * t + 1] + hol_[3 * t + 2];
            if (!vec_equal(s, V(S(0), S(0)))) throw SurfaceError("triangle " + std::to_string(t) + " does not close");
            if (sgn(triangle_cross(t)) <= 0)
                throw SurfaceError("triangle " + std::to_string(t) + " has non-positive area");
        }
        for (int h = 0; h < num_slots(); ++h)
            if (!vec_equal(hol_[h] + hol_[twin_[h]], V(S(0), S(0))))
                throw SurfaceError("glued slots " + std::to_string(h) + "," + std::to_string(twin_[h]) +
                                   " have mismatched holonomy");
        for (int h = 0; h < num_slots(); ++h)
            if (vert_[h] != vert_[rot(h)]) throw SurfaceError("vertex labels inconsistent with gluing");
        int total = 0;
        for (int v = 0; v < num_vertices(); ++v) {
            auto ps = prongs(v);
            for (size_t i = 0; i < ps.size(); ++i)
                if (ps[i].right != (i % 2 == 0)) throw SurfaceError("prongs do not alternate at " + sings_[v].name);
            int a = static_cast<int>(ps.size() / 2) - 1;
            if (a < 0) throw SurfaceError("vertex without prongs");
            if (assign_orders && sings_[v].order < 0) sings_[v].order = a;
            if (sings_[v].order != a)
                throw SurfaceError("label order " + std::to_string(sings_[v].order) + " at " + sings_[v].name +
                                   " but cone angle gives " + std::to_string(a));
            total += a;
        }
        if (total != 2 * genus() - 2) throw SurfaceError("orders violate Gauss-Bonnet");
    }

    // ---- transformations
    TriSurface apply(const Mat2<S>& g) const {
        if (sgn(g.det()) <= 0) throw SurfaceError("matrix must have positive determinant");
        TriSurface r(*this);
        for (auto& v : r.hol_) v = g * v;
        return r;
    }

    /// Flips the diagonal h of the quadrilateral formed by its two triangles.
    /// Tracked prongs are moved to their corner in the new triangulation.
    void flip_inplace(int h, std::vector<Prong>* tracked = nullptr) {
        int g = twin_[h];
        int t1 = tri(h), t2 = tri(g);
        if (t1 == t2) throw SurfaceError("edge bounds a single triangle");
        int n1 = next(h), p1 = prev(h), n2 = next(g), p2 = prev(g);
        V v = hol_[p1] + hol_[n2];  // C -> D
        if (sgn(cross(v, hol_[p2])) <= 0 || sgn(cross(-v, hol_[p1])) <= 0)
            throw SurfaceError("flip of slot " + std::to_string(h) + " on non-convex quadrilateral");
        int A = vert_[n2], B = vert_[n1], C = vert_[p1], D = vert_[p2];
        V hp1 = hol_[p1], hn1 = hol_[n1], hn2 = hol_[n2], hp2 = hol_[p2];
        int ext[4] = {n1, p1, n2, p2};
        int pos[4] = {3 * t1 + 2, 3 * t2 + 1, 3 * t2 + 2, 3 * t1 + 1};
        int part[4];
        for (int i = 0; i < 4; ++i) part[i] = twin_[ext[i]];
        auto newpos = [&](int s) {
            for (int i = 0; i < 4; ++i)
                if (ext[i] == s) return pos[i];
            return -1;
        };
        if (tracked) {
            for (auto& pr : *tracked) {
                int c = pr.corner;
                if (tri(c) != t1 && tri(c) != t2) continue;
                V d(S(pr.right ? 1 : -1), S(0));
                if (c == h || c == n2) pr.corner = 3 * t2 + 2;
                else if (c == n1 || c == g) pr.corner = 3 * t1 + 2;
                else if (c == p1) pr.corner = in_corner(hp1, v, d) ? 3 * t2 + 1 : 3 * t1 + 0;
                else if (c == p2) pr.corner = in_corner(hp2, -v, d) ? 3 * t1 + 1 : 3 * t2 + 0;
            }
        }
        hol_[3 * t1 + 0] = v;
        hol_[3 * t1 + 1] = hp2;
        hol_[3 * t1 + 2] = hn1;
        hol_[3 * t2 + 0] = -v;
        hol_[3 * t2 + 1] = hp1;
        hol_[3 * t2 + 2] = hn2;
        vert_[3 * t1 + 0] = C;
        vert_[3 * t1 + 1] = D;
        vert_[3 * t1 + 2] = B;
        vert_[3 * t2 + 0] = D;
        vert_[3 * t2 + 1] = C;
        vert_[3 * t2 + 2] = A;
        for (int i = 0; i < 4; ++i) {
            int np = newpos(part[i]);
            if (np >= 0) {
                twin_[pos[i]] = np;
            } else {
                twin_[pos[i]] = part[i];
                twin_[part[i]] = pos[i];
            }
        }
        twin_[3 * t1] = 3 * t2;
        twin_[3 * t2] = 3 * t1;
    }

    TriSurface flip(int h) const {
        TriSurface r(*this);
        r.flip_inplace(h);
        return r;
    }

    // Sign of the incircle test of the far vertex across h against the
    // triangle of h: +1 means the edge is not locally Delaunay.
    int incircle(int h) const {
        int g = twin_[h];
        V b = hol_[h], c = -hol_[prev(h)], d = hol_[next(g)];
        S bb = norm2(b), cc = norm2(c), dd = norm2(d);
        // lifted orientation of (b, c, d) is negative when d lies inside
        S det = -(b.x * (c.y * dd - cc * d.y) - b.y * (c.x * dd - cc * d.x) + bb * (c.x * d.y - c.y * d.x));
        if constexpr (is_exact_v<S>) {
            return det.sign();
        } else {
            double sc = std::sqrt(bb * cc * dd) * std::max({std::sqrt(bb), std::sqrt(cc), std::sqrt(dd)});
            double t = float_tol().rel * 100 * sc;
            return (det > t) - (det < -t);
        }
    }

    /// Flips to a Delaunay triangulation; returns the number of flips.
    int make_delaunay(std::vector<Prong>* tracked = nullptr, int max_flips = 1000000) {
        std::vector<int> stack;
        std::vector<char> queued(num_slots(), 0);
        for (int h = 0; h < num_slots(); ++h)
            if (h < twin_[h]) { stack.push_back(h); queued[h] = 1; }
        int flips = 0;
        while (!stack.empty()) {
            int h = stack.back();
            stack.pop_back();
            queued[h] = 0;
            int e = std::min(h, twin_[h]);
            if (e != h) continue;  // slot renumbered by an earlier flip
            if (incircle(h) <= 0) continue;
            if (++flips > max_flips) throw SurfaceError("Delaunay flip limit exceeded");
            int t1 = tri(h), t2 = tri(twin_[h]);
            flip_inplace(h, tracked);
            for (int t : {t1, t2})
                for (int k = 0; k < 3; ++k) {
                    int s = 3 * t + k;
                    int m = std::min(s, twin_[s]);
                    if (!queued[m]) { queued[m] = 1; stack.push_back(m); }
                }
        }
        return flips;
    }

    // Cocircular edges are interior to Delaunay cells.
    bool cell_edge(int h) const { return incircle(h) != 0; }

    // Next boundary slot of the Delaunay cell containing h.
    int next_in_cell(int h) const {
        int g = next(h);
        int guard = 0;
        while (!cell_edge(g)) {
            g = next(twin_[g]);
            if (++guard > num_slots()) throw SurfaceError("cell walk did not close");
        }
        return g;
    }

    TriSurface<double> to_float() const;

    template <class T>
    friend class TriSurface;

    // Low-level mutable access for surgery code.
    std::vector<int>& mut_twins() { return twin_; }
    std::vector<V>& mut_hols() { return hol_; }
    std::vector<int>& mut_verts() { return vert_; }
    std::vector<Singularity>& mut_sings() { return sings_; }
    void set_disc(long d) { disc_ = d; }

    std::vector<std::vector<int>> vertex_orbits() const {
        std::vector<char> seen(num_slots(), 0);
        std::vector<std::vector<int>> cls;
        for (int h0 = 0; h0 < num_slots(); ++h0) {
            if (seen[h0]) continue;
            std::vector<int> c;
            int h = h0;
            while (!seen[h]) {
                seen[h] = 1;
                c.push_back(h);
                h = rot(h);
            }
            cls.push_back(std::move(c));
        }
        return cls;
    }

private:
    void check_pairing() const {
        int n = num_slots();
        for (int h = 0; h < n; ++h) {
            int g = twin_[h];
            if (g < 0 || g >= n) throw SurfaceError("gluing references missing slot");
            if (g == h) throw SurfaceError("slot glued to itself");
            if (twin_[g] != h) throw SurfaceError("gluing is not a pairing");
        }
    }

    std::vector<int> twin_;
    std::vector<V> hol_;
    std::vector<int> vert_;
    std::vector<Singularity> sings_;
    long disc_ = 0;
};

template <class S>
TriSurface<double> TriSurface<S>::to_float() const {
    TriSurface<double> r;
    r.twin_ = twin_;
    r.vert_ = vert_;
    r.sings_ = sings_;
    r.disc_ = 0;
    r.hol_.reserve(hol_.size());
    for (auto& v : hol_) r.hol_.push_back(flatrel::to_double(v));
    return r;
}

using ExactSurface = TriSurface<QuadNum>;
using FloatSurface = TriSurface<double>;

template <class S>
TriSurface<S> apply_gl2(const Mat2<S>& g, const TriSurface<S>& M) { return M.apply(g); }

template <class S>
S area(const TriSurface<S>& M) { return M.area(); }

template <class S>
int count_prongs(const TriSurface<S>& M, int v) { return M.count_prongs(v); }

/// Rescales a float surface to area one.
inline FloatSurface normalize_area(const FloatSurface& M) {
    double s = 1.0 / std::sqrt(M.area());
    return M.apply(Mat2<double>(s, 0, 0, s));
}

}  // namespace flatrel
