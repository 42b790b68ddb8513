#pragma once

#include <deque>
#include <vector>

#include "intlinalg.hpp"
#include "surface.hpp"

namespace flatrel {

/// Integer 1-chain on the edges; edge e is stored in the orientation of its
/// smaller slot.
struct Chain {
    std::vector<int> coef;  // indexed by slot, only canonical slots used

    explicit Chain(int nslots = 0) : coef(nslots, 0) {}
    template <class S>
    void add_slot(const TriSurface<S>& M, int h, int k = 1) {
        int g = M.twin(h);
        if (h < g) coef[h] += k;
        else coef[g] -= k;
    }
    template <class S>
    int outward(const TriSurface<S>& M, int h) const {  // coefficient in the direction of h
        int g = M.twin(h);
        return h < g ? coef[h] : -coef[g];
    }
    Chain& operator+=(const Chain& o) {
        for (size_t i = 0; i < coef.size(); ++i) coef[i] += o.coef[i];
        return *this;
    }
    Chain& operator-=(const Chain& o) {
        for (size_t i = 0; i < coef.size(); ++i) coef[i] -= o.coef[i];
        return *this;
    }
};

template <class S>
Chain path_chain(const TriSurface<S>& M, const std::vector<int>& path) {
    Chain c(M.num_slots());
    for (int h : path) c.add_slot(M, h);
    return c;
}

template <class S>
Vec2<S> chain_hol(const TriSurface<S>& M, const Chain& c) {
    Vec2<S> r(S(0), S(0));
    for (int h = 0; h < M.num_slots(); ++h)
        if (c.coef[h] != 0) r += S(c.coef[h]) * M.hol(h);
    return r;
}

/// Algebraic intersection alpha . beta for a chain alpha and a closed slot
/// path beta, via a left push-off of beta.
template <class S>
int intersection(const TriSurface<S>& M, const Chain& alpha, const std::vector<int>& beta) {
    int n = static_cast<int>(beta.size());
    int total = 0;
    for (int i = 0; i < n; ++i) {
        int in = beta[i], out = beta[(i + 1) % n];
        int back = M.twin(in);
        for (int s = M.rot(out); s != back; s = M.rot(s)) total -= alpha.outward(M, s);
    }
    return total;
}

/// Tree-cotree homology data for a closed triangulated surface.
template <class S>
struct Homology {
    std::vector<std::vector<int>> cycles;  // closed slot paths, a basis of H1(S; Z)
    std::vector<int> root_path_slot;       // slot entering each vertex in the spanning tree, -1 at root
    std::vector<std::vector<int>> J;       // intersection matrix cycles[i] . cycles[j]
    int root = 0;

    static Homology compute(const TriSurface<S>& M) {
        Homology H;
        int nv = M.num_vertices(), ns = M.num_slots(), nt = M.num_triangles();
        H.root_path_slot.assign(nv, -1);
        std::vector<char> seen(nv, 0), in_tree(ns, 0);
        std::deque<int> q{0};
        seen[0] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int h = 0; h < ns; ++h) {
                if (M.origin(h) != v) continue;
                int w = M.target(h);
                if (seen[w]) continue;
                seen[w] = 1;
                H.root_path_slot[w] = h;
                in_tree[h] = in_tree[M.twin(h)] = 1;
                q.push_back(w);
            }
        }
        // dual tree over triangles avoiding primal tree edges
        std::vector<char> tseen(nt, 0), in_cotree(ns, 0);
        std::deque<int> tq{0};
        tseen[0] = 1;
        while (!tq.empty()) {
            int t = tq.front();
            tq.pop_front();
            for (int k = 0; k < 3; ++k) {
                int h = 3 * t + k;
                if (in_tree[h]) continue;
                int u = TriSurface<S>::tri(M.twin(h));
                if (tseen[u]) continue;
                tseen[u] = 1;
                in_cotree[h] = in_cotree[M.twin(h)] = 1;
                tq.push_back(u);
            }
        }
        for (int h = 0; h < ns; ++h) {
            if (in_tree[h] || in_cotree[h] || h > M.twin(h)) continue;
            std::vector<int> cyc = H.path_between(M, M.target(h), M.origin(h));
            cyc.push_back(h);
            H.cycles.push_back(std::move(cyc));
        }
        int g2 = static_cast<int>(H.cycles.size());
        H.J.assign(g2, std::vector<int>(g2, 0));
        for (int i = 0; i < g2; ++i) {
            Chain ci = path_chain(M, H.cycles[i]);
            for (int j = 0; j < g2; ++j) H.J[i][j] = intersection(M, ci, H.cycles[j]);
        }
        return H;
    }

    std::vector<int> path_from_root(const TriSurface<S>& M, int v) const {
        std::vector<int> p;
        while (root_path_slot[v] >= 0) {
            int h = root_path_slot[v];
            p.push_back(h);
            v = M.origin(h);
        }
        return {p.rbegin(), p.rend()};
    }

    // Tree path from u to v as slots.
    std::vector<int> path_between(const TriSurface<S>& M, int u, int v) const {
        auto pu = path_from_root(M, u), pv = path_from_root(M, v);
        size_t k = 0;
        while (k < pu.size() && k < pv.size() && pu[k] == pv[k]) ++k;
        std::vector<int> out;
        for (size_t i = pu.size(); i > k; --i) out.push_back(M.twin(pu[i - 1]));
        for (size_t i = k; i < pv.size(); ++i) out.push_back(pv[i]);
        return out;
    }

    std::vector<Vec2<S>> periods(const TriSurface<S>& M) const {
        std::vector<Vec2<S>> p;
        for (auto& c : cycles) p.push_back(chain_hol(M, path_chain(M, c)));
        return p;
    }

    // Intersection numbers of a closed chain with each basis cycle.
    std::vector<int> pairing(const TriSurface<S>& M, const Chain& c) const {
        std::vector<int> r;
        for (auto& cyc : cycles) r.push_back(intersection(M, c, cyc));
        return r;
    }

    // Coordinates of a closed chain in the cycle basis.
    std::vector<Rational> coordinates(const TriSurface<S>& M, const Chain& c) const {
        // c . gamma_j = sum_i x_i (gamma_i . gamma_j)
        auto p = pairing(M, c);
        int n = static_cast<int>(cycles.size());
        QMatrix A(n, std::vector<Rational>(n + 1));
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) A[j][i] = J[i][j];
            A[j][n] = p[j];
        }
        rref(A);
        std::vector<Rational> x(n);
        for (int i = 0; i < n; ++i) x[i] = A[i][n];
        return x;
    }
};

}  // namespace flatrel
