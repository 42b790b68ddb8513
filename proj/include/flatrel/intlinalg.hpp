#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "exactnum.hpp"

namespace flatrel {

using QMatrix = std::vector<std::vector<Rational>>;
using ZMatrix = std::vector<std::vector<Integer>>;

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(QMatrix& A) {
    std::vector<int> piv;
    if (A.empty()) return piv;
    int m = static_cast<int>(A.size()), n = static_cast<int>(A[0].size());
    int r = 0;
    for (int c = 0; c < n && r < m; ++c) {
        int p = -1;
        for (int i = r; i < m; ++i)
            if (A[i][c] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(A[p], A[r]);
        Rational inv = 1 / A[r][c];
        for (int j = c; j < n; ++j) A[r][j] *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (int j = c; j < n; ++j) A[i][j] -= f * A[r][j];
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

inline int rank_q(QMatrix A) { return static_cast<int>(rref(A).size()); }

/// Basis of the rational null space {x : A x = 0}.
inline std::vector<std::vector<Rational>> nullspace_q(QMatrix A, int ncols) {
    for (auto& row : A)
        if (static_cast<int>(row.size()) != ncols) throw std::invalid_argument("ragged matrix");
    auto piv = rref(A);
    std::vector<char> is_piv(ncols, 0);
    for (int c : piv) is_piv[c] = 1;
    std::vector<std::vector<Rational>> basis;
    for (int f = 0; f < ncols; ++f) {
        if (is_piv[f]) continue;
        std::vector<Rational> v(ncols, Rational(0));
        v[f] = 1;
        for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -A[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Column echelon form H = A U with U unimodular.
struct ColumnEchelon {
    ZMatrix H, U;
    std::vector<std::pair<int, int>> pivots;  // (row, column)
};

inline ColumnEchelon column_echelon(const ZMatrix& A, int ncols) {
    int m = static_cast<int>(A.size());
    ColumnEchelon E;
    E.H = A;
    E.U.assign(ncols, std::vector<Integer>(ncols, Integer(0)));
    for (int i = 0; i < ncols; ++i) E.U[i][i] = 1;
    auto colop = [&](int dst, int src, const Integer& f) {  // col dst -= f * col src
        for (int i = 0; i < m; ++i) E.H[i][dst] -= f * E.H[i][src];
        for (int i = 0; i < ncols; ++i) E.U[i][dst] -= f * E.U[i][src];
    };
    auto colswap = [&](int a, int b) {
        for (int i = 0; i < m; ++i) std::swap(E.H[i][a], E.H[i][b]);
        for (int i = 0; i < ncols; ++i) std::swap(E.U[i][a], E.U[i][b]);
    };
    int c = 0;
    for (int r = 0; r < m && c < ncols; ++r) {
        while (true) {
            int best = -1;
            for (int j = c; j < ncols; ++j)
                if (E.H[r][j] != 0 && (best < 0 || abs(E.H[r][j]) < abs(E.H[r][best]))) best = j;
            if (best < 0) break;
            colswap(c, best);
            bool done = true;
            for (int j = c + 1; j < ncols; ++j) {
                if (E.H[r][j] == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), E.H[r][j].get_mpz_t(), E.H[r][c].get_mpz_t());
                colop(j, c, q);
                if (E.H[r][j] != 0) done = false;
            }
            if (done) break;
        }
        if (E.H[r][c] != 0) {
            E.pivots.push_back({r, c});
            ++c;
        }
    }
    return E;
}

/// Z-basis of {x in Z^n : A x = 0}.
inline std::vector<std::vector<Integer>> kernel_z(const ZMatrix& A, int ncols) {
    auto E = column_echelon(A, ncols);
    int r = static_cast<int>(E.pivots.size());
    std::vector<std::vector<Integer>> out;
    for (int j = r; j < ncols; ++j) {
        std::vector<Integer> v(ncols);
        for (int i = 0; i < ncols; ++i) v[i] = E.U[i][j];
        out.push_back(std::move(v));
    }
    return out;
}

/// An integer solution of A x = b, if one exists.
inline std::optional<std::vector<Integer>> solve_z(const ZMatrix& A, const std::vector<Integer>& b, int ncols) {
    auto E = column_echelon(A, ncols);
    int m = static_cast<int>(A.size());
    std::vector<Integer> y(ncols, Integer(0));
    size_t pi = 0;
    for (int r = 0; r < m; ++r) {
        Integer acc = b[r];
        int lim = static_cast<int>(pi);
        bool has_pivot = pi < E.pivots.size() && E.pivots[pi].first == r;
        for (int j = 0; j < lim; ++j) acc -= E.H[r][E.pivots[j].second] * y[E.pivots[j].second];
        if (has_pivot) {
            int c = E.pivots[pi].second;
            if (acc % E.H[r][c] != 0) return std::nullopt;
            y[c] = acc / E.H[r][c];
            ++pi;
        } else if (acc != 0) {
            return std::nullopt;
        }
    }
    std::vector<Integer> x(ncols, Integer(0));
    for (int i = 0; i < ncols; ++i)
        for (int j = 0; j < ncols; ++j) x[i] += E.U[i][j] * y[j];
    return x;
}

/// Clears denominators row by row.
inline ZMatrix to_integer_rows(const QMatrix& A) {
    ZMatrix Z;
    for (auto& row : A) {
        Integer l = 1;
        for (auto& q : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
        std::vector<Integer> zr;
        for (auto& q : row) zr.push_back(Integer(q * l));
        Z.push_back(std::move(zr));
    }
    return Z;
}

}  // namespace flatrel
