#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "flatrel/eigenform.hpp"
#include "flatrel/scan.hpp"

namespace testing_support {

using namespace flatrel;

using Q = QuadNum;

inline Q rat(long p, long q = 1, long disc = 0) { return Q(Rational(p, q)).with_disc(disc); }

/// Saddle connections up to length L as (hol, from name, to name), sorted.
template <class S>
std::vector<std::tuple<Vec2<double>, std::string, std::string>> spectrum(const TriSurface<S>& M, const S& L) {
    auto sads = saddle_connections(M, L);
    std::vector<std::tuple<Vec2<double>, std::string, std::string>> out;
    for (auto& s : sads) out.emplace_back(to_double(s.hol), M.sing(s.from).name, M.sing(s.to).name);
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) {
        auto& va = std::get<0>(a);
        auto& vb = std::get<0>(b);
        if (std::fabs(va.x - vb.x) > 1e-9) return va.x < vb.x;
        if (std::fabs(va.y - vb.y) > 1e-9) return va.y < vb.y;
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });
    return out;
}

/// Exact holonomies with endpoint names, for exact comparisons.
inline std::vector<std::tuple<std::string, std::string, std::string, std::string>> exact_spectrum(
    const ExactSurface& M, const Q& L) {
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> out;
    for (auto& s : saddle_connections(M, L))
        out.emplace_back(s.hol.x.str(), s.hol.y.str(), M.sing(s.from).name, M.sing(s.to).name);
    std::sort(out.begin(), out.end());
    return out;
}

template <class A, class B>
bool spectra_close(const A& a, const B& b, double tol) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        auto& va = std::get<0>(a[i]);
        auto& vb = std::get<0>(b[i]);
        if (std::fabs(va.x - vb.x) > tol || std::fabs(va.y - vb.y) > tol) return false;
        if (std::get<1>(a[i]) != std::get<1>(b[i]) || std::get<2>(a[i]) != std::get<2>(b[i])) return false;
    }
    return true;
}

/// Random element of SL(2, Q): a product of small rational shears.
inline Mat2<Q> random_sl2(std::mt19937_64& rng, long disc) {
    std::uniform_int_distribution<long> num(-3, 3), den(2, 5);
    Q one = rat(1, 1, disc), zero = rat(0, 1, disc);
    Q s = rat(num(rng), den(rng), disc), c = rat(num(rng), den(rng), disc);
    Mat2<Q> u(one, s, zero, one), l(one, zero, c, one);
    return u * l;
}

/// Base eigenforms in H(1,1): the decagon, prototype connected sums and
/// three-cylinder surfaces.
inline ExactSurface base_eigenform(int k) {
    switch (k % 6) {
        case 0: return decagon();
        case 1: return connect_sum_tori(prototype_pair({1, 1, 1}), rat(1, 2, 5));
        case 2: return connect_sum_tori(prototype_pair({0, 1, 2}), rat(1, 3, 8));
        case 3: return connect_sum_tori(prototype_pair({1, 1, 2}), rat(-1, 4, 9));
        case 4: return three_cylinder();
        default: return three_cylinder(Rational(1, 3), Rational(1, 5));
    }
}

/// A randomized eigenform: a base surface moved by a random SL(2, Q) element.
inline ExactSurface random_eigenform(std::mt19937_64& rng, int k) {
    ExactSurface M = base_eigenform(k);
    return M.apply(random_sl2(rng, M.disc()));
}

/// True if some horizontal loop turns through exactly pi on one side at its
/// zero (incoming prong next to the outgoing one), so it bounds a cylinder.
inline bool has_loop_cylinder(const ExactSurface& M, const HorizontalScan<Q>& hs) {
    for (auto& sc : hs.saddles) {
        if (sc.from != sc.to) continue;
        int n = 2 * (M.sing(sc.from).order + 1);
        int d = ((sc.prong_in - sc.prong_out) % n + n) % n;
        if (d == 1 || d == n - 1) return true;
    }
    return false;
}

/// Genus-2 connected sum of two unrelated tori with perturbed periods in
/// Q(sqrt 5); generically not an eigenform.
inline ExactSurface generic_genus2(std::mt19937_64& rng) {
    std::uniform_int_distribution<long> n(1, 40);
    auto r = [&] { return rat(n(rng), 41, 5); };
    Q s5(0, 1, 5), one = rat(1, 1, 5), zero = rat(0, 1, 5);
    TorusPair<Q> tp;
    tp.disc = 5;
    tp.L1 = {{one, zero}, {r(), one + r() * s5}};
    tp.L2 = {{one + r() * s5, zero}, {r(), one + r()}};
    return connect_sum_tori(tp, rat(1, 4, 5));
}

}  // namespace testing_support
