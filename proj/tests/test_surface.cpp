#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flatrel/eigenform.hpp"
#include "flatrel/iso.hpp"
#include "flatrel/polygon.hpp"
#include "support.hpp"

using namespace flatrel;
using namespace testing_support;

namespace {

// twice the signed area of a closed polygon
template <class S>
S shoelace2(const std::vector<Vec2<S>>& pts) {
    S a(0);
    for (size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
    return a;
}

int slot_with_hol(const ExactSurface& M, long x, long y) {
    for (int h = 0; h < M.num_slots(); ++h)
        if (M.hol(h).x == Q(x) && M.hol(h).y == Q(y)) return h;
    return -1;
}

}  // namespace

TEST(Surface, SquareTorus) {
    auto M = square_torus();
    EXPECT_EQ(M.genus(), 1);
    ASSERT_EQ(M.num_vertices(), 1);
    EXPECT_EQ(M.sing(0).order, 0);
    EXPECT_EQ(M.area(), Q(1));
    EXPECT_EQ(count_prongs(M, 0), 1);
}

TEST(Surface, BuildFromExplicitTriangles) {
    // two triangles with edges (1,0), (0,1), (-1,-1) and their negatives
    using V = Vec2<Q>;
    std::vector<int> twin = {3, 4, 5, 0, 1, 2};
    std::vector<V> hol = {V(Q(1), Q(0)), V(Q(0), Q(1)), V(Q(-1), Q(-1)),
                          V(Q(-1), Q(0)), V(Q(0), Q(-1)), V(Q(1), Q(1))};
    auto M = ExactSurface::build(twin, hol, {}, 0);
    EXPECT_EQ(M.genus(), 1);
    EXPECT_EQ(M.area(), Q(1));
    EXPECT_EQ(M.stratum(), "H(0)");
}

TEST(Surface, DecagonStratum) {
    auto M = decagon();
    EXPECT_EQ(M.genus(), 2);
    EXPECT_EQ(M.stratum(), "H(1,1)");
    for (int v = 0; v < 2; ++v) {
        EXPECT_EQ(M.sing(v).order, 1);
        EXPECT_EQ(count_prongs(M, v), 2);
    }
}

TEST(Surface, DecagonAreaMatchesShoelace) {
    // the decagon fixture is the polygon with these ten side vectors
    Q phi = golden(), one = rat(1, 1, 5), zero = rat(0, 1, 5);
    using V = Vec2<Q>;
    std::vector<V> e = {V(one, zero), V(phi / Q(2), one), V((phi - one) / Q(2), phi), V((one - phi) / Q(2), phi),
                        V(-phi / Q(2), one)};
    for (int k = 0; k < 5; ++k) e.push_back(-e[k]);
    std::vector<V> pts{V(zero, zero)};
    for (int k = 0; k < 9; ++k) pts.push_back(pts.back() + e[k]);
    EXPECT_EQ(decagon().area(), shoelace2(pts) / Q(2));
}

TEST(Surface, RegularDecagonArea) {
    // circumradius one: ten isosceles triangles with apex angle 2 pi / 10
    double oracle = 5 * std::sin(2 * M_PI / 10);
    EXPECT_NEAR(regular_decagon_float().area(), oracle, 1e-12);
}

TEST(Surface, BrokenClosureRejected) {
    auto M = square_torus();
    auto hol = M.hols();
    hol[0].x += Q(Rational(1, 1000));
    EXPECT_THROW(ExactSurface::build(M.twins(), hol, {}, 0), SurfaceError);
}

TEST(Surface, AreaUnderSL2AndScaling) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> n(-4, 4);
    auto M = decagon();
    for (int i = 0; i < 30; ++i) {
        Q a = rat(n(rng), 3, 5), b = rat(n(rng), 3, 5), c = rat(n(rng), 3, 5);
        for (long num : {1L, 2L}) {
            for (long den : {1L, 2L}) {
                Q det = rat(num, den, 5);
                if (a.sign() == 0) continue;
                // d chosen so that ad - bc = det
                Q d = (det + b * c) / a;
                Mat2<Q> g(a, b, c, d);
                if (g.det().sign() <= 0) continue;
                EXPECT_EQ(apply_gl2(g, M).area(), det * M.area());
            }
        }
    }
}

TEST(Surface, GeodesicRoundTripFloat) {
    auto M = regular_decagon_float();
    auto W = M.apply(geodesic(1.7)).apply(geodesic(-1.7));
    for (int h = 0; h < M.num_slots(); ++h) {
        EXPECT_NEAR(W.hol(h).x, M.hol(h).x, 1e-12);
        EXPECT_NEAR(W.hol(h).y, M.hol(h).y, 1e-12);
    }
}

TEST(Surface, IdentityAndShearPreserveVerticals) {
    auto M = decagon();
    Q one = rat(1, 1, 5), zero = rat(0, 1, 5);
    EXPECT_EQ(M.apply(Mat2<Q>(one, zero, zero, one)).hols(), M.hols());
    auto U = M.apply(Mat2<Q>::horocycle(rat(7, 3, 5) + golden()));
    for (int h = 0; h < M.num_slots(); ++h) EXPECT_EQ(U.hol(h).y, M.hol(h).y);
}

TEST(Surface, ValidationFuzz) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, 1 << 30);
    for (int i = 0; i < 60; ++i) {
        auto M = random_eigenform(rng, i);
        // a valid shear is always accepted
        auto g = random_sl2(rng, M.disc());
        EXPECT_NO_THROW(ExactSurface::build(M.twins(), M.apply(g).hols(), {}, M.disc()));
        // a single corrupted slot is always rejected
        auto hol = M.hols();
        int h = pick(rng) % M.num_slots();
        if (i % 2) hol[h].x += rat(1, 97, M.disc());
        else hol[h].y -= rat(1, 89, M.disc());
        EXPECT_THROW(ExactSurface::build(M.twins(), hol, {}, M.disc()), SurfaceError);
    }
}

TEST(Surface, NonPositiveTriangleRejected) {
    auto M = square_torus();
    auto hol = M.hols();
    for (auto& v : hol) v = Vec2<Q>(v.y, v.x);  // reflection reverses orientation
    EXPECT_THROW(ExactSurface::build(M.twins(), hol, {}, 0), SurfaceError);
}

TEST(Surface, LabelOrderMismatchRejected) {
    auto M = decagon();
    EXPECT_THROW(ExactSurface::build(M.twins(), M.hols(), {{0, Singularity{"xi1", 2}}}, 5), SurfaceError);
}

TEST(Surface, GaussBonnetAndEuler) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 12; ++i) {
        auto M = random_eigenform(rng, i);
        int chi = M.num_vertices() - M.num_slots() / 2 + M.num_triangles();
        int total = 0;
        for (auto& s : M.sings()) total += s.order;
        EXPECT_EQ(total, -chi);
        EXPECT_EQ(2 * M.genus() - 2, total);
    }
    auto L = square_tiled({1, 0, 2}, {2, 1, 0});
    EXPECT_EQ(L.stratum(), "H(2)");
}

TEST(Surface, ProngsInvariantUnderShear) {
    std::vector<ExactSurface> Ms = {decagon(), three_cylinder(), square_tiled({1, 0, 2}, {2, 1, 0}), square_torus()};
    for (auto& M : Ms) {
        for (long s : {-7L, -1L, 2L, 13L}) {
            auto U = M.apply(Mat2<Q>::horocycle(rat(s, 5, M.disc())));
            for (int v = 0; v < M.num_vertices(); ++v) EXPECT_EQ(count_prongs(U, v), count_prongs(M, v));
        }
    }
}

TEST(Surface, CollapsedSurfaceHasSixPiCone) {
    auto F = collapse(decagon(), rat(-1, 1, 5));
    ASSERT_EQ(F.surface.num_vertices(), 1);
    EXPECT_EQ(count_prongs(F.surface, 0), 3);
}

TEST(Surface, FlipSquareTorusDiagonal) {
    auto M = square_torus();
    int h = slot_with_hol(M, -1, 1);
    if (h < 0) h = slot_with_hol(M, 1, -1);
    ASSERT_GE(h, 0);
    auto F = M.flip(h);
    EXPECT_GE(std::max(slot_with_hol(F, 1, 1), slot_with_hol(F, -1, -1)), 0);
    EXPECT_LT(std::max(slot_with_hol(F, 1, -1), slot_with_hol(F, -1, 1)), 0);
    EXPECT_EQ(F.area(), Q(1));
    EXPECT_TRUE(same_surface(M, F));
}

TEST(Surface, FlipThenFlipBack) {
    auto M = decagon();
    int tried = 0;
    for (int h = 0; h < M.num_slots(); ++h) {
        ExactSurface F;
        try {
            F = M.flip(h);
        } catch (const SurfaceError&) {
            continue;
        }
        ++tried;
        // the new diagonal sits in slot 3 t1 of the first triangle
        auto B = F.flip(3 * ExactSurface::tri(h));
        EXPECT_TRUE(same_surface(B, M));
        std::vector<std::string> a, b;
        for (auto& v : M.hols()) a.push_back(v.x.str() + "," + v.y.str());
        for (auto& v : B.hols()) b.push_back(v.x.str() + "," + v.y.str());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        EXPECT_EQ(a, b);
    }
    EXPECT_GT(tried, 0);
}

TEST(Surface, FlipPreservesSaddleConnections) {
    auto M = decagon();
    Q L = rat(3, 1, 5);
    auto before = exact_spectrum(M, L);
    int done = 0;
    for (int h = 0; h < M.num_slots() && done < 5; ++h) {
        try {
            auto F = M.flip(h);
            EXPECT_EQ(exact_spectrum(F, L), before) << "flip of slot " << h;
            ++done;
        } catch (const SurfaceError&) {
        }
    }
    EXPECT_GT(done, 0);
}

TEST(Surface, FlipRefusedExactlyOnNonConvexQuads) {
    // every torus quadrilateral is a parallelogram, so look at genus two
    int refused = 0;
    for (auto M : {decagon(), three_cylinder(), square_tiled({1, 0, 2}, {2, 1, 0})}) {
        for (int h = 0; h < M.num_slots(); ++h) {
            int t = M.twin(h);
            Vec2<Q> A(Q(0), Q(0)), B = M.hol(h);
            Vec2<Q> C = B + M.hol(ExactSurface::next(h)), D = M.hol(ExactSurface::next(t));
            std::vector<Vec2<Q>> quad = {A, D, B, C};
            bool convex = true;
            for (int k = 0; k < 4; ++k) {
                auto& p = quad[k];
                auto& q1 = quad[(k + 1) % 4];
                auto& q2 = quad[(k + 2) % 4];
                convex &= cross(q1 - p, q2 - q1).sign() > 0;
            }
            bool ok = true;
            try {
                M.flip(h);
            } catch (const SurfaceError&) {
                ok = false;
                ++refused;
            }
            EXPECT_EQ(ok, convex) << "slot " << h;
        }
    }
    EXPECT_GT(refused, 0);
}

TEST(Surface, DelaunayKeepsSurface) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 6; ++i) {
        auto M = random_eigenform(rng, i);
        auto D = M;
        D.make_delaunay();
        for (int h = 0; h < D.num_slots(); ++h) EXPECT_LE(D.incircle(h), 0);
        EXPECT_EQ(D.area(), M.area());
        EXPECT_EQ(exact_spectrum(D, rat(2, 1, M.disc())), exact_spectrum(M, rat(2, 1, M.disc())));
    }
}

TEST(Surface, FloatConversion) {
    auto M = decagon();
    auto F = M.to_float();
    EXPECT_NEAR(F.area(), M.area().to_double(), 1e-12);
    EXPECT_EQ(F.stratum(), "H(1,1)");
}
