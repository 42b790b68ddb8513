#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flatrel/dynamics.hpp"
#include "flatrel/rel.hpp"
#include "support.hpp"

using namespace flatrel;
using namespace testing_support;

namespace {

// total height of the horizontal cylinders; u_s does not change it
double horizontal_height(const FloatSurface& M) {
    auto cr = horizontal_cylinders(M);
    double h = 0;
    for (auto& c : cr.cylinders) h += c.height;
    return h;
}

// smooth weighted count of saddle connections shorter than 1.5
double smooth_count(const FloatSurface& M) {
    const double L = 1.5;
    ScanOptions opt;
    opt.keep_paths = false;
    double s = 0;
    for (auto& sc : saddle_connections(M, L, opt)) {
        double u = 1 - norm2(sc.hol) / (L * L);
        if (u > 0) s += u * u * u;
    }
    return s;
}

FloatSurface unit_decagon() { return normalize_area(decagon().to_float()); }

}  // namespace

TEST(Birkhoff, ConstantObservable) {
    auto M = unit_decagon();
    EXPECT_EQ(birkhoff_average(M, [](const FloatSurface&) { return 1.0; }, 7.3, 50), 1.0);
}

TEST(Birkhoff, ShearInvariantObservableIsConstant) {
    auto M = unit_decagon();
    double h0 = horizontal_height(M);
    EXPECT_NEAR(birkhoff_average(M, horizontal_height, 3.0, 30), h0, 1e-9);
}

TEST(Birkhoff, PeriodicHorocycleOnSquareTorus) {
    // u_1 fixes the square torus, so one period and ten periods agree
    auto M = square_torus().to_float();
    Observable phi = [](const FloatSurface& W) { return max_circumradius(W); };
    double one = birkhoff_average(M, phi, 1.0, 64);
    double ten = birkhoff_average(M, phi, 10.0, 640);
    EXPECT_NEAR(one, ten, 1e-9);
}

TEST(Birkhoff, ReportsFailingSample) {
    auto M = square_torus().to_float();
    int calls = 0;
    Observable bad = [&](const FloatSurface&) { return ++calls == 4 ? std::nan("") : 1.0; };
    try {
        birkhoff_average(M, bad, 1.0, 10);
        FAIL() << "expected ObservableError";
    } catch (const ObservableError& e) {
        EXPECT_EQ(e.index, 3);
    }
    EXPECT_THROW(birkhoff_average(M, bad, 0.0, 10), std::invalid_argument);
}

TEST(OrbitSample, TimesMustIncrease) {
    auto M = square_torus().to_float();
    std::vector<std::pair<std::string, Observable>> obs = {{"systole", [](const FloatSurface& W) { return systole(W); }}};
    EXPECT_THROW(sample_orbit(M, Flow::Geodesic, {0.0, 1.0, 1.0}, obs), std::invalid_argument);
    auto S = sample_orbit(M, Flow::Geodesic, {0.0, 0.5, 1.0}, obs);
    // the horizontal side shrinks by e^{-t/2}
    EXPECT_NEAR(S.values[0][2], std::exp(-0.5), 1e-12);
}

TEST(TimeChange, Identity) {
    auto tc = time_change(Mat2<double>(1, 0, 0, 1), 2.5);
    EXPECT_DOUBLE_EQ(tc.s, 2.5);
    EXPECT_DOUBLE_EQ(tc.residual.a, 1);
    EXPECT_DOUBLE_EQ(tc.residual.b, 0);
    EXPECT_DOUBLE_EQ(tc.residual.c, 0);
    EXPECT_DOUBLE_EQ(tc.residual.d, 1);
}

TEST(TimeChange, GeodesicScalesTime) {
    for (double tau : {-2.0, 0.3, 1.7})
        for (double t : {-3.0, 0.5, 4.0}) EXPECT_NEAR(time_change(geodesic(tau), t).s, std::exp(tau) * t, 1e-12 * std::exp(std::fabs(tau)) * 4);
}

TEST(TimeChange, ResidualIsLowerTriangular) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> small(-0.3, 0.3), tt(-2, 2);
    for (int i = 0; i < 2000; ++i) {
        double a = 1 + small(rng), b = small(rng), c = small(rng);
        double d = (1 + b * c) / a;
        Mat2<double> g(a, b, c, d);
        double t = tt(rng);
        if (std::fabs(d - c * t) < 0.05) continue;
        auto tc = time_change(g, t);
        // u_s g u_{-t} = (1/(d - c t), 0; c, d - c t)
        EXPECT_LT(std::fabs(tc.residual.b), 1e-12);
        EXPECT_NEAR(tc.residual.a, 1 / (d - c * t), 1e-12 * (1 + std::fabs(tc.s)));
        EXPECT_NEAR(tc.residual.c, c, 1e-12);
        EXPECT_NEAR(tc.residual.d, d - c * t, 1e-12);
    }
}

TEST(TimeChange, Pole) {
    // d = c t
    EXPECT_THROW(time_change(Mat2<double>(1, 0, 0.5, 1), 2.0), std::domain_error);
}

TEST(MinimalSet, ThreeCylinderIsTwoDimensional) {
    auto R = minimal_set(three_cylinder());
    ASSERT_EQ(R.kind, MinimalSet::Minimal);
    EXPECT_EQ(R.cylinders, 3);
    EXPECT_EQ(R.moduli_rank, 2);
    EXPECT_EQ(R.dimension, 2);
}

TEST(MinimalSet, TwoCylinderTypeBIsPeriodic) {
    auto M = connect_sum_tori(prototype_pair({1, 1, 1}), rat(1, 2, 5));
    ASSERT_EQ(horizontal_diagram(M).type, "B");
    auto R = minimal_set(M);
    ASSERT_EQ(R.kind, MinimalSet::Minimal);
    EXPECT_EQ(R.cylinders, 2);
    EXPECT_EQ(R.dimension, 1);
    // the orbit returns after the least common multiple of the inverse moduli
    auto cr = horizontal_cylinders(M);
    auto m = moduli(cr.cylinders);
    ASSERT_EQ(m.size(), 2u);
    Q ratio = m[0] / m[1];
    EXPECT_TRUE(ratio.is_rational());
}

TEST(MinimalSet, DecagonIsPeriodic) {
    auto R = minimal_set(decagon());
    ASSERT_EQ(R.kind, MinimalSet::Minimal);
    EXPECT_EQ(R.dimension, 1);
}

TEST(MinimalSet, NoHorizontalCylinder) {
    EXPECT_EQ(minimal_set(irrational_torus()).kind, MinimalSet::NotCompactClosure);
    // diagram 5 leaves four separatrices open
    Q s = Q(Rational(-1), Rational(1, 2), 8);
    Q one = rat(1, 1, 8), zero = rat(0, 1, 8);
    auto M = connect_sum_tori(prototype_pair({0, 1, 2}).apply(Mat2<Q>(one, zero, s, one)), rat(1, 2, 8));
    EXPECT_EQ(minimal_set(M).kind, MinimalSet::Undetermined);
}

TEST(Counting, SquareTorusMatchesPrimitiveVectors) {
    auto C = count_growth(square_torus(), 20.0, 10);
    for (size_t i = 0; i < C.radii.size(); ++i) {
        EXPECT_EQ(C.counts[i], primitive_lattice_count(C.radii[i])) << C.radii[i];
        if (i) EXPECT_GE(C.counts[i], C.counts[i - 1]);
        EXPECT_DOUBLE_EQ(C.estimates[i], C.counts[i] / (C.radii[i] * C.radii[i]));
    }
    // primitive vectors have density 6 / pi^2 among lattice points
    EXPECT_NEAR(C.fit, 6 / M_PI, 0.05 * 6 / M_PI);
    EXPECT_GE(C.spread, 0);
}

TEST(Counting, PrimitiveOracleSmallValues) {
    EXPECT_EQ(primitive_lattice_count(0.5), 0);
    EXPECT_EQ(primitive_lattice_count(1.0), 4);
    EXPECT_EQ(primitive_lattice_count(1.5), 8);
    EXPECT_EQ(primitive_lattice_count(std::sqrt(5.0)), 16);
}

TEST(Counting, DecagonQuadraticGrowth) {
    auto C = count_growth(unit_decagon(), 12.0, 2);
    double ratio = static_cast<double>(C.counts[1]) / C.counts[0];
    EXPECT_GE(ratio, 3.4);
    EXPECT_LE(ratio, 4.6);
}

TEST(Counting, FloatAndExactAgree) {
    auto M = decagon();
    auto E = count_growth(M, 4.0, 8);
    auto F = count_growth(M.to_float(), 4.0, 8);
    EXPECT_EQ(E.counts, F.counts);
    EXPECT_THROW(count_growth(M, 0.0, 4), std::invalid_argument);
}

TEST(CircleAverage, ConstantAndZeroTime) {
    auto M = unit_decagon();
    EXPECT_NEAR(circle_average(M, [](const FloatSurface&) { return 1.0; }, 2.0, 37), 1.0, 1e-15);
    // at t = 0 the systole is rotation invariant
    double sys = systole(M);
    EXPECT_NEAR(circle_average(M, [](const FloatSurface& W) { return systole(W); }, 0.0, 16), sys, 1e-12);
    EXPECT_THROW(circle_average(M, smooth_count, -1.0, 8), std::invalid_argument);
}

TEST(CircleAverage, RefinementConverges) {
    auto M = unit_decagon();
    double a = circle_average(M, smooth_count, 1.0, 1024, 4);
    double b = circle_average(M, smooth_count, 1.0, 2048, 4);
    EXPECT_LT(std::fabs(a - b), 1e-6);
}

TEST(CircleAverage, ThreadsDoNotChangeResult) {
    auto M = unit_decagon();
    EXPECT_EQ(circle_average(M, smooth_count, 1.5, 64, 1), circle_average(M, smooth_count, 1.5, 64, 4));
}

TEST(Nondivergence, HorizontalSystoleIsConstant) {
    // the shortest saddle of the horizontal decagon is horizontal, so u never shortens it
    auto M = unit_decagon();
    auto P = nondivergence_profile(M, 100.0, {systole(M) - 1e-9, systole(M) + 1e-9}, 500);
    EXPECT_EQ(P.fraction[0], 0.0);
    EXPECT_EQ(P.fraction[1], 1.0);
}

TEST(Nondivergence, Profile) {
    auto M = unit_decagon().apply(rotation(0.3));
    std::vector<double> eps = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 10.0};
    auto P = nondivergence_profile(M, 1000.0, eps, 4000);
    EXPECT_EQ(P.fraction.front(), 0.0);
    EXPECT_EQ(P.fraction.back(), 1.0);
    for (size_t i = 1; i < eps.size(); ++i) EXPECT_GE(P.fraction[i], P.fraction[i - 1]);
    EXPECT_LT(P.max_systole, 10.0);
    EXPECT_GT(loglog_slope(P), 0);
}

TEST(Orbits, HorocycleCommutesWithRel) {
    auto M = decagon().to_float();
    double z = 0.3;
    for (double s : {-1.25, 0.4, 2.0}) {
        auto u = Mat2<double>::horocycle(s);
        auto A = rel_apply(M, z).apply(u);
        auto B = rel_apply(M.apply(u), z);
        EXPECT_TRUE(spectra_close(spectrum(A, 2.5), spectrum(B, 2.5), 1e-9)) << s;
    }
}

TEST(Battery, RetriangulationInvariant) {
    auto M = unit_decagon();
    auto N = M.apply(Mat2<double>::horocycle(0.37));
    N.make_delaunay();
    auto a = battery(M.apply(Mat2<double>::horocycle(0.37)));
    auto b = battery(N);
    for (int k = 0; k < kBatterySize; ++k) EXPECT_NEAR(a[k], b[k], 1e-9) << battery_names()[k];
}

TEST(Battery, EnsembleIsSeeded) {
    auto M = unit_decagon();
    auto A = circle_ensemble(M, 1.0, 12, 5);
    auto B = circle_ensemble(M, 1.0, 12, 5, 3);
    for (int k = 0; k < kBatterySize; ++k) {
        EXPECT_EQ(A.mean[k], B.mean[k]);
        EXPECT_EQ(A.se[k], B.se[k]);
    }
}
