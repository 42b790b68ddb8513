#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "homology.hpp"
#include "scan.hpp"
#include "surface.hpp"

namespace flatrel {

using Observable = std::function<double(const FloatSurface&)>;

/// An observable returned a non-finite value at sample `index`.
struct ObservableError : std::runtime_error {
    int index;
    ObservableError(int i, const std::string& what)
        : std::runtime_error(what + " at sample " + std::to_string(i)), index(i) {}
};

enum class Flow { Horocycle, Geodesic, Circle };

inline Mat2<double> flow_matrix(Flow f, double s) {
    switch (f) {
        case Flow::Horocycle: return Mat2<double>::horocycle(s);
        case Flow::Geodesic: return geodesic(s);
        case Flow::Circle: return rotation(s);
    }
    return {};
}

/// Length of the shortest saddle connection. The shortest saddle connection
/// is a Delaunay edge, so the minimum edge length of a Delaunay
/// triangulation is the systole.
inline double systole(FloatSurface M) {
    M.make_delaunay();
    double best = std::numeric_limits<double>::infinity();
    for (int h = 0; h < M.num_slots(); ++h) best = std::min(best, std::sqrt(norm2(M.hol(h))));
    return best;
}

/// Largest circumradius over the triangles of a Delaunay triangulation.
inline double max_circumradius(FloatSurface M) {
    M.make_delaunay();
    double best = 0;
    for (int t = 0; t < M.num_triangles(); ++t) {
        Vec2<double> a = M.hol(3 * t), b = -M.hol(3 * t + 2);
        double la = norm2(a), lb = norm2(b), lc = norm2(b - a);
        double area2 = std::fabs(cross(a, b));
        best = std::max(best, std::sqrt(la * lb * lc) / (2 * area2));
    }
    return best;
}

struct OrbitSample {
    Flow flow = Flow::Horocycle;
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[k][i]: observable k at times[i]
};

namespace detail {

// Surfaces f(t_i) M along the grid, reusing each Delaunay triangulation for the next
template <class F>
void along_orbit(const FloatSurface& M, Flow flow, const std::vector<double>& times, F&& visit) {
    FloatSurface W = M.apply(flow_matrix(flow, times.empty() ? 0.0 : times[0]));
    W.make_delaunay();
    for (size_t i = 0; i < times.size(); ++i) {
        if (i > 0) {
            W = W.apply(flow_matrix(flow, times[i] - times[i - 1]));
            W.make_delaunay();
        }
        visit(static_cast<int>(i), W);
    }
}

inline void check_times(const std::vector<double>& times) {
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample times must increase strictly");
}

}  // namespace detail

inline OrbitSample sample_orbit(const FloatSurface& M, Flow flow, const std::vector<double>& times,
                                const std::vector<std::pair<std::string, Observable>>& obs) {
    detail::check_times(times);
    OrbitSample R;
    R.flow = flow;
    R.times = times;
    for (auto& o : obs) R.names.push_back(o.first);
    R.values.assign(obs.size(), std::vector<double>(times.size()));
    detail::along_orbit(M, flow, times, [&](int i, const FloatSurface& W) {
        for (size_t k = 0; k < obs.size(); ++k) {
            double v = obs[k].second(W);
            if (!std::isfinite(v)) throw ObservableError(i, "observable " + obs[k].first + " not finite");
            R.values[k][i] = v;
        }
    });
    return R;
}

/// Trapezoidal estimate of (1/T) int_0^T phi(u_s M) ds on `steps` intervals.
inline double birkhoff_average(const FloatSurface& M, const Observable& phi, double T, int steps) {
    if (!(T > 0)) throw std::invalid_argument("T must be positive");
    if (steps < 1) throw std::invalid_argument("steps must be positive");
    std::vector<double> times(steps + 1);
    for (int i = 0; i <= steps; ++i) times[i] = T * i / steps;
    double sum = 0;
    detail::along_orbit(M, Flow::Horocycle, times, [&](int i, const FloatSurface& W) {
        double v = phi(W);
        if (!std::isfinite(v)) throw ObservableError(i, "observable not finite");
        sum += (i == 0 || i == steps) ? v / 2 : v;
    });
    return sum / steps;
}

struct TimeChange {
    double s;
    Mat2<double> residual;  // u_s g u_{-t}
};

/// s with u_s g u_{-t} lower triangular.
inline TimeChange time_change(const Mat2<double>& g, double t) {
    double den = g.d - g.c * t;
    double scale = std::fabs(g.d) + std::fabs(g.c * t);
    if (std::fabs(den) <= 1e-14 * std::max(scale, 1.0)) throw std::domain_error("time change has a pole at d = c t");
    double s = (g.a * t - g.b) / den;
    Mat2<double> r = Mat2<double>::horocycle(s) * g * Mat2<double>::horocycle(-t);
    // the upper-right entry is b - a t + s (d - c t); evaluate it with fused steps
    r.b = std::fma(s, den, g.b - g.a * t);
    return {s, r};
}

struct MinimalSet {
    enum Kind { Minimal, NotCompactClosure, Undetermined } kind = Undetermined;
    int dimension = 0;
    int moduli_rank = 0;
    int cylinders = 0;
    std::string note;
};

/// Rank over Q of the y-period map H_1(M; Z) -> R.
inline int y_period_rank(const ExactSurface& M) {
    auto H = Homology<QuadNum>::compute(M);
    QMatrix A;
    for (auto& p : H.periods(M)) {
        if (p.y.is_rational()) A.push_back({p.y.rational_value(), Rational(0)});
        else A.push_back({p.y.a(), p.y.b()});
    }
    // rank of the map = rank of the 2g x 2 matrix; injective iff it equals 2g
    QMatrix At(2, std::vector<Rational>(A.size()));
    for (size_t i = 0; i < A.size(); ++i) { At[0][i] = A[i][0]; At[1][i] = A[i][1]; }
    return static_cast<int>(A.size()) - static_cast<int>(nullspace_q(At, static_cast<int>(A.size())).size());
}

/// Classifies the closure of the horocycle orbit of M.
inline MinimalSet minimal_set(const ExactSurface& M, std::optional<QuadNum> budget = std::nullopt) {
    MinimalSet R;
    int n = 2 * M.genus();
    if (y_period_rank(M) == n) {
        R.kind = MinimalSet::NotCompactClosure;
        R.note = "no nonzero class has zero y-period, so no horizontal cylinder exists";
        return R;
    }
    auto cr = horizontal_cylinders(M, budget);
    if (cr.verdict != CylinderResult<QuadNum>::Periodic) {
        R.note = cr.note;
        return R;
    }
    R.kind = MinimalSet::Minimal;
    R.cylinders = static_cast<int>(cr.cylinders.size());
    R.moduli_rank = moduli_rational_rank(moduli(cr.cylinders));
    R.dimension = R.moduli_rank;
    return R;
}

// ---------------------------------------------------------------------------
// Counting

/// Number of primitive integer vectors of length at most T.
inline long primitive_lattice_count(double T) {
    long r = static_cast<long>(std::floor(T));
    long n = 0;
    for (long a = -r; a <= r; ++a)
        for (long b = -r; b <= r; ++b) {
            if (a == 0 && b == 0) continue;
            if (static_cast<double>(a * a + b * b) > T * T) continue;
            if (std::gcd(std::labs(a), std::labs(b)) == 1) ++n;
        }
    return n;
}

struct CountingCurve {
    std::vector<double> radii;
    std::vector<long> counts;     // oriented saddle connections of length <= radius
    std::vector<double> estimates;  // count / radius^2
    double fit = 0;               // least-squares C in N = C T^2 over the top half
    double spread = 0;            // bootstrap standard deviation of the fit
};

template <class S>
CountingCurve count_growth(const TriSurface<S>& M, double T_max, int samples, int threads = 1,
                           std::uint64_t seed = 1) {
    if (!(T_max > 0) || samples < 1) throw std::invalid_argument("need T_max > 0 and samples >= 1");
    ScanOptions opt;
    opt.threads = threads;
    opt.keep_paths = false;
    std::vector<double> len;
    if constexpr (is_exact_v<S>) {
        Rational q = parse_rational(std::to_string(T_max));
        for (auto& sc : saddle_connections(M, S(q), opt)) len.push_back(std::sqrt(to_double(norm2(sc.hol))));
    } else {
        for (auto& sc : saddle_connections(M, T_max, opt)) len.push_back(sc.length());
    }
    std::sort(len.begin(), len.end());
    CountingCurve C;
    for (int i = 1; i <= samples; ++i) {
        double T = T_max * i / samples;
        long n = std::upper_bound(len.begin(), len.end(), T * (1 + 1e-12)) - len.begin();
        C.radii.push_back(T);
        C.counts.push_back(n);
        C.estimates.push_back(n / (T * T));
    }
    std::vector<int> window;
    for (int i = 0; i < samples; ++i)
        if (C.radii[i] >= T_max / 2) window.push_back(i);
    auto fit = [&](const std::vector<int>& idx) {
        double num = 0, den = 0;
        for (int i : idx) {
            double t2 = C.radii[i] * C.radii[i];
            num += C.counts[i] * t2;
            den += t2 * t2;
        }
        return num / den;
    };
    C.fit = fit(window);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, window.size() - 1);
    double s1 = 0, s2 = 0;
    const int B = 200;
    for (int b = 0; b < B; ++b) {
        std::vector<int> idx(window.size());
        for (auto& i : idx) i = window[pick(rng)];
        double f = fit(idx);
        s1 += f;
        s2 += f * f;
    }
    C.spread = std::sqrt(std::max(0.0, s2 / B - (s1 / B) * (s1 / B)));
    return C;
}

// ---------------------------------------------------------------------------
// Circle averages and nondivergence

namespace detail {

template <class F>
void parallel_for(int n, int threads, F&& f) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace detail

/// (1/n) sum phi(g_t r_theta M) over n equally spaced angles.
inline double circle_average(const FloatSurface& M, const Observable& phi, double t, int n_angles, int threads = 1) {
    if (t < 0) throw std::invalid_argument("t must be nonnegative");
    if (n_angles < 1) throw std::invalid_argument("n_angles must be positive");
    std::vector<double> v(n_angles);
    detail::parallel_for(n_angles, threads, [&](int k) {
        double th = 2 * M_PI * k / n_angles;
        v[k] = phi(M.apply(geodesic(t) * rotation(th)));
        if (!std::isfinite(v[k])) throw ObservableError(k, "observable not finite");
    });
    double s = 0;
    for (double x : v) s += x;
    return s / n_angles;
}

struct NondivergenceProfile {
    std::vector<double> eps, fraction;
    double max_systole = 0;
};

/// Fraction of the sample points s_i = (i + 1/2) T / steps at which u_s M
/// has a saddle connection shorter than eps.
inline NondivergenceProfile nondivergence_profile(const FloatSurface& M, double T, const std::vector<double>& eps_grid,
                                                  int steps = 1000) {
    if (!(T > 0) || steps < 1) throw std::invalid_argument("need T > 0 and steps >= 1");
    std::vector<double> times(steps), sys(steps);
    for (int i = 0; i < steps; ++i) times[i] = T * (i + 0.5) / steps;
    detail::along_orbit(M, Flow::Horocycle, times, [&](int i, const FloatSurface& W) { sys[i] = systole(W); });
    NondivergenceProfile P;
    P.eps = eps_grid;
    P.max_systole = *std::max_element(sys.begin(), sys.end());
    for (double e : eps_grid) {
        long c = std::count_if(sys.begin(), sys.end(), [&](double x) { return x < e; });
        P.fraction.push_back(static_cast<double>(c) / steps);
    }
    return P;
}

/// Least-squares slope of log(fraction) against log(eps) over positive fractions.
inline double loglog_slope(const NondivergenceProfile& P) {
    std::vector<double> X, Y;
    for (size_t i = 0; i < P.eps.size(); ++i)
        if (P.fraction[i] > 0 && P.fraction[i] < 1 && P.eps[i] > 0) {
            X.push_back(std::log(P.eps[i]));
            Y.push_back(std::log(P.fraction[i]));
        }
    if (X.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = std::accumulate(X.begin(), X.end(), 0.0) / X.size();
    double my = std::accumulate(Y.begin(), Y.end(), 0.0) / Y.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        sxy += (X[i] - mx) * (Y[i] - my);
        sxx += (X[i] - mx) * (X[i] - mx);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Equidistribution battery

constexpr int kBatterySize = 8;

inline const std::array<std::string, kBatterySize>& battery_names() {
    static const std::array<std::string, kBatterySize> n = {
        "systole", "shortest_cross", "shortest_loop", "count_le_1",
        "count_le_1.5", "systole_lt_0.3", "sv_cone_2", "max_circumradius"};
    return n;
}

/// Battery of eight functions on area-one surfaces, each invariant under
/// cut-and-paste.
inline std::array<double, kBatterySize> battery(const FloatSurface& M0) {
    const double L = 2.0;
    FloatSurface M = M0;
    M.make_delaunay();
    ScanOptions opt;
    opt.keep_paths = false;
    auto sads = saddle_connections(M, L, opt);
    double sys = L, cross = L, loop = L, c1 = 0, c15 = 0, cone = 0;
    for (auto& s : sads) {
        double l = s.length();
        sys = std::min(sys, l);
        if (s.from == s.to) loop = std::min(loop, l);
        else cross = std::min(cross, l);
        c1 += l <= 1.0;
        c15 += l <= 1.5;
        cone += std::max(0.0, 1 - l / L);
    }
    return {sys, cross, loop, c1, c15, sys < 0.3 ? 1.0 : 0.0, cone, max_circumradius(M)};
}

struct EnsembleStats {
    std::array<double, kBatterySize> mean{}, se{};
    std::vector<std::array<double, kBatterySize>> samples;
};

/// Means with bootstrap standard errors over the sample ensemble.
inline EnsembleStats ensemble_stats(std::vector<std::array<double, kBatterySize>> v, std::uint64_t seed, int B = 200) {
    EnsembleStats E;
    E.samples = std::move(v);
    size_t n = E.samples.size();
    if (n == 0) throw std::invalid_argument("empty ensemble");
    for (auto& s : E.samples)
        for (int k = 0; k < kBatterySize; ++k) E.mean[k] += s[k] / n;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    std::array<double, kBatterySize> s1{}, s2{};
    for (int b = 0; b < B; ++b) {
        std::array<double, kBatterySize> m{};
        for (size_t i = 0; i < n; ++i) {
            auto& s = E.samples[pick(rng)];
            for (int k = 0; k < kBatterySize; ++k) m[k] += s[k] / n;
        }
        for (int k = 0; k < kBatterySize; ++k) {
            s1[k] += m[k];
            s2[k] += m[k] * m[k];
        }
    }
    for (int k = 0; k < kBatterySize; ++k) E.se[k] = std::sqrt(std::max(0.0, s2[k] / B - (s1[k] / B) * (s1[k] / B)));
    return E;
}

/// Battery on g_t u_s M for s stratified over [0, period).
inline EnsembleStats horocycle_ensemble(const FloatSurface& M, double period, double t, int n, std::uint64_t seed,
                                        int threads = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = period * (i + U(rng)) / n;
    std::vector<std::array<double, kBatterySize>> v(n);
    detail::parallel_for(n, threads, [&](int i) { v[i] = battery(M.apply(geodesic(t) * Mat2<double>::horocycle(s[i]))); });
    return ensemble_stats(std::move(v), seed ^ 0x9e3779b97f4a7c15ULL);
}

/// Battery on g_tau r_theta M with theta uniform: large circles, which
/// equidistribute to the invariant measure on the orbit closure.
inline EnsembleStats circle_ensemble(const FloatSurface& M, double tau, int n, std::uint64_t seed, int threads = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 2 * M_PI);
    std::vector<double> th(n);
    for (auto& x : th) x = U(rng);
    std::vector<std::array<double, kBatterySize>> v(n);
    detail::parallel_for(n, threads, [&](int i) { v[i] = battery(M.apply(geodesic(tau) * rotation(th[i]))); });
    return ensemble_stats(std::move(v), seed ^ 0x9e3779b97f4a7c15ULL);
}

}  // namespace flatrel
