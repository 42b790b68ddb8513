// flatrel: command-line front end.
//
// Exit codes: 0 success, 1 domain error (the mathematics refused), 2 usage
// error (bad flags, unreadable or malformed input).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "flatrel/dynamics.hpp"
#include "flatrel/eigenform.hpp"
#include "flatrel/io.hpp"
#include "flatrel/rel.hpp"
#include "flatrel/scan.hpp"

namespace fs = std::filesystem;
using namespace flatrel;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string command;
    std::string input;
    std::string mode;  // "" = as in the document
    long disc = 0;
    std::string budget_L, budget_B;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;

    json echo() const {
        json j;
        j["command"] = command;
        if (!input.empty()) j["input"] = input;
        j["mode"] = mode.empty() ? "document" : mode;
        j["disc"] = disc;
        if (!budget_L.empty()) j["budget_L"] = budget_L;
        if (!budget_B.empty()) j["budget_B"] = budget_B;
        j["tol"] = tol;
        j["seed"] = seed;
        j["threads"] = threads;
        return j;
    }
    std::string csv_header() const {
        std::ostringstream os;
        os << "# flatrel " << command;
        json e = echo();
        for (auto& [k, v] : e.items())
            if (k != "command") os << " " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump());
        os << "\n";
        return os.str();
    }
};

Config cfg;

std::string resolve(const std::string& path) {
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("FLATREL_FIXTURES")) {
        fs::path d(dir);
        if (fs::exists(d / path)) return (d / path).string();
        if (fs::exists(d / fs::path(path).filename())) return (d / fs::path(path).filename()).string();
    }
    throw UsageError("input not found: " + path);
}

SurfaceDoc load() {
    if (cfg.input.empty()) throw UsageError("missing input surface");
    json j = read_json_file(resolve(cfg.input));
    if (cfg.disc && !j.contains("disc")) j["disc"] = cfg.disc;
    return surface_from_json(j, cfg.mode.empty() ? std::nullopt : std::optional<std::string>(cfg.mode));
}

void emit(const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw UsageError("cannot write " + cfg.out);
    f << text;
}

template <class S>
void emit_surface(const TriSurface<S>& M, std::optional<int> prong = std::nullopt) {
    json j = to_json(M, prong);
    j["config"] = cfg.echo();
    emit(j.dump(2) + "\n");
}

template <class S>
S parse_num(const std::string& s, long disc) {
    try {
        if constexpr (is_exact_v<S>) {
            return QuadNum::parse(s, disc).with_disc(disc);
        } else {
            return QuadNum::parse(s, 0).to_double();
        }
    } catch (const std::exception& e) {
        throw UsageError("bad number \"" + s + "\": " + e.what());
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

template <class S>
std::optional<S> budget(const std::string& s, long disc) {
    if (s.empty()) return std::nullopt;
    S b = parse_num<S>(s, disc);
    if (sgn(b) <= 0) throw UsageError("budgets must be positive");
    return b;
}

const ExactSurface& need_exact(const SurfaceDoc& d, const char* what) {
    if (!d.exact()) throw std::domain_error(std::string(what) + " requires exact mode");
    return std::get<ExactSurface>(d.surface);
}

FloatSurface as_float(const SurfaceDoc& d) {
    if (d.exact()) return std::get<ExactSurface>(d.surface).to_float();
    return std::get<FloatSurface>(d.surface);
}

Observable observable(const std::string& name) {
    if (name == "one") return [](const FloatSurface&) { return 1.0; };
    if (name == "systole") return [](const FloatSurface& M) { return systole(M); };
    if (name == "circumradius") return [](const FloatSurface& M) { return max_circumradius(M); };
    auto& names = battery_names();
    for (int k = 0; k < kBatterySize; ++k)
        if (names[k] == name) return [k](const FloatSurface& M) { return battery(M)[k]; };
    throw UsageError("unknown observable " + name);
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// ---- commands

void cmd_validate() {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            std::ostringstream os;
            os << "stratum " << M.stratum() << "\n";
            os << "genus " << M.genus() << "\n";
            os << "singularities";
            for (auto& s : M.sings()) os << " " << s.name << ":" << s.order;
            os << "\n";
            os << "triangles " << M.num_triangles() << "\n";
            os << "area " << M.area() << "\n";
            emit(os.str());
        },
        d.surface);
}

void cmd_build() {
    auto d = load();
    std::visit([&](const auto& M) { emit_surface(M, d.selected_prong); }, d.surface);
}

void cmd_gl2(const std::string& matrix) {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            auto e = split_list(matrix);
            if (e.size() != 4) throw UsageError("--matrix takes a,b,c,d");
            Mat2<S> g(parse_num<S>(e[0], M.disc()), parse_num<S>(e[1], M.disc()), parse_num<S>(e[2], M.disc()),
                      parse_num<S>(e[3], M.disc()));
            emit_surface(M.apply(g));
        },
        d.surface);
}

void cmd_rel(const std::string& t, const std::string& z, bool domain_only) {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            if (domain_only) {
                emit("domain " + rel_domain(M, budget<S>(cfg.budget_B, M.disc())).str() + "\n");
                return;
            }
            RelVector<S> rv;
            if (!z.empty()) {
                for (auto& s : split_list(z)) rv.zbar.push_back(parse_num<S>(s, M.disc()));
            } else if (!t.empty()) {
                if (M.num_vertices() != 2) throw UsageError("--t needs two singularities; use --z");
                rv = RelVector<S>::scalar(parse_num<S>(t, M.disc()));
            } else {
                throw UsageError("rel needs --t or --z");
            }
            emit_surface(rel_apply(M, rv));
        },
        d.surface);
}

void cmd_collapse(const std::string& t) {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            auto F = collapse(M, parse_num<S>(t, M.disc()));
            emit_surface(F.surface, F.selected_prong);
        },
        d.surface);
}

void cmd_split(const std::string& t) {
    auto d = load();
    if (!d.selected_prong) throw UsageError("split needs a framed surface with selected_prong");
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            FramedH2Surface<S> F{M, *d.selected_prong};
            emit_surface(split(F, parse_num<S>(t, M.disc())));
        },
        d.surface);
}

void cmd_saddles() {
    auto d = load();
    if (cfg.budget_L.empty()) throw UsageError("saddles needs --budget-L");
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            ScanOptions opt;
            opt.threads = cfg.threads;
            auto sads = saddle_connections(M, *budget<S>(cfg.budget_L, M.disc()), opt);
            emit(cfg.csv_header() + saddles_csv(M, sads));
        },
        d.surface);
}

void cmd_cylinders(const std::string& dir) {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            Vec2<S> v(S(1), S(0));
            if (!dir.empty()) {
                auto e = split_list(dir);
                if (e.size() != 2) throw UsageError("--dir takes x,y");
                v = Vec2<S>(parse_num<S>(e[0], M.disc()), parse_num<S>(e[1], M.disc()));
            }
            auto R = cylinder_decomposition(M, v, budget<S>(cfg.budget_B, M.disc()));
            std::ostringstream os;
            os << cfg.csv_header();
            const char* verdict[] = {"periodic", "nonperiodic", "undetermined"};
            os << "# verdict " << verdict[R.verdict];
            if (!R.note.empty()) os << " (" << R.note << ")";
            os << "\n";
            os << "circumference,height,modulus,exact_circumference,exact_height\n";
            for (auto& c : R.cylinders) {
                os << fmt(to_double(c.circumference)) << "," << fmt(to_double(c.height)) << ","
                   << fmt(to_double(c.modulus())) << ",\"" << c.circumference << "\",\"" << c.height << "\"\n";
            }
            emit(os.str());
        },
        d.surface);
}

void cmd_diagram() {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            using S = typename std::decay_t<decltype(M)>::Scalar;
            auto D = horizontal_diagram(M, budget<S>(cfg.budget_B, M.disc()));
            std::ostringstream os;
            os << "// type " << (D.type.empty() ? "none" : D.type);
            if (D.type == "5") os << (D.slit_separating ? " separating" : " nonseparating");
            if (D.cylinders >= 0) os << " cylinders " << D.cylinders;
            os << "\n" << diagram_dot(D);
            emit(os.str());
        },
        d.surface);
}

void cmd_detect() {
    auto d = load();
    const auto& M = need_exact(d, "eigenform detection");
    auto R = detect_rm(M);
    std::ostringstream os;
    if (!R.eigenform) {
        os << "not_eigenform: " << R.reason << "\n";
        emit(os.str());
        return;
    }
    os << "eigenform D=" << R.D << " b=" << R.b << " c=" << R.c << " eigenvalue " << R.eigenvalue << "\n";
    os << "generator";
    for (auto& row : R.generator) {
        os << " [";
        for (size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << row[j];
        os << "]";
    }
    os << "\n";
    emit(os.str());
}

void cmd_prototype(long e, long l, long m) {
    Prototype P{e, l, m};
    P.check();
    auto tp = prototype_pair(P);
    auto idx = isogeny_index(tp, P.lambda());
    std::ostringstream os;
    os << "D " << P.D() << "\n";
    os << "lambda " << P.lambda() << "\n";
    os << "L1 (" << tp.L1.w1.x << ", " << tp.L1.w1.y << ") (" << tp.L1.w2.x << ", " << tp.L1.w2.y << ")\n";
    os << "L2 (" << tp.L2.w1.x << ", " << tp.L2.w1.y << ") (" << tp.L2.w2.x << ", " << tp.L2.w2.y << ")\n";
    os << "isogeny_degree " << tp.isogeny_degree << "\n";
    os << "index lambda*L2 in L1 " << (idx ? idx->get_str() : "not contained") << "\n";
    emit(os.str());
}

void cmd_connect_sum(long e, long l, long m, const std::string& t) {
    Prototype P{e, l, m};
    P.check();
    auto tp = prototype_pair(P);
    emit_surface(connect_sum_tori(tp, parse_num<QuadNum>(t, P.D())));
}

void cmd_decagon() {
    if (cfg.mode == "float") emit_surface(regular_decagon_float());
    else emit_surface(decagon());
}

void cmd_count(double tmax, int samples) {
    auto d = load();
    std::visit(
        [&](const auto& M) {
            auto C = count_growth(M, tmax, samples, cfg.threads, cfg.seed);
            std::ostringstream os;
            os << cfg.csv_header();
            os << "# area " << fmt(to_double(M.area())) << " fit " << fmt(C.fit) << " spread " << fmt(C.spread) << "\n";
            os << "radius,count,estimate\n";
            for (size_t i = 0; i < C.radii.size(); ++i)
                os << fmt(C.radii[i]) << "," << C.counts[i] << "," << fmt(C.estimates[i]) << "\n";
            emit(os.str());
        },
        d.surface);
}

void cmd_birkhoff(const std::string& Ts, int steps, const std::string& obs) {
    auto M = as_float(load());
    auto phi = observable(obs);
    std::ostringstream os;
    os << cfg.csv_header() << "t,average\n";
    for (auto& s : split_list(Ts)) {
        double T = parse_num<double>(s, 0);
        os << fmt(T) << "," << fmt(birkhoff_average(M, phi, T, steps)) << "\n";
    }
    emit(os.str());
}

void cmd_circle(const std::string& ts, int angles, const std::string& obs) {
    auto M = as_float(load());
    auto phi = observable(obs);
    std::ostringstream os;
    os << cfg.csv_header() << "t,average\n";
    for (auto& s : split_list(ts)) {
        double t = parse_num<double>(s, 0);
        os << fmt(t) << "," << fmt(circle_average(M, phi, t, angles, cfg.threads)) << "\n";
    }
    emit(os.str());
}

void cmd_nondiv(double T, const std::string& eps, int steps) {
    auto M = as_float(load());
    std::vector<double> grid;
    for (auto& s : split_list(eps)) grid.push_back(parse_num<double>(s, 0));
    auto P = nondivergence_profile(M, T, grid, steps);
    std::ostringstream os;
    os << cfg.csv_header() << "# max_systole " << fmt(P.max_systole) << "\n" << "epsilon,fraction\n";
    for (size_t i = 0; i < grid.size(); ++i) os << fmt(grid[i]) << "," << fmt(P.fraction[i]) << "\n";
    emit(os.str());
}

void cmd_minimal() {
    auto d = load();
    const auto& M = need_exact(d, "minimal set classification");
    auto R = minimal_set(M, budget<QuadNum>(cfg.budget_B, M.disc()));
    std::ostringstream os;
    switch (R.kind) {
        case MinimalSet::Minimal:
            os << "minimal dimension " << R.dimension << " cylinders " << R.cylinders << " moduli_rank "
               << R.moduli_rank << (R.dimension == 1 ? " (periodic U-orbit)" : "") << "\n";
            break;
        case MinimalSet::NotCompactClosure: os << "not_compact_closure: " << R.note << "\n"; break;
        case MinimalSet::Undetermined: os << "undetermined: " << R.note << "\n"; break;
    }
    emit(os.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flatrel: translation surfaces, Rel deformations and eigenform experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--mode", cfg.mode, "exact or float (default: as in the document)")
        ->check(CLI::IsMember({"exact", "float"}));
    app.add_option("--disc", cfg.disc, "discriminant for number parsing");
    app.add_option("--budget-L", cfg.budget_L, "length bound for saddle enumeration");
    app.add_option("--budget-B", cfg.budget_B, "separatrix budget for horizontal scans");
    app.add_option("--tol", cfg.tol, "float tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", cfg.out, "output path (default stdout)");

    auto input = [&](CLI::App* sc) { sc->add_option("input", cfg.input, "surface JSON")->required(); };

    auto* validate = app.add_subcommand("validate", "build and validate a surface, report its stratum");
    input(validate);
    auto* build = app.add_subcommand("build", "triangulate a polygon document");
    input(build);

    std::string matrix;
    auto* gl2 = app.add_subcommand("gl2", "apply a matrix with positive determinant");
    input(gl2);
    gl2->add_option("--matrix", matrix, "a,b,c,d")->required();

    std::string t, z;
    bool domain_only = false;
    auto* rel = app.add_subcommand("rel", "real Rel deformation");
    input(rel);
    rel->add_option("--t", t, "Rel parameter (two singularities)");
    rel->add_option("--z", z, "per-singularity horizontal offsets");
    rel->add_flag("--domain", domain_only, "print the Rel domain only");

    auto* col = app.add_subcommand("collapse", "collapse the short horizontal saddle onto framed H(2)");
    input(col);
    col->add_option("--t", t, "signed length T")->required();
    auto* spl = app.add_subcommand("split", "split a framed H(2) surface");
    input(spl);
    spl->add_option("--t", t, "signed length T")->required();

    auto* sad = app.add_subcommand("saddles", "enumerate saddle connections up to --budget-L");
    input(sad);
    std::string dir;
    auto* cyl = app.add_subcommand("cylinders", "cylinder decomposition");
    input(cyl);
    cyl->add_option("--dir", dir, "direction x,y (default horizontal)");
    auto* dia = app.add_subcommand("diagram", "horizontal data diagram as DOT");
    input(dia);

    auto* eig = app.add_subcommand("eigenform", "eigenform constructions and detection");
    eig->require_subcommand(1);
    auto* det = eig->add_subcommand("detect", "search for real multiplication");
    input(det);
    long pe = 0, pl = 1, pm = 1;
    auto* proto = eig->add_subcommand("prototype", "prototype torus pair");
    auto* cs = eig->add_subcommand("connect-sum", "connected sum of the prototype tori along a slit");
    for (auto* sc : {proto, cs}) {
        sc->add_option("--e", pe)->required();
        sc->add_option("--l", pl)->required();
        sc->add_option("--m", pm)->required();
    }
    cs->add_option("--t", t, "signed slit length")->required();
    auto* dec = eig->add_subcommand("decagon", "the decagon surface");

    double tmax = 0;
    int samples = 20, steps = 1000, angles = 256;
    std::string Ts = "10", obs = "systole", eps = "0.05,0.1,0.2,0.4";
    auto* cnt = app.add_subcommand("count", "saddle connection counting curve");
    input(cnt);
    cnt->add_option("--tmax", tmax)->required()->check(CLI::PositiveNumber);
    cnt->add_option("--samples", samples)->check(CLI::PositiveNumber);
    auto* bir = app.add_subcommand("birkhoff", "horocycle Birkhoff averages");
    input(bir);
    bir->add_option("--T", Ts, "comma-separated horizons");
    bir->add_option("--steps", steps)->check(CLI::PositiveNumber);
    bir->add_option("--observable", obs);
    auto* cir = app.add_subcommand("circle", "circle averages of g_t r_theta");
    input(cir);
    std::string ts = "0,1,2";
    cir->add_option("--t", ts, "comma-separated times");
    cir->add_option("--angles", angles)->check(CLI::PositiveNumber);
    cir->add_option("--observable", obs);
    double T = 100;
    auto* nd = app.add_subcommand("nondiv", "fraction of horocycle time with short saddles");
    input(nd);
    nd->add_option("--T", T)->check(CLI::PositiveNumber);
    nd->add_option("--eps", eps, "comma-separated thresholds");
    nd->add_option("--steps", steps)->check(CLI::PositiveNumber);
    auto* mini = app.add_subcommand("minimal", "classify the horocycle orbit closure");
    input(mini);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto* sc = app.get_subcommands().front();
        cfg.command = sc->get_name();
        if (sc == eig) cfg.command += " " + eig->get_subcommands().front()->get_name();
        if (sc == validate) cmd_validate();
        else if (sc == build) cmd_build();
        else if (sc == gl2) cmd_gl2(matrix);
        else if (sc == rel) cmd_rel(t, z, domain_only);
        else if (sc == col) cmd_collapse(t);
        else if (sc == spl) cmd_split(t);
        else if (sc == sad) cmd_saddles();
        else if (sc == cyl) cmd_cylinders(dir);
        else if (sc == dia) cmd_diagram();
        else if (sc == eig) {
            auto* e = eig->get_subcommands().front();
            if (e == det) cmd_detect();
            else if (e == proto) cmd_prototype(pe, pl, pm);
            else if (e == cs) cmd_connect_sum(pe, pl, pm, t);
            else if (e == dec) cmd_decagon();
        } else if (sc == cnt) cmd_count(tmax, samples);
        else if (sc == bir) cmd_birkhoff(Ts, steps, obs);
        else if (sc == cir) cmd_circle(ts, angles, obs);
        else if (sc == nd) cmd_nondiv(T, eps, steps);
        else if (sc == mini) cmd_minimal();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const RelDomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
