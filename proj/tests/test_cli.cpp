#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "flatrel/dynamics.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch() {
    auto d = fs::temp_directory_path() / ("flatrel_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

Run run(const std::string& args) {
    auto d = scratch();
    std::string cmd = std::string("FLATREL_FIXTURES='") + FLATREL_FIXTURE_DIR + "' '" + FLATREL_CLI_PATH + "' " + args +
                      " > '" + (d / "out").string() + "' 2> '" + (d / "err").string() + "'";
    int st = std::system(cmd.c_str());
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(d / "out"), slurp(d / "err")};
}

// last data row of a CSV with a "radius,count,estimate" header
std::vector<std::string> last_row(const std::string& csv) {
    std::istringstream is(csv);
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') last = line;
    std::vector<std::string> cells;
    std::stringstream ls(last);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    return cells;
}

}  // namespace

TEST(Cli, ValidateDecagon) {
    auto r = run("validate decagon.json");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("stratum H(1,1)"), std::string::npos) << r.out;
}

TEST(Cli, RelOutsideDomain) {
    auto r = run("rel --t 1e9 horizontal_decagon.json");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("outside Rel domain"), std::string::npos) << r.err;
}

TEST(Cli, RelDomainReport) {
    auto r = run("rel --domain horizontal_decagon.json");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("domain"), std::string::npos);
}

TEST(Cli, CountSquareTorusMatchesOracle) {
    auto r = run("count --tmax 20 square_torus.json");
    ASSERT_EQ(r.code, 0) << r.err;
    auto cells = last_row(r.out);
    ASSERT_EQ(cells.size(), 3u) << r.out;
    double T = std::stod(cells[0]), est = std::stod(cells[2]);
    double oracle = flatrel::primitive_lattice_count(T) / (T * T);
    EXPECT_NEAR(est, oracle, 0.05 * oracle);
    EXPECT_NE(r.out.find("seed=1"), std::string::npos);  // config echo
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
    for (std::string args : {"count --tmax 6 --threads 3 decagon.json", "saddles --budget-L 3 decagon.json",
                             "circle --t 0,1 --angles 16 --seed 9 decagon_float.json",
                             "nondiv --T 20 --steps 50 tipped_decagon.json"}) {
        auto a = run(args), b = run(args);
        EXPECT_EQ(a.code, 0) << args << ": " << a.err;
        EXPECT_EQ(a.out, b.out) << args;
        EXPECT_FALSE(a.out.empty());
    }
}

TEST(Cli, BuildThenValidateRoundTrip) {
    auto d = scratch();
    for (std::string f : {"l_shape_polygons.json", "decagon.json", "framed_h2.json", "self_connect_sum.json",
                          "decagon_float.json"}) {
        auto out = (d / ("rt_" + f)).string();
        auto b = run("build " + f + " --out '" + out + "'");
        ASSERT_EQ(b.code, 0) << f << ": " << b.err;
        auto v = run("validate '" + out + "'");
        EXPECT_EQ(v.code, 0) << f << ": " << v.err;
        EXPECT_NE(v.out.find("stratum"), std::string::npos);
    }
}

TEST(Cli, UnknownFieldRejected) {
    auto d = scratch();
    auto src = slurp(fs::path(FLATREL_FIXTURE_DIR) / "square_torus.json");
    auto pos = src.find('{');
    src.insert(pos + 1, "\"colour\": 3,");
    std::ofstream(d / "bad.json") << src;
    auto r = run("validate '" + (d / "bad.json").string() + "'");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate decagon.json").code, 2);
    EXPECT_EQ(run("validate no_such_file.json").code, 2);
    EXPECT_EQ(run("saddles decagon.json").code, 2);  // missing --budget-L
    EXPECT_EQ(run("saddles --budget-L -1 decagon.json").code, 2);
}

TEST(Cli, EigenformCommands) {
    auto p = run("eigenform prototype --e 1 --l 1 --m 2");
    EXPECT_EQ(p.code, 0) << p.err;
    EXPECT_NE(p.out.find("D 9"), std::string::npos);
    EXPECT_NE(p.out.find("isogeny_degree 2"), std::string::npos);
    auto d = run("eigenform detect decagon.json");
    EXPECT_EQ(d.code, 0);
    EXPECT_NE(d.out.find("eigenform D=5"), std::string::npos) << d.out;
    auto f = run("eigenform detect decagon_float.json");
    EXPECT_EQ(f.code, 1);  // float mode is refused
    auto dir = scratch();
    auto cs = run("eigenform connect-sum --e 0 --l 1 --m 2 --t 1/3 --out '" + (dir / "cs.json").string() + "'");
    ASSERT_EQ(cs.code, 0) << cs.err;
    auto det = run("eigenform detect '" + (dir / "cs.json").string() + "'");
    EXPECT_NE(det.out.find("eigenform D=8"), std::string::npos) << det.out;
}

TEST(Cli, CollapseAndSplit) {
    auto dir = scratch();
    auto c = run("collapse --t -1 decagon.json --out '" + (dir / "f.json").string() + "'");
    ASSERT_EQ(c.code, 0) << c.err;
    auto v = run("validate '" + (dir / "f.json").string() + "'");
    EXPECT_NE(v.out.find("stratum H(2)"), std::string::npos);
    auto s = run("split --t 1/4 framed_tipped_l.json");
    EXPECT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(run("split --t 1/4 decagon.json").code, 2);  // no selected prong
}

TEST(Cli, DiagramMinimalCylinders) {
    auto d = run("diagram self_connect_sum.json");
    EXPECT_EQ(d.code, 0);
    EXPECT_NE(d.out.find("type 5 nonseparating"), std::string::npos) << d.out;
    auto m = run("minimal three_cylinder.json");
    EXPECT_NE(m.out.find("minimal dimension 2"), std::string::npos) << m.out;
    auto i = run("minimal irrational_torus.json");
    EXPECT_NE(i.out.find("not_compact_closure"), std::string::npos) << i.out;
    auto c = run("cylinders --dir 1,0 square_torus.json");
    EXPECT_NE(c.out.find("verdict periodic"), std::string::npos) << c.out;
}
