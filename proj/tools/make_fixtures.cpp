// Regenerates the JSON fixtures: make_fixtures <dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "flatrel/eigenform.hpp"
#include "flatrel/io.hpp"

using namespace flatrel;

namespace {

void write(const std::filesystem::path& p, const json& j) {
    std::ofstream f(p);
    f << j.dump(2) << "\n";
    std::cout << p.string() << "\n";
}

json l_shape_polygons() {
    // three unit squares: 0 at the origin, 1 to its right, 2 above it
    json j;
    j["format"] = kFormatVersion;
    j["mode"] = "exact";
    j["disc"] = 0;
    auto sq = [](int x, int y) {
        return json::array({json::array({x, y}), json::array({x + 1, y}), json::array({x + 1, y + 1}),
                            json::array({x, y + 1})});
    };
    j["polygons"] = json::array({sq(0, 0), sq(1, 0), sq(0, 1)});
    // edges: 0 bottom, 1 right, 2 top, 3 left
    j["glue"] = json::array({
        json::array({json::array({0, 1}), json::array({1, 3})}),
        json::array({json::array({1, 1}), json::array({0, 3})}),
        json::array({json::array({2, 1}), json::array({2, 3})}),
        json::array({json::array({0, 2}), json::array({2, 0})}),
        json::array({json::array({2, 2}), json::array({0, 0})}),
        json::array({json::array({1, 2}), json::array({1, 0})}),
    });
    j["labels"] = json::array({json{{"polygon", 0}, {"vertex", 0}, {"name", "xi1"}, {"order", 2}}});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path dir = argc > 1 ? argv[1] : "fixtures";
    std::filesystem::create_directories(dir);
    write(dir / "decagon.json", to_json(decagon()));
    write(dir / "horizontal_decagon.json", to_json(decagon()));
    write(dir / "tipped_decagon.json", to_json(tipped_decagon()));
    write(dir / "decagon_float.json", to_json(regular_decagon_float()));
    write(dir / "square_torus.json", to_json(square_torus()));
    write(dir / "l_shape.json", to_json(square_tiled({1, 0, 2}, {2, 1, 0})));
    write(dir / "l_shape_polygons.json", l_shape_polygons());
    write(dir / "three_cylinder.json", to_json(three_cylinder()));
    write(dir / "irrational_torus.json", to_json(irrational_torus()));
    auto half = [](long D) { return QuadNum(Rational(1, 2)).with_disc(D); };
    write(dir / "prototype_1_1_1.json", to_json(connect_sum_tori(prototype_pair({1, 1, 1}), half(5))));
    write(dir / "prototype_0_1_2.json", to_json(connect_sum_tori(prototype_pair({0, 1, 2}), half(8))));
    // the L-shape under an irrational lower shear has no horizontal cylinder
    QuadNum one = QuadNum(1).with_disc(8), zero = QuadNum(0).with_disc(8), s(Rational(-1), Rational(1, 2), 8);
    auto tipped_l = square_tiled({1, 0, 2}, {2, 1, 0}).apply(Mat2<QuadNum>(one, zero, s, one));
    write(dir / "framed_tipped_l.json", to_json(tipped_l, 0));
    TorsionTorus<QuadNum> E{Lattice<QuadNum>{{one, s}, {zero, one}}, Vec2<QuadNum>(half(8), s / QuadNum(2)), 2, 8};
    write(dir / "self_connect_sum.json", to_json(self_connect_sum(E, QuadNum(Rational(1, 4)).with_disc(8))));
    auto F = collapse(decagon(), QuadNum(-1).with_disc(5));
    write(dir / "framed_h2.json", to_json(F.surface, F.selected_prong));
    return 0;
}
