#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "polygon.hpp"
#include "surface.hpp"

namespace flatrel {

using json = nlohmann::ordered_json;

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kFormatVersion = 1;

namespace io {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw FormatError(where + ": expected an object");
    for (auto& [k, v] : j.items())
        if (!allowed.count(k)) throw FormatError(where + ": unknown field \"" + k + "\"");
}

template <class S>
json num(const S& x) {
    if constexpr (is_exact_v<S>) return x.str();
    else return x;
}

template <class S>
S read_num(const json& j, long disc) {
    if constexpr (is_exact_v<S>) {
        if (j.is_string()) return QuadNum::parse(j.get<std::string>(), disc);
        if (j.is_number_integer()) return QuadNum(Rational(j.get<long>())).with_disc(disc);
        throw FormatError("exact numbers must be strings or integers");
    } else {
        if (j.is_number()) return j.get<double>();
        if (j.is_string()) return QuadNum::parse(j.get<std::string>(), disc).to_double();
        throw FormatError("expected a number");
    }
}

template <class S>
Vec2<S> read_vec(const json& j, long disc) {
    if (!j.is_array() || j.size() != 2) throw FormatError("vectors are [x, y] pairs");
    return Vec2<S>(read_num<S>(j[0], disc), read_num<S>(j[1], disc));
}

inline void check_header(const json& j) {
    if (!j.contains("format")) throw FormatError("missing \"format\"");
    if (j["format"] != kFormatVersion)
        throw FormatError("unsupported format " + j["format"].dump() + ", expected " + std::to_string(kFormatVersion));
}

}  // namespace io

/// Triangulation document. Slots are named by integers; the triangle
/// [a, b, c] has edges a, b, c in counterclockwise order. Labels are keyed
/// by any slot leaving the vertex.
template <class S>
json to_json(const TriSurface<S>& M, std::optional<int> selected_prong = std::nullopt) {
    json j;
    j["format"] = kFormatVersion;
    j["mode"] = is_exact_v<S> ? "exact" : "float";
    j["disc"] = M.disc();
    j["triangles"] = json::array();
    for (int t = 0; t < M.num_triangles(); ++t) j["triangles"].push_back({3 * t, 3 * t + 1, 3 * t + 2});
    j["gluing"] = json::array();
    for (int h = 0; h < M.num_slots(); ++h)
        if (h < M.twin(h)) j["gluing"].push_back({h, M.twin(h)});
    json hol = json::object();
    for (int h = 0; h < M.num_slots(); ++h) hol[std::to_string(h)] = {io::num(M.hol(h).x), io::num(M.hol(h).y)};
    j["holonomy"] = hol;
    json lab = json::object();
    for (int v = 0; v < M.num_vertices(); ++v) {
        int h = -1;
        for (int s = 0; s < M.num_slots() && h < 0; ++s)
            if (M.origin(s) == v) h = s;
        lab[std::to_string(h)] = {{"name", M.sing(v).name}, {"order", M.sing(v).order}};
    }
    j["labels"] = lab;
    if (selected_prong) j["selected_prong"] = *selected_prong;
    return j;
}

struct SurfaceDoc {
    std::variant<ExactSurface, FloatSurface> surface;
    std::optional<int> selected_prong;
    bool exact() const { return surface.index() == 0; }
};

template <class S>
PolygonGluing<S> polygons_from_json(const json& j, long disc) {
    PolygonGluing<S> P;
    P.disc = disc;
    for (auto& poly : j.at("polygons")) {
        std::vector<Vec2<S>> pts;
        for (auto& p : poly) pts.push_back(io::read_vec<S>(p, disc));
        P.polygons.push_back(std::move(pts));
    }
    for (auto& g : j.at("glue")) {
        if (!g.is_array() || g.size() != 2) throw FormatError("glue entries are [[poly, edge], [poly, edge]]");
        P.glue.push_back({{g[0].at(0).get<int>(), g[0].at(1).get<int>()}, {g[1].at(0).get<int>(), g[1].at(1).get<int>()}});
    }
    if (j.contains("labels"))
        for (auto& l : j["labels"]) {
            io::check_keys(l, {"polygon", "vertex", "name", "order"}, "polygon label");
            int ord = l.value("order", -1);
            P.labels[{l.at("polygon").template get<int>(), l.at("vertex").template get<int>()}] =
                Singularity{l.at("name").template get<std::string>(), ord};
        }
    return P;
}

template <class S>
TriSurface<S> triangulation_from_json(const json& j, long disc) {
    std::map<long, int> slot;  // document id -> internal slot, in triangle order
    std::vector<long> ids;
    for (auto& tr : j.at("triangles")) {
        if (!tr.is_array() || tr.size() != 3) throw FormatError("triangles are [slot, slot, slot]");
        for (auto& id : tr) {
            long k = id.template get<long>();
            if (!slot.emplace(k, static_cast<int>(ids.size())).second)
                throw FormatError("slot " + std::to_string(k) + " used twice");
            ids.push_back(k);
        }
    }
    auto find = [&](long k) {
        auto it = slot.find(k);
        if (it == slot.end()) throw FormatError("unknown slot " + std::to_string(k));
        return it->second;
    };
    int ns = static_cast<int>(ids.size());
    std::vector<int> twin(ns, -1);
    for (auto& g : j.at("gluing")) {
        if (!g.is_array() || g.size() != 2) throw FormatError("gluing entries are [slot, slot]");
        int a = find(g[0].template get<long>()), b = find(g[1].template get<long>());
        if (twin[a] >= 0 || twin[b] >= 0) throw FormatError("slot glued twice");
        twin[a] = b;
        twin[b] = a;
    }
    for (int h = 0; h < ns; ++h)
        if (twin[h] < 0) throw FormatError("slot " + std::to_string(ids[h]) + " is not glued");
    const json& H = j.at("holonomy");
    if (!H.is_object()) throw FormatError("holonomy maps slot ids to [x, y]");
    std::vector<Vec2<S>> hol(ns);
    std::vector<char> seen(ns, 0);
    for (auto& [k, v] : H.items()) {
        int h;
        try {
            h = find(std::stol(k));
        } catch (const std::invalid_argument&) {
            throw FormatError("holonomy key \"" + k + "\" is not a slot id");
        }
        hol[h] = io::read_vec<S>(v, disc);
        seen[h] = 1;
    }
    for (int h = 0; h < ns; ++h)
        if (!seen[h]) throw FormatError("slot " + std::to_string(ids[h]) + " has no holonomy");
    std::map<int, Singularity> lab;
    if (j.contains("labels")) {
        if (!j["labels"].is_object()) throw FormatError("labels map slot ids to {name, order}");
        for (auto& [k, v] : j["labels"].items()) {
            io::check_keys(v, {"name", "order"}, "label " + k);
            int h;
            try {
                h = find(std::stol(k));
            } catch (const std::invalid_argument&) {
                throw FormatError("label key \"" + k + "\" is not a slot id");
            }
            int ord = v.value("order", -1);
            lab[h] = Singularity{v.at("name").template get<std::string>(), ord};
        }
    }
    return TriSurface<S>::build(twin, hol, lab, disc);
}

/// Reads a triangulation or polygon document; `mode` overrides the
/// document's mode when given.
inline SurfaceDoc surface_from_json(const json& j, std::optional<std::string> mode = std::nullopt) {
    io::check_header(j);
    bool polys = j.contains("polygons");
    if (polys)
        io::check_keys(j, {"format", "mode", "disc", "polygons", "glue", "labels", "config"}, "polygon document");
    else
        io::check_keys(j, {"format", "mode", "disc", "triangles", "gluing", "holonomy", "labels", "selected_prong", "config"},
                       "triangulation document");
    std::string m = mode ? *mode : j.value("mode", std::string("exact"));
    if (m != "exact" && m != "float") throw FormatError("mode must be exact or float");
    long disc = j.value("disc", 0L);
    SurfaceDoc d;
    try {
        if (m == "exact") {
            d.surface = polys ? build_from_polygons(polygons_from_json<QuadNum>(j, disc))
                              : triangulation_from_json<QuadNum>(j, disc);
        } else {
            d.surface = polys ? build_from_polygons(polygons_from_json<double>(j, disc))
                              : triangulation_from_json<double>(j, disc);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed document: ") + e.what());
    }
    if (j.contains("selected_prong")) d.selected_prong = j["selected_prong"].get<int>();
    return d;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

}  // namespace flatrel
