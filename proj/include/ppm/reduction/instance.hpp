#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ppm/grid.hpp"
#include "ppm/perm.hpp"
#include "ppm/reduction/formula.hpp"
#include "ppm/reduction/gadgets.hpp"
#include "ppm/reduction/path.hpp"

namespace ppm {

enum class SortMode { Gadgets, Juxtaposition };

inline const char* mode_name(SortMode m) { return m == SortMode::Gadgets ? "gadgets" : "juxtaposition"; }
inline SortMode parse_mode(const std::string& s) {
    if (s == "gadgets") return SortMode::Gadgets;
    if (s == "juxtaposition") return SortMode::Juxtaposition;
    throw ParseError("ParseError: unknown sorting mode '" + s + "'");
}

enum class LayerKind { Mono, D, Flip, Juxt };

inline const char* layer_name(LayerKind k) {
    switch (k) {
        case LayerKind::Mono: return "mono";
        case LayerKind::D: return "d";
        case LayerKind::Flip: return "flip";
        case LayerKind::Juxt: return "juxt";
    }
    return "?";
}

struct LayerSchedule {
    std::vector<LayerKind> kinds;
    std::vector<std::string> phases;
    std::vector<std::vector<int>> tiles;  // bound 0-based path positions; empty until bound

    int d_demand() const {
        int d = 0;
        for (auto k : kinds) d += k == LayerKind::Flip ? 2 : (k == LayerKind::Mono ? 0 : 1);
        return d;
    }
    int count(const std::string& phase) const {
        int c = 0;
        for (const auto& p : phases) c += p == phase;
        return c;
    }
};

// Unit identity: role 'A' (anchor, k = 1 lower, 2 upper), 'X' pattern, 'Y'/'Z' text; (k, j) names the
// variable occurrence; sub 1/2 marks the bar/tilde branches.
struct Tag {
    char role = '?';
    int k = 0, j = 0, sub = 0;
    friend bool operator==(const Tag&, const Tag&) = default;
    std::string str() const {
        std::string s(1, role);
        if (sub == 1) s += "bar";
        if (sub == 2) s += "tilde";
        s += "(" + std::to_string(k);
        if (role != 'A') s += "," + std::to_string(j);
        return s + ")";
    }
};

// How a pattern pick chooses among the branches of its image's choose gadget.
struct BranchRule {
    enum Kind { None, Assign, Swap, Eval } kind = None;
    int var = 0;        // Assign
    int partner = -1;   // Swap: the other pattern unit of the swapped pair (same tile as the parent)
    Literal literal{};  // Eval: branch bar iff this literal holds
};

enum class Relation { Inside, Encloses };

struct UnitRecord {
    int side = 0;  // 0 pattern, 1 text
    int tile = 0;
    Tag tag;
    GadgetKind via = GadgetKind::Copy;
    std::vector<int> parents;
    Relation relation = Relation::Inside;
    int child_index = 0;
    BranchRule rule;
    std::vector<int> children;
    int first_point = 0, points = 0;  // range in the tile's point list
};

struct TilePoint {
    Value out, in;
    int unit = -1;
    friend bool operator==(const TilePoint&, const TilePoint&) = default;
};

struct GadgetRecord {
    GadgetKind kind;
    int side = 0;
    std::vector<int> inputs, outputs;
    int first_tile = 0, last_tile = 0;
};

struct ReductionInstance {
    Formula3CNF formula;
    SortMode mode = SortMode::Juxtaposition;
    std::optional<ClassEntry> juxtaposition;
    PathInfo path;
    LayerSchedule schedule;
    bool kept = true;  // false in size-only builds
    std::vector<std::array<std::vector<TilePoint>, 2>> tiles;
    std::vector<UnitRecord> units;
    std::vector<GadgetRecord> gadgets;
    std::vector<std::array<int, 3>> assignment_units;  // per variable: pattern pick output, text Y, text Z
    int used_tiles = 1;
    long pattern_points = 0, text_points = 0;  // |π′|, |τ′|
    long max_tile = 0;

    long pattern_size() const { return pattern_points + 2 * text_points; }  // |π″|
    long text_size() const { return 3 * text_points; }                      // |τ″|

    // Filled by add_anchors_and_assemble.
    Permutation pattern, text;
    Gridding pattern_gridding, text_gridding;
    std::array<std::vector<std::vector<int>>, 2> position;  // [side][tile][point] -> 0-based position
    // [side][lower/upper]: positions of the inflated anchor runs; position[] holds their first element.
    std::array<std::array<std::vector<int>, 2>, 2> anchor_runs;
};

}  // namespace ppm
