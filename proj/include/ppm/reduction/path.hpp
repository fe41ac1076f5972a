#pragma once

#include <optional>
#include <vector>

#include "ppm/grid.hpp"
#include "ppm/reduction/gadgets.hpp"

namespace ppm {

struct PathTile {
    Cell cell;
    Adjacency in_edge = Adjacency::Row;  // frame: Row means x = out, y = in
    bool is_d = false;
    bool usable = false;        // D-entry sharing a row with its predecessor
    ClassEntry local;           // F(M) at this cell
};

struct PathInfo {
    GriddingMatrix matrix;
    Orientation orientation;
    ClassEntry d;
    std::vector<PathTile> tiles;

    int usable_count() const {
        int u = 0;
        for (const auto& t : tiles) u += t.usable;
        return u;
    }
};

// Orientation making monotone entries Inc and every D image a superclass of ⊕21.
inline Orientation reduction_orientation(const GriddingMatrix& m, const ClassEntry& d) {
    int d_sign = 0;
    if (entry_includes(d, ClassEntry::fib_plus())) d_sign = 1;
    else if (entry_includes(d, ClassEntry::fib_minus())) d_sign = -1;
    else throw UnsupportedCase("UnsupportedCase: D contains neither ⊕21 nor ⊖12");
    std::map<Cell, int> sign;
    for (const auto& [c, e] : m.entries()) {
        if (!e.infinite()) continue;
        sign[c] = e.monotone() ? (e.tag == ClassEntry::Inc ? 1 : -1) : d_sign;
    }
    auto f = sign_orientation(m.cols(), m.rows(), sign);
    if (!f) throw std::logic_error("reduction_orientation: path matrix has no orientation");
    return *f;
}

inline ClassEntry oriented_entry(const ClassEntry& e, const Orientation& f, Cell c) {
    ClassEntry t = e;
    if (f.col(c.col) < 0) t = transform_entry(t, true);
    if (f.row(c.row) < 0) t = transform_entry(t, false);
    return t;
}

// `path` lists the cells p_1, p_2, ... of a proper-turning path of `m`.
inline PathInfo make_path_info(const GriddingMatrix& m, const std::vector<Cell>& path) {
    PathInfo info;
    info.matrix = m;
    std::optional<ClassEntry> d;
    for (const auto& c : path) {
        const ClassEntry& e = m.at(c);
        if (!e.infinite()) throw std::invalid_argument("make_path_info: path cell is empty");
        if (!e.monotone()) {
            if (d && !(*d == e)) throw MultipleDEntries("MultipleDEntries: path has two different D classes");
            d = e;
        }
    }
    info.d = d ? *d : ClassEntry::fib_plus();
    info.orientation = d ? reduction_orientation(m, *d) : *consistent_orientation(m);
    for (std::size_t i = 0; i < path.size(); ++i) {
        PathTile t;
        t.cell = path[i];
        const ClassEntry& e = m.at(path[i]);
        t.is_d = !e.monotone();
        if (i > 0) {
            t.in_edge = path[i - 1].row == path[i].row ? Adjacency::Row : Adjacency::Column;
        } else if (path.size() > 1) {
            t.in_edge = path[0].row == path[1].row ? Adjacency::Column : Adjacency::Row;
        }
        t.usable = t.is_d && i > 0 && t.in_edge == Adjacency::Row;
        t.local = oriented_entry(e, info.orientation, path[i]);
        info.tiles.push_back(t);
    }
    return info;
}

inline PathInfo make_path_info(const RichPath& rp) { return make_path_info(rp.matrix, rp.path); }

// Monotone juxtapositions in the order they are preferred.
inline std::vector<ClassEntry> juxtaposition_candidates() {
    std::vector<ClassEntry> out;
    for (bool vertical : {false, true})
        for (bool a : {true, false})
            for (bool b : {true, false}) out.push_back(vertical ? ClassEntry::juxt_v(a, b) : ClassEntry::juxt_h(a, b));
    return out;
}

inline bool class_contains_juxtaposition(const ClassEntry& c, const ClassEntry& b) { return entry_includes(c, b); }

// The juxtaposition contained in the most usable D images, if any.
inline std::optional<ClassEntry> best_juxtaposition(const PathInfo& p) {
    std::optional<ClassEntry> best;
    int best_count = 0;
    for (const auto& b : juxtaposition_candidates()) {
        int cnt = 0;
        for (const auto& t : p.tiles) cnt += t.usable && class_contains_juxtaposition(t.local, b);
        if (cnt > best_count) {
            best = b;
            best_count = cnt;
        }
    }
    return best;
}

}  // namespace ppm
