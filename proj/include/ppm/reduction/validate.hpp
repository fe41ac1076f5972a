#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ppm/reduction/assembly.hpp"

namespace ppm {

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Frozen constants, fitted on random formulas with m up to 64 with 25% headroom.
inline constexpr double kJuxtaposition = 1700.0;  // |τ″| ≤ C₁·m·log₂m
inline constexpr double kGadgets = 12000.0;       // |τ″| ≤ C₂·m²

inline long size_budget(SortMode mode, int m) {
    double mm = std::max(m, 4);
    return mode == SortMode::Gadgets ? static_cast<long>(kGadgets * mm * mm)
                                     : static_cast<long>(kJuxtaposition * mm * std::log2(mm));
}

inline Permutation tile_permutation(const std::vector<TilePoint>& pts, Adjacency in_edge) {
    std::vector<Point> ph;
    ph.reserve(pts.size());
    for (const auto& p : pts) ph.push_back(to_physical({p.out, p.in}, in_edge));
    return standardize(ph);
}

inline ValidationReport validate_instance(const ReductionInstance& inst) {
    ValidationReport rep;
    auto fail = [&](std::string s) { rep.violations.push_back(std::move(s)); };
    if (!inst.kept) {
        fail("instance was built without a trace");
        return rep;
    }
    const auto& path = inst.path;
    std::set<int> permuting;  // juxtaposition tiles reorder units on purpose
    for (std::size_t i = 0; i < inst.schedule.kinds.size(); ++i)
        if (inst.schedule.kinds[i] == LayerKind::Juxt) permuting.insert(inst.schedule.tiles[i][0]);
    for (int t = 0; t < inst.used_tiles; ++t) {
        const auto& pt = path.tiles[t];
        for (int side = 0; side < 2; ++side) {
            const auto& pts = inst.tiles[t][side];
            std::string where = std::string(side ? "text" : "pattern") + " tile " + std::to_string(t);
            auto p = tile_permutation(pts, pt.in_edge);
            if (!entry_contains(pt.local, p)) fail(where + ": not in its cell class");
            if (!pt.usable && !is_monotone_seq(p.ranks(), true)) fail(where + ": monotone cell not increasing");
            if (pt.usable) {
                bool fib = is_fibonacci(p);
                bool juxt = inst.juxtaposition && entry_contains(*inst.juxtaposition, p);
                if (!fib && !(inst.mode == SortMode::Juxtaposition && juxt)) fail(where + ": D cell content not allowed");
            }
            // Stacking: units occupy consecutive out ranges; non-flip units also in consecutive in ranges.
            int prev = -1;
            std::set<int> done;
            Value prev_in_hi;
            bool have_in = false;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i && !(pts[i - 1].out < pts[i].out)) fail(where + ": points not in out order");
                int u = pts[i].unit;
                if (u != prev) {
                    if (!done.insert(u).second) fail(where + ": unit " + std::to_string(u) + " not contiguous");
                    prev = u;
                }
                const auto& rec = inst.units[u];
                if (rec.via == GadgetKind::FlipText || permuting.count(t) || static_cast<int>(i) != rec.first_point)
                    continue;
                Value lo = pts[rec.first_point].in, hi = lo;
                for (int k = rec.first_point; k < rec.first_point + rec.points; ++k) {
                    lo = std::min(lo, pts[k].in);
                    hi = std::max(hi, pts[k].in);
                }
                if (have_in && !(prev_in_hi < lo)) fail(where + ": unit " + rec.tag.str() + " breaks the direct sum");
                prev_in_hi = hi;
                have_in = true;
            }
        }
    }
    // Each unit sits inside, or encloses, the out range of its parents; simple gadgets fix the pair shape.
    auto range = [&](int id, bool out) {
        const auto& r = inst.units[id];
        const auto& pts = inst.tiles[r.tile][r.side];
        Value lo = out ? pts[r.first_point].out : pts[r.first_point].in, hi = lo;
        for (int k = r.first_point; k < r.first_point + r.points; ++k) {
            const Value& v = out ? pts[k].out : pts[k].in;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::pair{lo, hi};
    };
    for (int id = 0; id < static_cast<int>(inst.units.size()); ++id) {
        const auto& r = inst.units[id];
        if (r.parents.empty() || r.points == 0) continue;
        auto [lo, hi] = range(r.parents.front(), true);
        for (int q : r.parents) {
            auto [a, b] = range(q, true);
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        auto [ilo, ihi] = range(id, false);
        bool ok = r.relation == Relation::Inside ? lo < ilo && ihi < hi : ilo < lo && hi < ihi;
        std::string where = std::string(r.side ? "text" : "pattern") + " tile " + std::to_string(r.tile) + ": unit " +
                            r.tag.str();
        if (!ok) fail(where + (r.relation == Relation::Inside ? " escapes its parent" : " does not enclose its parent"));
        bool chain = r.via == GadgetKind::FlipText || r.via == GadgetKind::FlipPattern;
        if (chain || permuting.count(r.tile) || r.points != 2) continue;
        const auto& pts = inst.tiles[r.tile][r.side];
        bool rising = pts[r.first_point].in < pts[r.first_point + 1].in;
        bool want = r.via == GadgetKind::Copy || r.via == GadgetKind::Multiply;
        if (rising != want) fail(where + " has the wrong shape for " + gadget_name(r.via));
    }
    if (inst.pattern.size() != inst.pattern_size()) fail("pattern size bookkeeping");
    if (inst.text.size() != inst.text_size()) fail("text size bookkeeping");
    if (!check_gridding(inst.pattern, inst.pattern_gridding, path.matrix)) fail("pattern gridding rejected");
    if (!check_gridding(inst.text, inst.text_gridding, path.matrix)) fail("text gridding rejected");
    for (int side = 0; side < 2; ++side) {
        const auto& runs = inst.anchor_runs[side];
        for (int r = 0; r < 2; ++r)
            if (static_cast<long>(runs[r].size()) != inst.text_points + 1) fail("anchor run length");
        const auto& pts = inst.tiles[0][side];
        if (pts.empty() || inst.units[pts.front().unit].tag != Tag{'A', 1, 0, 0} ||
            inst.units[pts.back().unit].tag != Tag{'A', 2, 0, 0})
            fail("anchors are not the extreme units of tile 0");
        for (std::size_t i = 1; i + 1 < pts.size(); ++i)
            if (!(pts.front().in < pts[i].in) || !(pts[i].in < pts.back().in)) fail("anchor not extremal in tile 0");
    }
    if (inst.text_size() > size_budget(inst.mode, inst.formula.m())) fail("text exceeds the size budget");
    return rep;
}

}  // namespace ppm
