#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ppm/reduction/assembly.hpp"
#include "ppm/sat.hpp"

namespace ppm {

struct SimulationResult {
    bool satisfiable = false;
    std::optional<Assignment> witness;
    long nodes = 0;
};

namespace detail {

// Unit-level grid-preserving embedding problem: every pattern unit goes to a text unit of the
// same tile and shape, point k to point k, and on every axis the order of pattern points must be
// the order of their images.
class GridCsp {
public:
    explicit GridCsp(const ReductionInstance& inst) : inst_(inst) {
        int nu = static_cast<int>(inst.units.size());
        local_.assign(nu, -1);
        for (int id = 0; id < nu; ++id) {
            const auto& r = inst.units[id];
            auto& list = r.side ? text_ : pattern_;
            local_[id] = static_cast<int>(list.size());
            list.push_back(id);
        }
        rank_axes();
        init_domains();
        build_constraints();
    }

    // Restricts each variable's assignment unit to Y (true) or Z (false).
    void fix(const Assignment& rho) {
        for (std::size_t k = 0; k < inst_.assignment_units.size(); ++k) {
            const auto& a = inst_.assignment_units[k];
            restrict_to(local_[a[0]], local_[rho[k] ? a[1] : a[2]]);
        }
    }

    SimulationResult solve() {
        SimulationResult res;
        auto dom = dom_;
        if (!propagate(dom, all_vars())) return res;
        std::vector<int> order;
        for (const auto& a : inst_.assignment_units) order.push_back(local_[a[0]]);
        if (!search(dom, order, res.nodes)) return res;
        res.satisfiable = true;
        Assignment rho(inst_.formula.n, false);
        // Without clauses there is no assignment layer and every ρ works.
        for (std::size_t k = 0; k < inst_.assignment_units.size(); ++k) {
            int img = text_[dom[local_[inst_.assignment_units[k][0]]][0]];
            rho[k] = inst_.units[img].tag.role == 'Y';
        }
        res.witness = rho;
        return res;
    }

private:
    struct Con {
        int u, ku, tu, v, kv, tv;  // coordinate tu (0 out, 1 in) of point ku of u's image < that of v's
    };

    const ReductionInstance& inst_;
    std::vector<int> local_, pattern_, text_;
    std::vector<std::vector<std::array<int, 2>>> trank_;  // text unit -> point -> axis ranks (out, in)
    std::vector<std::vector<int>> dom_;
    std::vector<Con> cons_;
    std::vector<std::vector<int>> incident_;

    const TilePoint& point(int id, int k) const {
        const auto& r = inst_.units[id];
        return inst_.tiles[r.tile][r.side][r.first_point + k];
    }
    // Axis index of a coordinate: out of tile t lies on axis t + 1, in on axis t.
    int axis(int id, int type) const { return inst_.units[id].tile + (type == 0 ? 1 : 0); }

    void rank_axes() {
        int axes = inst_.used_tiles + 1;
        std::vector<std::vector<std::pair<Value, std::pair<int, int>>>> on(axes);
        trank_.assign(text_.size(), {});
        for (int i = 0; i < static_cast<int>(text_.size()); ++i) {
            int id = text_[i];
            int n = inst_.units[id].points;
            trank_[i].assign(n, {0, 0});
            for (int k = 0; k < n; ++k)
                for (int type : {0, 1})
                    on[axis(id, type)].push_back({type ? point(id, k).in : point(id, k).out, {i, k * 2 + type}});
        }
        for (auto& a : on) {
            std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            for (int r = 0; r < static_cast<int>(a.size()); ++r) {
                auto [i, kt] = a[r].second;
                trank_[i][kt / 2][kt % 2] = r;
            }
        }
    }

    std::vector<int> shape(int id) const {
        const auto& r = inst_.units[id];
        std::vector<Value> ins;
        for (int k = 0; k < r.points; ++k) ins.push_back(point(id, k).in);
        auto rk = rank_values(ins);
        return rk;
    }

    void init_domains() {
        std::map<std::pair<int, std::vector<int>>, std::vector<int>> by_shape;
        for (int i = 0; i < static_cast<int>(text_.size()); ++i)
            by_shape[{inst_.units[text_[i]].tile, shape(text_[i])}].push_back(i);
        dom_.assign(pattern_.size(), {});
        const auto& t0 = inst_.tiles[0];
        for (int i = 0; i < static_cast<int>(pattern_.size()); ++i) {
            int id = pattern_[i];
            const auto& r = inst_.units[id];
            auto it = by_shape.find({r.tile, shape(id)});
            if (it != by_shape.end()) dom_[i] = it->second;
            // The inflated anchors can only go to the text anchors.
            if (r.tile == 0 && r.tag.role == 'A') {
                int want = r.tag.k == 1 ? t0[1].front().unit : t0[1].back().unit;
                dom_[i] = {local_[want]};
            }
        }
    }

    void build_constraints() {
        int axes = inst_.used_tiles + 1;
        std::vector<std::vector<std::pair<Value, std::array<int, 3>>>> on(axes);
        for (int i = 0; i < static_cast<int>(pattern_.size()); ++i) {
            int id = pattern_[i];
            for (int k = 0; k < inst_.units[id].points; ++k)
                for (int type : {0, 1})
                    on[axis(id, type)].push_back({type ? point(id, k).in : point(id, k).out, {i, k, type}});
        }
        incident_.assign(pattern_.size(), {});
        for (auto& a : on) {
            std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            for (std::size_t r = 1; r < a.size(); ++r) {
                auto [u, ku, tu] = a[r - 1].second;
                auto [v, kv, tv] = a[r].second;
                if (u == v) {
                    auto& d = dom_[u];
                    d.erase(std::remove_if(d.begin(), d.end(),
                                           [&](int e) { return !(trank_[e][ku][tu] < trank_[e][kv][tv]); }),
                            d.end());
                    continue;
                }
                int c = static_cast<int>(cons_.size());
                cons_.push_back({u, ku, tu, v, kv, tv});
                incident_[u].push_back(c);
                incident_[v].push_back(c);
            }
        }
    }

    void restrict_to(int var, int value) {
        auto& d = dom_[var];
        bool has = std::find(d.begin(), d.end(), value) != d.end();
        d.clear();
        if (has) d.push_back(value);
    }

    std::vector<int> all_vars() const {
        std::vector<int> v(pattern_.size());
        for (int i = 0; i < static_cast<int>(v.size()); ++i) v[i] = i;
        return v;
    }

    bool propagate(std::vector<std::vector<int>>& dom, std::vector<int> changed) const {
        std::vector<char> queued(cons_.size(), 0);
        std::vector<int> work;
        for (int x : changed)
            for (int c : incident_[x])
                if (!queued[c]) {
                    queued[c] = 1;
                    work.push_back(c);
                }
        for (int x : changed)
            if (dom[x].empty()) return false;
        while (!work.empty()) {
            int c = work.back();
            work.pop_back();
            queued[c] = 0;
            const Con& k = cons_[c];
            auto& du = dom[k.u];
            auto& dv = dom[k.v];
            int lo = INT32_MAX, hi = -1;
            for (int e : du) lo = std::min(lo, trank_[e][k.ku][k.tu]);
            for (int e : dv) hi = std::max(hi, trank_[e][k.kv][k.tv]);
            auto su = du.size(), sv = dv.size();
            dv.erase(std::remove_if(dv.begin(), dv.end(), [&](int e) { return trank_[e][k.kv][k.tv] <= lo; }), dv.end());
            du.erase(std::remove_if(du.begin(), du.end(), [&](int e) { return trank_[e][k.ku][k.tu] >= hi; }), du.end());
            if (du.empty() || dv.empty()) return false;
            for (auto [x, before] : {std::pair{k.u, su}, std::pair{k.v, sv}})
                if (dom[x].size() != before)
                    for (int c2 : incident_[x])
                        if (c2 != c && !queued[c2]) {
                            queued[c2] = 1;
                            work.push_back(c2);
                        }
        }
        return true;
    }

    bool search(std::vector<std::vector<int>>& dom, const std::vector<int>& first, long& nodes) const {
        ++nodes;
        int var = -1;
        for (int x : first)
            if (dom[x].size() > 1) {
                var = x;
                break;
            }
        if (var < 0) {
            std::size_t best = SIZE_MAX;
            for (int x = 0; x < static_cast<int>(dom.size()); ++x)
                if (dom[x].size() > 1 && dom[x].size() < best) {
                    best = dom[x].size();
                    var = x;
                }
        }
        if (var < 0) return true;
        for (int value : dom[var]) {
            auto next = dom;
            next[var] = {value};
            if (propagate(next, {var}) && search(next, first, nodes)) {
                dom = std::move(next);
                return true;
            }
        }
        return false;
    }
};

}  // namespace detail

// Decides whether a unit-level grid-preserving embedding of π′ into τ′ exists and reads the
// assignment off the images of the assignment picks.
inline SimulationResult simulate_grid_preserving(const ReductionInstance& inst) {
    if (inst.formula.n > 20) throw TooManyVariables("TooManyVariables: simulation is limited to n <= 20");
    if (!inst.kept) throw std::logic_error("simulation needs a kept instance");
    return detail::GridCsp(inst).solve();
}

// The same problem with the assignment picks forced by ρ.
inline bool grid_preserving_feasible(const ReductionInstance& inst, const Assignment& rho) {
    if (!inst.kept) throw std::logic_error("simulation needs a kept instance");
    detail::GridCsp csp(inst);
    csp.fix(rho);
    return csp.solve().satisfiable;
}

// Maps the pattern unit by unit following the branch rules, then point by point through the
// assembly positions. Returns none unless the result is a grid-preserving embedding.
inline std::optional<Embedding> embedding_from_assignment(const ReductionInstance& inst, const Assignment& rho) {
    if (static_cast<int>(rho.size()) != inst.formula.n) return std::nullopt;
    const auto& units = inst.units;
    std::vector<int> img(units.size(), -1);
    const auto& t0 = inst.tiles[0];
    // Tile 0 text units by tag.
    std::map<long long, int> text0;
    for (const auto& p : t0[1]) text0[detail::tag_key(units[p.unit].tag)] = p.unit;
    auto holds = [&](const Literal& l) { return rho[l.var - 1] == l.positive; };
    for (int id = 0; id < static_cast<int>(units.size()); ++id) {
        const auto& u = units[id];
        if (u.side != 0) continue;
        if (u.tile == 0) {
            Tag want = u.tag.role == 'X' ? Tag{'Y', u.tag.k, 1, 0} : u.tag;
            auto it = text0.find(detail::tag_key(want));
            if (it == text0.end()) return std::nullopt;
            img[id] = it->second;
            continue;
        }
        if (u.parents.size() != 1 || img[u.parents[0]] < 0) return std::nullopt;
        const auto& pu = units[u.parents[0]];
        const auto& tv = units[img[u.parents[0]]];
        const auto& kids = tv.children;
        if (kids.empty()) return std::nullopt;
        int pick = 0;
        if (kids.size() == pu.children.size()) pick = u.child_index;
        else if (kids.size() == 2 && pu.children.size() == 1) {
            bool bar = false;
            switch (u.rule.kind) {
                case BranchRule::Assign: bar = rho[u.rule.var - 1]; break;
                case BranchRule::Swap: bar = u.rule.partner >= 0 && img[u.rule.partner] >= 0 &&
                                             units[img[u.rule.partner]].tag.role == 'Y';
                    break;
                case BranchRule::Eval: bar = holds(u.rule.literal); break;
                case BranchRule::None: return std::nullopt;
            }
            pick = bar ? 0 : 1;
        } else {
            return std::nullopt;
        }
        img[id] = kids[pick];
    }
    Embedding e(inst.pattern.size(), -1);
    for (int id = 0; id < static_cast<int>(units.size()); ++id) {
        const auto& u = units[id];
        if (u.side != 0) continue;
        const auto& v = units[img[id]];
        if (v.tile != u.tile || v.points != u.points) return std::nullopt;
        for (int k = 0; k < u.points; ++k)
            e[inst.position[0][u.tile][u.first_point + k]] = inst.position[1][v.tile][v.first_point + k];
    }
    for (int r = 0; r < 2; ++r) {
        const auto& pr = inst.anchor_runs[0][r];
        const auto& tr = inst.anchor_runs[1][r];
        if (pr.size() != tr.size()) return std::nullopt;
        for (std::size_t i = 0; i < pr.size(); ++i) e[pr[i]] = tr[i];
    }
    if (!is_embedding(inst.text, inst.pattern, e)) return std::nullopt;
    return e;
}

// Every pattern point lands in the text cell of the same index.
inline bool is_grid_preserving(const ReductionInstance& inst, const Embedding& e) {
    const auto& pg = inst.pattern_gridding;
    const auto& tg = inst.text_gridding;
    for (int i = 0; i < static_cast<int>(e.size()); ++i) {
        Cell a{Gridding::locate(pg.col_cuts, i + 1), Gridding::locate(pg.row_cuts, inst.pattern(i + 1))};
        Cell b{Gridding::locate(tg.col_cuts, e[i] + 1), Gridding::locate(tg.row_cuts, inst.text(e[i] + 1))};
        if (!(a == b)) return false;
    }
    return true;
}

}  // namespace ppm
