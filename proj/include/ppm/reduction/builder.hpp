#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ppm/reduction/instance.hpp"

namespace ppm {

enum class OpKind { Copy, Multiply, Choose, Pick, Merge, Follow, FlipText, FlipPattern, Middle, End, Juxt };

struct Op {
    OpKind kind = OpKind::Copy;
    std::vector<Tag> tags;  // output tags; empty inherits the input tag
    BranchRule rule;
    int pos = 0;       // Juxt: output position of the unit
    bool rev = false;  // Juxt: the unit lands in a decreasing part
};

using TaggedOps = std::array<std::vector<std::pair<Tag, Op>>, 2>;

namespace detail {

inline long long tag_key(const Tag& t) {
    return ((static_cast<long long>(t.role) * 1000003LL + t.k) * 1000003LL + t.j) * 4 + t.sub;
}

struct LiveUnit {
    int id = -1;
    Tag tag;
    std::vector<Value> outs;
    bool chain = false;
    int gadget = -1;
};

struct Emitted {
    Tag tag;
    UnitPoints pts;
    std::vector<int> parents;  // indices into the current list
    Relation relation = Relation::Inside;
    GadgetKind via = GadgetKind::Copy;
    int child_index = 0;
    BranchRule rule;
    bool chain = false;
    int gadget = -1;
    int pos = -1;
};

inline int ceil_log2(int x) {
    int l = 0;
    while ((1 << l) < x) ++l;
    return l;
}

// Runs the phases either symbolically (planning) or with geometry on a bound schedule.
class Construction {
public:
    Construction(ReductionInstance& inst, bool geometry, bool keep)
        : inst_(inst), f_(inst.formula), geometry_(geometry), keep_(keep && geometry) {}

    void run() {
        initial();
        if (f_.m() == 0) return;
        occurrence_targets();
        assignment();
        multiplication();
        if (inst_.mode == SortMode::Gadgets) sorting_gadgets(); else sorting_juxtaposition();
        evaluation();
    }

private:
    // ---- engine -------------------------------------------------------------------------------

    void initial() {
        for (int side = 0; side < 2; ++side) {
            std::vector<Tag> tags{{'A', 1, 0, 0}};
            for (int k = 1; k <= f_.n; ++k) tags.push_back({side ? 'Y' : 'X', k, 1, 0});
            tags.push_back({'A', 2, 0, 0});
            std::vector<Emitted> em;
            for (std::size_t p = 0; p < tags.size(); ++p) {
                Emitted e;
                e.tag = tags[p];
                Value a(static_cast<int>(2 * p + 1)), b(static_cast<int>(2 * p + 2));
                e.pts = {{a, a}, {b, b}};
                em.push_back(e);
            }
            commit(side, 0, em);
        }
        tile_ = 0;
    }

    std::unordered_map<long long, int> index_of(int side) const {
        std::unordered_map<long long, int> m;
        for (int i = 0; i < static_cast<int>(cur_[side].size()); ++i) m[tag_key(cur_[side][i].tag)] = i;
        return m;
    }

    std::array<std::map<int, Op>, 2> resolve(const TaggedOps& ops) const {
        std::array<std::map<int, Op>, 2> out;
        for (int side = 0; side < 2; ++side) {
            auto idx = index_of(side);
            for (const auto& [t, op] : ops[side]) {
                auto it = idx.find(tag_key(t));
                if (it == idx.end()) throw std::logic_error("construction: no unit " + t.str());
                out[side][it->second] = op;
            }
        }
        return out;
    }

    static int width(OpKind k) { return k == OpKind::Merge || k == OpKind::FlipText ? 2 : 1; }

    std::vector<Emitted> emit(int side, const std::map<int, Op>& ops, OpKind fallback) {
        const auto& cur = cur_[side];
        std::vector<Emitted> em;
        for (int i = 0; i < static_cast<int>(cur.size());) {
            auto it = ops.find(i);
            Op op;
            if (it != ops.end()) op = it->second;
            else op.kind = cur[i].chain ? fallback : OpKind::Copy;
            int w = width(op.kind);
            if (i + w > static_cast<int>(cur.size())) throw std::logic_error("construction: op runs past the tile");
            emit_op(side, i, op, em);
            i += w;
        }
        if (!em.empty() && em.front().pos >= 0)
            std::stable_sort(em.begin(), em.end(), [](const Emitted& a, const Emitted& b) { return a.pos < b.pos; });
        return em;
    }

    void emit_op(int side, int i, const Op& op, std::vector<Emitted>& em) {
        const auto& cur = cur_[side];
        const LiveUnit& u = cur[i];
        auto tag_at = [&](std::size_t c, const Tag& dflt) { return c < op.tags.size() ? op.tags[c] : dflt; };
        auto base = [&](std::size_t c) {
            Emitted e;
            e.tag = tag_at(c, u.tag);
            e.parents = {i};
            e.child_index = static_cast<int>(c);
            return e;
        };
        const auto& o = u.outs;
        auto one = [&](GadgetKind via, Relation rel, auto&& make) {
            Emitted e = base(0);
            e.via = via;
            e.relation = rel;
            if (via == GadgetKind::Pick || via == GadgetKind::Follow) e.gadget = new_gadget(via, side, {u.id});
            if (geometry_) e.pts = make();
            em.push_back(e);
        };
        switch (op.kind) {
            case OpKind::Copy:
                one(GadgetKind::Copy, Relation::Inside, [&] { return gadget::copy(o.at(0), o.at(1)); });
                break;
            case OpKind::Pick: {
                one(GadgetKind::Pick, Relation::Inside, [&] { return gadget::pick(o.at(0), o.at(1)); });
                em.back().rule = op.rule;
                break;
            }
            case OpKind::Follow:
                one(GadgetKind::Follow, Relation::Encloses, [&] { return gadget::follow(o.at(0), o.at(1)); });
                break;
            case OpKind::Multiply:
            case OpKind::Choose: {
                std::vector<UnitPoints> pts;
                int g = new_gadget(op.kind == OpKind::Multiply ? GadgetKind::Multiply : GadgetKind::Choose, side, {u.id});
                if (geometry_) pts = op.kind == OpKind::Multiply ? gadget::multiply(o.at(0), o.at(1))
                                                                 : gadget::choose(o.at(0), o.at(1));
                for (std::size_t c = 0; c < 2; ++c) {
                    Emitted e = base(c);
                    e.via = op.kind == OpKind::Multiply ? GadgetKind::Multiply : GadgetKind::Choose;
                    e.gadget = g;
                    if (geometry_) e.pts = pts[c];
                    em.push_back(e);
                }
                break;
            }
            case OpKind::Merge: {
                const LiveUnit& v = cur[i + 1];
                Emitted e = base(0);
                e.parents = {i, i + 1};
                e.via = GadgetKind::Merge;
                e.relation = Relation::Encloses;
                e.gadget = new_gadget(GadgetKind::Merge, side, {u.id, v.id});
                if (geometry_) e.pts = gadget::merge(o.at(0), v.outs.at(1));
                em.push_back(e);
                break;
            }
            case OpKind::FlipText: {
                const LiveUnit& v = cur[i + 1];
                std::pair<UnitPoints, UnitPoints> pts;
                if (geometry_) pts = gadget::flip_start(o.at(0), o.at(1), v.outs.at(0), v.outs.at(1));
                int g = new_gadget(GadgetKind::FlipText, side, {u.id, v.id});
                // The A2 lineage now comes first.
                Emitted e2;
                e2.tag = tag_at(0, v.tag);
                e2.parents = {i + 1};
                e2.pts = pts.second;
                Emitted e1;
                e1.tag = tag_at(1, u.tag);
                e1.parents = {i};
                e1.pts = pts.first;
                for (Emitted* e : {&e2, &e1}) {
                    e->via = GadgetKind::FlipText;
                    e->chain = true;
                    e->gadget = g;
                    em.push_back(*e);
                }
                break;
            }
            case OpKind::FlipPattern: {
                int g = new_gadget(GadgetKind::FlipPattern, side, {u.id});
                one(GadgetKind::FlipPattern, Relation::Inside,
                    [&] { return gadget::flip_pattern_start(o.at(0), o.at(1)); });
                em.back().chain = true;
                em.back().gadget = g;
                break;
            }
            case OpKind::Middle:
            case OpKind::End: {
                UnitPoints prev;
                for (const auto& v : o) prev.push_back({v, v});
                bool end = op.kind == OpKind::End;
                one(GadgetKind::FlipText, Relation::Encloses,
                    [&] { return end ? gadget::flip_end(prev) : gadget::flip_middle(prev); });
                Emitted& e = em.back();
                e.gadget = u.gadget;
                e.via = u.gadget >= 0 && keep_ ? inst_.gadgets[u.gadget].kind : GadgetKind::FlipText;
                e.chain = !end;
                break;
            }
            case OpKind::Juxt: {
                one(GadgetKind::Copy, Relation::Inside, [&] {
                    Value lo(2 * op.pos + 1), hi(2 * op.pos + 2);
                    UnitPoints p{{op.rev ? hi : lo, o.at(0) + gadget::eps}, {op.rev ? lo : hi, o.at(1) - gadget::eps}};
                    return p;
                });
                em.back().pos = op.pos;
                break;
            }
        }
    }

    int new_gadget(GadgetKind k, int side, std::vector<int> inputs) {
        if (!keep_) return -1;
        GadgetRecord g;
        g.kind = k;
        g.side = side;
        g.inputs = std::move(inputs);
        g.first_tile = g.last_tile = tile_ + 1;
        inst_.gadgets.push_back(g);
        return static_cast<int>(inst_.gadgets.size()) - 1;
    }

    // Renormalises out-coordinates to ranks, checks the stacking order, records, and advances.
    void commit(int side, int tile, std::vector<Emitted>& em) {
        std::vector<LiveUnit> next;
        next.reserve(em.size());
        if (geometry_) {
            std::size_t total = 0;
            for (const auto& e : em) total += e.pts.size();
            std::vector<std::pair<Value, std::pair<int, int>>> keys;
            keys.reserve(total);
            for (int u = 0; u < static_cast<int>(em.size()); ++u)
                for (int k = 0; k < static_cast<int>(em[u].pts.size()); ++k) keys.push_back({em[u].pts[k].out, {u, k}});
            std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t r = 0; r < keys.size(); ++r) {
                if (r && keys[r].first == keys[r - 1].first)
                    throw DuplicateCoordinate("DuplicateCoordinate: coincident out-coordinates in a tile");
                em[keys[r].second.first].pts[keys[r].second.second].out = Value(static_cast<int>(r + 1));
            }
            for (std::size_t u = 0; u < em.size(); ++u) {
                auto& p = em[u].pts;
                std::sort(p.begin(), p.end(), [](const FramePoint& a, const FramePoint& b) { return a.out < b.out; });
                if (u && !(em[u - 1].pts.back().out < p.front().out))
                    throw std::logic_error("construction: tile " + std::to_string(tile) +
                                           " breaks the stacking order at " + em[u].tag.str());
            }
            long cnt = static_cast<long>(total);
            (side ? inst_.text_points : inst_.pattern_points) += cnt;
            inst_.max_tile = std::max(inst_.max_tile, cnt);
        }
        if (keep_ && static_cast<int>(inst_.tiles.size()) <= tile) inst_.tiles.resize(tile + 1);
        for (auto& e : em) {
            LiveUnit lu;
            lu.tag = e.tag;
            lu.chain = e.chain;
            lu.gadget = e.chain ? e.gadget : -1;
            for (const auto& p : e.pts) lu.outs.push_back(p.out);
            if (keep_) {
                UnitRecord r;
                r.side = side;
                r.tile = tile;
                r.tag = e.tag;
                r.via = e.via;
                r.relation = e.relation;
                r.child_index = e.child_index;
                r.rule = e.rule;
                for (int p : e.parents) r.parents.push_back(cur_[side][p].id);
                auto& pts = inst_.tiles[tile][side];
                r.first_point = static_cast<int>(pts.size());
                r.points = static_cast<int>(e.pts.size());
                lu.id = static_cast<int>(inst_.units.size());
                for (const auto& p : e.pts) pts.push_back({p.out, p.in, lu.id});
                for (int p : e.parents) inst_.units[cur_[side][p].id].children.push_back(lu.id);
                inst_.units.push_back(r);
                if (e.gadget >= 0 && !e.chain) {
                    inst_.gadgets[e.gadget].outputs.push_back(lu.id);
                    inst_.gadgets[e.gadget].last_tile = tile;
                }
            }
            next.push_back(std::move(lu));
        }
        if (!geometry_ || !keep_)
            for (auto& lu : next) lu.id = -1;
        cur_[side] = std::move(next);
        inst_.used_tiles = std::max(inst_.used_tiles, tile + 1);
    }

    void step(int tile, const std::array<std::map<int, Op>, 2>& ops, OpKind fallback = OpKind::Copy) {
        for (int side = 0; side < 2; ++side) {
            auto em = emit(side, ops[side], fallback);
            commit(side, tile, em);
        }
        tile_ = tile;
    }

    void copy_until(int tile) {
        while (tile_ + 1 < tile) step(tile_ + 1, {});
    }

    // Schedules or executes one layer.
    void layer(LayerKind kind, const std::string& phase, const TaggedOps& tagged) {
        auto ops = resolve(tagged);
        if (!geometry_) {
            inst_.schedule.kinds.push_back(kind);
            inst_.schedule.phases.push_back(phase);
            for (int side = 0; side < 2; ++side) {
                auto em = emit(side, ops[side], OpKind::Copy);
                commit(side, 0, em);
                for (auto& u : cur_[side]) u.chain = false;
            }
            return;
        }
        if (next_layer_ >= inst_.schedule.kinds.size() || inst_.schedule.kinds[next_layer_] != kind)
            throw std::logic_error("construction: layer does not match the schedule");
        const auto& at = inst_.schedule.tiles[next_layer_++];
        if (kind == LayerKind::Flip) {
            copy_until(at[0]);
            step(at[0], ops);
            while (tile_ + 1 < at[1]) step(tile_ + 1, {}, OpKind::Middle);
            step(at[1], {}, OpKind::End);
        } else {
            copy_until(at[0]);
            step(at[0], ops);
        }
    }

    // ---- phases -------------------------------------------------------------------------------

    static Tag T(char role, int k, int j, int sub = 0) { return {role, k, j, sub}; }
    static Op op(OpKind k, std::vector<Tag> tags = {}, BranchRule rule = {}) {
        Op o;
        o.kind = k;
        o.tags = std::move(tags);
        o.rule = rule;
        return o;
    }

    std::vector<int> occ_;
    std::map<std::pair<int, int>, int> target_;             // (k, j) -> position in clause order
    std::vector<std::pair<int, int>> item_of_position_;     // clause-order position -> (k, j)

    void occurrence_targets() {
        occ_ = f_.occurrences();
        std::vector<int> seen(f_.n + 1, 0);
        for (int c = 0; c < f_.m(); ++c)
            for (int s = 0; s < 3; ++s) {
                int k = f_.clauses[c][s].var;
                int j = ++seen[k];
                target_[{k, j}] = 3 * c + s;
                item_of_position_.push_back({k, j});
            }
    }

    void freeze(const std::function<bool(const Tag&)>& frozen) {
        for (int side = 0; side < 2; ++side) {
            auto& c = cur_[side];
            c.erase(std::remove_if(c.begin(), c.end(), [&](const LiveUnit& u) { return u.tag.role != 'A' && frozen(u.tag); }),
                    c.end());
        }
    }

    void assignment() {
        TaggedOps ops;
        for (int k = 1; k <= f_.n; ++k) {
            BranchRule r;
            r.kind = BranchRule::Assign;
            r.var = k;
            ops[0].push_back({T('X', k, 1), op(OpKind::Pick, {}, r)});
            ops[1].push_back({T('Y', k, 1), op(OpKind::Choose, {T('Y', k, 1), T('Z', k, 1)})});
        }
        layer(LayerKind::D, "assignment", ops);
        if (keep_) {
            inst_.assignment_units.assign(f_.n, {-1, -1, -1});
            for (int side = 0; side < 2; ++side)
                for (const auto& u : cur_[side]) {
                    if (u.tag.role == 'A') continue;
                    auto& a = inst_.assignment_units[u.tag.k - 1];
                    a[u.tag.role == 'X' ? 0 : (u.tag.role == 'Y' ? 1 : 2)] = u.id;
                }
        }
        freeze([&](const Tag& t) { return occ_[t.k - 1] == 0; });
    }

    struct FlipGroup {
        std::vector<Tag> pattern, text;
        std::vector<std::pair<Tag, Tag>> pattern_couples, text_couples;
    };

    void flip_layer(const std::string& phase, const std::vector<FlipGroup>& groups) {
        TaggedOps ops;
        for (const auto& g : groups)
            for (int side = 0; side < 2; ++side) {
                const auto& members = side ? g.text : g.pattern;
                const auto& couples = side ? g.text_couples : g.pattern_couples;
                std::vector<long long> coupled;
                for (const auto& [a, b] : couples) {
                    ops[side].push_back({a, op(OpKind::FlipText)});
                    coupled.push_back(tag_key(a));
                    coupled.push_back(tag_key(b));
                }
                for (const auto& t : members)
                    if (std::find(coupled.begin(), coupled.end(), tag_key(t)) == coupled.end())
                        ops[side].push_back({t, op(OpKind::FlipPattern)});
            }
        check_couples(ops, groups);
        layer(LayerKind::Flip, phase, ops);
    }

    void check_couples(const TaggedOps&, const std::vector<FlipGroup>& groups) const {
        for (int side = 0; side < 2; ++side) {
            auto idx = index_of(side);
            for (const auto& g : groups)
                for (const auto& [a, b] : side ? g.text_couples : g.pattern_couples) {
                    auto ia = idx.find(tag_key(a)), ib = idx.find(tag_key(b));
                    if (ia == idx.end() || ib == idx.end() || ib->second != ia->second + 1)
                        throw std::logic_error("construction: flip couple " + a.str() + "," + b.str() + " not adjacent");
                }
        }
    }

    void multiplication() {
        std::vector<int> ell(f_.n + 1, 0);
        int lmax = 0;
        for (int k = 1; k <= f_.n; ++k) {
            ell[k] = occ_[k - 1] <= 1 ? 0 : ceil_log2(occ_[k - 1]);
            lmax = std::max(lmax, ell[k]);
        }
        for (int i = 0; i < lmax; ++i) {
            int width = 1 << i;
            TaggedOps ops;
            for (int k = 1; k <= f_.n; ++k) {
                if (i >= ell[k]) continue;
                for (int j = 1; j <= width; ++j) {
                    ops[0].push_back({T('X', k, j), op(OpKind::Multiply, {T('X', k, 2 * j - 1), T('X', k, 2 * j)})});
                    for (char r : {'Y', 'Z'})
                        ops[1].push_back({T(r, k, j), op(OpKind::Multiply, {T(r, k, 2 * j - 1), T(r, k, 2 * j)})});
                }
            }
            layer(LayerKind::Mono, "multiplication", ops);
            std::vector<FlipGroup> groups;
            for (int k = 1; k <= f_.n; ++k) {
                if (i >= ell[k]) continue;
                FlipGroup g;
                for (int j = 1; j <= 2 * width; ++j) {
                    g.pattern.push_back(T('X', k, j));
                    g.text.push_back(T('Y', k, j));
                    g.text.push_back(T('Z', k, j));
                }
                for (int j = 1; j <= width; ++j) g.text_couples.push_back({T('Y', k, 2 * j), T('Z', k, 2 * j - 1)});
                groups.push_back(g);
            }
            flip_layer("multiplication", groups);
        }
        freeze([&](const Tag& t) { return t.j > occ_[t.k - 1]; });
    }

    std::vector<std::pair<int, int>> current_items() const {
        std::vector<std::pair<int, int>> items;
        for (const auto& u : cur_[0])
            if (u.tag.role == 'X') items.push_back({u.tag.k, u.tag.j});
        return items;
    }

    void sorting_gadgets() {
        auto items = current_items();
        int n = static_cast<int>(items.size());
        auto rank = [&](const std::pair<int, int>& it) { return target_.at(it); };
        for (int round = 0; round < n + 1; ++round) {
            std::vector<int> swaps;
            for (int p = round % 2; p + 1 < n; p += 2)
                if (rank(items[p]) > rank(items[p + 1])) swaps.push_back(p);
            if (swaps.empty()) {
                bool sorted = true;
                for (int p = 0; p + 1 < n; ++p) sorted = sorted && rank(items[p]) < rank(items[p + 1]);
                if (sorted) break;
                continue;
            }
            swap_round(items, swaps);
            for (int p : swaps) std::swap(items[p], items[p + 1]);
        }
    }

    void swap_round(const std::vector<std::pair<int, int>>& items, const std::vector<int>& swaps) {
        auto it = [&](int p, int a) { return items[p + a - 1]; };
        // D-layer: choose on the text pairs, pick on the pattern pairs.
        TaggedOps d1;
        auto pidx = index_of(0);
        for (int p : swaps)
            for (int a : {1, 2}) {
                auto [k, j] = it(p, a);
                auto [ko, jo] = it(p, 3 - a);
                BranchRule r;
                r.kind = BranchRule::Swap;
                r.partner = keep_ ? cur_[0][pidx.at(tag_key(T('X', ko, jo)))].id : -1;
                d1[0].push_back({T('X', k, j), op(OpKind::Pick, {T('X', k, j, 1)}, r)});
                for (char role : {'Y', 'Z'})
                    d1[1].push_back({T(role, k, j), op(OpKind::Choose, {T(role, k, j, 1), T(role, k, j, 2)})});
            }
        layer(LayerKind::D, "sorting", d1);

        // Pair names: role, side index a in {1,2}, sub (1 bar, 2 tilde).
        struct N {
            char role;
            int a, sub;
        };
        using Couples = std::vector<std::pair<N, N>>;
        const std::vector<Couples> before = {
            {{{'Z', 1, 2}, {'Y', 2, 1}}, {{'Y', 2, 2}, {'Z', 2, 1}}},
            {{{'Z', 1, 1}, {'Y', 2, 1}}, {{'Z', 1, 2}, {'Z', 2, 1}}},
            {{{'Y', 1, 2}, {'Y', 2, 1}}, {{'Z', 1, 1}, {'Z', 2, 1}}, {{'Z', 1, 2}, {'Y', 2, 2}}}};
        const Couples crossing = {{{'Y', 1, 1}, {'Y', 2, 1}},
                                  {{'Y', 1, 2}, {'Z', 2, 1}},
                                  {{'Z', 1, 1}, {'Y', 2, 2}},
                                  {{'Z', 1, 2}, {'Z', 2, 2}}};
        const std::vector<Couples> after = {
            {{{'Y', 1, 1}, {'Z', 2, 1}}, {{'Y', 1, 2}, {'Y', 2, 2}}, {{'Z', 1, 1}, {'Z', 2, 2}}},
            {{{'Y', 1, 1}, {'Y', 2, 2}}, {{'Y', 1, 2}, {'Z', 2, 2}}},
            {{{'Z', 2, 1}, {'Y', 2, 2}}, {{'Y', 1, 1}, {'Z', 2, 2}}}};

        auto groups_for = [&](const Couples& cs, bool cross) {
            std::vector<FlipGroup> gs;
            for (int p : swaps) {
                FlipGroup g;
                auto name = [&](const N& x) {
                    auto [k, j] = it(p, x.a);
                    return T(x.role, k, j, x.sub);
                };
                for (int a : {1, 2}) {
                    auto [k, j] = it(p, a);
                    g.pattern.push_back(T('X', k, j, 1));
                    for (char role : {'Y', 'Z'})
                        for (int sub : {1, 2}) g.text.push_back(T(role, k, j, sub));
                }
                for (const auto& [x, y] : cs) g.text_couples.push_back({name(x), name(y)});
                if (cross) g.pattern_couples.push_back({g.pattern[0], g.pattern[1]});
                gs.push_back(g);
            }
            return gs;
        };
        for (const auto& cs : before) flip_layer("sorting", groups_for(cs, false));
        flip_layer("sorting", groups_for(crossing, true));
        for (const auto& cs : after) flip_layer("sorting", groups_for(cs, false));

        TaggedOps d2;
        for (int p : swaps)
            for (int a : {1, 2}) {
                auto [k, j] = it(p, a);
                d2[0].push_back({T('X', k, j, 1), op(OpKind::Follow, {T('X', k, j)})});
                for (char role : {'Y', 'Z'}) d2[1].push_back({T(role, k, j, 1), op(OpKind::Merge, {T(role, k, j)})});
            }
        layer(LayerKind::D, "sorting", d2);
    }

    // One juxtaposition layer: `order` lists items (with anchors as (0,1) and (0,2)) in output
    // order; `rev` marks items placed in a decreasing part.
    void juxt_layer(const std::vector<std::pair<int, int>>& order, const std::vector<char>& rev) {
        TaggedOps ops;
        for (int side = 0; side < 2; ++side) {
            std::map<std::pair<int, int>, std::vector<Tag>> units;
            for (const auto& u : cur_[side]) {
                auto key = u.tag.role == 'A' ? std::pair{0, u.tag.k} : std::pair{u.tag.k, u.tag.j};
                units[key].push_back(u.tag);
            }
            int pos = 0;
            for (std::size_t i = 0; i < order.size(); ++i) {
                auto us = units.at(order[i]);
                if (rev[i]) std::reverse(us.begin(), us.end());
                for (const auto& t : us) {
                    Op o = op(OpKind::Juxt);
                    o.pos = pos++;
                    o.rev = rev[i];
                    ops[side].push_back({t, o});
                }
            }
        }
        layer(LayerKind::Juxt, "sorting", ops);
    }

    void sorting_juxtaposition() {
        const ClassEntry b = inst_.juxtaposition.value_or(ClassEntry::juxt_h(true, true));
        bool vertical = b.tag == ClassEntry::JuxtV;
        bool doubled = !b.first_inc || !b.second_inc;
        auto items = current_items();
        int n = static_cast<int>(items.size());
        bool sorted = true;
        for (int i = 0; i < n && sorted; ++i) sorted = target_rank(items, items[i]) == i;
        if (sorted) return;
        int bits = ceil_log2(std::max(n, 1));
        const std::pair<int, int> lo{0, 1}, hi{0, 2};
        auto with_anchors = [&](std::vector<std::pair<int, int>> v) {
            v.insert(v.begin(), lo);
            v.push_back(hi);
            return v;
        };
        // Items arranged as [part 0 | part 1] with decreasing parts reversed.
        auto split = [&](const std::vector<std::pair<int, int>>& seq, const std::vector<char>& bucket,
                         std::vector<char>& rev) {
            std::vector<std::pair<int, int>> p0, p1;
            for (std::size_t i = 0; i < seq.size(); ++i) (bucket[i] ? p1 : p0).push_back(seq[i]);
            if (!b.first_inc) std::reverse(p0.begin(), p0.end());
            if (!b.second_inc) std::reverse(p1.begin(), p1.end());
            rev.assign(p0.size(), !b.first_inc);
            rev.insert(rev.end(), p1.size(), !b.second_inc);
            p0.insert(p0.end(), p1.begin(), p1.end());
            return p0;
        };
        if (!vertical) {
            for (int bit = 0; bit < bits; ++bit) {
                auto seq = with_anchors(items);
                auto bucket_of = [&](const std::pair<int, int>& x) -> char {
                    return x == lo ? 0 : x == hi ? 1 : (target_rank(items, x) >> bit) & 1;
                };
                std::vector<char> bucket(seq.size());
                std::vector<std::pair<int, int>> stable, ones;
                for (std::size_t i = 0; i < seq.size(); ++i) {
                    bucket[i] = bucket_of(seq[i]);
                    (bucket[i] ? ones : stable).push_back(seq[i]);
                }
                stable.insert(stable.end(), ones.begin(), ones.end());
                if (stable == seq) continue;
                std::vector<char> rv;
                auto out = split(seq, bucket, rv);
                juxt_layer(out, rv);
                if (doubled) {
                    std::vector<char> bk(out.size());
                    for (std::size_t i = 0; i < out.size(); ++i) bk[i] = bucket_of(out[i]);
                    auto again = split(out, bk, rv);
                    juxt_layer(again, rv);
                }
                items.assign(stable.begin() + 1, stable.end() - 1);
            }
        } else {
            // Partitions of the target order whose composition yields the current order, replayed
            // backwards as riffles.
            std::map<std::pair<int, int>, int> cur_pos;
            for (int i = 0; i < n; ++i) cur_pos[items[i]] = i;
            std::vector<std::pair<int, int>> w(n);
            for (const auto& [it, r] : target_)
                if (cur_pos.count(it)) w[target_rank(items, it)] = it;
            std::vector<std::vector<std::pair<int, int>>> ws{w};
            std::vector<int> prefix;
            for (int bit = 0; bit < bits; ++bit) {
                std::vector<std::pair<int, int>> z, o;
                for (const auto& it : ws.back()) ((cur_pos[it] >> bit) & 1 ? o : z).push_back(it);
                prefix.push_back(static_cast<int>(z.size()));
                z.insert(z.end(), o.begin(), o.end());
                ws.push_back(z);
            }
            for (int bit = bits - 1; bit >= 0; --bit) {
                const auto& from = ws[bit + 1];
                const auto& to = ws[bit];
                if (from == to) continue;
                int s = prefix[bit];
                std::vector<std::pair<int, int>> bottom(from.begin(), from.begin() + s), top(from.begin() + s, from.end());
                bottom.insert(bottom.begin(), lo);
                top.push_back(hi);
                auto oriented = [&](std::vector<std::pair<int, int>> v, bool inc) {
                    if (!inc) std::reverse(v.begin(), v.end());
                    return v;
                };
                std::vector<std::pair<int, int>> fs = with_anchors(from);
                if (doubled) {
                    auto pre_b = oriented(bottom, b.first_inc), pre_t = oriented(top, b.second_inc);
                    std::vector<std::pair<int, int>> pre = pre_b;
                    pre.insert(pre.end(), pre_t.begin(), pre_t.end());
                    std::vector<char> rv(pre_b.size(), !b.first_inc);
                    rv.insert(rv.end(), pre_t.size(), !b.second_inc);
                    juxt_layer(pre, rv);
                }
                std::vector<std::pair<int, int>> result = with_anchors(to);
                std::vector<char> rv(result.size());
                std::set<std::pair<int, int>> in_bottom(bottom.begin(), bottom.end());
                for (std::size_t i = 0; i < result.size(); ++i)
                    rv[i] = in_bottom.count(result[i]) ? !b.first_inc : !b.second_inc;
                juxt_layer(result, rv);
            }
            items.assign(ws[0].begin(), ws[0].end());
        }
    }

    int target_rank(const std::vector<std::pair<int, int>>& items, const std::pair<int, int>& it) const {
        // Rank of the item's clause position among the items present.
        int r = 0, t = target_.at(it);
        for (const auto& x : items) r += target_.at(x) < t;
        return r;
    }

    void evaluation() {
        bool negatives = false;
        for (const auto& c : f_.clauses)
            for (const auto& l : c) negatives = negatives || !l.positive;
        auto item = [&](int c, int s) { return item_of_position_[3 * c + s]; };
        auto truth = [&](int c, int s, int sub = 0) {
            auto [k, j] = item(c, s);
            return T(f_.clauses[c][s].positive ? 'Y' : 'Z', k, j, sub);
        };
        auto falsity = [&](int c, int s, int sub = 0) {
            auto [k, j] = item(c, s);
            return T(f_.clauses[c][s].positive ? 'Z' : 'Y', k, j, sub);
        };
        auto xs = [&](int c) {
            std::vector<Tag> v;
            for (int s = 0; s < 3; ++s) v.push_back(T('X', item(c, s).first, item(c, s).second));
            return v;
        };
        if (negatives) {
            std::vector<FlipGroup> gs;
            for (int c = 0; c < f_.m(); ++c) {
                bool any = false;
                for (const auto& l : f_.clauses[c]) any = any || !l.positive;
                if (!any) continue;
                FlipGroup g;
                g.pattern = xs(c);
                for (int s = 0; s < 3; ++s) {
                    auto [k, j] = item(c, s);
                    g.text.push_back(T('Y', k, j));
                    g.text.push_back(T('Z', k, j));
                    if (!f_.clauses[c][s].positive) g.text_couples.push_back({T('Y', k, j), T('Z', k, j)});
                }
                gs.push_back(g);
            }
            flip_layer("evaluation", gs);
        }
        TaggedOps d;
        for (int c = 0; c < f_.m(); ++c) {
            auto x = xs(c);
            BranchRule r;
            r.kind = BranchRule::Eval;
            r.literal = f_.clauses[c][0];
            d[0].push_back({x[0], op(OpKind::Pick)});
            d[0].push_back({x[1], op(OpKind::Pick, {}, r)});
            d[0].push_back({x[2], op(OpKind::Pick)});
            d[1].push_back({falsity(c, 1), op(OpKind::Choose, {falsity(c, 1, 1), falsity(c, 1, 2)})});
            for (const auto& t : {truth(c, 0), falsity(c, 0), truth(c, 1), truth(c, 2), falsity(c, 2)})
                d[1].push_back({t, op(OpKind::Pick)});
        }
        layer(LayerKind::D, "evaluation", d);
        std::vector<FlipGroup> g1, g2;
        for (int c = 0; c < f_.m(); ++c) {
            FlipGroup g;
            g.pattern = xs(c);
            g.text = {truth(c, 0), falsity(c, 0), truth(c, 1), falsity(c, 1, 1), falsity(c, 1, 2), truth(c, 2), falsity(c, 2)};
            FlipGroup a = g, b = g;
            a.text_couples = {{truth(c, 1), falsity(c, 1, 1)}, {truth(c, 2), falsity(c, 2)}};
            b.text_couples = {{falsity(c, 0), falsity(c, 1, 1)}, {falsity(c, 1, 2), falsity(c, 2)}};
            g1.push_back(a);
            g2.push_back(b);
        }
        flip_layer("evaluation", g1);
        flip_layer("evaluation", g2);
    }

    ReductionInstance& inst_;
    const Formula3CNF& f_;
    bool geometry_, keep_;
    std::array<std::vector<LiveUnit>, 2> cur_;
    int tile_ = 0;
    std::size_t next_layer_ = 0;
};

}  // namespace detail

// Binds the layer kinds to path positions; throws PathTooShort when D-entries run out.
inline void bind_schedule(LayerSchedule& s, const PathInfo& path, const std::optional<ClassEntry>& juxt) {
    s.tiles.clear();
    int t = 0, size = static_cast<int>(path.tiles.size());
    auto next_usable = [&](int from, bool need_juxt) {
        for (int d = from + 1; d < size; ++d)
            if (path.tiles[d].usable && (!need_juxt || class_contains_juxtaposition(path.tiles[d].local, *juxt)))
                return d;
        throw PathTooShort(s.d_demand(), path.usable_count());
    };
    for (auto k : s.kinds) {
        switch (k) {
            case LayerKind::Mono:
                if (t + 1 >= size) throw PathTooShort(s.d_demand(), path.usable_count());
                s.tiles.push_back({++t});
                break;
            case LayerKind::D: t = next_usable(t, false); s.tiles.push_back({t}); break;
            case LayerKind::Juxt: t = next_usable(t, true); s.tiles.push_back({t}); break;
            case LayerKind::Flip: {
                int d1 = next_usable(t, false);
                t = next_usable(d1, false);
                s.tiles.push_back({d1, t});
                break;
            }
        }
    }
}

inline LayerSchedule plan_layers(const Formula3CNF& f, SortMode mode, const std::optional<ClassEntry>& juxt) {
    ReductionInstance tmp;
    tmp.formula = f;
    tmp.mode = mode;
    tmp.juxtaposition = juxt;
    detail::Construction(tmp, false, false).run();
    return tmp.schedule;
}

inline LayerSchedule plan_layers(const Formula3CNF& f, SortMode mode, const PathInfo& path) {
    std::optional<ClassEntry> juxt;
    if (mode == SortMode::Juxtaposition) {
        juxt = best_juxtaposition(path);
        if (!juxt) throw UnsupportedCase("UnsupportedCase: D contains no monotone juxtaposition");
    }
    LayerSchedule s = plan_layers(f, mode, juxt);
    bind_schedule(s, path, juxt);
    return s;
}

// Builds both tile families. With keep = false only sizes are computed.
inline ReductionInstance build_instance(const Formula3CNF& f, SortMode mode, const PathInfo& path, bool keep = true) {
    ReductionInstance inst;
    inst.formula = f;
    inst.mode = mode;
    inst.path = path;
    if (mode == SortMode::Juxtaposition) inst.juxtaposition = best_juxtaposition(path);
    inst.schedule = plan_layers(f, mode, path);
    inst.kept = keep;
    detail::Construction(inst, true, keep).run();
    return inst;
}

}  // namespace ppm
