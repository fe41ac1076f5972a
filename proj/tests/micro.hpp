#pragma once

// Small hand-built assemblies around single gadgets, with exhaustive enumeration of
// grid-preserving embeddings. Shared by gadgets_test and the acceptance binary.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ppm/grid.hpp"
#include "ppm/reduction/gadgets.hpp"

namespace micro {

using namespace ppm;

struct Unit {
    std::string name;
    std::vector<Point> pts;
};
using Side = std::vector<std::vector<Unit>>;  // per path tile

struct Assembled {
    Permutation perm;
    Gridding grid;
    std::map<std::string, std::vector<int>> units;  // 0-based positions
};

struct Micro {
    GriddingMatrix matrix;
    std::vector<Cell> path;
    Assembled pattern, text;
};

inline Assembled build_side(const GriddingMatrix& m, const std::vector<Cell>& path, const Side& side) {
    std::vector<PlacedTile<Rational>> placed;
    for (std::size_t t = 0; t < side.size(); ++t) {
        PlacedTile<Rational> pt;
        pt.cell = path[t];
        pt.tile.box_bound = Rational(8);
        for (const auto& u : side[t]) pt.tile.points.insert(pt.tile.points.end(), u.pts.begin(), u.pts.end());
        placed.push_back(pt);
    }
    auto res = assemble(m.cols(), m.rows(), placed, Orientation::identity(m.cols(), m.rows()));
    Assembled a{res.perm, res.gridding, {}};
    for (std::size_t t = 0; t < side.size(); ++t) {
        int k = 0;
        for (const auto& u : side[t]) {
            auto& v = a.units[u.name];
            for (std::size_t i = 0; i < u.pts.size(); ++i) v.push_back(res.position[t][k++]);
            std::sort(v.begin(), v.end());
        }
    }
    return a;
}

inline Cell cell_of(const Assembled& a, int pos) {
    return {Gridding::locate(a.grid.col_cuts, pos + 1), Gridding::locate(a.grid.row_cuts, a.perm[pos])};
}

// Every order-isomorphic embedding that keeps each point in its cell.
inline std::vector<Embedding> grid_preserving_embeddings(const Micro& mc) {
    const auto& p = mc.pattern;
    const auto& t = mc.text;
    int n = p.perm.size(), N = t.perm.size();
    std::vector<Embedding> out;
    Embedding e(n);
    std::function<void(int, int)> rec = [&](int i, int from) {
        if (i == n) {
            out.push_back(e);
            return;
        }
        Cell want = cell_of(p, i);
        for (int y = from; y < N; ++y) {
            if (!(cell_of(t, y) == want)) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j) ok = (p.perm[j] < p.perm[i]) == (t.perm[e[j]] < t.perm[y]);
            if (!ok) continue;
            e[i] = y;
            rec(i + 1, y + 1);
        }
    };
    rec(0, 0);
    return out;
}

inline std::vector<int> image(const Micro& mc, const Embedding& e, const std::string& unit) {
    std::vector<int> v;
    for (int x : mc.pattern.units.at(unit)) v.push_back(e[x]);
    std::sort(v.begin(), v.end());
    return v;
}

inline bool maps(const Micro& mc, const Embedding& e, const std::string& from, const std::string& to) {
    return image(mc, e, from) == mc.text.units.at(to);
}

// Tile 0 of both sides: atomic pairs on out values (2i+1, 2i+2), i.e. an increasing run.
inline Value V(long long v) { return Value(Rational(v)); }
inline std::vector<Point> input_pair(int i) {
    return {to_physical({V(2 * i + 1), V(2 * i + 1)}, Adjacency::Column),
            to_physical({V(2 * i + 2), V(2 * i + 2)}, Adjacency::Column)};
}

// [inc | fib+]: tile 0 then a D tile sharing its row.
inline GriddingMatrix two_tile_matrix() { return GriddingMatrix::from_strings({{"inc", "fib+"}}); }
inline std::vector<Cell> two_tile_path() { return {{1, 1}, {2, 1}}; }

// inc → fib+ → inc → fib+, turning at every step; both D tiles share a row with their predecessor.
inline GriddingMatrix flip_matrix() {
    return GriddingMatrix::from_strings({{"empty", "inc", "fib+"}, {"inc", "fib+", "empty"}});
}
inline std::vector<Cell> flip_path() { return {{1, 1}, {2, 1}, {2, 2}, {3, 2}}; }
inline FlipSpan flip_span() { return {{Adjacency::Row, Adjacency::Column, Adjacency::Row}, {true, false, true}}; }

inline Micro make(const GriddingMatrix& m, const std::vector<Cell>& path, const Side& pat, const Side& txt) {
    return {m, path, build_side(m, path, pat), build_side(m, path, txt)};
}

struct Lemma {
    std::string name;
    Micro micro;
    std::function<std::string(const Micro&, const std::vector<Embedding>&)> check;  // empty string = holds
};

inline std::string fail_unless(bool ok, const std::string& why) { return ok ? "" : why; }

inline Lemma copy_lemma() {
    auto g = [](GadgetKind k, int i) { return emit_simple_gadget(k, {input_pair(i)}, Adjacency::Row); };
    Side txt{{{"A1", input_pair(0)}, {"A2", input_pair(1)}},
             {{"B1", g(GadgetKind::Copy, 0)[0]}, {"B2", g(GadgetKind::Copy, 1)[0]}}};
    Side pat{{{"A", input_pair(0)}}, {{"B", g(GadgetKind::Copy, 0)[0]}}};
    return {"copy", make(two_tile_matrix(), two_tile_path(), pat, txt), [](const Micro& mc, const auto& es) {
                int hits[2] = {0, 0};
                for (const auto& e : es)
                    for (int a = 1; a <= 2; ++a)
                        if (maps(mc, e, "A", "A" + std::to_string(a))) {
                            if (!maps(mc, e, "B", "B" + std::to_string(a))) return std::string("copy not forced");
                            ++hits[a - 1];
                        }
                return fail_unless(hits[0] && hits[1], "vacuous");
            }};
}

inline Lemma multiply_lemma() {
    auto g = [](int i) { return emit_simple_gadget(GadgetKind::Multiply, {input_pair(i)}, Adjacency::Row); };
    auto t0 = g(0), t1 = g(1);
    Side txt{{{"A1", input_pair(0)}, {"A2", input_pair(1)}},
             {{"B11", t0[0]}, {"B12", t0[1]}, {"B21", t1[0]}, {"B22", t1[1]}}};
    Side pat{{{"A", input_pair(0)}}, {{"C1", t0[0]}, {"C2", t0[1]}}};
    return {"multiply", make(two_tile_matrix(), two_tile_path(), pat, txt), [](const Micro& mc, const auto& es) {
                int hits = 0;
                for (const auto& e : es)
                    for (std::string a : {"1", "2"})
                        if (maps(mc, e, "A", "A" + a)) {
                            if (!maps(mc, e, "C1", "B" + a + "1") || !maps(mc, e, "C2", "B" + a + "2"))
                                return std::string("multiply not forced");
                            ++hits;
                        }
                return fail_unless(hits >= 2, "vacuous");
            }};
}

inline Lemma choose_pick_lemma() {
    auto br = emit_simple_gadget(GadgetKind::Choose, {input_pair(0)}, Adjacency::Row);
    auto pk = emit_simple_gadget(GadgetKind::Pick, {input_pair(0)}, Adjacency::Row);
    Side txt{{{"A", input_pair(0)}}, {{"B1", br[0]}, {"B2", br[1]}}};
    Side pat{{{"A", input_pair(0)}}, {{"B", pk[0]}}};
    return {"choose/pick", make(two_tile_matrix(), two_tile_path(), pat, txt), [](const Micro& mc, const auto& es) {
                if (es.size() != 2) return "expected exactly 2 embeddings, got " + std::to_string(es.size());
                bool b1 = false, b2 = false;
                for (const auto& e : es) {
                    if (!maps(mc, e, "A", "A")) return std::string("input pair moved");
                    b1 = b1 || maps(mc, e, "B", "B1");
                    b2 = b2 || maps(mc, e, "B", "B2");
                }
                return fail_unless(b1 && b2, "branches not both reached");
            }};
}

inline Lemma merge_follow_lemma() {
    auto mg = emit_simple_gadget(GadgetKind::Merge, {input_pair(0), input_pair(1)}, Adjacency::Row);
    auto other = emit_simple_gadget(GadgetKind::Pick, {input_pair(2)}, Adjacency::Row);
    auto fl = emit_simple_gadget(GadgetKind::Follow, {input_pair(0)}, Adjacency::Row);
    Side txt{{{"A1", input_pair(0)}, {"A2", input_pair(1)}, {"A3", input_pair(2)}},
             {{"B", mg[0]}, {"X", other[0]}}};
    Side pat{{{"A", input_pair(0)}}, {{"B", fl[0]}}};
    return {"merge/follow", make(two_tile_matrix(), two_tile_path(), pat, txt), [](const Micro& mc, const auto& es) {
                // A may also land on one point of each pair; B must still reach the merge.
                int hits[2] = {0, 0};
                for (const auto& e : es) {
                    if (!maps(mc, e, "B", "B")) return std::string("follow left the merge");
                    for (int a = 1; a <= 2; ++a)
                        if (maps(mc, e, "A", "A" + std::to_string(a))) {
                            if (!maps(mc, e, "B", "B")) return std::string("merge not forced");
                            ++hits[a - 1];
                        }
                }
                return fail_unless(hits[0] == 1 && hits[1] == 1, "expected one embedding per input pair");
            }};
}

inline Side flip_text_side() {
    auto [c1, c2] = emit_flip_text(input_pair(0), input_pair(1), flip_span());
    Side s{{{"A1", input_pair(0)}, {"A2", input_pair(1)}}, {}, {}, {}};
    for (int k = 0; k < 3; ++k) {
        s[k + 1].push_back({"T1_" + std::to_string(k + 1), c1[k]});
        s[k + 1].push_back({"T2_" + std::to_string(k + 1), c2[k]});
    }
    return s;
}

inline Lemma flip_lemma() {
    auto chain = emit_flip_pattern(input_pair(0), flip_span());
    Side pat{{{"A", input_pair(0)}}, {}, {}, {}};
    for (int k = 0; k < 3; ++k) pat[k + 1].push_back({"P_" + std::to_string(k + 1), chain[k]});
    return {"flip text/pattern", make(flip_matrix(), flip_path(), pat, flip_text_side()),
            [](const Micro& mc, const auto& es) {
                int hits[2] = {0, 0};
                for (const auto& e : es)
                    for (int a = 1; a <= 2; ++a)
                        if (maps(mc, e, "A", "A" + std::to_string(a))) {
                            if (!maps(mc, e, "P_3", "T" + std::to_string(a) + "_3"))
                                return std::string("flip lost the branch");
                            ++hits[a - 1];
                        }
                return fail_unless(hits[0] && hits[1], "vacuous");
            }};
}

inline Lemma flip_test_lemma() {
    Side pat{{{"A1", input_pair(0)}, {"A2", input_pair(1)}}, {}, {}, {}};
    for (int a = 0; a < 2; ++a) {
        auto chain = emit_flip_pattern(input_pair(a), flip_span());
        for (int k = 0; k < 3; ++k) pat[k + 1].push_back({"P" + std::to_string(a + 1) + "_" + std::to_string(k + 1), chain[k]});
    }
    // Non-vacuous: tile 0 alone admits the uncrossed mapping.
    Side prefix(pat.begin(), pat.begin() + 1);
    Micro pre = make(flip_matrix(), flip_path(), prefix, flip_text_side());
    bool prefix_embeds = false;
    for (const auto& e : grid_preserving_embeddings(pre))
        prefix_embeds = prefix_embeds || (maps(pre, e, "A1", "A1") && maps(pre, e, "A2", "A2"));
    return {"flip test", make(flip_matrix(), flip_path(), pat, flip_text_side()),
            [prefix_embeds](const Micro& mc, const auto& es) {
                for (const auto& e : es)
                    if (maps(mc, e, "A1", "A1") && maps(mc, e, "A2", "A2"))
                        return std::string("uncrossed flip pair embeds");
                return fail_unless(prefix_embeds, "vacuous: tile 0 already blocks the mapping");
            }};
}

inline std::vector<Lemma> all_lemmas() {
    return {copy_lemma(), multiply_lemma(), choose_pick_lemma(), merge_follow_lemma(), flip_lemma(), flip_test_lemma()};
}

}  // namespace micro
