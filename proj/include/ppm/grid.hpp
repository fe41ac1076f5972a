#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ppm/coord.hpp"
#include "ppm/grid_entry.hpp"
#include "ppm/perm.hpp"

namespace ppm {

struct Cell {
    int col = 0, row = 0;  // 1-based, rows counted bottom to top
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// k columns, l rows; only non-empty entries are stored.
class GriddingMatrix {
public:
    GriddingMatrix() = default;
    GriddingMatrix(int cols, int rows) : cols_(cols), rows_(rows) {
        if (cols < 1 || rows < 1) throw DimensionMismatch("DimensionMismatch: matrix needs k, l >= 1");
    }
    // rows_top_first[r][c]: the human layout with the top row first.
    static GriddingMatrix from_rows(const std::vector<std::vector<ClassEntry>>& rows_top_first) {
        int l = static_cast<int>(rows_top_first.size());
        int k = l ? static_cast<int>(rows_top_first[0].size()) : 0;
        GriddingMatrix m(k, l);
        for (int r = 0; r < l; ++r) {
            if (static_cast<int>(rows_top_first[r].size()) != k)
                throw DimensionMismatch("DimensionMismatch: ragged matrix rows");
            for (int c = 0; c < k; ++c) m.set(c + 1, l - r, rows_top_first[r][c]);
        }
        return m;
    }
    static GriddingMatrix from_strings(const std::vector<std::vector<std::string>>& rows_top_first) {
        std::vector<std::vector<ClassEntry>> e;
        for (const auto& r : rows_top_first) {
            e.emplace_back();
            for (const auto& s : r) e.back().push_back(ClassEntry::parse(s));
        }
        return from_rows(e);
    }

    int cols() const { return cols_; }
    int rows() const { return rows_; }

    const ClassEntry& at(int col, int row) const {
        static const ClassEntry empty;
        auto it = cells_.find({col, row});
        return it == cells_.end() ? empty : it->second;
    }
    const ClassEntry& at(Cell c) const { return at(c.col, c.row); }
    void set(int col, int row, const ClassEntry& e) {
        if (col < 1 || col > cols_ || row < 1 || row > rows_)
            throw IndexOutOfRange("IndexOutOfRange: matrix cell");
        if (e.is_empty()) cells_.erase({col, row}); else cells_[{col, row}] = e;
    }
    const std::map<Cell, ClassEntry>& entries() const { return cells_; }

    bool monotone() const {
        for (const auto& [c, e] : cells_)
            if (!e.monotone()) return false;
        return true;
    }

    friend bool operator==(const GriddingMatrix& a, const GriddingMatrix& b) {
        return a.cols_ == b.cols_ && a.rows_ == b.rows_ && a.cells_ == b.cells_;
    }

private:
    int cols_ = 0, rows_ = 0;
    std::map<Cell, ClassEntry> cells_;
};

struct CellGraph {
    std::vector<Cell> vertices;             // sorted
    std::vector<std::pair<int, int>> edges;  // indices into vertices, first < second
    std::vector<std::vector<int>> adj;

    int index_of(Cell c) const {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), c);
        return it != vertices.end() && *it == c ? static_cast<int>(it - vertices.begin()) : -1;
    }
};

inline CellGraph cell_graph(const GriddingMatrix& m) {
    CellGraph g;
    for (const auto& [c, e] : m.entries())
        if (e.infinite()) g.vertices.push_back(c);
    std::sort(g.vertices.begin(), g.vertices.end());
    g.adj.assign(g.vertices.size(), {});
    std::map<int, std::vector<int>> by_row, by_col;
    for (int i = 0; i < static_cast<int>(g.vertices.size()); ++i) {
        by_col[g.vertices[i].col].push_back(i);
        by_row[g.vertices[i].row].push_back(i);
    }
    auto link = [&](std::map<int, std::vector<int>>& groups, bool by_column) {
        for (auto& [key, ids] : groups) {
            std::sort(ids.begin(), ids.end(), [&](int a, int b) {
                return by_column ? g.vertices[a].row < g.vertices[b].row
                                 : g.vertices[a].col < g.vertices[b].col;
            });
            for (std::size_t t = 1; t < ids.size(); ++t) {
                int a = std::min(ids[t - 1], ids[t]), b = std::max(ids[t - 1], ids[t]);
                g.edges.emplace_back(a, b);
                g.adj[a].push_back(b);
                g.adj[b].push_back(a);
            }
        }
    };
    link(by_col, true);
    link(by_row, false);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

enum class GraphShape { ProperTurningPath, ProperTurningCycle, Other };

inline std::string shape_name(GraphShape s) {
    switch (s) {
        case GraphShape::ProperTurningPath: return "ProperTurningPath";
        case GraphShape::ProperTurningCycle: return "ProperTurningCycle";
        default: return "Other";
    }
}

inline GraphShape classify(const CellGraph& g) {
    int n = static_cast<int>(g.vertices.size());
    if (n == 0) return GraphShape::Other;
    std::map<int, int> in_row, in_col;
    for (const auto& c : g.vertices)
        if (++in_row[c.row] > 2 || ++in_col[c.col] > 2) return GraphShape::Other;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++reached;
        for (int w : g.adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    if (reached != n) return GraphShape::Other;
    int deg1 = 0, deg2 = 0;
    for (const auto& a : g.adj) {
        if (a.size() > 2) return GraphShape::Other;
        deg1 += a.size() == 1;
        deg2 += a.size() == 2;
    }
    int m = static_cast<int>(g.edges.size());
    if (m == n - 1) return GraphShape::ProperTurningPath;
    if (m == n && deg2 == n) return GraphShape::ProperTurningCycle;
    return GraphShape::Other;
}

// Vertices of a path graph listed from its smaller endpoint.
inline std::vector<Cell> path_order(const CellGraph& g) {
    if (classify(g) != GraphShape::ProperTurningPath) throw std::invalid_argument("path_order: not a path");
    int n = static_cast<int>(g.vertices.size());
    int start = 0;
    for (int i = 0; i < n; ++i)
        if (g.adj[i].size() <= 1) {
            start = i;
            break;
        }
    std::vector<Cell> out;
    int prev = -1, cur = start;
    while (cur >= 0) {
        out.push_back(g.vertices[cur]);
        int nxt = -1;
        for (int w : g.adj[cur])
            if (w != prev) nxt = w;
        prev = cur;
        cur = nxt;
    }
    return out;
}

struct Gridding {
    std::vector<int> col_cuts;  // c_1 .. c_{k+1}
    std::vector<int> row_cuts;  // r_1 .. r_{l+1}
    friend bool operator==(const Gridding&, const Gridding&) = default;

    static Gridding trivial(int n) { return {{1, n + 1}, {1, n + 1}}; }

    bool valid_for(int n) const {
        auto ok = [n](const std::vector<int>& c) {
            if (c.size() < 2 || c.front() != 1 || c.back() != n + 1) return false;
            return std::is_sorted(c.begin(), c.end());
        };
        return ok(col_cuts) && ok(row_cuts);
    }
    int cols() const { return static_cast<int>(col_cuts.size()) - 1; }
    int rows() const { return static_cast<int>(row_cuts.size()) - 1; }
    // 1-based column / row of the 1-based coordinate v.
    static int locate(const std::vector<int>& cuts, int v) {
        return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
    }
};

// Reductions of all non-empty cells, keyed by cell.
inline std::map<Cell, std::vector<int>> cell_positions(const Permutation& p, const Gridding& g) {
    std::map<Cell, std::vector<int>> cells;
    for (int i = 1; i <= p.size(); ++i)
        cells[{Gridding::locate(g.col_cuts, i), Gridding::locate(g.row_cuts, p(i))}].push_back(i - 1);
    return cells;
}

inline bool check_gridding(const Permutation& p, const Gridding& g, const GriddingMatrix& m) {
    if (g.cols() != m.cols() || g.rows() != m.rows() || !g.valid_for(p.size())) return false;
    for (const auto& [cell, pos] : cell_positions(p, g))
        if (!entry_contains(m.at(cell), pattern_at(p, pos))) return false;
    return true;
}

namespace detail {

// Calls f for each cut vector 1 = c_1 <= ... <= c_{k+1} = n+1 in lexicographic order; stops when f
// returns true.
inline bool for_each_cuts(int parts, int n, const std::function<bool(const std::vector<int>&)>& f) {
    std::vector<int> c(parts + 1, 1);
    c[parts] = n + 1;
    if (parts == 1) return f(c);
    while (true) {
        if (f(c)) return true;
        int i = parts - 1;
        while (i >= 1 && c[i] == n + 1) --i;
        if (i < 1) return false;
        ++c[i];
        for (int j = i + 1; j < parts; ++j) c[j] = c[i];
    }
}

}  // namespace detail

// Lexicographically least M-gridding, enumerating O(n^{k+l-2}) candidates.
inline std::optional<Gridding> find_gridding(const Permutation& p, const GriddingMatrix& m) {
    int n = p.size();
    std::optional<Gridding> found;
    int k = m.cols(), l = m.rows();
    // Column pruning: a column whose points, ignoring rows, already violate every possible row split
    // is not cheap to detect in general, so only the full check is used.
    detail::for_each_cuts(k, n, [&](const std::vector<int>& cc) {
        return detail::for_each_cuts(l, n, [&](const std::vector<int>& rc) {
            Gridding g{cc, rc};
            if (check_gridding(p, g, m)) {
                found = g;
                return true;
            }
            return false;
        });
    });
    return found;
}

// Every M-gridding, in lexicographic order.
inline std::vector<Gridding> all_griddings(const Permutation& p, const GriddingMatrix& m) {
    std::vector<Gridding> out;
    detail::for_each_cuts(m.cols(), p.size(), [&](const std::vector<int>& cc) {
        return detail::for_each_cuts(m.rows(), p.size(), [&](const std::vector<int>& rc) {
            Gridding g{cc, rc};
            if (check_gridding(p, g, m)) out.push_back(g);
            return false;
        });
    });
    return out;
}

struct Orientation {
    std::vector<int> f_c, f_r;  // ±1, 1-based index i stored at i-1
    static Orientation identity(int k, int l) { return {std::vector<int>(k, 1), std::vector<int>(l, 1)}; }
    int col(int i) const { return f_c[i - 1]; }
    int row(int j) const { return f_r[j - 1]; }
    friend bool operator==(const Orientation&, const Orientation&) = default;
};

inline GriddingMatrix apply_orientation(const GriddingMatrix& m, const Orientation& f) {
    if (static_cast<int>(f.f_c.size()) != m.cols() || static_cast<int>(f.f_r.size()) != m.rows())
        throw DimensionMismatch("DimensionMismatch: orientation size");
    GriddingMatrix out(m.cols(), m.rows());
    for (const auto& [c, e] : m.entries()) {
        ClassEntry t = e;
        if (f.col(c.col) < 0) t = transform_entry(t, true);
        if (f.row(c.row) < 0) t = transform_entry(t, false);
        out.set(c.col, c.row, t);
    }
    return out;
}

inline Permutation apply_orientation(const Permutation& p, const Gridding& g, const Orientation& f) {
    if (static_cast<int>(f.f_c.size()) != g.cols() || static_cast<int>(f.f_r.size()) != g.rows())
        throw DimensionMismatch("DimensionMismatch: orientation size");
    if (!g.valid_for(p.size())) throw InvalidGridding("InvalidGridding: cuts do not fit");
    std::vector<int> r = p.ranks();
    for (int i = 1; i <= g.cols(); ++i)
        if (f.col(i) < 0) std::reverse(r.begin() + (g.col_cuts[i - 1] - 1), r.begin() + (g.col_cuts[i] - 1));
    for (auto& v : r) {
        int j = Gridding::locate(g.row_cuts, v);
        if (f.row(j) < 0) v = g.row_cuts[j - 1] + g.row_cuts[j] - 1 - v;
    }
    return Permutation(std::move(r));
}

// Solves f_c(i)·f_r(j) = sign(i,j) over the bipartite column/row graph of the given cells.
// Per component, the solution with fewer −1 values is kept; ties prefer −1 on earlier columns.
inline std::optional<Orientation> sign_orientation(int k, int l, const std::map<Cell, int>& sign) {
    // Nodes 0..k-1 columns, k..k+l-1 rows.
    std::vector<std::vector<std::pair<int, int>>> adj(k + l);
    for (const auto& [c, s] : sign) {
        adj[c.col - 1].push_back({k + c.row - 1, s});
        adj[k + c.row - 1].push_back({c.col - 1, s});
    }
    std::vector<int> val(k + l, 0);
    for (int root = 0; root < k + l; ++root) {
        if (val[root]) continue;
        std::vector<int> comp;
        std::queue<int> q;
        val[root] = 1;
        q.push(root);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            comp.push_back(v);
            for (auto [w, s] : adj[v]) {
                int want = val[v] * s;
                if (!val[w]) {
                    val[w] = want;
                    q.push(w);
                } else if (val[w] != want) {
                    return std::nullopt;
                }
            }
        }
        int neg = 0;
        for (int v : comp) neg += val[v] < 0;
        int size = static_cast<int>(comp.size());
        // comp[0] is the smallest node of the component, so flipping makes it −1.
        if (size - neg < neg || (size - neg == neg && size > 1))
            for (int v : comp) val[v] = -val[v];
    }
    Orientation o;
    o.f_c.assign(val.begin(), val.begin() + k);
    o.f_r.assign(val.begin() + k, val.end());
    return o;
}

inline std::optional<Orientation> consistent_orientation(const GriddingMatrix& m) {
    std::map<Cell, int> sign;
    for (const auto& [c, e] : m.entries()) {
        if (!e.monotone()) throw std::invalid_argument("consistent_orientation: matrix is not monotone");
        sign[c] = e.tag == ClassEntry::Inc ? 1 : -1;
    }
    auto o = sign_orientation(m.cols(), m.rows(), sign);
    if (!o) return o;
    GriddingMatrix oriented = apply_orientation(m, *o);
    for (const auto& [c, e] : oriented.entries())
        if (e.tag != ClassEntry::Inc) throw std::logic_error("consistent_orientation: verification failed");
    return o;
}

// q×q refinement; diagonal(e) chooses the diagonal block, otherwise anti-diagonal.
inline GriddingMatrix refine_with(const GriddingMatrix& m, int q,
                                  const std::function<bool(Cell, const ClassEntry&)>& diagonal) {
    GriddingMatrix out(m.cols() * q, m.rows() * q);
    for (const auto& [c, e] : m.entries()) {
        bool diag = diagonal(c, e);
        for (int a = 1; a <= q; ++a)
            out.set((c.col - 1) * q + a, (c.row - 1) * q + (diag ? a : q + 1 - a), e);
    }
    return out;
}

inline GriddingMatrix refine(const GriddingMatrix& m, int q) {
    if (q < 1) throw std::invalid_argument("refine: q must be positive");
    for (const auto& [c, e] : m.entries())
        if (!e.sum_closed() && !e.skew_closed())
            throw NotClosedEntry("NotClosedEntry: entry " + e.str() + " is neither sum- nor skew-closed");
    return refine_with(m, q, [](Cell, const ClassEntry& e) { return e.sum_closed(); });
}

inline GriddingMatrix staircase(int k, const ClassEntry& c, const ClassEntry& d) {
    if (k < 1) throw std::invalid_argument("staircase: k must be positive");
    GriddingMatrix m(k, k + 1);
    // Matrix-style indexing puts D on the lower diagonal; rows here count upward.
    for (int i = 1; i <= k; ++i) {
        m.set(i, i + 1, c);
        m.set(i, i, d);
    }
    return m;
}

struct RichPath {
    GriddingMatrix matrix;
    std::vector<Cell> path;      // p_1, p_2, ...
    std::vector<int> d_positions;  // 0-based indices into path holding the D entry
    int d_sharing_row = 0;       // D entries sharing a row with their predecessor
    int refinement = 1;          // 2 when the ×2 refinement was needed for orientation
    double d_fraction() const { return path.empty() ? 0.0 : double(d_positions.size()) / path.size(); }
};

inline bool share_row(Cell a, Cell b) { return a.row == b.row; }

// Direction of the path maximising the number of D entries that share a row with their predecessor.
inline void orient_path(const GriddingMatrix& m, std::vector<Cell>& path, const ClassEntry& d,
                        std::vector<int>& d_pos, int& usable) {
    auto count = [&](const std::vector<Cell>& p) {
        int u = 0;
        for (std::size_t i = 1; i < p.size(); ++i)
            if (m.at(p[i]) == d && share_row(p[i - 1], p[i])) ++u;
        return u;
    };
    std::vector<Cell> rev(path.rbegin(), path.rend());
    if (count(rev) > count(path)) path = rev;
    usable = count(path);
    d_pos.clear();
    for (int i = 0; i < static_cast<int>(path.size()); ++i)
        if (m.at(path[i]) == d) d_pos.push_back(i);
}

// Refinement, characteristic labelling and one shifted block join L copies of the cycle into a path.
inline RichPath build_rich_path(const GriddingMatrix& m, int L) {
    if (L < 1) throw std::invalid_argument("build_rich_path: L must be positive");
    CellGraph g = cell_graph(m);
    if (classify(g) != GraphShape::ProperTurningCycle)
        throw NoCycle("NoCycle: the cell graph is not a single proper-turning cycle");
    std::optional<ClassEntry> d;
    for (const auto& [c, e] : m.entries()) {
        if (!e.infinite()) continue;
        if (!e.monotone()) {
            if (d) throw MultipleDEntries("MultipleDEntries: more than one non-monotone entry");
            d = e;
        }
    }
    if (!d) throw MultipleDEntries("MultipleDEntries: no non-monotone entry on the cycle");
    if (!d->sum_closed() && !d->skew_closed())
        throw NotClosedEntry("NotClosedEntry: D is neither sum- nor skew-closed");

    auto signs_for = [&](const GriddingMatrix& n, int d_sign) {
        std::map<Cell, int> s;
        for (const auto& [c, e] : n.entries()) {
            if (e.monotone()) s[c] = e.tag == ClassEntry::Inc ? 1 : -1;
            else s[c] = d_sign;
        }
        return s;
    };
    GriddingMatrix n = m;
    int refinement = 1;
    std::optional<Orientation> f;
    std::vector<int> d_signs;
    if (d->sum_closed()) d_signs.push_back(1);
    if (d->skew_closed()) d_signs.push_back(-1);
    int d_sign = d_signs[0];
    for (int s : d_signs)
        if (!f) {
            f = sign_orientation(n.cols(), n.rows(), signs_for(n, s));
            if (f) d_sign = s;
        }
    if (!f) {
        n = refine_with(m, 2, [&](Cell, const ClassEntry& e) {
            return e.monotone() ? e.tag == ClassEntry::Inc : d_sign > 0;
        });
        refinement = 2;
        f = sign_orientation(n.cols(), n.rows(), signs_for(n, d_sign));
        if (!f) throw std::logic_error("build_rich_path: no orientation of the x2 refinement");
    }
    std::map<Cell, int> sign = signs_for(n, d_sign);
    GriddingMatrix big = refine_with(n, L, [&](Cell c, const ClassEntry&) { return sign.at(c) > 0; });

    // Characteristic labels.
    auto col_label = [&](int a) {
        int i = (a - 1) / L + 1, t = (a - 1) % L + 1;
        return f->col(i) > 0 ? t : L + 1 - t;
    };
    auto row_label = [&](int b) {
        int j = (b - 1) / L + 1, t = (b - 1) % L + 1;
        return f->row(j) > 0 ? t : L + 1 - t;
    };
    auto col_with_label = [&](int i, int s) { return (i - 1) * L + (f->col(i) > 0 ? s : L + 1 - s); };
    auto row_with_label = [&](int j, int s) { return (j - 1) * L + (f->row(j) > 0 ? s : L + 1 - s); };
    for (const auto& [c, e] : big.entries())
        if (col_label(c.col) != row_label(c.row))
            throw std::logic_error("build_rich_path: entry without diagonal characteristic");

    Cell blk{0, 0};
    for (const auto& [c, e] : n.entries())
        if (e.monotone()) {
            blk = c;
            break;
        }
    ClassEntry mono = n.at(blk);
    for (int a = 1; a <= L; ++a)
        for (int b = 1; b <= L; ++b) big.set((blk.col - 1) * L + a, (blk.row - 1) * L + b, ClassEntry::empty());
    for (int s = 1; s < L; ++s) big.set(col_with_label(blk.col, s), row_with_label(blk.row, s + 1), mono);

    RichPath rp;
    rp.refinement = refinement;
    CellGraph bg = cell_graph(big);
    if (classify(bg) != GraphShape::ProperTurningPath)
        throw std::logic_error("build_rich_path: construction did not produce a proper-turning path");
    rp.path = path_order(bg);
    orient_path(big, rp.path, *d, rp.d_positions, rp.d_sharing_row);
    rp.matrix = std::move(big);
    return rp;
}

// Random member of Grid(M) with a random number of points (at most max_cell) per cell; cells
// sharing a column or row are interleaved uniformly.
template <class Rng>
std::pair<Permutation, Gridding> sample_grid(const GriddingMatrix& m, int max_cell, Rng& rng) {
    std::map<Cell, Permutation> content;
    for (const auto& [c, e] : m.entries()) {
        int sz = std::uniform_int_distribution<int>(0, e.infinite() ? max_cell : std::min(max_cell, 1))(rng);
        Permutation s = sample_entry(e, sz, rng);
        if (!entry_contains(e, s)) s = Permutation();
        content[c] = s;
    }
    // Positions: per column, shuffle the cell labels of its points.
    std::map<Cell, std::vector<int>> xs, ys;
    std::vector<int> col_start(m.cols() + 2, 1), row_start(m.rows() + 2, 1);
    std::vector<int> col_count(m.cols() + 1, 0), row_count(m.rows() + 1, 0);
    for (const auto& [c, s] : content) {
        col_count[c.col] += s.size();
        row_count[c.row] += s.size();
    }
    for (int i = 1; i <= m.cols(); ++i) col_start[i + 1] = col_start[i] + col_count[i];
    for (int j = 1; j <= m.rows(); ++j) row_start[j + 1] = row_start[j] + row_count[j];
    auto interleave = [&](bool by_col) {
        std::map<int, std::vector<Cell>> labels;
        for (const auto& [c, s] : content)
            for (int t = 0; t < s.size(); ++t) labels[by_col ? c.col : c.row].push_back(c);
        for (auto& [key, lab] : labels) {
            std::shuffle(lab.begin(), lab.end(), rng);
            int base = by_col ? col_start[key] : row_start[key];
            for (int t = 0; t < static_cast<int>(lab.size()); ++t) (by_col ? xs : ys)[lab[t]].push_back(base + t);
        }
    };
    interleave(true);
    interleave(false);
    int n = col_start[m.cols() + 1] - 1;
    std::vector<int> r(n, 0);
    for (const auto& [c, s] : content) {
        const auto& cx = xs[c];
        const auto& cy = ys[c];
        for (int t = 0; t < s.size(); ++t) r[cx[t] - 1] = cy[s[t] - 1];
    }
    Gridding g;
    g.col_cuts.assign(col_start.begin() + 1, col_start.end());
    g.row_cuts.assign(row_start.begin() + 1, row_start.end());
    return {Permutation(std::move(r)), g};
}

template <class Q = Rational>
struct PlacedTile {
    Cell cell;
    Tile<Q> tile;
};

struct AssemblyResult {
    Permutation perm;
    Gridding gridding;                    // cuts induced by the tile placement
    std::vector<std::vector<int>> position;  // position[t][k]: 0-based position of point k of tile t
};

// F-assembly: orient each tile, translate by (i·m, j·m), then break ties as a tiny clockwise
// rotation would (equal x: larger y goes right; equal y: larger x goes down).
template <class Q>
AssemblyResult assemble(int k, int l, const std::vector<PlacedTile<Q>>& tiles, const Orientation& f) {
    if (static_cast<int>(f.f_c.size()) != k || static_cast<int>(f.f_r.size()) != l)
        throw DimensionMismatch("DimensionMismatch: orientation size");
    Q m{};
    for (const auto& t : tiles)
        if (t.tile.box_bound > m) m = t.tile.box_bound;
    Q half = Q(1) / Q(2);
    struct Item {
        ExactCoord<Q> x, y;
        int tile, idx;
    };
    std::vector<Item> items;
    for (int t = 0; t < static_cast<int>(tiles.size()); ++t) {
        const auto& pt = tiles[t];
        if (pt.cell.col < 1 || pt.cell.col > k || pt.cell.row < 1 || pt.cell.row > l)
            throw IndexOutOfRange("IndexOutOfRange: tile cell");
        for (int i = 0; i < static_cast<int>(pt.tile.points.size()); ++i) {
            const auto& p = pt.tile.points[i];
            for (const auto* c : {&p.x, &p.y})
                if (c->a <= half || c->a >= m + half) throw BoxOverflow("BoxOverflow: point outside the box");
            ExactCoord<Q> x = p.x, y = p.y;
            if (f.col(pt.cell.col) < 0) x = ExactCoord<Q>(m + Q(1)) - x;
            if (f.row(pt.cell.row) < 0) y = ExactCoord<Q>(m + Q(1)) - y;
            x = x + ExactCoord<Q>(m * Q(pt.cell.col));
            y = y + ExactCoord<Q>(m * Q(pt.cell.row));
            items.push_back({x, y, t, i});
        }
    }
    int n = static_cast<int>(items.size());
    std::vector<int> by_x(n), by_y(n);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::iota(by_y.begin(), by_y.end(), 0);
    std::sort(by_x.begin(), by_x.end(), [&](int a, int b) {
        if (auto c = items[a].x <=> items[b].x; c != 0) return c < 0;
        return items[a].y < items[b].y;
    });
    std::sort(by_y.begin(), by_y.end(), [&](int a, int b) {
        if (auto c = items[a].y <=> items[b].y; c != 0) return c < 0;
        return items[a].x > items[b].x;
    });
    std::vector<int> xr(n), yr(n);
    for (int i = 0; i < n; ++i) {
        xr[by_x[i]] = i;
        yr[by_y[i]] = i;
    }
    for (int i = 1; i < n; ++i)
        if (items[by_x[i]].x == items[by_x[i - 1]].x && items[by_x[i]].y == items[by_x[i - 1]].y)
            throw DuplicateCoordinate("DuplicateCoordinate: coincident points in assembly");
    AssemblyResult res;
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[xr[i]] = yr[i] + 1;
    res.perm = Permutation(std::move(r), Permutation::Trusted{});
    res.position.resize(tiles.size());
    for (int t = 0; t < static_cast<int>(tiles.size()); ++t) res.position[t].resize(tiles[t].tile.points.size());
    std::vector<int> ccount(k + 1, 0), rcount(l + 1, 0);
    for (int i = 0; i < n; ++i) {
        res.position[items[i].tile][items[i].idx] = xr[i];
        ++ccount[tiles[items[i].tile].cell.col];
        ++rcount[tiles[items[i].tile].cell.row];
    }
    res.gridding.col_cuts.assign(k + 1, 1);
    res.gridding.row_cuts.assign(l + 1, 1);
    for (int i = 1; i <= k; ++i) res.gridding.col_cuts[i] = res.gridding.col_cuts[i - 1] + ccount[i];
    for (int j = 1; j <= l; ++j) res.gridding.row_cuts[j] = res.gridding.row_cuts[j - 1] + rcount[j];
    return res;
}

}  // namespace ppm
