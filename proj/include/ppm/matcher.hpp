#pragma once

#include <algorithm>
#include <chrono>
#include <future>
#include <optional>
#include <vector>

#include "ppm/grid.hpp"
#include "ppm/perm.hpp"

namespace ppm {

struct MonotonePartition {
    std::vector<std::vector<int>> parts;  // 0-based positions, ascending
    std::vector<bool> inc;
    std::vector<Cell> cells;             // owning cell per part, when known

    int size() const { return static_cast<int>(parts.size()); }

    // Throws MalformedPartition unless the parts cover 0..n-1 disjointly and are monotone.
    void validate(const Permutation& p) const {
        if (inc.size() != parts.size()) throw MalformedPartition("MalformedPartition: direction count");
        std::vector<char> seen(p.size(), 0);
        for (int i = 0; i < size(); ++i) {
            std::vector<int> vals;
            for (std::size_t t = 0; t < parts[i].size(); ++t) {
                int x = parts[i][t];
                if (x < 0 || x >= p.size() || seen[x]) throw MalformedPartition("MalformedPartition: overlap or range");
                if (t && parts[i][t - 1] >= x) throw MalformedPartition("MalformedPartition: part not ascending");
                seen[x] = 1;
                vals.push_back(p[x]);
            }
            if (!is_monotone_seq(vals, inc[i])) throw MalformedPartition("MalformedPartition: part not monotone");
        }
        for (char s : seen)
            if (!s) throw MalformedPartition("MalformedPartition: points not covered");
    }
};

namespace detail {

inline MonotonePartition partition_by_cells(const Permutation& p, const Gridding& g, const GriddingMatrix& m,
                                            bool keep_empty) {
    auto pos = cell_positions(p, g);
    MonotonePartition out;
    for (const auto& [c, e] : m.entries()) {
        auto it = pos.find(c);
        if (it == pos.end() && !keep_empty) continue;
        out.parts.push_back(it == pos.end() ? std::vector<int>{} : it->second);
        out.inc.push_back(e.tag == ClassEntry::Inc);
        out.cells.push_back(c);
    }
    return out;
}

}  // namespace detail

inline MonotonePartition extract_partition(const Permutation& p, const Gridding& g, const GriddingMatrix& m) {
    if (!m.monotone()) throw std::invalid_argument("extract_partition: matrix is not monotone");
    if (!check_gridding(p, g, m)) throw InvalidGridding("InvalidGridding: not an M-gridding");
    return detail::partition_by_cells(p, g, m, false);
}

// Implication graph over threshold literals z_{p,j} = [index(p) >= j].
class ThresholdSystem {
public:
    ThresholdSystem(const std::vector<int>& domain) : domain_(domain) {
        base_.assign(domain.size() + 1, 1);  // variable 0 is the constant TRUE
        for (std::size_t p = 0; p < domain.size(); ++p) base_[p + 1] = base_[p] + std::max(0, domain[p] - 1);
        adj_.assign(2 * base_.back(), {});
        imply(neg(truth()), truth());
        for (std::size_t p = 0; p < domain.size(); ++p)
            for (int j = 2; j < domain[p]; ++j) imply(z(p, j), z(p, j - 1));
    }

    // Literal encoding: 2v is v, 2v+1 is ¬v.
    static int neg(int l) { return l ^ 1; }
    int truth() const { return 0; }
    int z(std::size_t p, int j) const {
        if (j <= 0) return truth();
        if (j >= domain_[p]) return neg(truth());
        return 2 * (base_[p] + j - 1);
    }
    void imply(int a, int b) {
        adj_[a].push_back(b);
        adj_[neg(b)].push_back(neg(a));
        ++clauses_;
    }
    long clauses() const { return clauses_; }

    std::optional<std::vector<int>> solve() const {
        int nl = static_cast<int>(adj_.size());
        std::vector<int> comp = scc(nl);
        for (int v = 0; v < nl / 2; ++v)
            if (comp[2 * v] == comp[2 * v + 1]) return std::nullopt;
        // Tarjan numbers components in reverse topological order; pick the literal later in
        // topological order.
        auto value = [&](int l) { return comp[l] < comp[neg(l)]; };
        std::vector<int> out(domain_.size(), 0);
        for (std::size_t p = 0; p < domain_.size(); ++p) {
            int j = 0;
            while (j + 1 < domain_[p] && value(z(p, j + 1))) ++j;
            out[p] = j;
        }
        return out;
    }

private:
    std::vector<int> scc(int nl) const {
        std::vector<int> index(nl, -1), low(nl, 0), comp(nl, -1), stack;
        std::vector<std::pair<int, std::size_t>> call;
        int counter = 0, ncomp = 0;
        for (int s = 0; s < nl; ++s) {
            if (index[s] >= 0) continue;
            call.push_back({s, 0});
            index[s] = low[s] = counter++;
            stack.push_back(s);
            while (!call.empty()) {
                auto& [v, i] = call.back();
                if (i < adj_[v].size()) {
                    int w = adj_[v][i++];
                    if (index[w] < 0) {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        call.push_back({w, 0});
                    } else if (comp[w] < 0) {
                        low[v] = std::min(low[v], index[w]);
                    }
                    continue;
                }
                int vv = v;
                call.pop_back();
                if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[vv]);
                if (low[vv] == index[vv]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        comp[w] = ncomp;
                        if (w == vv) break;
                    }
                    ++ncomp;
                }
            }
        }
        return comp;
    }

    std::vector<int> domain_, base_;
    std::vector<std::vector<int>> adj_;
    long clauses_ = 0;
};

struct PsiStats {
    long clauses = 0;
};

inline std::optional<Embedding> psi_embedding(const Permutation& pattern, const MonotonePartition& pi,
                                              const Permutation& text, const MonotonePartition& sigma,
                                              PsiStats* stats = nullptr) {
    if (pi.size() != sigma.size()) throw MalformedPartition("MalformedPartition: part counts differ");
    pi.validate(pattern);
    sigma.validate(text);
    for (int i = 0; i < pi.size(); ++i)
        if (pi.parts[i].size() > sigma.parts[i].size()) return std::nullopt;

    int m = pattern.size();
    std::vector<int> part_of(m), domain(m);
    for (int i = 0; i < pi.size(); ++i)
        for (int x : pi.parts[i]) {
            part_of[x] = i;
            domain[x] = static_cast<int>(sigma.parts[i].size());
        }
    ThresholdSystem sys(domain);

    auto tx = [&](int p, int a) { return sigma.parts[part_of[p]][a]; };
    auto ty = [&](int p, int a) { return text[tx(p, a)]; };

    // v_q ranges over an up-set [g(a), n) or a down-set [0, g(a)] for each value a of v_p.
    auto encode = [&](int p, int q, bool up, const std::vector<int>& g) {
        bool nondec = true, noninc = true;
        for (std::size_t a = 1; a < g.size(); ++a) {
            nondec = nondec && g[a] >= g[a - 1];
            noninc = noninc && g[a] <= g[a - 1];
        }
        if (!nondec && !noninc) throw std::logic_error("psi_embedding: threshold function not monotone");
        for (int a = 0; a < static_cast<int>(g.size()); ++a) {
            int target = up ? sys.z(q, g[a]) : ThresholdSystem::neg(sys.z(q, g[a] + 1));
            bool from_up = up ? nondec : !nondec;
            int source = from_up ? sys.z(p, a) : ThresholdSystem::neg(sys.z(p, a + 1));
            sys.imply(source, target);
        }
    };

    for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q) {
            int np = domain[p], nq = domain[q];
            const auto& qpart = sigma.parts[part_of[q]];
            bool qinc = sigma.inc[part_of[q]];
            std::vector<int> g(np);
            // x: position of f(q) exceeds that of f(p).
            for (int a = 0; a < np; ++a)
                g[a] = static_cast<int>(std::upper_bound(qpart.begin(), qpart.end(), tx(p, a)) - qpart.begin());
            encode(p, q, true, g);
            // y: text values along q's part are monotone in the index.
            bool above = pattern[q] > pattern[p];
            bool up = above == qinc;
            for (int a = 0; a < np; ++a) {
                int c = ty(p, a);
                auto want = [&](int b) { return above ? text[qpart[b]] > c : text[qpart[b]] < c; };
                int lo = 0, hi = nq;  // first index where want() turns on (up) or off (down)
                while (lo < hi) {
                    int mid = (lo + hi) / 2;
                    if (want(mid) == up) hi = mid; else lo = mid + 1;
                }
                g[a] = up ? lo : lo - 1;
            }
            encode(p, q, up, g);
        }
    if (stats) stats->clauses += sys.clauses();
    auto sol = sys.solve();
    if (!sol) return std::nullopt;
    Embedding e(m);
    for (int p = 0; p < m; ++p) e[p] = tx(p, (*sol)[p]);
    if (!is_embedding(text, pattern, e)) throw std::logic_error("psi_embedding: witness failed validation");
    return e;
}

struct MatchStats {
    long griddings_tried = 0;
    long clauses = 0;
    double time_ms = 0;
};

struct MatchResult {
    std::optional<Embedding> embedding;
    Gridding text_gridding;
    std::optional<Gridding> pattern_gridding;
    MatchStats stats;
};

inline MatchResult solve_cppm_report(const Permutation& pattern, const Permutation& text, const GriddingMatrix& m,
                                     int jobs = 1) {
    auto t0 = std::chrono::steady_clock::now();
    if (!m.monotone()) throw UnsupportedCase("UnsupportedCase: matrix is not monotone");
    MatchResult res;
    auto tg = find_gridding(text, m);
    if (!tg) throw NoTextGridding("NoTextGridding: the text has no M-gridding");
    res.text_gridding = *tg;
    MonotonePartition sigma = detail::partition_by_cells(text, *tg, m, true);
    std::vector<Gridding> cands = all_griddings(pattern, m);

    auto attempt = [&](const Gridding& g, PsiStats& st) {
        MonotonePartition pi = detail::partition_by_cells(pattern, g, m, true);
        return psi_embedding(pattern, pi, text, sigma, &st);
    };
    jobs = std::max(1, jobs);
    std::size_t i = 0;
    while (i < cands.size() && !res.embedding) {
        std::size_t batch = std::min(cands.size() - i, static_cast<std::size_t>(jobs));
        std::vector<std::optional<Embedding>> out(batch);
        std::vector<PsiStats> st(batch);
        if (batch == 1) {
            out[0] = attempt(cands[i], st[0]);
        } else {
            std::vector<std::future<void>> fs;
            for (std::size_t b = 0; b < batch; ++b)
                fs.push_back(std::async(std::launch::async, [&, b] { out[b] = attempt(cands[i + b], st[b]); }));
            for (auto& f : fs) f.get();
        }
        for (std::size_t b = 0; b < batch; ++b) {
            ++res.stats.griddings_tried;
            res.stats.clauses += st[b].clauses;
            if (out[b]) {
                res.embedding = out[b];
                res.pattern_gridding = cands[i + b];
                break;
            }
        }
        i += batch;
    }
    res.stats.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline std::optional<Embedding> solve_cppm(const Permutation& pattern, const Permutation& text,
                                           const GriddingMatrix& m) {
    return solve_cppm_report(pattern, text, m).embedding;
}

}  // namespace ppm
