// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "micro.hpp"
#include "oracles.hpp"
#include "ppm/reduction/correctness.hpp"
#include "ppm/reduction/pipeline.hpp"
#include "ppm/reduction/validate.hpp"
#include "ppm/sat.hpp"

using namespace ppm;

namespace {

constexpr int kMatcherInstances = 600;          // ≥ 500
constexpr double kMatcherSeconds = 300;
constexpr int kPsiInstances = 1500;             // ≥ 1000
constexpr int kRandomFormulas = 50;
constexpr double kCorpusSeconds = 600;
constexpr double kStaircaseSeconds = 1;
constexpr int kRichSamples = 100;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

GriddingMatrix M(std::vector<std::vector<std::string>> rows) { return GriddingMatrix::from_strings(rows); }
Permutation P(const char* s) { return Permutation::from_digits(s); }

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome matcher_equivalence() {
    auto t0 = Clock::now();
    std::mt19937 rng(1001);
    // 1×2, 2×1 and 2×2 with mixed directions; cell sizes keep texts at ≤ 30 points.
    std::vector<std::pair<GriddingMatrix, int>> battery{
        {M({{"dec", "inc"}}), 15},          {M({{"inc", "dec"}}), 15},          {M({{"inc"}, {"dec"}}), 15},
        {M({{"dec"}, {"dec"}}), 15},        {M({{"dec", "inc"}, {"inc", "dec"}}), 7},
        {M({{"inc", "inc"}, {"dec", "inc"}}), 7}, {M({{"dec", "empty"}, {"inc", "dec"}}), 10}};
    int agree = 0, found = 0, longest = 0;
    for (int i = 0; i < kMatcherInstances; ++i) {
        const auto& [m, cell] = battery[i % battery.size()];
        auto text = sample_grid(m, cell, rng).first;
        // Half are subpatterns of the text; the rest are fresh class members of up to 8 points.
        Permutation pat = i % 2 ? oracle::random_subpattern(text, 8, rng) : sample_grid(m, 8 / m.entries().size(), rng).first;
        if (pat.size() > 8) pat = oracle::random_subpattern(pat, 8, rng);
        auto e = solve_cppm(pat, text, m);
        bool brute = contains(text, pat).has_value();
        bool ok = e.has_value() == brute && (!e || oracle::order_isomorphic(text, pat, *e));
        agree += ok;
        found += brute;
        longest = std::max(longest, text.size());
    }
    double s = since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%d/%d agree (%d contain), text <= %d, %.1fs (limit %.0fs)", agree,
                  kMatcherInstances, found, longest, s, kMatcherSeconds);
    return {agree == kMatcherInstances && longest <= 30 && s < kMatcherSeconds, buf};
}

Outcome psi_equivalence() {
    std::mt19937 rng(2002);
    auto dir = [&] { return std::string(rng() % 2 ? "inc" : "dec"); };
    int ran = 0, agree = 0, found = 0;
    while (ran < kPsiInstances) {
        // Random monotone matrix with t ≤ 4 cells laid out as 1×3, 4×1 (one column) or 2×2.
        int layout = rng() % 3;
        GriddingMatrix m = layout == 0   ? M({{dir(), dir(), dir()}})
                           : layout == 1 ? M({{dir()}, {dir()}, {dir()}, {dir()}})
                                         : M({{dir(), dir()}, {dir(), dir()}});
        auto [text, tg] = sample_grid(m, 3, rng);
        if (text.size() > 12) continue;
        Permutation pat;
        Gridding pg;
        if (rng() % 2) {
            std::tie(pat, pg) = sample_grid(m, 2, rng);
        } else {
            // Subpatterns of the text embed often, so both answers are well represented.
            pat = oracle::random_subpattern(text, 6, rng);
            auto g = find_gridding(pat, m);
            if (!g) continue;
            pg = *g;
        }
        if (pat.size() > 6) continue;
        auto sigma = detail::partition_by_cells(text, tg, m, true);
        auto pi = detail::partition_by_cells(pat, pg, m, true);
        auto e = psi_embedding(pat, pi, text, sigma);
        bool brute = oracle::part_respecting(pat, pi, text, sigma);
        ++ran;
        agree += e.has_value() == brute && (!e || oracle::order_isomorphic(text, pat, *e));
        found += brute;
    }
    return {agree == ran, std::to_string(agree) + "/" + std::to_string(ran) + " agree (" + std::to_string(found) +
                              " embeddable), text <= 12, pattern <= 6, t <= 4"};
}

Outcome gadget_lemmas() {
    auto t0 = Clock::now();
    std::string detail;
    bool pass = true;
    for (const auto& l : micro::all_lemmas()) {
        auto es = micro::grid_preserving_embeddings(l.micro);
        auto why = l.check(l.micro, es);
        int pts = std::max(l.micro.pattern.perm.size(), l.micro.text.perm.size());
        pass = pass && why.empty() && pts <= 24;
        detail += l.name + (why.empty() ? " ok" : " FAILED (" + why + ")") + " [" + std::to_string(es.size()) +
                  " emb, " + std::to_string(pts) + " pts]; ";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2fs", since(t0));
    return {pass, detail + buf};
}

// Formulas in the corpus ----------------------------------------------------------------

Formula3CNF from_clauses(int n, const std::vector<std::vector<int>>& cs) {
    CNFFormula raw{n, cs};
    return normalize_3cnf(raw);
}

// Clauses are non-empty sets of literals over distinct variables, padded to width 3.
std::vector<std::vector<int>> clauses_over(int n) {
    std::vector<std::vector<int>> out;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> vars;
        for (int v = 0; v < n; ++v)
            if (mask >> v & 1) vars.push_back(v + 1);
        for (int signs = 0; signs < (1 << vars.size()); ++signs) {
            std::vector<int> c;
            for (std::size_t t = 0; t < vars.size(); ++t) c.push_back(signs >> t & 1 ? -vars[t] : vars[t]);
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::vector<int>> canonical(std::vector<std::vector<int>> cs, const std::vector<int>& perm) {
    for (auto& c : cs) {
        for (int& l : c) l = l > 0 ? perm[l - 1] : -perm[-l - 1];
        std::sort(c.begin(), c.end());
    }
    std::sort(cs.begin(), cs.end());
    return cs;
}

// All formulas with n ≤ 3 variables and m ≤ 3 distinct clauses, one per variable-renaming class.
std::vector<Formula3CNF> exhaustive_corpus() {
    std::vector<Formula3CNF> out;
    for (int n = 1; n <= 3; ++n) {
        auto cl = clauses_over(n);
        std::set<std::vector<std::vector<int>>> seen;
        int k = static_cast<int>(cl.size());
        std::vector<std::vector<std::size_t>> picks{{}};
        for (int a = 0; a < k; ++a) {
            picks.push_back({std::size_t(a)});
            for (int b = a + 1; b < k; ++b) {
                picks.push_back({std::size_t(a), std::size_t(b)});
                for (int c = b + 1; c < k; ++c) picks.push_back({std::size_t(a), std::size_t(b), std::size_t(c)});
            }
        }
        for (const auto& pk : picks) {
            std::vector<std::vector<int>> cs;
            for (auto i : pk) cs.push_back(cl[i]);
            std::vector<int> perm(n);
            for (int v = 0; v < n; ++v) perm[v] = v + 1;
            auto best = canonical(cs, perm);
            while (std::next_permutation(perm.begin(), perm.end())) best = std::min(best, canonical(cs, perm));
            if (seen.insert(best).second) out.push_back(from_clauses(n, best));
        }
    }
    return out;
}

std::vector<Formula3CNF> random_corpus(int count, std::mt19937& rng) {
    std::vector<Formula3CNF> out;
    while (static_cast<int>(out.size()) < count) {
        int n = 1 + rng() % 6, m = 1 + rng() % 5;
        std::vector<std::vector<int>> cs;
        for (int j = 0; j < m; ++j) {
            std::vector<int> c;
            for (int t = 0; t < 3; ++t) c.push_back((1 + static_cast<int>(rng() % n)) * (rng() % 2 ? 1 : -1));
            cs.push_back(c);
        }
        out.push_back(from_clauses(n, cs));
    }
    return out;
}

bool cells_preserved(const ReductionInstance& inst, const Embedding& e) {
    auto cell = [](const Permutation& p, const Gridding& g, int pos) {
        return Cell{Gridding::locate(g.col_cuts, pos + 1), Gridding::locate(g.row_cuts, p[pos])};
    };
    for (int i = 0; i < static_cast<int>(e.size()); ++i)
        if (!(cell(inst.pattern, inst.pattern_gridding, i) == cell(inst.text, inst.text_gridding, e[i]))) return false;
    return true;
}

Outcome end_to_end() {
    auto t0 = Clock::now();
    std::mt19937 rng(4004);
    auto corpus = exhaustive_corpus();
    std::size_t exhaustive = corpus.size();
    for (auto& f : random_corpus(kRandomFormulas, rng)) corpus.push_back(f);
    int runs = 0, valid = 0, agree = 0, sat = 0, embedded = 0;
    std::string first_failure;
    for (auto mode : {SortMode::Gadgets, SortMode::Juxtaposition}) {
        for (const auto& f : corpus) {
            ++runs;
            auto inst = reduce(f, {mode, std::nullopt, std::nullopt, true}).instance;
            auto rep = validate_instance(inst);
            valid += rep.ok();
            auto sim = simulate_grid_preserving(inst);
            auto w = solve_sat(f.to_cnf());
            bool same = sim.satisfiable == w.has_value() && (!sim.witness || f.satisfied_by(*sim.witness));
            agree += same;
            bool emb_ok = true;
            if (w) {
                ++sat;
                auto e = embedding_from_assignment(inst, *w);
                emb_ok = e && oracle::order_isomorphic(inst.text, inst.pattern, *e) && cells_preserved(inst, *e);
                embedded += emb_ok;
            }
            if (first_failure.empty() && (!rep.ok() || !same || !emb_ok))
                first_failure = std::string(" first failure: ") + mode_name(mode) + " " + format_dimacs(f.to_cnf());
        }
    }
    double s = since(t0);
    char buf[300];
    std::snprintf(buf, sizeof buf,
                  "%zu exhaustive + %d random formulas x 2 modes: valid %d/%d, simulate==sat %d/%d, embeddings %d/%d, "
                  "%.0fs (limit %.0fs)",
                  exhaustive, kRandomFormulas, valid, runs, agree, runs, embedded, sat, s, kCorpusSeconds);
    return {valid == runs && agree == runs && embedded == sat && s < kCorpusSeconds, buf + first_failure};
}

Outcome size_scaling() {
    std::mt19937 rng(5005);
    std::string detail;
    bool pass = true;
    double prev_ratio = 1e9;
    for (int m : {4, 8, 16, 32, 64}) {
        int n = std::max(3, m / 2);
        std::vector<std::vector<int>> cs;
        for (int j = 0; j < m; ++j) {
            std::vector<int> c;
            for (int t = 0; t < 3; ++t) c.push_back((1 + static_cast<int>(rng() % n)) * (rng() % 2 ? 1 : -1));
            cs.push_back(c);
        }
        auto f = from_clauses(n, cs);
        auto j = reduce(f, {SortMode::Juxtaposition, std::nullopt, std::nullopt, false}).instance;
        auto g = reduce(f, {SortMode::Gadgets, std::nullopt, std::nullopt, false}).instance;
        double lg = m * std::log2(m), sq = double(m) * m;
        double ratio = double(j.text_size()) / double(g.text_size());
        bool ok = j.text_size() <= kJuxtaposition * lg && g.text_size() <= kGadgets * sq && ratio < prev_ratio;
        pass = pass && ok;
        char buf[200];
        std::snprintf(buf, sizeof buf, "m=%d: juxt %ld (%.0f m log m), gadgets %ld (%.0f m^2), ratio %.4f%s; ", m,
                      j.text_size(), j.text_size() / lg, g.text_size(), g.text_size() / sq, ratio, ok ? "" : " FAIL");
        detail += buf;
        prev_ratio = ratio;
    }
    char tail[80];
    std::snprintf(tail, sizeof tail, "C1=%.0f C2=%.0f", kJuxtaposition, kGadgets);
    return {pass, detail + tail};
}

Outcome grid_facts() {
    struct Fact {
        std::string name;
        Permutation sigma;
        GriddingMatrix m;
    };
    auto st = [](const char* d) { return staircase(3, ClassEntry::inc(), ClassEntry::av(P(d))); };
    std::vector<Fact> facts{{"4321 / St3(inc,Av(321))", P("4321"), st("321")},
                            {"4231 / St3(inc,Av(231))", P("4231"), st("231")},
                            {"4312 / St3(inc,Av(312))", P("4312"), st("312")},
                            {"14523 / (dec inc, Av(132) dec)", P("14523"), M({{"dec", "inc"}, {"av:132", "dec"}})},
                            {"24513 / (dec inc, Av(231) dec)", P("24513"), M({{"dec", "inc"}, {"av:231", "dec"}})},
                            {"32154 / (dec inc, Av(321) dec)", P("32154"), M({{"dec", "inc"}, {"av:321", "dec"}})},
                            {"42513 / (dec inc, Av(321) dec)", P("42513"), M({{"dec", "inc"}, {"av:321", "dec"}})}};
    bool pass = true;
    std::string detail;
    for (const auto& f : facts) {
        auto t0 = Clock::now();
        bool excluded = !find_gridding(f.sigma, f.m).has_value();
        double s = since(t0);
        bool ok = excluded && s < kStaircaseSeconds;
        pass = pass && ok;
        char buf[120];
        std::snprintf(buf, sizeof buf, "%s %s (%.1fms); ", f.name.c_str(), ok ? "excluded" : "NOT excluded", s * 1e3);
        detail += buf;
    }
    return {pass, detail};
}

Outcome rich_path() {
    auto m = M({{"dec", "inc"}, {"av:321", "dec"}});
    bool pass = true;
    std::string detail;
    for (int L : {4, 8, 16}) {
        auto rp = build_rich_path(m, L);
        bool shape = classify(cell_graph(rp.matrix)) == GraphShape::ProperTurningPath;
        int d = static_cast<int>(rp.d_positions.size());
        std::mt19937 rng(7000 + L);
        int ok_samples = 0;
        for (int i = 0; i < kRichSamples; ++i) ok_samples += find_gridding(sample_grid(rp.matrix, 2, rng).first, m).has_value();
        bool ok = shape && 5 * d >= L && ok_samples == kRichSamples;
        pass = pass && ok;
        detail += "L=" + std::to_string(L) + ": " + (shape ? "path" : "not a path") + ", " + std::to_string(d) +
                  " D-entries, " + std::to_string(ok_samples) + "/" + std::to_string(kRichSamples) + " samples; ";
    }
    return {pass, detail};
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"matcher oracle equivalence", matcher_equivalence},
        {"psi-embedding micro-equivalence", psi_equivalence},
        {"gadget lemma suite", gadget_lemmas},
        {"end-to-end reduction correctness", end_to_end},
        {"size scaling", size_scaling},
        {"grid-class facts", grid_facts},
        {"rich-path builder", rich_path}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
