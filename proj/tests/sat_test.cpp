#include <gtest/gtest.h>

#include <random>

#include "ppm/sat.hpp"

using namespace ppm;

namespace {

bool truth_table(const CNFFormula& f) {
    for (long mask = 0; mask < (1L << f.vars); ++mask) {
        Assignment a(f.vars);
        for (int k = 0; k < f.vars; ++k) a[k] = (mask >> k) & 1;
        if (satisfies(f, a)) return true;
    }
    return false;
}

CNFFormula random_cnf(int n, int m, int width, std::mt19937& rng) {
    CNFFormula f{n, {}};
    for (int j = 0; j < m; ++j) {
        std::vector<int> c;
        int w = 1 + rng() % width;
        for (int t = 0; t < w; ++t) c.push_back((1 + static_cast<int>(rng() % n)) * (rng() % 2 ? 1 : -1));
        f.clauses.push_back(c);
    }
    return f;
}

}  // namespace

TEST(Dimacs, ParsesExamples) {
    auto f = parse_dimacs("p cnf 1 1\n1 0\n");
    EXPECT_EQ(f.vars, 1);
    EXPECT_EQ(f.clauses, (std::vector<std::vector<int>>{{1}}));
    auto g = parse_dimacs("c comment\np cnf 3 2\n1 -2\n 3 0 -1 0\n%\n0\n");
    EXPECT_EQ(g.clauses, (std::vector<std::vector<int>>{{1, -2, 3}, {-1}}));
}

TEST(Dimacs, Errors) {
    EXPECT_THROW(parse_dimacs("p cnf 1 1\n1\n"), ParseError);
    EXPECT_THROW(parse_dimacs("1 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs(""), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 1 2\n1 0\n"), ParseError);
    EXPECT_THROW(parse_dimacs("p cnf 1 1\nx 0\n"), ParseError);
    try {
        parse_dimacs("p cnf 2 1\n\n1 y 0\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Dimacs, RoundTrip) {
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto f = random_cnf(1 + rng() % 6, rng() % 8, 4, rng);
        EXPECT_EQ(parse_dimacs(format_dimacs(f)), f);
    }
}

TEST(Sat, Examples) {
    EXPECT_FALSE(solve_sat(CNFFormula{1, {{1}, {-1}}}));
    auto w = solve_sat(CNFFormula{2, {{1, 2}}});
    ASSERT_TRUE(w);
    EXPECT_TRUE((*w)[0] || (*w)[1]);
    auto empty = solve_sat(CNFFormula{3, {}});
    ASSERT_TRUE(empty);
    EXPECT_EQ(empty->size(), 3u);
    EXPECT_FALSE(solve_sat(CNFFormula{1, {{}}}));
}

TEST(Sat, AgreesWithTruthTables) {
    std::mt19937 rng(7);
    int sat = 0;
    for (int i = 0; i < 3000; ++i) {
        auto f = random_cnf(1 + rng() % 4, rng() % 12, 3, rng);
        auto w = solve_sat(f);
        ASSERT_EQ(w.has_value(), truth_table(f)) << format_dimacs(f);
        if (w) {
            ++sat;
            ASSERT_TRUE(satisfies(f, *w));
        }
    }
    EXPECT_GT(sat, 500);
    EXPECT_LT(sat, 2900);
}
