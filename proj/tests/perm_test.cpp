#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ppm/coord.hpp"
#include "ppm/perm.hpp"

using namespace ppm;

namespace {

Permutation P(const char* s) { return Permutation::from_digits(s); }

std::vector<Permutation> all_perms(int n) {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = i + 1;
    std::vector<Permutation> out;
    do out.emplace_back(r);
    while (std::next_permutation(r.begin(), r.end()));
    return out;
}

// Reduction of a subsequence by counting smaller values, no sorting shared with the library.
std::vector<int> reduce_values(const std::vector<int>& v) {
    std::vector<int> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        int c = 1;
        for (int w : v) c += w < v[i];
        r[i] = c;
    }
    return r;
}

// Enumerates all subsets of positions.
bool contains_oracle(const Permutation& t, const Permutation& p) {
    int n = t.size(), k = p.size();
    if (k > n) return false;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        std::vector<int> v;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) v.push_back(t[i]);
        if (reduce_values(v) == p.ranks()) return true;
    }
    return false;
}

Permutation random_perm(int n, std::mt19937& rng) {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = i + 1;
    std::shuffle(r.begin(), r.end(), rng);
    return Permutation(r);
}

}  // namespace

TEST(Permutation, RejectsNonBijections) {
    EXPECT_THROW(Permutation({1, 1}), InvalidPermutation);
    EXPECT_THROW(Permutation({0, 1}), InvalidPermutation);
    EXPECT_THROW(Permutation({1, 3}), InvalidPermutation);
    EXPECT_NO_THROW(Permutation(std::vector<int>{}));
}

TEST(Standardize, SmallSets) {
    std::vector<Point> two{{Coord(Rational(5, 2)), Coord(7)}, {Coord(9), Coord(1)}};
    EXPECT_EQ(standardize(two), P("21"));
    EXPECT_EQ(standardize(std::vector<Point>{}).size(), 0);
    auto e = Coord::eps();
    std::vector<Point> three{{Coord(1), Coord(1) + e}, {Coord(Rational(3, 2)), Coord(5)}, {Coord(2), Coord(2) - e}};
    // 1+ε < 2−ε < 5 by pairwise comparison.
    EXPECT_EQ(standardize(three), P("132"));
}

TEST(Standardize, IdempotentOnDiagrams) {
    for (int n = 0; n <= 7; ++n)
        for (const auto& p : all_perms(n)) {
            std::vector<Point> pts;
            for (int i = 1; i <= n; ++i) pts.push_back({Coord(i), Coord(p(i))});
            ASSERT_EQ(standardize(pts), p);
        }
}

TEST(Contains, Examples) {
    auto e = contains(P("15342"), P("132"));
    ASSERT_TRUE(e);
    EXPECT_TRUE(is_embedding(P("15342"), P("132"), *e));
    EXPECT_EQ(*e, (Embedding{0, 1, 2}));
    EXPECT_EQ(contains(P("15342"), Permutation())->size(), 0u);
    EXPECT_FALSE(contains(P("123"), P("21")));
}

TEST(Contains, AgreesWithSubsetOracle) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 400; ++trial) {
        int n = 1 + rng() % 9, k = 1 + rng() % 5;
        auto t = random_perm(n, rng), p = random_perm(k, rng);
        auto e = contains(t, p);
        ASSERT_EQ(e.has_value(), contains_oracle(t, p)) << t.str() << " " << p.str();
        if (e) { ASSERT_TRUE(is_embedding(t, p, *e)); }
    }
}

TEST(Contains, LexicographicallyLeast) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = random_perm(7, rng), p = random_perm(3, rng);
        auto e = contains(t, p);
        std::optional<Embedding> best;
        for (int a = 0; a < 7 && !best; ++a)
            for (int b = a + 1; b < 7 && !best; ++b)
                for (int c = b + 1; c < 7 && !best; ++c)
                    if (reduce_values({t[a], t[b], t[c]}) == p.ranks()) best = Embedding{a, b, c};
        ASSERT_EQ(e, best);
    }
}

TEST(Symmetry, Examples) {
    EXPECT_EQ(reverse(P("123")), P("321"));
    EXPECT_EQ(apply_symmetry(P("2413"), SymmetryOp::inverse()), P("3142"));
    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
        auto p = random_perm(1 + rng() % 8, rng);
        EXPECT_EQ(complement(complement(p)), p);
        EXPECT_EQ(reverse(reverse(p)), p);
        EXPECT_EQ(p.inverse().inverse(), p);
    }
}

TEST(Symmetry, GroupOfEight) {
    auto p = P("1342");
    std::set<std::vector<int>> images;
    for (const auto& s : SymmetryOp::all()) images.insert(apply_symmetry(p, s).ranks());
    EXPECT_EQ(images.size(), 8u);
    for (const auto& s : SymmetryOp::all())
        for (const auto& t : SymmetryOp::all()) {
            auto st = apply_symmetry(p, s.then(t)).ranks();
            EXPECT_TRUE(images.count(st));
        }
}

TEST(Symmetry, PreservesContainment) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = random_perm(1 + rng() % 9, rng), p = random_perm(1 + rng() % 4, rng);
        bool base = contains(t, p).has_value();
        for (const auto& s : SymmetryOp::all())
            ASSERT_EQ(contains(apply_symmetry(t, s), apply_symmetry(p, s)).has_value(), base);
    }
}

TEST(Sums, PointSetConstruction) {
    EXPECT_EQ(direct_sum(P("1"), P("1")), P("12"));
    EXPECT_EQ(skew_sum(P("21"), P("1")), P("321"));
    EXPECT_EQ(direct_sum(P("21"), P("21")), P("2143"));
    // Inflation through the point formula p.x + q.x/(m+1).
    auto p = P("132"), q = P("21");
    for (int idx = 1; idx <= 3; ++idx) {
        std::vector<Point> pts;
        for (int i = 1; i <= 3; ++i) {
            if (i != idx) {
                pts.push_back({Coord(i), Coord(p(i))});
                continue;
            }
            for (int j = 1; j <= 2; ++j)
                pts.push_back({Coord(Rational(i) + Rational(j, 3)), Coord(Rational(p(i)) + Rational(q(j), 3))});
        }
        EXPECT_EQ(inflate(p, idx, q), standardize(pts));
    }
    EXPECT_EQ(inflate(P("12"), 1, P("21")), P("213"));
    EXPECT_THROW(inflate(p, 4, q), IndexOutOfRange);
    EXPECT_THROW(inflate(p, 0, q), IndexOutOfRange);
}

TEST(Avoids, Examples) {
    EXPECT_TRUE(avoids(P("123"), P("21")));
    EXPECT_FALSE(avoids(P("2143"), P("21")));
    EXPECT_TRUE(avoids(P("41352"), P("4321")));
    EXPECT_EQ(avoids(P("41352"), P("4321")), !contains_oracle(P("41352"), P("4321")));
}

TEST(Fibonacci, Examples) {
    EXPECT_TRUE(is_fibonacci(P("213")));
    EXPECT_FALSE(is_fibonacci(P("321")));
    EXPECT_TRUE(is_fibonacci(P("132"), true) == false);
    EXPECT_TRUE(is_fibonacci(P("312"), true));
}

TEST(Fibonacci, MatchesBasisCharacterization) {
    for (int n = 0; n <= 6; ++n)
        for (const auto& p : all_perms(n)) {
            bool basis = avoids(p, P("321")) && avoids(p, P("312")) && avoids(p, P("231"));
            ASSERT_EQ(is_fibonacci(p), basis) << p.str();
            // ⊖12 is the reversal of ⊕21.
            ASSERT_EQ(is_fibonacci(p, true), is_fibonacci(reverse(p))) << p.str();
        }
}

TEST(ErdosSzekeres, LengthFive) {
    for (const auto& p : all_perms(5)) ASSERT_TRUE(!avoids(p, P("123")) || !avoids(p, P("321"))) << p.str();
    int both = 0;
    for (const auto& p : all_perms(4)) both += avoids(p, P("123")) && avoids(p, P("321"));
    EXPECT_GT(both, 0);
}

TEST(PermText, RoundTrip) {
    auto p = P("31524");
    EXPECT_EQ(format_perm(p), "3 1 5 2 4\n");
    EXPECT_EQ(parse_perm(format_perm(p)), p);
    EXPECT_EQ(parse_perm("").size(), 0);
    EXPECT_THROW(parse_perm("1 x 2"), ParseError);
    EXPECT_THROW(parse_perm("1 1"), InvalidPermutation);
}
