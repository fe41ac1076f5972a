#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "ppm/coord.hpp"

using namespace ppm;

TEST(Rational, Arithmetic) {
    Rational a(1, 3), b(1, 6);
    EXPECT_EQ(a + b, Rational(1, 2));
    EXPECT_EQ(a - b, Rational(1, 6));
    EXPECT_EQ(a * b, Rational(1, 18));
    EXPECT_EQ(a / b, Rational(2));
    EXPECT_EQ(Rational(2, -4), Rational(-1, 2));
    EXPECT_TRUE(Rational(1, 3) < Rational(1, 2));
}

TEST(Rational, OverflowThrows) {
    Rational big(std::int64_t(1) << 62);
    EXPECT_THROW(big * Rational(4), std::overflow_error);
}

TEST(ExactCoord, LexicographicOrder) {
    auto e = Coord::eps(), d = Coord::delta();
    Coord one(1);
    EXPECT_TRUE(one < one + d);
    EXPECT_TRUE(one + d < one + e);
    EXPECT_TRUE(one + e * Rational(1000) < Coord(Rational(1) + Rational(1, 1000000)));
    EXPECT_TRUE(one - e < one - d);
}

TEST(ExactCoord, TotalOrderProperties) {
    std::mt19937 rng(1);
    auto rnd = [&] {
        auto r = [&] { return Rational(static_cast<int>(rng() % 5) - 2, 1 + static_cast<int>(rng() % 3)); };
        return Coord(r(), r(), r());
    };
    for (int i = 0; i < 2000; ++i) {
        Coord a = rnd(), b = rnd(), c = rnd();
        int lt = (a < b) + (b < a) + (a == b);
        ASSERT_EQ(lt, 1);
        if (a < b && b < c) { ASSERT_TRUE(a < c); }
        if (!(a < b) && !(b < a)) { ASSERT_TRUE(a == b); }
    }
}

TEST(ExactCoord, WorksOverArbitraryPrecision) {
    using Big = boost::multiprecision::cpp_rational;
    ExactCoord<Big> a(Big(1, 3)), b(Big(1, 3), Big(1));
    EXPECT_TRUE(a < b);
    EXPECT_EQ((a + b).a, Big(2, 3));
}

TEST(Tile, Violations) {
    Tile<> t;
    t.box_bound = Rational(3);
    t.points = {{Coord(1), Coord(2)}, {Coord(2), Coord(1)}};
    EXPECT_EQ(t.violation(), "");
    t.points.push_back({Coord(2), Coord(3)});
    EXPECT_EQ(t.violation(), "points share a coordinate");
    t.points.back() = {Coord(Rational(7, 2)), Coord(3)};
    EXPECT_EQ(t.violation(), "point outside the box");
    t.points.back() = {Coord(Rational(7, 2)) - Coord::eps(), Coord(3)};
    EXPECT_EQ(t.violation(), "");
}
