#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppm/errors.hpp"

namespace ppm {

// int64 rational, kept in lowest terms with positive denominator.
// Every operation that could leave the int64 range throws std::overflow_error.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        if (a.den_ == b.den_) return Rational(add(a.num_, b.num_), a.den_);
        std::int64_t g = std::gcd(a.den_, b.den_);
        std::int64_t l = mul(a.den_ / g, b.den_);
        return Rational(add(mul(a.num_, l / a.den_), mul(b.num_, l / b.den_)), l);
    }
    friend Rational operator-(const Rational& a) {
        if (a.num_ == INT64_MIN) throw std::overflow_error("Rational: negate overflow");
        Rational r;
        r.num_ = -a.num_;
        r.den_ = a.den_;
        return r;
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        std::int64_t g1 = std::gcd(a.num_, b.den_), g2 = std::gcd(b.num_, a.den_);
        if (g1 == 0) g1 = 1;
        if (g2 == 0) g2 = 1;
        return Rational(mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        Rational inv;
        inv.num_ = b.num_ < 0 ? -b.den_ : b.den_;
        inv.den_ = b.num_ < 0 ? -b.num_ : b.num_;
        return a * inv;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        if (a.den_ == b.den_) return a.num_ <=> b.num_;
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l < r ? std::strong_ordering::less
                     : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    int sign() const { return (num_ > 0) - (num_ < 0); }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static std::int64_t add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational: add overflow");
        return r;
    }
    static std::int64_t mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rational: mul overflow");
        return r;
    }
    void normalize() {
        if (den_ < 0) {
            if (num_ == INT64_MIN || den_ == INT64_MIN) throw std::overflow_error("Rational: overflow");
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// a + b·ε + c·δ with ε ≫ δ > 0 infinitesimal; ordered lexicographically.
template <class Q = Rational>
struct ExactCoord {
    Q a{}, b{}, c{};

    ExactCoord() = default;
    ExactCoord(Q a_) : a(std::move(a_)) {}  // NOLINT
    ExactCoord(Q a_, Q b_, Q c_ = Q{}) : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)) {}
    ExactCoord(int v) : a(Q(v)) {}  // NOLINT

    static ExactCoord eps(Q k = Q(1)) { return ExactCoord(Q{}, std::move(k), Q{}); }
    static ExactCoord delta(Q k = Q(1)) { return ExactCoord(Q{}, Q{}, std::move(k)); }

    friend ExactCoord operator+(const ExactCoord& x, const ExactCoord& y) {
        return {x.a + y.a, x.b + y.b, x.c + y.c};
    }
    friend ExactCoord operator-(const ExactCoord& x, const ExactCoord& y) {
        return {x.a - y.a, x.b - y.b, x.c - y.c};
    }
    friend ExactCoord operator-(const ExactCoord& x) { return {-x.a, -x.b, -x.c}; }
    friend ExactCoord operator*(const ExactCoord& x, const Q& k) { return {x.a * k, x.b * k, x.c * k}; }
    friend ExactCoord operator/(const ExactCoord& x, const Q& k) { return {x.a / k, x.b / k, x.c / k}; }

    friend bool operator==(const ExactCoord& x, const ExactCoord& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c;
    }
    friend std::strong_ordering operator<=>(const ExactCoord& x, const ExactCoord& y) {
        auto cmp = [](const Q& u, const Q& v) -> std::strong_ordering {
            if constexpr (std::three_way_comparable<Q, std::strong_ordering>) return u <=> v;
            else return u < v ? std::strong_ordering::less : v < u ? std::strong_ordering::greater : std::strong_ordering::equal;
        };
        if (auto o = cmp(x.a, y.a); o != 0) return o;
        if (auto o = cmp(x.b, y.b); o != 0) return o;
        return cmp(x.c, y.c);
    }

    std::string str() const {
        std::ostringstream os;
        os << a;
        auto term = [&](const Q& v, const char* sym) {
            if (v == Q{}) return;
            if (v < Q{}) os << "-"; else os << "+";
            Q m = v < Q{} ? -v : v;
            if (!(m == Q(1))) os << m;
            os << sym;
        };
        term(b, "e");
        term(c, "d");
        return os.str();
    }
};

template <class Q = Rational>
struct PlanePoint {
    ExactCoord<Q> x, y;
    friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

using Coord = ExactCoord<Rational>;
using Point = PlanePoint<Rational>;

// Finite point set inside the open box (1/2, m + 1/2)^2, in general position.
template <class Q = Rational>
struct Tile {
    std::vector<PlanePoint<Q>> points;
    Q box_bound{};

    // Empty string when valid, otherwise a description of the first violation.
    std::string violation() const {
        Q lo = Q(1) / Q(2), hi = box_bound + Q(1) / Q(2);
        for (const auto& p : points)
            for (const auto* c : {&p.x, &p.y})
                if (!(c->a > lo || (c->a == lo && (c->b > Q{} || (c->b == Q{} && c->c > Q{}))))
                    || !(c->a < hi || (c->a == hi && (c->b < Q{} || (c->b == Q{} && c->c < Q{})))))
                    return "point outside the box";
        for (bool use_x : {true, false}) {
            std::vector<const ExactCoord<Q>*> v;
            for (const auto& p : points) v.push_back(use_x ? &p.x : &p.y);
            std::sort(v.begin(), v.end(), [](const auto* a, const auto* b) { return *a < *b; });
            for (std::size_t i = 1; i < v.size(); ++i)
                if (*v[i] == *v[i - 1]) return "points share a coordinate";
        }
        return {};
    }
};

}  // namespace ppm
