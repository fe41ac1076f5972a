#pragma once

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ppm/errors.hpp"

namespace ppm {

// A permutation of [n], stored 1-based: ranks[i] is the value at position i+1.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> ranks) : r_(std::move(ranks)) { validate(); }
    Permutation(std::initializer_list<int> ranks) : r_(ranks) { validate(); }

    // "15342" for short permutations written without punctuation.
    static Permutation from_digits(const std::string& s) {
        std::vector<int> r;
        for (char ch : s) r.push_back(ch - '0');
        return Permutation(std::move(r));
    }
    static Permutation identity(int n) {
        std::vector<int> r(n);
        std::iota(r.begin(), r.end(), 1);
        return Permutation(std::move(r));
    }
    static Permutation decreasing(int n) {
        std::vector<int> r(n);
        for (int i = 0; i < n; ++i) r[i] = n - i;
        return Permutation(std::move(r));
    }

    int size() const { return static_cast<int>(r_.size()); }
    bool empty() const { return r_.empty(); }
    // 1-based access, matching π_i.
    int operator()(int i) const { return r_[i - 1]; }
    int operator[](std::size_t i) const { return r_[i]; }
    const std::vector<int>& ranks() const { return r_; }

    Permutation inverse() const {
        std::vector<int> v(r_.size());
        for (std::size_t i = 0; i < r_.size(); ++i) v[r_[i] - 1] = static_cast<int>(i) + 1;
        return Permutation(std::move(v), Trusted{});
    }

    std::string str() const {
        std::string s;
        bool digits = size() < 10;
        for (std::size_t i = 0; i < r_.size(); ++i) {
            if (!digits && i) s += ' ';
            s += std::to_string(r_[i]);
        }
        return s;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation& a, const Permutation& b) {
        if (a.size() != b.size()) return a.size() <=> b.size();
        return a.r_ <=> b.r_;
    }
    friend std::ostream& operator<<(std::ostream& os, const Permutation& p) { return os << p.str(); }

    struct Trusted {};
    Permutation(std::vector<int> ranks, Trusted) : r_(std::move(ranks)) {}

private:
    void validate() const {
        std::vector<char> seen(r_.size() + 1, 0);
        for (int v : r_) {
            if (v < 1 || v > static_cast<int>(r_.size()) || seen[v])
                throw InvalidPermutation("InvalidPermutation: ranks must be a bijection on [n]");
            seen[v] = 1;
        }
    }
    std::vector<int> r_;
};

// Embedding: position (0-based) in the text for each pattern position.
using Embedding = std::vector<int>;

// Ranks of a sequence of pairwise distinct comparable values (0-based).
template <class T, class Less = std::less<T>>
std::vector<int> rank_values(const std::vector<T>& v, Less less = {}) {
    std::vector<int> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return less(v[a], v[b]); });
    std::vector<int> rank(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i && !less(v[idx[i - 1]], v[idx[i]]))
            throw DuplicateCoordinate("DuplicateCoordinate: two points share a coordinate");
        rank[idx[i]] = static_cast<int>(i);
    }
    return rank;
}

// The reduction of a point set in general position: sort by x, rank by y.
template <class P>
Permutation standardize(const std::vector<P>& pts) {
    std::vector<decltype(P{}.x)> xs;
    std::vector<decltype(P{}.y)> ys;
    for (const auto& p : pts) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    auto rx = rank_values(xs), ry = rank_values(ys);
    std::vector<int> r(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) r[rx[i]] = ry[i] + 1;
    return Permutation(std::move(r), Permutation::Trusted{});
}

// Reduction of the subsequence at the given positions (0-based, increasing).
inline Permutation pattern_at(const Permutation& p, const std::vector<int>& pos) {
    std::vector<int> vals;
    vals.reserve(pos.size());
    for (int i : pos) vals.push_back(p[i]);
    auto rk = rank_values(vals);
    for (auto& v : rk) ++v;
    return Permutation(std::move(rk), Permutation::Trusted{});
}

// True iff positions are increasing and the image is order-isomorphic to the pattern.
inline bool is_embedding(const Permutation& text, const Permutation& pattern, const Embedding& e) {
    if (static_cast<int>(e.size()) != pattern.size()) return false;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 || e[i] >= text.size()) return false;
        if (i && e[i] <= e[i - 1]) return false;
    }
    if (e.empty()) return true;
    return pattern_at(text, e) == pattern;
}

namespace detail {

// For each pattern index i, the earlier index holding the next smaller / larger value.
inline void neighbor_bounds(const Permutation& pat, std::vector<int>& lo, std::vector<int>& hi) {
    int k = pat.size();
    lo.assign(k, -1);
    hi.assign(k, -1);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j) {
            if (pat[j] < pat[i] && (lo[i] < 0 || pat[j] > pat[lo[i]])) lo[i] = j;
            if (pat[j] > pat[i] && (hi[i] < 0 || pat[j] < pat[hi[i]])) hi[i] = j;
        }
}

}  // namespace detail

// Lexicographically least embedding of pattern into text, by backtracking.
// Worst case O(n^k) for |text| = n, |pattern| = k.
inline std::optional<Embedding> contains(const Permutation& text, const Permutation& pattern) {
    int n = text.size(), k = pattern.size();
    Embedding e(k);
    if (k == 0) return e;
    if (k > n) return std::nullopt;
    std::vector<int> lo, hi;
    detail::neighbor_bounds(pattern, lo, hi);
    std::vector<int> next(k, 0);
    int i = 0;
    next[0] = 0;
    while (i >= 0) {
        bool placed = false;
        int lim = n - (k - i);
        for (int j = next[i]; j <= lim; ++j) {
            int v = text[j];
            if (lo[i] >= 0 && v < text[e[lo[i]]]) continue;
            if (hi[i] >= 0 && v > text[e[hi[i]]]) continue;
            e[i] = j;
            next[i] = j + 1;
            placed = true;
            break;
        }
        if (!placed) {
            --i;
            continue;
        }
        if (i == k - 1) {
            if (!is_embedding(text, pattern, e))
                throw std::logic_error("contains: produced an invalid embedding");
            return e;
        }
        ++i;
        next[i] = e[i - 1] + 1;
    }
    return std::nullopt;
}

inline bool avoids(const Permutation& p, const Permutation& sigma) {
    int k = sigma.size();
    // Monotone patterns are decided by longest monotone subsequences.
    if (k >= 1 && (sigma == Permutation::identity(k) || sigma == Permutation::decreasing(k))) {
        bool inc = sigma == Permutation::identity(k);
        std::vector<int> tails;
        for (int v : p.ranks()) {
            int w = inc ? v : -v;
            auto it = std::lower_bound(tails.begin(), tails.end(), w);
            if (it == tails.end()) tails.push_back(w); else *it = w;
            if (static_cast<int>(tails.size()) >= k) return false;
        }
        return true;
    }
    return !contains(p, sigma).has_value();
}

// The symmetry group of the square, as a word over r (reverse), c (complement), i (inverse),
// applied left to right.
struct SymmetryOp {
    std::string word;

    static SymmetryOp reverse() { return {"r"}; }
    static SymmetryOp complement() { return {"c"}; }
    static SymmetryOp inverse() { return {"i"}; }
    static std::vector<SymmetryOp> all() {
        return {{""}, {"r"}, {"c"}, {"rc"}, {"i"}, {"ri"}, {"ci"}, {"rci"}};
    }
    SymmetryOp then(const SymmetryOp& o) const { return {word + o.word}; }
};

inline Permutation apply_symmetry(const Permutation& p, const SymmetryOp& s) {
    std::vector<int> r = p.ranks();
    int n = p.size();
    for (char g : s.word) {
        if (g == 'r') {
            std::reverse(r.begin(), r.end());
        } else if (g == 'c') {
            for (auto& v : r) v = n + 1 - v;
        } else if (g == 'i') {
            std::vector<int> q(n);
            for (int i = 0; i < n; ++i) q[r[i] - 1] = i + 1;
            r = std::move(q);
        } else {
            throw std::invalid_argument("apply_symmetry: unknown generator");
        }
    }
    return Permutation(std::move(r), Permutation::Trusted{});
}

inline Permutation reverse(const Permutation& p) { return apply_symmetry(p, SymmetryOp::reverse()); }
inline Permutation complement(const Permutation& p) { return apply_symmetry(p, SymmetryOp::complement()); }

inline Permutation direct_sum(const Permutation& p, const Permutation& q) {
    std::vector<int> r = p.ranks();
    for (int v : q.ranks()) r.push_back(v + p.size());
    return Permutation(std::move(r), Permutation::Trusted{});
}

inline Permutation skew_sum(const Permutation& p, const Permutation& q) {
    std::vector<int> r;
    for (int v : p.ranks()) r.push_back(v + q.size());
    for (int v : q.ranks()) r.push_back(v);
    return Permutation(std::move(r), Permutation::Trusted{});
}

// Replace the point at 1-based position index by a copy of q.
inline Permutation inflate(const Permutation& p, int index, const Permutation& q) {
    if (index < 1 || index > p.size()) throw IndexOutOfRange("IndexOutOfRange: inflate index");
    int v0 = p(index), m = q.size();
    std::vector<int> r;
    for (int i = 1; i <= p.size(); ++i) {
        if (i == index) {
            for (int v : q.ranks()) r.push_back(v0 - 1 + v);
        } else {
            int v = p(i);
            r.push_back(v > v0 ? v + m - 1 : v);
        }
    }
    return Permutation(std::move(r), Permutation::Trusted{});
}

inline bool is_sum_decomposable(const Permutation& p) {
    int mx = 0;
    for (int i = 0; i + 1 < p.size(); ++i) {
        mx = std::max(mx, p[i]);
        if (mx == i + 1) return true;
    }
    return false;
}

inline bool is_skew_decomposable(const Permutation& p) {
    return is_sum_decomposable(complement(p));
}

// mirrored = false: the Fibonacci class ⊕21, |p_i − i| ≤ 1.
// mirrored = true: ⊖12, tested as membership of the reversal in ⊕21.
inline bool is_fibonacci(const Permutation& p, bool mirrored = false) {
    const Permutation& q = mirrored ? reverse(p) : p;
    for (int i = 1; i <= q.size(); ++i)
        if (std::abs(q(i) - i) > 1) return false;
    return true;
}

// One line of space separated ranks, newline terminated; empty file is the empty permutation.
inline std::string format_perm(const Permutation& p) {
    std::string s;
    for (int i = 0; i < p.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(p[i]);
    }
    return s + "\n";
}

inline Permutation parse_perm(const std::string& text) {
    std::istringstream is(text);
    std::vector<int> r;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw ParseError("ParseError: bad rank '" + tok + "'");
        }
        if (used != tok.size()) throw ParseError("ParseError: bad rank '" + tok + "'");
        r.push_back(v);
    }
    return Permutation(std::move(r));
}

}  // namespace ppm
