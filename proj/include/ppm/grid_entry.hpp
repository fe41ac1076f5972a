#pragma once

#include <random>
#include <string>
#include <vector>

#include "ppm/perm.hpp"

namespace ppm {

// A closed family of permutation classes used as gridding-matrix entries.
struct ClassEntry {
    enum Tag { Empty, Inc, Dec, Av, FibPlus, FibMinus, JuxtH, JuxtV };

    Tag tag = Empty;
    Permutation sigma;       // Av only
    bool first_inc = true;   // JuxtH: left cell, JuxtV: bottom cell
    bool second_inc = true;  // JuxtH: right cell, JuxtV: top cell

    static ClassEntry empty() { return {}; }
    static ClassEntry inc() { return make(Inc); }
    static ClassEntry dec() { return make(Dec); }
    static ClassEntry fib_plus() { return make(FibPlus); }
    static ClassEntry fib_minus() { return make(FibMinus); }
    static ClassEntry av(Permutation s) {
        ClassEntry e = make(Av);
        e.sigma = std::move(s);
        return e;
    }
    static ClassEntry juxt_h(bool d1_inc, bool d2_inc) { return juxt(JuxtH, d1_inc, d2_inc); }
    static ClassEntry juxt_v(bool d1_inc, bool d2_inc) { return juxt(JuxtV, d1_inc, d2_inc); }

    bool is_empty() const { return tag == Empty; }
    bool infinite() const { return tag != Empty && !(tag == Av && sigma.size() < 2); }
    bool monotone() const { return tag == Inc || tag == Dec; }

    bool sum_closed() const {
        return tag == Inc || tag == FibPlus || (tag == Av && !is_sum_decomposable(sigma));
    }
    bool skew_closed() const {
        return tag == Dec || tag == FibMinus || (tag == Av && !is_skew_decomposable(sigma));
    }

    friend bool operator==(const ClassEntry& a, const ClassEntry& b) {
        if (a.tag != b.tag) return false;
        if (a.tag == Av) return a.sigma == b.sigma;
        if (a.tag == JuxtH || a.tag == JuxtV)
            return a.first_inc == b.first_inc && a.second_inc == b.second_inc;
        return true;
    }

    // File syntax: empty, inc, dec, fib+, fib-, av:321, juxth:inc,inc, juxtv:inc,dec.
    std::string str() const {
        auto d = [](bool inc) { return inc ? "inc" : "dec"; };
        switch (tag) {
            case Empty: return "empty";
            case Inc: return "inc";
            case Dec: return "dec";
            case FibPlus: return "fib+";
            case FibMinus: return "fib-";
            case Av: {
                std::string s = "av:";
                for (int i = 0; i < sigma.size(); ++i) {
                    if (i && sigma.size() >= 10) s += '.';
                    s += std::to_string(sigma[i]);
                }
                return s;
            }
            case JuxtH: return std::string("juxth:") + d(first_inc) + "," + d(second_inc);
            case JuxtV: return std::string("juxtv:") + d(first_inc) + "," + d(second_inc);
        }
        return "?";
    }

    static ClassEntry parse(const std::string& s) {
        if (s == "empty" || s.empty()) return empty();
        if (s == "inc") return inc();
        if (s == "dec") return dec();
        if (s == "fib+") return fib_plus();
        if (s == "fib-") return fib_minus();
        if (s.rfind("av:", 0) == 0) {
            std::string body = s.substr(3);
            std::vector<int> r;
            if (body.find('.') != std::string::npos) {
                std::size_t p = 0;
                while (p <= body.size()) {
                    std::size_t q = body.find('.', p);
                    if (q == std::string::npos) q = body.size();
                    r.push_back(std::stoi(body.substr(p, q - p)));
                    p = q + 1;
                }
            } else {
                for (char c : body) {
                    if (c < '1' || c > '9') throw ParseError("ParseError: bad entry '" + s + "'");
                    r.push_back(c - '0');
                }
            }
            return av(Permutation(std::move(r)));
        }
        for (auto [prefix, tg] : {std::pair{"juxth:", JuxtH}, std::pair{"juxtv:", JuxtV}}) {
            std::string pf = prefix;
            if (s.rfind(pf, 0) == 0) {
                std::string body = s.substr(pf.size());
                auto comma = body.find(',');
                if (comma == std::string::npos) break;
                std::string a = body.substr(0, comma), b = body.substr(comma + 1);
                auto dir = [&](const std::string& t) {
                    if (t == "inc") return true;
                    if (t == "dec") return false;
                    throw ParseError("ParseError: bad entry '" + s + "'");
                };
                return juxt(tg, dir(a), dir(b));
            }
        }
        throw ParseError("ParseError: bad entry '" + s + "'");
    }

private:
    static ClassEntry make(Tag t) {
        ClassEntry e;
        e.tag = t;
        return e;
    }
    static ClassEntry juxt(Tag t, bool a, bool b) {
        ClassEntry e = make(t);
        e.first_inc = a;
        e.second_inc = b;
        return e;
    }
};

inline bool is_monotone_seq(const std::vector<int>& v, bool inc) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if ((v[i] > v[i - 1]) != inc) return false;
    return true;
}

namespace detail {

// ok[s] is true iff v[0..s) is monotone in direction inc (prefix) or v[s..n) is (suffix).
inline std::vector<char> monotone_prefixes(const std::vector<int>& v, bool inc) {
    std::vector<char> ok(v.size() + 1, 0);
    ok[0] = 1;
    for (std::size_t s = 1; s <= v.size(); ++s)
        ok[s] = ok[s - 1] && (s == 1 || ((v[s - 1] > v[s - 2]) == inc));
    return ok;
}
inline std::vector<char> monotone_suffixes(const std::vector<int>& v, bool inc) {
    std::size_t n = v.size();
    std::vector<char> ok(n + 1, 0);
    ok[n] = 1;
    for (std::size_t s = n; s-- > 0;)
        ok[s] = ok[s + 1] && (s + 1 == n || ((v[s + 1] > v[s]) == inc));
    return ok;
}

// Values split into a lower part with d1 and upper part with d2, each monotone by position.
inline bool vertical_split(const Permutation& p, bool d1, bool d2) {
    int n = p.size();
    auto inv = p.inverse();
    // Lower part = values 1..v: good iff the positions of 1..v listed by position are monotone.
    // Monotone by position for a value set means the position sequence indexed by value is
    // monotone in the same direction.
    std::vector<int> pos(inv.ranks());
    auto lo = monotone_prefixes(pos, d1);
    auto hi = monotone_suffixes(pos, d2);
    for (int v = 0; v <= n; ++v)
        if (lo[v] && hi[v]) return true;
    return false;
}

}  // namespace detail

inline bool entry_contains(const ClassEntry& e, const Permutation& p) {
    switch (e.tag) {
        case ClassEntry::Empty: return p.empty();
        case ClassEntry::Inc: return is_monotone_seq(p.ranks(), true);
        case ClassEntry::Dec: return is_monotone_seq(p.ranks(), false);
        case ClassEntry::Av: return avoids(p, e.sigma);
        case ClassEntry::FibPlus: return is_fibonacci(p, false);
        case ClassEntry::FibMinus: return is_fibonacci(p, true);
        case ClassEntry::JuxtH: {
            auto lo = detail::monotone_prefixes(p.ranks(), e.first_inc);
            auto hi = detail::monotone_suffixes(p.ranks(), e.second_inc);
            for (int s = 0; s <= p.size(); ++s)
                if (lo[s] && hi[s]) return true;
            return false;
        }
        case ClassEntry::JuxtV: return detail::vertical_split(p, e.first_inc, e.second_inc);
    }
    return false;
}

// Image of the class under reversal (reverse = true) or complement.
inline ClassEntry transform_entry(const ClassEntry& e, bool rev) {
    ClassEntry r = e;
    switch (e.tag) {
        case ClassEntry::Empty: break;
        case ClassEntry::Inc: r.tag = ClassEntry::Dec; break;
        case ClassEntry::Dec: r.tag = ClassEntry::Inc; break;
        case ClassEntry::FibPlus: r.tag = ClassEntry::FibMinus; break;
        case ClassEntry::FibMinus: r.tag = ClassEntry::FibPlus; break;
        case ClassEntry::Av: r.sigma = rev ? reverse(e.sigma) : complement(e.sigma); break;
        case ClassEntry::JuxtH:
            if (rev) {
                r.first_inc = !e.second_inc;
                r.second_inc = !e.first_inc;
            } else {
                r.first_inc = !e.first_inc;
                r.second_inc = !e.second_inc;
            }
            break;
        case ClassEntry::JuxtV:
            if (rev) {
                r.first_inc = !e.first_inc;
                r.second_inc = !e.second_inc;
            } else {
                r.first_inc = !e.second_inc;
                r.second_inc = !e.first_inc;
            }
            break;
    }
    return r;
}

// Every member of `sub` lies in `sup`. Decided on the closed tag family; false when unknown.
inline bool entry_includes(const ClassEntry& sup, const ClassEntry& sub) {
    if (sub.tag == ClassEntry::Empty) return true;
    if (sup == sub) return true;
    switch (sup.tag) {
        case ClassEntry::Av:
            // Av(σ) ⊇ C iff σ ∉ C for a class C.
            return !entry_contains(sub, sup.sigma);
        case ClassEntry::FibPlus:
            return sub.tag == ClassEntry::Inc;
        case ClassEntry::FibMinus:
            return sub.tag == ClassEntry::Dec;
        case ClassEntry::JuxtH:
        case ClassEntry::JuxtV:
            return (sub.tag == ClassEntry::Inc && (sup.first_inc || sup.second_inc)) ||
                   (sub.tag == ClassEntry::Dec && (!sup.first_inc || !sup.second_inc));
        default:
            return false;
    }
}

// Random member of the class with exactly n points when one exists (small n).
template <class Rng>
Permutation sample_entry(const ClassEntry& e, int n, Rng& rng) {
    auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
    switch (e.tag) {
        case ClassEntry::Empty: return {};
        case ClassEntry::Inc: return Permutation::identity(n);
        case ClassEntry::Dec: return Permutation::decreasing(n);
        case ClassEntry::FibPlus:
        case ClassEntry::FibMinus: {
            std::vector<int> r;
            while (static_cast<int>(r.size()) < n) {
                int i = static_cast<int>(r.size());
                if (i + 2 <= n && coin()) {
                    r.push_back(i + 2);
                    r.push_back(i + 1);
                } else {
                    r.push_back(i + 1);
                }
            }
            Permutation p(std::move(r));
            return e.tag == ClassEntry::FibPlus ? p : reverse(p);
        }
        case ClassEntry::JuxtH:
        case ClassEntry::JuxtV: {
            int a = std::uniform_int_distribution<int>(0, n)(rng);
            std::vector<int> vals(n);
            std::iota(vals.begin(), vals.end(), 1);
            std::shuffle(vals.begin(), vals.end(), rng);
            std::vector<int> lo(vals.begin(), vals.begin() + a), hi(vals.begin() + a, vals.end());
            auto arrange = [](std::vector<int>& v, bool inc) {
                std::sort(v.begin(), v.end());
                if (!inc) std::reverse(v.begin(), v.end());
            };
            arrange(lo, e.first_inc);
            arrange(hi, e.second_inc);
            std::vector<int> r(lo);
            r.insert(r.end(), hi.begin(), hi.end());
            Permutation p(std::move(r));
            // JuxtV is the inverse picture: positions split instead of values.
            return e.tag == ClassEntry::JuxtV ? p.inverse() : p;
        }
        case ClassEntry::Av: {
            // Random insertion, keeping only insertions that stay in the class.
            std::vector<int> r;
            for (int step = 0; step < n; ++step) {
                bool added = false;
                for (int attempt = 0; attempt < 64 && !added; ++attempt) {
                    int k = static_cast<int>(r.size());
                    int pos = std::uniform_int_distribution<int>(0, k)(rng);
                    int val = std::uniform_int_distribution<int>(1, k + 1)(rng);
                    std::vector<int> q;
                    q.reserve(k + 1);
                    for (int i = 0; i < k; ++i) {
                        if (i == pos) q.push_back(val);
                        q.push_back(r[i] >= val ? r[i] + 1 : r[i]);
                    }
                    if (pos == k) q.push_back(val);
                    Permutation cand(q, Permutation::Trusted{});
                    if (avoids(cand, e.sigma)) {
                        r = std::move(q);
                        added = true;
                    }
                }
                if (!added) break;
            }
            return Permutation(std::move(r));
        }
    }
    return {};
}

}  // namespace ppm
