#pragma once

#include <array>
#include <cstdlib>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/sat.hpp"

namespace ppm {

struct Literal {
    int var = 1;  // 1-based
    bool positive = true;
    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Formula3CNF {
    int n = 0;
    std::vector<std::array<Literal, 3>> clauses;

    int m() const { return static_cast<int>(clauses.size()); }
    std::vector<int> occurrences() const {
        std::vector<int> occ(n, 0);
        for (const auto& c : clauses)
            for (const auto& l : c) ++occ[l.var - 1];
        return occ;
    }
    bool satisfied_by(const Assignment& a) const {
        for (const auto& c : clauses) {
            bool ok = false;
            for (const auto& l : c) ok = ok || a[l.var - 1] == l.positive;
            if (!ok) return false;
        }
        return true;
    }
    CNFFormula to_cnf() const {
        CNFFormula f;
        f.vars = n;
        for (const auto& c : clauses) {
            f.clauses.emplace_back();
            for (const auto& l : c) f.clauses.back().push_back(l.positive ? l.var : -l.var);
        }
        return f;
    }
};

inline Formula3CNF normalize_3cnf(const CNFFormula& raw) {
    Formula3CNF f;
    f.n = raw.vars;
    for (std::size_t i = 0; i < raw.clauses.size(); ++i) {
        const auto& c = raw.clauses[i];
        if (c.empty()) throw EmptyClause("EmptyClause: clause " + std::to_string(i + 1));
        if (c.size() > 3) throw ClauseTooWide("ClauseTooWide: clause " + std::to_string(i + 1) + " has " +
                                              std::to_string(c.size()) + " literals");
        std::array<Literal, 3> out;
        for (std::size_t s = 0; s < 3; ++s) {
            int l = c[std::min(s, c.size() - 1)];
            if (l == 0 || std::abs(l) > raw.vars) throw ParseError("ParseError: literal out of range");
            out[s] = {std::abs(l), l > 0};
        }
        f.clauses.push_back(out);
    }
    return f;
}

}  // namespace ppm
