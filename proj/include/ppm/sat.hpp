#pragma once

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ppm/errors.hpp"

namespace ppm {

struct CNFFormula {
    int vars = 0;
    std::vector<std::vector<int>> clauses;  // signed DIMACS literals
    friend bool operator==(const CNFFormula&, const CNFFormula&) = default;
};

using Assignment = std::vector<bool>;  // index k-1 holds ρ(x_k)

inline CNFFormula parse_dimacs(const std::string& text) {
    CNFFormula f;
    bool header = false;
    long declared = 0;
    std::vector<int> cur;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("ParseError: line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == 'c') continue;
        if (tok == "%") break;
        if (tok == "p") {
            std::string fmt;
            long v = -1, c = -1;
            if (header || !(ls >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0) fail("bad header");
            header = true;
            f.vars = static_cast<int>(v);
            declared = c;
            continue;
        }
        if (!header) fail("clause before header");
        do {
            char* end = nullptr;
            long lit = std::strtol(tok.c_str(), &end, 10);
            if (*end) fail("bad literal '" + tok + "'");
            if (lit == 0) {
                f.clauses.push_back(cur);
                cur.clear();
            } else {
                if (std::labs(lit) > f.vars) fail("variable out of range");
                cur.push_back(static_cast<int>(lit));
            }
        } while (ls >> tok);
    }
    if (!header) fail("missing header");
    if (!cur.empty()) fail("clause not terminated by 0");
    if (static_cast<long>(f.clauses.size()) != declared) fail("clause count differs from header");
    return f;
}

inline std::string format_dimacs(const CNFFormula& f) {
    std::string s = "p cnf " + std::to_string(f.vars) + " " + std::to_string(f.clauses.size()) + "\n";
    for (const auto& c : f.clauses) {
        for (int l : c) s += std::to_string(l) + " ";
        s += "0\n";
    }
    return s;
}

inline bool satisfies(const CNFFormula& f, const Assignment& a) {
    for (const auto& c : f.clauses) {
        bool ok = false;
        for (int l : c) ok = ok || (a[std::abs(l) - 1] == (l > 0));
        if (!ok) return false;
    }
    return true;
}

namespace detail {

struct Dpll {
    const CNFFormula& f;
    std::vector<int> val;  // 0 unset, ±1

    int lit_value(int l) const {
        int v = val[std::abs(l)];
        return l > 0 ? v : -v;
    }

    bool propagate(std::vector<int>& trail) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : f.clauses) {
                int unset = 0, last = 0;
                bool sat = false;
                for (int l : c) {
                    int v = lit_value(l);
                    if (v > 0) { sat = true; break; }
                    if (v == 0) { ++unset; last = l; }
                }
                if (sat) continue;
                if (unset == 0) return false;
                if (unset == 1) {
                    val[std::abs(last)] = last > 0 ? 1 : -1;
                    trail.push_back(std::abs(last));
                    changed = true;
                }
            }
        }
        return true;
    }

    bool search() {
        std::vector<int> trail;
        if (!propagate(trail)) {
            for (int v : trail) val[v] = 0;
            return false;
        }
        int pick = 0;
        for (int v = 1; v <= f.vars && !pick; ++v)
            if (!val[v]) pick = v;
        if (!pick) return true;
        for (int s : {1, -1}) {
            val[pick] = s;
            if (search()) return true;
        }
        val[pick] = 0;
        for (int v : trail) val[v] = 0;
        return false;
    }
};

}  // namespace detail

inline std::optional<Assignment> solve_sat(const CNFFormula& f) {
    detail::Dpll d{f, std::vector<int>(f.vars + 1, 0)};
    if (!d.search()) return std::nullopt;
    Assignment a(f.vars);
    for (int v = 1; v <= f.vars; ++v) a[v - 1] = d.val[v] >= 0;
    if (!satisfies(f, a)) throw std::logic_error("solve_sat: witness does not satisfy the formula");
    return a;
}

}  // namespace ppm
