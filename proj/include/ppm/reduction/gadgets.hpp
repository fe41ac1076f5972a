#pragma once

#include <algorithm>
#include <vector>

#include "ppm/coord.hpp"
#include "ppm/errors.hpp"

namespace ppm {

using Value = ExactCoord<Rational>;

// A point of tile Q_{i+1} in its own frame: `in` shares an axis with the predecessor, `out` with
// the successor.
struct FramePoint {
    Value out, in;
    friend bool operator==(const FramePoint&, const FramePoint&) = default;
};
using UnitPoints = std::vector<FramePoint>;  // one or two points, ascending `out`

enum class Adjacency { Row, Column };

inline Point to_physical(const FramePoint& p, Adjacency in_edge) {
    return in_edge == Adjacency::Row ? Point{p.out, p.in} : Point{p.in, p.out};
}

namespace gadget {

inline Value third(const Value& a, const Value& b) { return (a * Rational(2) + b) / Rational(3); }
inline Value mid(const Value& a, const Value& b) { return (a + b) / Rational(2); }
inline const Value eps = Value::eps();

inline UnitPoints copy(const Value& r, const Value& q) { return {{r, r + eps}, {q, q - eps}}; }
inline std::vector<UnitPoints> multiply(const Value& r, const Value& q) {
    Value a = third(r, q), b = third(q, r);
    return {{{r, r + eps}, {a, a}}, {{b, b}, {q, q - eps}}};
}
// Branch B1 (lower) then B2; together they form 2143.
inline std::vector<UnitPoints> choose(const Value& r, const Value& q) {
    Value a = third(r, q), b = third(q, r);
    return {{{r, a}, {a, r + eps}}, {{b, q - eps}, {q, b}}};
}
inline UnitPoints pick(const Value& r, const Value& q) { return {{r, q - eps}, {q, r + eps}}; }
inline UnitPoints merge(const Value& r1, const Value& q2) { return {{r1, q2 + eps}, {q2, r1 - eps}}; }
inline UnitPoints follow(const Value& r, const Value& q) { return {{r, q + eps}, {q, r - eps}}; }

// Returns {point sandwiched by A1, point sandwiched by A2}.
inline std::pair<UnitPoints, UnitPoints> flip_start(const Value& r1, const Value& q1, const Value& r2,
                                                    const Value& q2) {
    Value m1 = mid(r1, q1), m2 = mid(r2, q2);
    return {{{m2, m1}}, {{m1, m2}}};
}
inline UnitPoints flip_pattern_start(const Value& r, const Value& q) {
    Value m = mid(r, q);
    return {{m, m}};
}
inline UnitPoints flip_middle(const UnitPoints& prev_out) {
    if (prev_out.size() == 1) {
        const Value& v = prev_out[0].out;
        return {{v - eps, v - eps}, {v + eps, v + eps}};
    }
    const Value &a = prev_out[0].out, &b = prev_out[1].out;
    return {{a, a - eps}, {b, b + eps}};
}
inline UnitPoints flip_end(const UnitPoints& prev_out) {
    if (prev_out.size() == 1) {
        const Value& v = prev_out[0].out;
        return {{v - eps, v + eps}, {v + eps, v - eps}};
    }
    const Value &a = prev_out[0].out, &b = prev_out[1].out;
    return {{a, b + eps}, {b, a - eps}};
}

}  // namespace gadget

enum class GadgetKind { Copy, Multiply, Choose, Pick, Merge, Follow, FlipText, FlipPattern };

inline const char* gadget_name(GadgetKind k) {
    switch (k) {
        case GadgetKind::Copy: return "copy";
        case GadgetKind::Multiply: return "multiply";
        case GadgetKind::Choose: return "choose";
        case GadgetKind::Pick: return "pick";
        case GadgetKind::Merge: return "merge";
        case GadgetKind::Follow: return "follow";
        case GadgetKind::FlipText: return "flip_text";
        case GadgetKind::FlipPattern: return "flip_pattern";
    }
    return "?";
}

namespace detail {

inline Value shared(const Point& p, Adjacency a) { return a == Adjacency::Row ? p.y : p.x; }

// Shared-axis values of the input pairs, checked to be ascending and non-interleaved.
inline std::vector<Value> input_values(const std::vector<std::vector<Point>>& pairs, Adjacency a) {
    std::vector<Value> v;
    for (const auto& pr : pairs) {
        if (pr.size() != 2) throw AdjacencyMismatch("AdjacencyMismatch: gadget inputs must be atomic pairs");
        Value lo = shared(pr[0], a), hi = shared(pr[1], a);
        if (hi < lo) std::swap(lo, hi);
        if (!v.empty() && !(v.back() < lo)) throw AdjacencyMismatch("AdjacencyMismatch: input pairs overlap");
        v.push_back(lo);
        v.push_back(hi);
    }
    return v;
}

inline std::vector<Point> physical(const UnitPoints& u, Adjacency a) {
    std::vector<Point> out;
    for (const auto& p : u) out.push_back(to_physical(p, a));
    return out;
}

}  // namespace detail

// Simple gadget from pairs of Q_i to pairs of Q_{i+1}; `a` is how p_i and p_{i+1} touch.
inline std::vector<std::vector<Point>> emit_simple_gadget(GadgetKind kind, const std::vector<std::vector<Point>>& in,
                                                          Adjacency a) {
    std::size_t want = kind == GadgetKind::Merge ? 2 : 1;
    if (in.size() != want) throw AdjacencyMismatch("AdjacencyMismatch: wrong number of input pairs");
    auto v = detail::input_values(in, a);
    std::vector<UnitPoints> out;
    switch (kind) {
        case GadgetKind::Copy: out = {gadget::copy(v[0], v[1])}; break;
        case GadgetKind::Multiply: out = gadget::multiply(v[0], v[1]); break;
        case GadgetKind::Choose: out = gadget::choose(v[0], v[1]); break;
        case GadgetKind::Pick: out = {gadget::pick(v[0], v[1])}; break;
        case GadgetKind::Merge: out = {gadget::merge(v[0], v[3])}; break;
        case GadgetKind::Follow: out = {gadget::follow(v[0], v[1])}; break;
        default: throw std::invalid_argument("emit_simple_gadget: not a simple gadget");
    }
    std::vector<std::vector<Point>> res;
    for (const auto& u : out) res.push_back(detail::physical(u, a));
    return res;
}

// Tile kinds along a flip span Q_{i+1} .. Q_j.
struct FlipSpan {
    std::vector<Adjacency> in_edges;  // adjacency into Q_{i+1}, ..., Q_j
    std::vector<bool> is_d;           // whether each of those entries is a usable D-entry
};

namespace detail {

inline void check_span(const FlipSpan& s) {
    std::size_t len = s.in_edges.size();
    if (len < 2 || s.is_d.size() != len) throw SpanNotMonotone("SpanNotMonotone: a flip needs at least two tiles");
    if (!s.is_d.front() || s.in_edges.front() != Adjacency::Row)
        throw EndNotD("EndNotD: flip must start at a D-entry sharing a row with its predecessor");
    if (!s.is_d.back() || s.in_edges.back() != Adjacency::Row)
        throw EndNotD("EndNotD: flip must end at a D-entry sharing a row with its predecessor");
    for (std::size_t k = 1; k + 1 < len; ++k)
        if (s.is_d[k]) throw SpanNotMonotone("SpanNotMonotone: D-entry inside a flip span");
}

inline std::vector<std::vector<Point>> run_chain(UnitPoints cur, const FlipSpan& s) {
    std::vector<std::vector<Point>> tiles{physical(cur, s.in_edges[0])};
    for (std::size_t k = 1; k < s.in_edges.size(); ++k) {
        cur = k + 1 == s.in_edges.size() ? gadget::flip_end(cur) : gadget::flip_middle(cur);
        tiles.push_back(physical(cur, s.in_edges[k]));
    }
    return tiles;
}

}  // namespace detail

// Points per tile of the span for the chains continuing A1 and A2 respectively.
inline std::pair<std::vector<std::vector<Point>>, std::vector<std::vector<Point>>> emit_flip_text(
    const std::vector<Point>& a1, const std::vector<Point>& a2, const FlipSpan& span) {
    detail::check_span(span);
    auto v = detail::input_values({a1, a2}, Adjacency::Row);
    auto [s_lo, s_hi] = gadget::flip_start(v[0], v[1], v[2], v[3]);
    return {detail::run_chain(s_lo, span), detail::run_chain(s_hi, span)};
}

inline std::vector<std::vector<Point>> emit_flip_pattern(const std::vector<Point>& a, const FlipSpan& span) {
    detail::check_span(span);
    auto v = detail::input_values({a}, Adjacency::Row);
    return detail::run_chain(gadget::flip_pattern_start(v[0], v[1]), span);
}

}  // namespace ppm
