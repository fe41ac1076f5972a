#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ppm/grid.hpp"
#include "ppm/perm.hpp"
#include "ppm/reduction/instance.hpp"
#include "ppm/sat.hpp"

namespace ppm {

using json = nlohmann::ordered_json;

struct IoError : Error {
    using Error::Error;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("IoError: cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("IoError: cannot write " + p.string());
    out << data;
}

// FNV-1a, for input digests in reports.
inline std::string digest(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream ss;
    ss << std::hex;
    ss.width(16);
    ss.fill('0');
    ss << h;
    return ss.str();
}

inline json matrix_to_json(const GriddingMatrix& m) {
    json rows = json::array();
    for (int r = m.rows(); r >= 1; --r) {
        json row = json::array();
        for (int c = 1; c <= m.cols(); ++c) row.push_back(m.at(c, r).str());
        rows.push_back(row);
    }
    return {{"cols", m.cols()}, {"rows", m.rows()}, {"entries", rows}};
}

inline GriddingMatrix matrix_from_json(const json& j) {
    try {
        std::vector<std::vector<std::string>> rows = j.at("entries").get<std::vector<std::vector<std::string>>>();
        auto m = GriddingMatrix::from_strings(rows);
        if ((j.contains("cols") && j.at("cols").get<int>() != m.cols()) ||
            (j.contains("rows") && j.at("rows").get<int>() != m.rows()))
            throw DimensionMismatch("DimensionMismatch: declared size differs from entries");
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("ParseError: matrix JSON: ") + e.what());
    }
}

inline GriddingMatrix load_matrix(const std::filesystem::path& p) {
    try {
        return matrix_from_json(json::parse(read_file(p)));
    } catch (const json::exception& e) {
        throw ParseError("ParseError: " + p.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

inline Permutation load_perm(const std::filesystem::path& p) {
    try {
        return parse_perm(read_file(p));
    } catch (const Error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

inline json gridding_to_json(const Gridding& g) { return {{"col_cuts", g.col_cuts}, {"row_cuts", g.row_cuts}}; }

inline Gridding gridding_from_json(const json& j) {
    return {j.at("col_cuts").get<std::vector<int>>(), j.at("row_cuts").get<std::vector<int>>()};
}

// Embeddings are written with 1-based positions.
inline json embedding_to_json(const Embedding& e) {
    json a = json::array();
    for (int v : e) a.push_back(v + 1);
    return a;
}

inline json cnf_to_json(const CNFFormula& f) { return {{"vars", f.vars}, {"clauses", f.clauses}}; }

inline CNFFormula cnf_from_json(const json& j) {
    CNFFormula f;
    f.vars = j.at("vars").get<int>();
    f.clauses = j.at("clauses").get<std::vector<std::vector<int>>>();
    return f;
}

inline json assignment_to_json(const Assignment& a) {
    json v = json::array();
    for (bool b : a) v.push_back(b);
    return v;
}

inline json tag_to_json(const Tag& t) { return t.str(); }

inline const char* relation_name(Relation r) { return r == Relation::Inside ? "inside" : "encloses"; }

inline json rule_to_json(const BranchRule& r) {
    switch (r.kind) {
        case BranchRule::None: return nullptr;
        case BranchRule::Assign: return {{"kind", "assign"}, {"var", r.var}};
        case BranchRule::Swap: return {{"kind", "swap"}, {"partner", r.partner}};
        case BranchRule::Eval:
            return {{"kind", "eval"}, {"literal", r.literal.positive ? r.literal.var : -r.literal.var}};
    }
    return nullptr;
}

// The whole construction: inputs, path, schedule, unit registry, gadget trace and sizes.
inline json instance_to_json(const ReductionInstance& inst, const GriddingMatrix& input_matrix, int length) {
    json j;
    j["formula"] = cnf_to_json(inst.formula.to_cnf());
    j["mode"] = mode_name(inst.mode);
    j["length"] = length;
    j["matrix"] = matrix_to_json(input_matrix);
    j["path_matrix"] = matrix_to_json(inst.path.matrix);
    j["orientation"] = {{"f_c", inst.path.orientation.f_c}, {"f_r", inst.path.orientation.f_r}};
    j["juxtaposition"] = inst.juxtaposition ? json(inst.juxtaposition->str()) : json(nullptr);
    json path = json::array();
    for (const auto& t : inst.path.tiles)
        path.push_back({{"col", t.cell.col},
                        {"row", t.cell.row},
                        {"in_edge", t.in_edge == Adjacency::Row ? "row" : "column"},
                        {"d", t.is_d},
                        {"usable", t.usable},
                        {"class", t.local.str()}});
    j["path"] = path;
    json sched = json::array();
    for (std::size_t i = 0; i < inst.schedule.kinds.size(); ++i)
        sched.push_back({{"kind", layer_name(inst.schedule.kinds[i])},
                         {"phase", inst.schedule.phases[i]},
                         {"tiles", inst.schedule.tiles[i]}});
    j["schedule"] = sched;
    json units = json::array();
    for (const auto& u : inst.units)
        units.push_back({{"side", u.side ? "text" : "pattern"},
                         {"tile", u.tile},
                         {"tag", tag_to_json(u.tag)},
                         {"via", gadget_name(u.via)},
                         {"relation", relation_name(u.relation)},
                         {"parents", u.parents},
                         {"child", u.child_index},
                         {"rule", rule_to_json(u.rule)},
                         {"first_point", u.first_point},
                         {"points", u.points}});
    j["units"] = units;
    json gadgets = json::array();
    for (const auto& g : inst.gadgets)
        gadgets.push_back({{"kind", gadget_name(g.kind)},
                           {"side", g.side ? "text" : "pattern"},
                           {"inputs", g.inputs},
                           {"outputs", g.outputs},
                           {"tiles", {g.first_tile, g.last_tile}}});
    j["gadgets"] = gadgets;
    j["sizes"] = {{"used_tiles", inst.used_tiles},
                  {"pattern_points", inst.pattern_points},
                  {"text_points", inst.text_points},
                  {"pattern", inst.pattern_size()},
                  {"text", inst.text_size()},
                  {"max_tile", inst.max_tile},
                  {"anchor_run", inst.text_points + 1}};
    return j;
}

// Tile point → permutation position (1-based), per side.
inline json provenance_to_json(const ReductionInstance& inst) {
    json j;
    for (int side = 0; side < 2; ++side) {
        json tiles = json::array();
        for (const auto& t : inst.position[side]) {
            json a = json::array();
            for (int v : t) a.push_back(v + 1);
            tiles.push_back(a);
        }
        json runs = json::array();
        for (const auto& r : inst.anchor_runs[side]) {
            json a = json::array();
            for (int v : r) a.push_back(v + 1);
            runs.push_back(a);
        }
        std::string key = side ? "text" : "pattern";
        j[key] = {{"tiles", tiles}, {"anchor_runs", runs}};
    }
    return j;
}

}  // namespace ppm
