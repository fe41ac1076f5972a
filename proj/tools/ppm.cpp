#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ppm/io.hpp"
#include "ppm/matcher.hpp"
#include "ppm/reduction/correctness.hpp"
#include "ppm/reduction/pipeline.hpp"
#include "ppm/reduction/validate.hpp"

using namespace ppm;
namespace fs = std::filesystem;

namespace {

struct Report {
    std::string command;
    json inputs = json::object();
    json answer = json::object();
    json stats = json::object();

    void input(const std::string& key, const fs::path& p) {
        inputs[key] = {{"path", p.string()}, {"digest", digest(read_file(p))}};
    }
    void print() const {
        json j{{"command", command}, {"inputs", inputs}, {"answer", answer}, {"stats", stats}};
        std::cout << j.dump(2) << "\n";
    }
};

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Assignment parse_assignment(const std::string& s, int n) {
    Assignment a;
    for (char c : s) {
        if (c == '1' || c == 'T' || c == 't') a.push_back(true);
        else if (c == '0' || c == 'F' || c == 'f') a.push_back(false);
        else if (c != ' ' && c != ',') throw ParseError("ParseError: bad assignment character '" + std::string(1, c) + "'");
    }
    if (static_cast<int>(a.size()) != n)
        throw ParseError("ParseError: assignment has " + std::to_string(a.size()) + " values, formula has " +
                         std::to_string(n) + " variables");
    return a;
}

// Rebuilds the instance recorded in a reduce directory and checks it against the saved files.
ReduceResult reload(const fs::path& dir, Report& rep) {
    fs::path ij = dir / "instance.json";
    rep.input("instance", ij);
    json j = json::parse(read_file(ij));
    ReduceOptions opt;
    opt.mode = parse_mode(j.at("mode").get<std::string>());
    opt.matrix = matrix_from_json(j.at("matrix"));
    int L = j.at("length").get<int>();
    if (L > 0) opt.length = L;
    auto f = normalize_3cnf(cnf_from_json(j.at("formula")));
    auto res = reduce(f, opt);
    rep.input("pattern", dir / "pattern.perm");
    rep.input("text", dir / "text.perm");
    if (!(load_perm(dir / "pattern.perm") == res.instance.pattern) || !(load_perm(dir / "text.perm") == res.instance.text))
        throw std::logic_error("saved permutations differ from the rebuilt instance");
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permutation pattern matching workbench for grid classes"};
    app.require_subcommand(1);
    std::string matrix, pattern, text, perm, cnf, mode = "juxtaposition", out, assignment, c_entry = "inc",
                                                  d_entry = "av:321";
    int length = 0, jobs = 1, samples = 0, k = 3, max_cell = 3;
    unsigned seed = 1;

    auto* brute = app.add_subcommand("brute", "classical containment by backtracking");
    brute->add_option("--pattern", pattern)->required()->check(CLI::ExistingFile);
    brute->add_option("--text", text)->required()->check(CLI::ExistingFile);

    auto* match = app.add_subcommand("match", "C-PPM for a monotone gridding matrix");
    match->add_option("--matrix", matrix)->required()->check(CLI::ExistingFile);
    match->add_option("--pattern", pattern)->required()->check(CLI::ExistingFile);
    match->add_option("--text", text)->required()->check(CLI::ExistingFile);
    match->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    auto* gridcheck = app.add_subcommand("gridcheck", "find an M-gridding of a permutation");
    gridcheck->add_option("--matrix", matrix)->required()->check(CLI::ExistingFile);
    gridcheck->add_option("--perm", perm)->required()->check(CLI::ExistingFile);

    auto* richpath = app.add_subcommand("richpath", "build a rich path from a cycle matrix");
    richpath->add_option("--matrix", matrix)->required()->check(CLI::ExistingFile);
    richpath->add_option("--length", length)->required()->check(CLI::PositiveNumber);
    richpath->add_option("--samples", samples, "members of Grid(output) to check against the input");
    richpath->add_option("--max-cell", max_cell);
    richpath->add_option("--seed", seed);
    richpath->add_option("--out", out, "write the output matrix here");

    auto* stair = app.add_subcommand("staircase", "emit the staircase matrix St_k(C, D)");
    stair->add_option("--k", k)->check(CLI::PositiveNumber);
    stair->add_option("--c", c_entry);
    stair->add_option("--d", d_entry);
    stair->add_option("--out", out);

    auto* red = app.add_subcommand("reduce", "3-SAT to C-PPM");
    red->add_option("--cnf", cnf)->required()->check(CLI::ExistingFile);
    red->add_option("--mode", mode)->check(CLI::IsMember({"gadgets", "juxtaposition"}));
    red->add_option("--matrix", matrix)->check(CLI::ExistingFile);
    red->add_option("--length", length);
    red->add_option("--out", out)->required();

    auto* verify = app.add_subcommand("verify", "validate a reduce directory and compare with SAT");
    verify->add_option("dir", out)->required()->check(CLI::ExistingDirectory);

    auto* embed = app.add_subcommand("embed", "embedding of the pattern from an assignment");
    embed->add_option("dir", out)->required()->check(CLI::ExistingDirectory);
    embed->add_option("--assignment", assignment, "e.g. 101; defaults to the SAT witness");

    auto* sat = app.add_subcommand("sat", "DPLL on a DIMACS file");
    sat->add_option("--cnf", cnf)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    Report rep;
    auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (*brute) {
            rep.command = "brute";
            rep.input("pattern", pattern);
            rep.input("text", text);
            auto e = contains(load_perm(text), load_perm(pattern));
            rep.answer = {{"found", e.has_value()}, {"embedding", e ? embedding_to_json(*e) : json(nullptr)}};
        } else if (*match) {
            rep.command = "match";
            rep.input("matrix", matrix);
            rep.input("pattern", pattern);
            rep.input("text", text);
            auto r = solve_cppm_report(load_perm(pattern), load_perm(text), load_matrix(matrix), jobs);
            rep.answer = {{"found", r.embedding.has_value()},
                          {"gridding_text", gridding_to_json(r.text_gridding)},
                          {"gridding_pattern", r.pattern_gridding ? gridding_to_json(*r.pattern_gridding) : json(nullptr)},
                          {"embedding", r.embedding ? embedding_to_json(*r.embedding) : json(nullptr)}};
            rep.stats = {{"griddings_tried", r.stats.griddings_tried}, {"clauses", r.stats.clauses}};
        } else if (*gridcheck) {
            rep.command = "gridcheck";
            rep.input("matrix", matrix);
            rep.input("perm", perm);
            auto g = find_gridding(load_perm(perm), load_matrix(matrix));
            rep.answer = {{"found", g.has_value()}, {"gridding", g ? gridding_to_json(*g) : json(nullptr)}};
        } else if (*richpath) {
            rep.command = "richpath";
            rep.input("matrix", matrix);
            auto m = load_matrix(matrix);
            auto rp = build_rich_path(m, length);
            json path = json::array();
            for (auto c : rp.path) path.push_back({c.col, c.row});
            rep.answer = {{"matrix", matrix_to_json(rp.matrix)},
                          {"shape", shape_name(classify(cell_graph(rp.matrix)))},
                          {"path", path},
                          {"d_positions", rp.d_positions},
                          {"d_count", rp.d_positions.size()},
                          {"d_sharing_row", rp.d_sharing_row},
                          {"refinement", rp.refinement}};
            if (samples > 0) {
                std::mt19937 rng(seed);
                int passed = 0;
                for (int i = 0; i < samples; ++i) passed += find_gridding(sample_grid(rp.matrix, max_cell, rng).first, m).has_value();
                rep.answer["samples"] = {{"drawn", samples}, {"griddable_in_input", passed}};
                if (passed != samples) code = 2;
            }
            if (!out.empty()) write_file(out, matrix_to_json(rp.matrix).dump(2) + "\n");
        } else if (*stair) {
            rep.command = "staircase";
            auto m = staircase(k, ClassEntry::parse(c_entry), ClassEntry::parse(d_entry));
            rep.answer = {{"matrix", matrix_to_json(m)}};
            if (!out.empty()) write_file(out, matrix_to_json(m).dump(2) + "\n");
        } else if (*red) {
            rep.command = "reduce";
            rep.input("cnf", cnf);
            ReduceOptions opt;
            opt.mode = parse_mode(mode);
            if (!matrix.empty()) {
                rep.input("matrix", matrix);
                opt.matrix = load_matrix(matrix);
            }
            if (length > 0) opt.length = length;
            auto f = normalize_3cnf(parse_dimacs(read_file(cnf)));
            auto res = reduce(f, opt);
            fs::create_directories(out);
            const auto& inst = res.instance;
            write_file(fs::path(out) / "pattern.perm", format_perm(inst.pattern));
            write_file(fs::path(out) / "text.perm", format_perm(inst.text));
            write_file(fs::path(out) / "instance.json", instance_to_json(inst, res.input_matrix, res.length).dump(1) + "\n");
            write_file(fs::path(out) / "provenance.json", provenance_to_json(inst).dump() + "\n");
            rep.answer = {{"out", out},
                          {"length", res.length},
                          {"layers", inst.schedule.kinds.size()},
                          {"tiles", inst.used_tiles},
                          {"pattern_size", inst.pattern.size()},
                          {"text_size", inst.text.size()}};
        } else if (*verify) {
            rep.command = "verify";
            auto res = reload(out, rep);
            const auto& inst = res.instance;
            auto v = validate_instance(inst);
            auto sim = simulate_grid_preserving(inst);
            auto s = solve_sat(inst.formula.to_cnf());
            bool witness_ok = !sim.witness || inst.formula.satisfied_by(*sim.witness);
            rep.answer = {{"violations", v.violations},
                          {"simulate", sim.satisfiable},
                          {"sat", s.has_value()},
                          {"agree", sim.satisfiable == s.has_value()},
                          {"witness", sim.witness ? assignment_to_json(*sim.witness) : json(nullptr)},
                          {"witness_satisfies", witness_ok}};
            rep.stats = {{"search_nodes", sim.nodes}};
            if (!v.ok() || sim.satisfiable != s.has_value() || !witness_ok) code = 2;
        } else if (*embed) {
            rep.command = "embed";
            auto res = reload(out, rep);
            const auto& inst = res.instance;
            Assignment rho;
            if (!assignment.empty()) rho = parse_assignment(assignment, inst.formula.n);
            else if (auto w = solve_sat(inst.formula.to_cnf())) rho = *w;
            else rho.assign(inst.formula.n, false);
            auto e = embedding_from_assignment(inst, rho);
            rep.answer = {{"assignment", assignment_to_json(rho)},
                          {"satisfies", inst.formula.satisfied_by(rho)},
                          {"found", e.has_value()},
                          {"grid_preserving", e ? json(is_grid_preserving(inst, *e)) : json(nullptr)},
                          {"embedding", e ? embedding_to_json(*e) : json(nullptr)}};
            if (inst.formula.satisfied_by(rho) != e.has_value()) code = 2;
        } else if (*sat) {
            rep.command = "sat";
            rep.input("cnf", cnf);
            auto f = parse_dimacs(read_file(cnf));
            auto a = solve_sat(f);
            rep.answer = {{"satisfiable", a.has_value()}, {"assignment", a ? assignment_to_json(*a) : json(nullptr)}};
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    rep.stats["time_ms"] = ms_since(t0);
    rep.print();
    return code;
}
