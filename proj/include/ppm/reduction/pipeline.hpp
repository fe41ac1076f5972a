#pragma once

#include <optional>

#include "ppm/reduction/assembly.hpp"

namespace ppm {

inline GriddingMatrix default_matrix(SortMode mode) {
    return mode == SortMode::Gadgets ? GriddingMatrix::from_strings({{"inc", "fib+"}, {"dec", "inc"}})
                                     : GriddingMatrix::from_strings({{"inc", "av:321"}, {"dec", "inc"}});
}

struct ReduceOptions {
    SortMode mode = SortMode::Juxtaposition;
    std::optional<GriddingMatrix> matrix;  // defaults per mode
    std::optional<int> length;             // rich-path L; grown from 4 by doubling when absent
    bool keep = true;                      // false: sizes only, no trace or assembly
};

struct ReduceResult {
    ReductionInstance instance;
    GriddingMatrix input_matrix;
    int length = 0;  // 0 when the input matrix already is a path
};

inline PathInfo path_for(const GriddingMatrix& m, int L) {
    auto g = cell_graph(m);
    if (classify(g) == GraphShape::ProperTurningPath) return make_path_info(m, path_order(g));
    return make_path_info(build_rich_path(m, L));
}

// Builds and assembles the instance for f, growing the rich path until the schedule fits.
inline ReduceResult reduce(const Formula3CNF& f, const ReduceOptions& opt) {
    ReduceResult res;
    res.input_matrix = opt.matrix.value_or(default_matrix(opt.mode));
    bool is_path = classify(cell_graph(res.input_matrix)) == GraphShape::ProperTurningPath;
    int L = opt.length.value_or(4);
    while (true) {
        PathInfo path = path_for(res.input_matrix, L);
        try {
            res.instance = build_instance(f, opt.mode, path, opt.keep);
            break;
        } catch (const PathTooShort&) {
            if (is_path || opt.length) throw;
            L *= 2;
        }
    }
    res.length = is_path ? 0 : L;
    if (opt.keep) add_anchors_and_assemble(res.instance);
    return res;
}

}  // namespace ppm
