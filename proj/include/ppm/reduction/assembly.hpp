#pragma once

#include <vector>

#include "ppm/reduction/builder.hpp"

namespace ppm {

// Inflates the extreme anchor points of tile 0 into increasing runs of |τ′| + 1 points and
// assembles both sides along the path.
inline void add_anchors_and_assemble(ReductionInstance& inst) {
    if (!inst.kept) throw std::logic_error("assembly needs a kept instance");
    const auto& path = inst.path;
    int run = static_cast<int>(inst.text_points) + 1;
    Rational box(static_cast<long long>(inst.max_tile) + 2);
    for (int side = 0; side < 2; ++side) {
        std::vector<PlacedTile<Rational>> placed;
        // (tile, point) of each placed point, to map positions back.
        std::vector<std::vector<std::pair<int, int>>> origin;
        const auto& tiles = inst.tiles;
        for (int t = 0; t < inst.used_tiles; ++t) {
            PlacedTile<Rational> pt;
            pt.cell = path.tiles[t].cell;
            pt.tile.box_bound = box;
            std::vector<std::pair<int, int>> orig;
            const auto& pts = tiles[t][side];
            for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
                const auto& p = pts[i];
                bool lower = t == 0 && i == 0;
                bool upper = t == 0 && i + 1 == static_cast<int>(pts.size());
                int copies = lower || upper ? run : 1;
                for (int c = 0; c < copies; ++c) {
                    Value d(Rational(0), Rational(0), Rational(c));
                    pt.tile.points.push_back(to_physical({p.out + d, p.in + d}, path.tiles[t].in_edge));
                    orig.push_back({i, c});
                }
            }
            placed.push_back(std::move(pt));
            origin.push_back(std::move(orig));
        }
        auto res = assemble(path.matrix.cols(), path.matrix.rows(), placed, path.orientation);
        auto& pos = inst.position[side];
        pos.assign(inst.used_tiles, {});
        inst.anchor_runs[side] = {};
        for (int t = 0; t < inst.used_tiles; ++t) {
            pos[t].assign(tiles[t][side].size(), -1);
            for (std::size_t q = 0; q < origin[t].size(); ++q) {
                auto [i, c] = origin[t][q];
                int at = res.position[t][q];
                if (c == 0) pos[t][i] = at;
                if (t == 0 && (i == 0 || i + 1 == static_cast<int>(tiles[0][side].size())))
                    inst.anchor_runs[side][i == 0 ? 0 : 1].push_back(at);
            }
        }
        (side ? inst.text : inst.pattern) = res.perm;
        (side ? inst.text_gridding : inst.pattern_gridding) = res.gridding;
    }
}

}  // namespace ppm
