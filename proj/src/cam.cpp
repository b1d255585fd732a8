#include "tourank/cam.hpp"
#include "tourank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tourank {

namespace {

std::pair<int, int> grid_dims(const Grid& g, const char* who) {
    if (g.empty() || g[0].empty()) throw DomainError(std::string(who) + ": empty grid");
    const std::size_t w = g[0].size();
    for (const auto& row : g) {
        if (row.size() != w) throw DimensionError(std::string(who) + ": ragged grid rows");
        for (double v : row)
            if (!std::isfinite(v)) throw NumericError(std::string(who) + ": non-finite value");
    }
    return {static_cast<int>(g.size()), static_cast<int>(w)};
}

} // namespace

Grid compute_cam(const CamInput& input) {
    if (input.feature_maps.empty()) throw DomainError("compute_cam: need at least one feature map");
    if (input.class_weights.size() != input.feature_maps.size())
        throw DimensionError("compute_cam: " + std::to_string(input.class_weights.size()) + " weights for " +
                             std::to_string(input.feature_maps.size()) + " maps");
    for (double w : input.class_weights)
        if (!std::isfinite(w)) throw NumericError("compute_cam: non-finite weight");

    const auto [h, w] = grid_dims(input.feature_maps[0], "compute_cam");
    Grid out(static_cast<std::size_t>(h), std::vector<double>(static_cast<std::size_t>(w), 0.0));
    for (std::size_t k = 0; k < input.feature_maps.size(); ++k) {
        const auto [hk, wk] = grid_dims(input.feature_maps[k], "compute_cam");
        if (hk != h || wk != w)
            throw DimensionError("compute_cam: map " + std::to_string(k) + " is " + std::to_string(hk) + "x" +
                                 std::to_string(wk) + ", expected " + std::to_string(h) + "x" + std::to_string(w));
        const double wgt = input.class_weights[k];
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                out[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] +=
                    wgt * input.feature_maps[k][static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
    }
    return out;
}

CamMap bilinear_upsample(const Grid& grid, int target_h, int target_w) {
    const auto [sh, sw] = grid_dims(grid, "bilinear_upsample");
    if (target_h < 1 || target_w < 1) throw DomainError("bilinear_upsample: target dims must be positive");

    // corner-aligned source coordinate for target index t: t*(S-1)/(T-1)
    auto src_coord = [](int t, int s_dim, int t_dim) {
        if (t_dim == 1 || s_dim == 1) return 0.0;
        return static_cast<double>(t) * static_cast<double>(s_dim - 1) / static_cast<double>(t_dim - 1);
    };
    // a + f*(b-a): exact at f=0 and for a==b, so corners and constants survive
    auto lerp = [](double a, double b, double f) { return a + f * (b - a); };

    CamMap out;
    out.source_h = sh;
    out.source_w = sw;
    out.height = target_h;
    out.width = target_w;
    out.grid.assign(static_cast<std::size_t>(target_h), std::vector<double>(static_cast<std::size_t>(target_w)));
    for (int ty = 0; ty < target_h; ++ty) {
        const double fy = src_coord(ty, sh, target_h);
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, sh - 1);
        const double dy = fy - y0;
        for (int tx = 0; tx < target_w; ++tx) {
            const double fx = src_coord(tx, sw, target_w);
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, sw - 1);
            const double dx = fx - x0;
            const auto& r0 = grid[static_cast<std::size_t>(y0)];
            const auto& r1 = grid[static_cast<std::size_t>(y1)];
            const double top = lerp(r0[static_cast<std::size_t>(x0)], r0[static_cast<std::size_t>(x1)], dx);
            const double bot = lerp(r1[static_cast<std::size_t>(x0)], r1[static_cast<std::size_t>(x1)], dx);
            out.grid[static_cast<std::size_t>(ty)][static_cast<std::size_t>(tx)] = lerp(top, bot, dy);
        }
    }
    return out;
}

NormalizedCam normalize_cam(const CamMap& map) {
    grid_dims(map.grid, "normalize_cam");
    double lo = map.grid[0][0], hi = map.grid[0][0];
    for (const auto& row : map.grid)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }

    NormalizedCam out;
    out.map = map;
    if (hi <= lo) {
        out.constant_input = true;
        for (auto& row : out.map.grid) std::fill(row.begin(), row.end(), 0.0);
        return out;
    }
    const double span = hi - lo;
    for (auto& row : out.map.grid)
        for (double& v : row) v = (v - lo) / span;
    return out;
}

} // namespace tourank
