#pragma once

#include <vector>

namespace tourank {

// Row-major H x W grid of activation values.
using Grid = std::vector<std::vector<double>>;

// C feature maps plus the target class's C output weights.
struct CamInput {
    std::vector<Grid> feature_maps;
    std::vector<double> class_weights;
};

struct CamMap {
    Grid grid;
    int source_h = 0;
    int source_w = 0;
    int height = 0;
    int width = 0;
};

struct NormalizedCam {
    CamMap map;
    bool constant_input = false; // flat input maps to all zeros
};

// grid[y][x] = sum_k w_k * f_k[y][x]
Grid compute_cam(const CamInput& input);

// Corner-aligned bilinear interpolation: output corner samples equal input
// corners, constants stay constant, values never leave the input range.
CamMap bilinear_upsample(const Grid& grid, int target_h, int target_w);

// Affine rescale onto [0,1]; a constant map becomes all zeros with the flag.
NormalizedCam normalize_cam(const CamMap& map);

} // namespace tourank
