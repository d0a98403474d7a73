#pragma once

#include "vmstain/image.hpp"

#include <vector>

namespace vmstain {

/// Patch lattice over a (padded) image: origins at every stride pixels
/// along each axis, with patch-size windows. Requires patch % stride == 0
/// and (rows - patch), (cols - patch) divisible by stride.
struct GridSpec {
    int rows = 0;   // image height after padding
    int cols = 0;   // image width after padding
    int patch = 0;  // n
    int stride = 0; // m

    static GridSpec square(int side, int patch, int stride) {
        return {side, side, patch, stride};
    }

    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    int row_origins() const { return (rows - patch) / stride + 1; }
    int col_origins() const { return (cols - patch) / stride + 1; }
    long patch_count() const {
        return static_cast<long>(row_origins()) * col_origins();
    }

    bool operator==(const GridSpec&) const = default;
};

struct PatchOrigin {
    int row = 0;
    int col = 0;
    bool operator==(const PatchOrigin&) const = default;
};

/// Full origin lattice in row-major order.
std::vector<PatchOrigin> plan_grid(const GridSpec& spec);

struct PatchRecord {
    int origin_row = 0;
    int origin_col = 0;
    PlanarImage pixels; // patch x patch, 3 channels
};

/// Result of aligning an arbitrary image to a patch lattice.
/// Padding replicates the last row/column on the bottom/right edges;
/// the tiled output is cropped back to original_rows x original_cols.
struct PaddedImage {
    PlanarImage image;
    int original_rows = 0;
    int original_cols = 0;
    GridSpec spec;
};

PaddedImage pad_to_grid(const PlanarImage& img, int patch, int stride);

/// Crops the (already aligned) image into the full lattice of patches,
/// ordered as plan_grid.
std::vector<PatchRecord> split(const PlanarImage& wsi, const GridSpec& spec);

/// Embeds the patch into an otherwise zero rows x cols canvas at its origin.
PlanarImage place_zero_padded(const PatchRecord& p, int rows, int cols);

} // namespace vmstain
