#pragma once

#include "vmstain/image.hpp"
#include "vmstain/patchgrid.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

namespace vmstain {

/// Number of lattice patches covering coordinate x along an axis of the
/// given length.
int axis_coverage(int x, int length, int patch, int stride);

/// Per-pixel blending weights: W(x,y) = 1 / (coverage_row(x) * coverage_col(y)).
/// Centrosymmetric, constant on aligned stride x stride blocks, and a
/// partition of unity over covering patches. Identical across RGB channels,
/// so stored as a single rank-one (coverage outer product) plane.
class WeightMatrix {
public:
    explicit WeightMatrix(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int rows() const { return spec_.rows; }
    int cols() const { return spec_.cols; }

    double at(int row, int col) const {
        return 1.0 / (static_cast<double>(row_coverage_[row]) * col_coverage_[col]);
    }

    const std::vector<int>& row_coverage() const { return row_coverage_; }
    const std::vector<int>& col_coverage() const { return col_coverage_; }

    /// Materializes the full single-channel plane.
    PlanarImage to_plane() const;

    /// Writes <base>.f32 (row-major float32 little-endian) and
    /// <base>.json ({"side"/"rows"/"cols", "n", "m"}).
    void export_raw(const std::filesystem::path& base) const;

private:
    GridSpec spec_;
    std::vector<int> row_coverage_;
    std::vector<int> col_coverage_;
};

struct TiledOutput {
    PlanarImage image;
    GridSpec spec;
};

/// Literal sum of zero-padded, weight-multiplied patches. Materializes one
/// full canvas per patch; reference implementation for small instances.
TiledOutput blend_naive(const std::vector<PatchRecord>& patches, const WeightMatrix& w);

/// Yields each lattice patch exactly once, in any order; nullopt ends the
/// stream.
using PatchSource = std::function<std::optional<PatchRecord>()>;

/// Single-accumulator blending: each arriving patch is multiplied by its
/// weight window and added in place. Peak memory is one accumulator plane
/// set plus one patch. With workers > 1 the accumulator rows are split
/// into fixed bands, one owner each, so the per-pixel accumulation order
/// depends only on patch arrival order, never on the worker count.
TiledOutput blend_streaming(const PatchSource& source, const GridSpec& spec,
                            int workers = 1);

} // namespace vmstain
