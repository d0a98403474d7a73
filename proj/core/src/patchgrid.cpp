#include "vmstain/patchgrid.hpp"

#include "vmstain/errors.hpp"

#include <algorithm>
#include <string>

namespace vmstain {

void GridSpec::validate() const {
    if (stride < 1) {
        throw ConfigError("GridSpec: stride m must be >= 1, got " + std::to_string(stride));
    }
    if (patch < 1) {
        throw ConfigError("GridSpec: patch size n must be >= 1, got " + std::to_string(patch));
    }
    if (patch % stride != 0) {
        throw ConfigError("GridSpec: n/m must be an integer (n = " + std::to_string(patch) +
                          ", m = " + std::to_string(stride) + ")");
    }
    if (patch > rows || patch > cols) {
        throw ConfigError("GridSpec: patch size n = " + std::to_string(patch) +
                          " exceeds image dimensions " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    if ((rows - patch) % stride != 0 || (cols - patch) % stride != 0) {
        throw ConfigError("GridSpec: image dimensions " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " not aligned: (size - n) mod m must be 0");
    }
}

std::vector<PatchOrigin> plan_grid(const GridSpec& spec) {
    spec.validate();
    std::vector<PatchOrigin> origins;
    origins.reserve(static_cast<std::size_t>(spec.patch_count()));
    for (int r = 0; r + spec.patch <= spec.rows; r += spec.stride) {
        for (int c = 0; c + spec.patch <= spec.cols; c += spec.stride) {
            origins.push_back({r, c});
        }
    }
    return origins;
}

PaddedImage pad_to_grid(const PlanarImage& img, int patch, int stride) {
    if (img.height() < 1 || img.width() < 1) {
        throw ContractError("pad_to_grid: empty image");
    }
    auto aligned = [&](int dim) {
        int target = std::max(dim, patch);
        int rem = (target - patch) % stride;
        if (rem != 0) target += stride - rem;
        return target;
    };

    PaddedImage out;
    out.original_rows = img.height();
    out.original_cols = img.width();
    out.spec = {aligned(img.height()), aligned(img.width()), patch, stride};
    out.spec.validate();

    if (out.spec.rows == img.height() && out.spec.cols == img.width()) {
        out.image = img;
        return out;
    }

    PlanarImage padded(out.spec.rows, out.spec.cols, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        for (int r = 0; r < out.spec.rows; ++r) {
            const int sr = std::min(r, img.height() - 1);
            for (int col = 0; col < out.spec.cols; ++col) {
                const int sc = std::min(col, img.width() - 1);
                padded.at(c, r, col) = img.at(c, sr, sc);
            }
        }
    }
    out.image = std::move(padded);
    return out;
}

std::vector<PatchRecord> split(const PlanarImage& wsi, const GridSpec& spec) {
    spec.validate();
    if (wsi.height() != spec.rows || wsi.width() != spec.cols) {
        throw ContractError("split: image is " + std::to_string(wsi.height()) + "x" +
                            std::to_string(wsi.width()) + " but grid expects " +
                            std::to_string(spec.rows) + "x" + std::to_string(spec.cols));
    }

    std::vector<PatchRecord> patches;
    patches.reserve(static_cast<std::size_t>(spec.patch_count()));
    for (const PatchOrigin& o : plan_grid(spec)) {
        PatchRecord rec;
        rec.origin_row = o.row;
        rec.origin_col = o.col;
        rec.pixels = PlanarImage(spec.patch, spec.patch, wsi.channels());
        for (int c = 0; c < wsi.channels(); ++c) {
            for (int r = 0; r < spec.patch; ++r) {
                for (int col = 0; col < spec.patch; ++col) {
                    rec.pixels.at(c, r, col) = wsi.at(c, o.row + r, o.col + col);
                }
            }
        }
        patches.push_back(std::move(rec));
    }
    return patches;
}

PlanarImage place_zero_padded(const PatchRecord& p, int rows, int cols) {
    const int n_rows = p.pixels.height();
    const int n_cols = p.pixels.width();
    if (p.origin_row < 0 || p.origin_col < 0 || p.origin_row + n_rows > rows ||
        p.origin_col + n_cols > cols) {
        throw ContractError("place_zero_padded: patch at (" + std::to_string(p.origin_row) +
                            "," + std::to_string(p.origin_col) + ") of size " +
                            std::to_string(n_rows) + "x" + std::to_string(n_cols) +
                            " does not fit in " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    }
    PlanarImage out(rows, cols, p.pixels.channels());
    for (int c = 0; c < p.pixels.channels(); ++c) {
        for (int r = 0; r < n_rows; ++r) {
            for (int col = 0; col < n_cols; ++col) {
                out.at(c, p.origin_row + r, p.origin_col + col) = p.pixels.at(c, r, col);
            }
        }
    }
    return out;
}

} // namespace vmstain
