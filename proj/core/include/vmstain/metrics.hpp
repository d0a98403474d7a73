#pragma once

#include "vmstain/image.hpp"
#include "vmstain/patchgrid.hpp"

#include <array>
#include <vector>

namespace vmstain {

/// 256 uniform bins over [0,1] per channel, normalized to frequencies.
struct Histogram {
    std::array<std::vector<double>, 3> channels; // each of size 256
};

Histogram compute_histogram(const PlanarImage& img);

/// Pearson correlation between the per-channel 256-bin frequency
/// histograms, averaged over the three channels. Dimensions may differ.
/// A constant image has a degenerate histogram: if both images are
/// constant at the same bin the result is 1, otherwise a DomainError is
/// thrown flagging the degeneracy.
double histogram_correlation(const PlanarImage& a, const PlanarImage& b);

struct LineProfile {
    std::vector<double> positions;        // distance along the segment
    std::vector<int> rows, cols;          // sampled pixel coordinates
    std::array<std::vector<double>, 3> intensities;
};

/// Nearest-neighbor samples along the segment from (r0,c0) to (r1,c1),
/// one per unit of the longer axis extent.
LineProfile line_profile(const PlanarImage& img, int r0, int c0, int r1, int c1);

/// Excess cross-boundary pixel difference at hard-tiling boundaries
/// (rows/columns at multiples of n) relative to the mean adjacent-pixel
/// difference elsewhere, floored at 0.
double seam_discontinuity(const PlanarImage& img, int tile_size);

} // namespace vmstain
