#pragma once

#include "vmstain/image.hpp"

namespace vmstain {

struct RgbPixel {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

/// Canonical form: v = 0 implies s = 0, and s = 0 implies h = 0.
struct HsvPixel {
    double h = 0.0; // degrees in [0, 360)
    double s = 0.0; // [0, 1]
    double v = 0.0; // [0, 1]
};

/// V = max(r,g,b); S = (max-min)/max (0 when max = 0); H by the
/// 60-degree sector formula, wrapped into [0,360), 0 when max = min.
HsvPixel rgb_to_hsv(const RgbPixel& p);

/// Inverse conversion. Round-trips with rgb_to_hsv up to canonical-form
/// normalization.
RgbPixel hsv_to_rgb(const HsvPixel& p);

/// Per-pixel channel maximum of a 3-channel image, as a 1-channel plane.
PlanarImage value_channel(const PlanarImage& img);

} // namespace vmstain
