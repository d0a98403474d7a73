#include "vmstain/colorspace.hpp"

#include "vmstain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vmstain {

namespace {

void check_unit(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw DomainError(std::string("rgb_to_hsv: component ") + name + " = " +
                          std::to_string(v) + " outside [0,1]");
    }
}

} // namespace

HsvPixel rgb_to_hsv(const RgbPixel& p) {
    check_unit(p.r, "r");
    check_unit(p.g, "g");
    check_unit(p.b, "b");

    const double max = std::max({p.r, p.g, p.b});
    const double min = std::min({p.r, p.g, p.b});
    const double delta = max - min;

    HsvPixel out;
    out.v = max;
    out.s = (max > 0.0) ? delta / max : 0.0;

    if (delta > 0.0) {
        double h;
        if (p.r == max) {
            h = 60.0 * (p.g - p.b) / delta;
            if (h < 0.0) h += 360.0;
        } else if (p.g == max) {
            h = 60.0 * (p.b - p.r) / delta + 120.0;
        } else {
            h = 60.0 * (p.r - p.g) / delta + 240.0;
        }
        if (h >= 360.0) h -= 360.0;
        out.h = h;
    }
    return out;
}

RgbPixel hsv_to_rgb(const HsvPixel& p) {
    if (!std::isfinite(p.h) || p.h < 0.0 || p.h >= 360.0) {
        throw DomainError("hsv_to_rgb: h = " + std::to_string(p.h) + " outside [0,360)");
    }
    if (!std::isfinite(p.s) || p.s < 0.0 || p.s > 1.0) {
        throw DomainError("hsv_to_rgb: s = " + std::to_string(p.s) + " outside [0,1]");
    }
    if (!std::isfinite(p.v) || p.v < 0.0 || p.v > 1.0) {
        throw DomainError("hsv_to_rgb: v = " + std::to_string(p.v) + " outside [0,1]");
    }

    const double c = p.v * p.s;
    const double hp = p.h / 60.0;
    const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
    const double m = p.v - c;

    double r = 0.0, g = 0.0, b = 0.0;
    switch (static_cast<int>(hp)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    return {r + m, g + m, b + m};
}

PlanarImage value_channel(const PlanarImage& img) {
    if (img.channels() != 3) {
        throw ContractError("value_channel: expected 3 channels, got " +
                            std::to_string(img.channels()));
    }
    PlanarImage out(img.height(), img.width(), 1);
    const auto r = img.plane(0);
    const auto g = img.plane(1);
    const auto b = img.plane(2);
    auto v = out.plane(0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::max({r[i], g[i], b[i]});
    }
    return out;
}

} // namespace vmstain
