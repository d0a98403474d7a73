#pragma once

#include "vmstain/colorspace.hpp"
#include "vmstain/image.hpp"
#include "vmstain/patchgrid.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace vmstain::testing {

inline PlanarImage random_image(std::mt19937_64& rng, int height, int width,
                                int channels = 3) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    PlanarImage img(height, width, channels);
    for (double& v : img.data()) v = dist(rng);
    return img;
}

/// Random image whose values are exact 8-bit levels (k/255), so PNG
/// round trips are lossless.
inline PlanarImage random_image_8bit(std::mt19937_64& rng, int height, int width) {
    std::uniform_int_distribution<int> dist(0, 255);
    PlanarImage img(height, width, 3);
    for (double& v : img.data()) v = dist(rng) / 255.0;
    return img;
}

/// Independent reference conversion: direct transcription of the
/// three-branch 60-degree sector formula, kept free of the library's
/// canonicalization logic.
inline HsvPixel reference_rgb_to_hsv(double r, double g, double b) {
    const double max = std::fmax(r, std::fmax(g, b));
    const double min = std::fmin(r, std::fmin(g, b));
    HsvPixel out;
    out.v = max;
    out.s = max == 0.0 ? 0.0 : (max - min) / max;
    if (max == min) {
        out.h = 0.0;
        return out;
    }
    const double d = max - min;
    if (max == r) {
        out.h = std::fmod(60.0 * ((g - b) / d) + 360.0, 360.0);
    } else if (max == g) {
        out.h = 60.0 * ((b - r) / d) + 120.0;
    } else {
        out.h = 60.0 * ((r - g) / d) + 240.0;
    }
    return out;
}

/// Rotates hue by delta degrees at every pixel, preserving S and V.
inline PlanarImage rotate_hue(const PlanarImage& img, double delta_degrees) {
    PlanarImage out(img.height(), img.width(), 3);
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            HsvPixel hsv = rgb_to_hsv({img.at(0, r, c), img.at(1, r, c), img.at(2, r, c)});
            hsv.h = std::fmod(hsv.h + delta_degrees, 360.0);
            if (hsv.h < 0.0) hsv.h += 360.0;
            const RgbPixel rgb = hsv_to_rgb(hsv);
            out.at(0, r, c) = rgb.r;
            out.at(1, r, c) = rgb.g;
            out.at(2, r, c) = rgb.b;
        }
    }
    return out;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vmstain_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Draws a valid GridSpec with rows = cols = side <= max_side.
inline GridSpec random_square_spec(std::mt19937_64& rng, int max_side) {
    std::uniform_int_distribution<int> stride_dist(1, 8);
    std::uniform_int_distribution<int> ratio_dist(1, 6);
    for (;;) {
        const int m = stride_dist(rng);
        const int n = m * ratio_dist(rng);
        if (n > max_side) continue;
        const int max_steps = (max_side - n) / m;
        std::uniform_int_distribution<int> step_dist(0, max_steps);
        const int side = n + m * step_dist(rng);
        return GridSpec::square(side, n, m);
    }
}

} // namespace vmstain::testing
