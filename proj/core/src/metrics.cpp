#include "vmstain/metrics.hpp"

#include "vmstain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vmstain {

namespace {

constexpr int kBins = 256;

int bin_of(double v) {
    return std::min(kBins - 1, static_cast<int>(v * kBins));
}

// -1 if the histogram occupies more than one bin, else the single bin index.
int single_bin(const std::vector<double>& h) {
    int found = -1;
    for (int i = 0; i < kBins; ++i) {
        if (h[i] > 0.0) {
            if (found >= 0) return -1;
            found = i;
        }
    }
    return found;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double mean_a = 0.0, mean_b = 0.0;
    for (int i = 0; i < kBins; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= kBins;
    mean_b /= kBins;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (int i = 0; i < kBins; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) {
        throw DomainError("histogram_correlation: zero-variance histogram (degenerate)");
    }
    return cov / std::sqrt(var_a * var_b);
}

} // namespace

Histogram compute_histogram(const PlanarImage& img) {
    if (img.channels() != 3) {
        throw ContractError("compute_histogram: expected 3 channels");
    }
    img.validate_unit_range("compute_histogram");
    Histogram h;
    const double inv = 1.0 / static_cast<double>(img.pixel_count());
    for (int c = 0; c < 3; ++c) {
        h.channels[c].assign(kBins, 0.0);
        for (double v : img.plane(c)) {
            h.channels[c][bin_of(v)] += inv;
        }
    }
    return h;
}

double histogram_correlation(const PlanarImage& a, const PlanarImage& b) {
    const Histogram ha = compute_histogram(a);
    const Histogram hb = compute_histogram(b);

    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const int sa = single_bin(ha.channels[c]);
        const int sb = single_bin(hb.channels[c]);
        if (sa >= 0 || sb >= 0) {
            // Constant channel: correlation of a point mass is degenerate.
            if (sa == sb) {
                sum += 1.0;
                continue;
            }
            throw DomainError(
                "histogram_correlation: degenerate constant-channel histogram in channel " +
                std::to_string(c));
        }
        sum += pearson(ha.channels[c], hb.channels[c]);
    }
    return sum / 3.0;
}

LineProfile line_profile(const PlanarImage& img, int r0, int c0, int r1, int c1) {
    auto inside = [&](int r, int c) {
        return r >= 0 && r < img.height() && c >= 0 && c < img.width();
    };
    if (!inside(r0, c0) || !inside(r1, c1)) {
        throw ContractError("line_profile: endpoint outside the image");
    }
    if (r0 == r1 && c0 == c1) {
        throw ContractError("line_profile: endpoints coincide");
    }

    const int dr = r1 - r0;
    const int dc = c1 - c0;
    const int extent = std::max(std::abs(dr), std::abs(dc));
    const int count = extent + 1;
    const double length = std::hypot(static_cast<double>(dr), static_cast<double>(dc));

    LineProfile profile;
    profile.positions.reserve(count);
    profile.rows.reserve(count);
    profile.cols.reserve(count);
    for (auto& ch : profile.intensities) ch.reserve(count);

    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / extent;
        const int r = static_cast<int>(std::lround(r0 + t * dr));
        const int c = static_cast<int>(std::lround(c0 + t * dc));
        profile.positions.push_back(t * length);
        profile.rows.push_back(r);
        profile.cols.push_back(c);
        for (int ch = 0; ch < img.channels() && ch < 3; ++ch) {
            profile.intensities[ch].push_back(img.at(ch, r, c));
        }
    }
    return profile;
}

double seam_discontinuity(const PlanarImage& img, int tile_size) {
    if (tile_size < 1) {
        throw ContractError("seam_discontinuity: tile size must be >= 1");
    }
    double boundary_sum = 0.0, interior_sum = 0.0;
    long boundary_count = 0, interior_count = 0;

    for (int ch = 0; ch < img.channels(); ++ch) {
        // Horizontally adjacent pairs; a pair straddles a vertical seam when
        // the right pixel's column is a multiple of the tile size.
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c + 1 < img.width(); ++c) {
                const double d = std::fabs(img.at(ch, r, c + 1) - img.at(ch, r, c));
                if ((c + 1) % tile_size == 0) {
                    boundary_sum += d;
                    ++boundary_count;
                } else {
                    interior_sum += d;
                    ++interior_count;
                }
            }
        }
        // Vertically adjacent pairs.
        for (int r = 0; r + 1 < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c) {
                const double d = std::fabs(img.at(ch, r + 1, c) - img.at(ch, r, c));
                if ((r + 1) % tile_size == 0) {
                    boundary_sum += d;
                    ++boundary_count;
                } else {
                    interior_sum += d;
                    ++interior_count;
                }
            }
        }
    }

    if (boundary_count == 0) return 0.0;
    const double boundary_mean = boundary_sum / static_cast<double>(boundary_count);
    const double interior_mean =
        interior_count > 0 ? interior_sum / static_cast<double>(interior_count) : 0.0;
    return std::max(0.0, boundary_mean - interior_mean);
}

} // namespace vmstain
