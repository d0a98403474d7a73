#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vmstain {

/// Planar float image. Channel planes are stored contiguously
/// (plane-major, row-major within a plane). Pixel data for processing
/// lives in [0,1]; derived quantities (gradients, accumulators) may
/// hold arbitrary finite values.
class PlanarImage {
public:
    PlanarImage() = default;
    PlanarImage(int height, int width, int channels = 3, double fill = 0.0);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height_) * width_;
    }
    std::size_t element_count() const { return data_.size(); }

    double& at(int channel, int row, int col) {
        return data_[plane_offset(channel) + static_cast<std::size_t>(row) * width_ + col];
    }
    double at(int channel, int row, int col) const {
        return data_[plane_offset(channel) + static_cast<std::size_t>(row) * width_ + col];
    }

    std::span<double> plane(int channel) {
        return {data_.data() + plane_offset(channel), pixel_count()};
    }
    std::span<const double> plane(int channel) const {
        return {data_.data() + plane_offset(channel), pixel_count()};
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool same_shape(const PlanarImage& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

    /// Throws DomainError unless every element is finite and in [0,1].
    void validate_unit_range(const char* what) const;

private:
    std::size_t plane_offset(int channel) const {
        return static_cast<std::size_t>(channel) * pixel_count();
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

} // namespace vmstain
