#include "vmstain/image.hpp"

#include "vmstain/errors.hpp"

#include <cmath>
#include <string>

namespace vmstain {

PlanarImage::PlanarImage(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
    if (height < 0 || width < 0 || channels < 1) {
        throw ContractError("PlanarImage: invalid dimensions " + std::to_string(height) +
                            "x" + std::to_string(width) + "x" + std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

void PlanarImage::validate_unit_range(const char* what) const {
    for (double v : data_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DomainError(std::string(what) + ": pixel value " + std::to_string(v) +
                              " outside [0,1]");
        }
    }
}

} // namespace vmstain
