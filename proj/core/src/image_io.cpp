#include "vmstain/image_io.hpp"

#include "vmstain/errors.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace vmstain {

namespace {

PlanarImage from_mat(const cv::Mat& bgr, const std::string& what) {
    if (bgr.empty()) {
        throw IoError(what + ": decode failed or empty image");
    }
    if (bgr.type() != CV_8UC3) {
        throw IoError(what + ": expected 8-bit RGB data");
    }
    PlanarImage out(bgr.rows, bgr.cols, 3);
    for (int r = 0; r < bgr.rows; ++r) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            // OpenCV stores BGR.
            out.at(0, r, c) = row[c][2] / 255.0;
            out.at(1, r, c) = row[c][1] / 255.0;
            out.at(2, r, c) = row[c][0] / 255.0;
        }
    }
    return out;
}

cv::Mat to_mat(const PlanarImage& img, const std::string& what) {
    if (img.channels() != 3) {
        throw ContractError(what + ": expected a 3-channel image");
    }
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int r = 0; r < img.height(); ++r) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < img.width(); ++c) {
            row[c][2] = quantize8(img.at(0, r, c));
            row[c][1] = quantize8(img.at(1, r, c));
            row[c][0] = quantize8(img.at(2, r, c));
        }
    }
    return bgr;
}

} // namespace

std::uint8_t quantize8(double v) {
    const long q = std::lround(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

PlanarImage load_image(const std::filesystem::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    return from_mat(bgr, "load_image(" + path.string() + ")");
}

void save_image(const std::filesystem::path& path, const PlanarImage& img) {
    const std::string ext = path.extension().string();
    if (ext != ".png" && ext != ".tif" && ext != ".tiff") {
        throw IoError("save_image: unsupported extension '" + ext + "' (use .png or .tif)");
    }
    if (!cv::imwrite(path.string(), to_mat(img, "save_image"))) {
        throw IoError("save_image: failed to write " + path.string());
    }
}

std::vector<std::uint8_t> encode_png(const PlanarImage& img) {
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", to_mat(img, "encode_png"), bytes)) {
        throw IoError("encode_png: encoding failed");
    }
    return bytes;
}

PlanarImage decode_png(const std::vector<std::uint8_t>& bytes) {
    cv::Mat bgr = cv::imdecode(bytes, cv::IMREAD_COLOR);
    return from_mat(bgr, "decode_png");
}

} // namespace vmstain
