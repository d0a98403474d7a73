#include "vmstain/losses.hpp"

#include "vmstain/colorspace.hpp"
#include "vmstain/errors.hpp"

#include <cmath>
#include <string>

namespace vmstain {

namespace {

void require_same_shape(const PlanarImage& a, const PlanarImage& b, const char* where) {
    if (!a.same_shape(b)) {
        throw ContractError(std::string(where) + ": dimension mismatch (" +
                            std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                            "x" + std::to_string(a.channels()) + " vs " +
                            std::to_string(b.height()) + "x" + std::to_string(b.width()) +
                            "x" + std::to_string(b.channels()) + ")");
    }
}

// Sequential reduction, so results are bit-stable across runs.
double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::fabs(a[i] - b[i]);
    }
    return sum / static_cast<double>(a.size());
}

double mean_log(std::span<const double> scores, bool one_minus, const char* where) {
    double sum = 0.0;
    for (double s : scores) {
        if (!(s > 0.0 && s < 1.0)) {
            throw DomainError(std::string(where) + ": score " + std::to_string(s) +
                              " not strictly inside (0,1)");
        }
        sum += std::log(one_minus ? 1.0 - s : s);
    }
    return sum / static_cast<double>(scores.size());
}

} // namespace

double value_loss(const PlanarImage& x, const PlanarImage& gx) {
    require_same_shape(x, gx, "value_loss");
    const PlanarImage vx = value_channel(x);
    const PlanarImage vgx = value_channel(gx);
    return mean_abs_diff(vx.plane(0), vgx.plane(0));
}

double cycle_loss(const PlanarImage& a, const PlanarImage& aba,
                  const PlanarImage& b, const PlanarImage& bab) {
    require_same_shape(a, aba, "cycle_loss (A direction)");
    require_same_shape(b, bab, "cycle_loss (B direction)");
    return mean_abs_diff(a.data(), aba.data()) + mean_abs_diff(b.data(), bab.data());
}

double adversarial_loss_generator(const PlanarImage& scores_fake) {
    return mean_log(scores_fake.data(), true, "adversarial_loss_generator");
}

double adversarial_loss_discriminator(const PlanarImage& scores_real,
                                      const PlanarImage& scores_fake) {
    return mean_log(scores_real.data(), false, "adversarial_loss_discriminator") +
           mean_log(scores_fake.data(), true, "adversarial_loss_discriminator");
}

LossReport total_loss(double adv_ab, double adv_ba, double cycle,
                      double value_a, double value_b, const LossWeights& weights) {
    if (!(std::isfinite(weights.lambda_cycle) && weights.lambda_cycle >= 0.0) ||
        !(std::isfinite(weights.lambda_value) && weights.lambda_value >= 0.0)) {
        throw DomainError("total_loss: loss weights must be finite and nonnegative");
    }
    LossReport report;
    report.adv_ab = adv_ab;
    report.adv_ba = adv_ba;
    report.cycle = cycle;
    report.value_a = value_a;
    report.value_b = value_b;
    report.weights = weights;
    report.total = adv_ab + adv_ba + weights.lambda_cycle * cycle +
                   weights.lambda_value * (value_a + value_b);
    return report;
}

ValueLossGradient value_loss_gradient(const PlanarImage& x, const PlanarImage& gx,
                                      double tie_tolerance) {
    require_same_shape(x, gx, "value_loss_gradient");
    if (x.channels() != 3) {
        throw ContractError("value_loss_gradient: expected 3 channels");
    }

    ValueLossGradient result;
    result.gradient = PlanarImage(gx.height(), gx.width(), 3);
    const double inv_n = 1.0 / static_cast<double>(gx.pixel_count());

    for (int row = 0; row < gx.height(); ++row) {
        for (int col = 0; col < gx.width(); ++col) {
            int argmax = 0;
            double vmax = gx.at(0, row, col);
            for (int c = 1; c < 3; ++c) {
                if (gx.at(c, row, col) > vmax) {
                    vmax = gx.at(c, row, col);
                    argmax = c;
                }
            }
            int near_max = 0;
            for (int c = 0; c < 3; ++c) {
                if (vmax - gx.at(c, row, col) <= tie_tolerance) ++near_max;
            }
            if (near_max > 1) {
                result.tied_pixels.emplace_back(row, col);
            }

            double vx = x.at(0, row, col);
            for (int c = 1; c < 3; ++c) {
                vx = std::max(vx, x.at(c, row, col));
            }
            const double diff = vmax - vx;
            if (diff != 0.0) {
                result.gradient.at(argmax, row, col) = (diff > 0.0 ? inv_n : -inv_n);
            }
        }
    }
    return result;
}

} // namespace vmstain
