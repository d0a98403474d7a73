#pragma once

#include "vmstain/image.hpp"

#include <utility>
#include <vector>

namespace vmstain {

struct LossWeights {
    double lambda_cycle = 10.0;
    double lambda_value = 5.0;
};

/// Named components of the full objective:
/// total = adv_ab + adv_ba + lambda_cycle * cycle
///       + lambda_value * (value_a + value_b).
struct LossReport {
    double adv_ab = 0.0;
    double adv_ba = 0.0;
    double cycle = 0.0;
    double value_a = 0.0;
    double value_b = 0.0;
    double total = 0.0;
    LossWeights weights;
};

/// Mean absolute difference between the value channels of x and gx.
double value_loss(const PlanarImage& x, const PlanarImage& gx);

/// Mean |aba - a| plus mean |bab - b|, elementwise over all channels.
double cycle_loss(const PlanarImage& a, const PlanarImage& aba,
                  const PlanarImage& b, const PlanarImage& bab);

/// Generator objective: mean log(1 - scores_fake), to be minimized.
/// Scores must be strictly inside (0,1).
double adversarial_loss_generator(const PlanarImage& scores_fake);

/// Discriminator objective: mean log(scores_real) + mean log(1 - scores_fake).
double adversarial_loss_discriminator(const PlanarImage& scores_real,
                                      const PlanarImage& scores_fake);

LossReport total_loss(double adv_ab, double adv_ba, double cycle,
                      double value_a, double value_b,
                      const LossWeights& weights = {});

/// Analytic gradient of value_loss with respect to gx, plus the pixels
/// where the channel maximum is tied (subgradient ambiguity).
struct ValueLossGradient {
    PlanarImage gradient;                          // same shape as gx
    std::vector<std::pair<int, int>> tied_pixels;  // (row, col)
};

ValueLossGradient value_loss_gradient(const PlanarImage& x, const PlanarImage& gx,
                                      double tie_tolerance = 1e-6);

} // namespace vmstain
