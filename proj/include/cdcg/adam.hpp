#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdcg/nn.hpp"

namespace cdcg {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Decoupled: theta <- theta - lr * weight_decay * theta before the adaptive step.
    double weight_decay = 0.0;

    void check() const;
};

/// Bias-corrected Adam. Moment buffers are allocated to match the parameter
/// blocks; later steps keep the layout and may only append blocks. The step
/// counter is shared, so appended blocks see the global bias correction.
struct AdamState {
    AdamConfig config;
    std::uint64_t step_count = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
};

void adam_step(AdamState& opt, std::span<const ParamBlock> blocks);

} // namespace cdcg
