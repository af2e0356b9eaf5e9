#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cdcg/nn.hpp"

namespace cdcg {

struct GradcheckOptions {
    /// Coordinates compared per block; blocks at or below this size are checked exhaustively.
    std::size_t samples_per_block = 200;
    double step = 1e-5;
    /// Relative error is |a - f| / max(|a|, |f|, abs_floor).
    double abs_floor = 1e-6;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct GradcheckBlock {
    std::string name;
    std::size_t checked = 0;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

struct GradcheckReport {
    std::vector<GradcheckBlock> blocks;
    double max_rel_error = 0.0;
    bool passed = true;

    const GradcheckBlock* find(const std::string& name) const;
};

/// Central differences of `loss` against each block's analytic gradient.
/// `loss` must read the current values of the blocks; each probed coordinate
/// is restored exactly afterwards.
GradcheckReport gradcheck(const std::function<double()>& loss, std::span<const ParamBlock> blocks,
                          const GradcheckOptions& opts = {});

} // namespace cdcg
