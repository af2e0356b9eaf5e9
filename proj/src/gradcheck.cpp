#include "cdcg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdcg/rng.hpp"

namespace cdcg {

const GradcheckBlock* GradcheckReport::find(const std::string& name) const {
    for (const auto& b : blocks)
        if (b.name == name) return &b;
    return nullptr;
}

GradcheckReport gradcheck(const std::function<double()>& loss, std::span<const ParamBlock> blocks,
                          const GradcheckOptions& opts) {
    GradcheckReport report;
    Rng rng(opts.seed);
    for (const auto& block : blocks) {
        std::vector<std::size_t> coords(block.value.size());
        std::iota(coords.begin(), coords.end(), 0);
        if (coords.size() > opts.samples_per_block) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(opts.samples_per_block);
        }

        GradcheckBlock out{block.name, coords.size(), 0.0, 0, 0.0, 0.0};
        for (std::size_t i : coords) {
            double& p = block.value[i];
            const double saved = p;
            p = saved + opts.step;
            const double up = loss();
            p = saved - opts.step;
            const double down = loss();
            p = saved;
            const double numeric = (up - down) / (2.0 * opts.step);
            const double analytic = block.grad[i];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), opts.abs_floor});
            const double err = std::abs(analytic - numeric) / denom;
            if (err > out.max_rel_error || std::isnan(err)) {
                out.max_rel_error = std::isnan(err) ? INFINITY : err;
                out.worst_index = i;
                out.worst_analytic = analytic;
                out.worst_numeric = numeric;
            }
        }
        report.max_rel_error = std::max(report.max_rel_error, out.max_rel_error);
        report.blocks.push_back(std::move(out));
    }
    report.passed = report.max_rel_error < opts.tolerance;
    return report;
}

} // namespace cdcg
