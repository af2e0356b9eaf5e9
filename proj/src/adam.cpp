#include "cdcg/adam.hpp"

#include <cmath>

#include "cdcg/error.hpp"

namespace cdcg {

void AdamConfig::check() const {
    if (!(lr > 0.0)) throw_error(ErrorKind::Config, "lr must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw_error(ErrorKind::Config, "beta1 and beta2 must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw_error(ErrorKind::Config, "epsilon must be positive");
    if (!(weight_decay >= 0.0)) throw_error(ErrorKind::Config, "weight_decay must be nonnegative");
}

void adam_step(AdamState& opt, std::span<const ParamBlock> blocks) {
    // Blocks may be appended between steps (centroids join in phase 2); new ones start at zero.
    require_shape(opt.first_moment.size() <= blocks.size(), "adam_step: parameter blocks were removed");
    for (std::size_t k = opt.first_moment.size(); k < blocks.size(); ++k) {
        opt.first_moment.emplace_back(blocks[k].value.size(), 0.0);
        opt.second_moment.emplace_back(blocks[k].value.size(), 0.0);
    }

    const AdamConfig& c = opt.config;
    ++opt.step_count;
    const double t = static_cast<double>(opt.step_count);
    const double bias1 = 1.0 - std::pow(c.beta1, t);
    const double bias2 = 1.0 - std::pow(c.beta2, t);
    const double decay = 1.0 - c.lr * c.weight_decay;

    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto value = blocks[k].value;
        const auto grad = blocks[k].grad;
        auto& m = opt.first_moment[k];
        auto& v = opt.second_moment[k];
        require_shape(value.size() == m.size() && grad.size() == m.size(), "adam_step: block '" + blocks[k].name +
                                                                               "' size mismatch");
        for (std::size_t i = 0; i < value.size(); ++i) {
            const double g = grad[i];
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            if (c.weight_decay != 0.0) value[i] *= decay;
            value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

} // namespace cdcg
