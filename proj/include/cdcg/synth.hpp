#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "cdcg/expr_data.hpp"
#include "cdcg/labels.hpp"

namespace cdcg {

struct SynthData {
    ExpressionMatrix x;
    Labels labels;
};

/// Raw count-like blobs. Cluster centers are Gaussian in log-expression space,
/// rescaled so every pair sits at least `separation` apart. Each cell draws
/// unit Gaussian noise around its center, is exponentiated, scaled by a
/// Gamma(10, 0.1) multiplicative factor, and then has each entry zeroed with
/// probability `dropout_rate`. Labels are assigned round-robin then shuffled.
SynthData synth_blobs(std::size_t n, std::size_t genes, std::size_t k, double separation, double dropout_rate,
                      std::uint64_t seed);

/// "low", "medium", "high", or a positive number.
std::optional<double> parse_separation(std::string_view s);

} // namespace cdcg
