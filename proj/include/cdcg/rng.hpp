#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cdcg {

using Rng = std::mt19937_64;

/// Derives independent generators from one run seed by stream name
/// ("init", "kmeans", "synth", "dropout", ...). Toggling one component never
/// shifts the random sequence seen by another.
class SeedStreams {
public:
    explicit SeedStreams(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed_for(std::string_view stream) const noexcept;
    Rng stream(std::string_view name) const { return Rng(seed_for(name)); }

    std::uint64_t base_seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

} // namespace cdcg
