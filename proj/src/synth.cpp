#include "cdcg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"
#include "cdcg/rng.hpp"

namespace cdcg {

namespace {

constexpr double kBaseLogExpression = 1.0;

} // namespace

std::optional<double> parse_separation(std::string_view s) {
    if (s == "low") return 10.0;
    if (s == "medium") return 18.0;
    if (s == "high") return 25.0;
    if (auto v = csv::parse_double(s); v && *v > 0.0 && std::isfinite(*v)) return v;
    return std::nullopt;
}

SynthData synth_blobs(std::size_t n, std::size_t genes, std::size_t k, double separation, double dropout_rate,
                      std::uint64_t seed) {
    if (k < 1 || k > n) throw_error(ErrorKind::Config, "synth: k must lie in [1, n]");
    if (n < 2 || genes < 2) throw_error(ErrorKind::Config, "synth: need n >= 2 and genes >= 2");
    if (!(separation > 0.0) || !std::isfinite(separation)) throw_error(ErrorKind::Config, "synth: separation must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw_error(ErrorKind::Config, "synth: dropout_rate must lie in [0, 1)");

    const SeedStreams streams(seed);
    Rng rng = streams.stream("synth");
    Rng drop_rng = streams.stream("dropout");
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix centers(k, genes);
    for (double& v : centers.values()) v = normal(rng);
    if (k > 1) {
        double min_d = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                min_d = std::min(min_d, std::sqrt(linalg::squared_distance(centers.row(a), centers.row(b))));
        const double scale = separation / min_d;
        for (double& v : centers.values()) v *= scale;
    } else {
        centers.fill(0.0);
    }

    Labels labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
    std::shuffle(labels.begin(), labels.end(), rng);

    std::gamma_distribution<double> size_factor(10.0, 0.1);
    Matrix values(n, genes);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = centers.row(static_cast<std::size_t>(labels[i]));
        auto row = values.row(i);
        const double factor = size_factor(rng);
        for (std::size_t g = 0; g < genes; ++g) row[g] = factor * std::exp(kBaseLogExpression + c[g] + normal(rng));
    }

    std::bernoulli_distribution drop(dropout_rate);
    for (double& v : values.values())
        if (drop(drop_rng)) v = 0.0;

    return {make_expression(std::move(values)), std::move(labels)};
}

} // namespace cdcg
