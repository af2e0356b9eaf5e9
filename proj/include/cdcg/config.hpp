#pragma once

// Run configuration and its JSON form. Field names in the JSON mirror the
// struct members; unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdcg/adam.hpp"
#include "cdcg/expr_data.hpp"
#include "cdcg/graph.hpp"
#include "cdcg/kmeans.hpp"
#include "cdcg/objective.hpp"

namespace cdcg {

enum class TargetStrategy { Ot, Sdcn };

const char* to_string(TargetStrategy s) noexcept;

struct AblationSwitches {
    bool use_pmg = true;   // probability-metric graph channel
    bool use_smg = true;   // spatial-metric graph channel
    bool use_ncut = true;
    bool use_kl = true;
    bool use_recon = true;
    bool use_orthogonality = true;
};

struct SinkhornSettings {
    double tol = 1e-6;
    std::size_t max_iter = 1000;
    bool allow_log_domain = true;
    /// Fail the run on a solve that misses tol. Off: keep the last iterate,
    /// renormalize its rows, and count it in the run report.
    bool require_convergence = false;
};

struct RunConfig {
    bool preprocess_enabled = true;
    PreprocessConfig preprocess;
    LossWeights weights;
    /// nullopt: take K from the supplied truth labels.
    std::optional<std::size_t> k;
    std::vector<std::size_t> layers{256, 16};
    std::size_t pretrain_epochs = 200;
    std::size_t train_epochs = 200;
    std::uint64_t seed = 0;
    AdamConfig optimizer;
    SinkhornSettings sinkhorn;
    TargetStrategy target_strategy = TargetStrategy::Ot;
    AblationSwitches ablation;
    std::size_t target_refresh_every = 1;
    /// Phase 2 as three back-to-back blocks (NCut, then reconstruction, then
    /// KL) of train_epochs each instead of joint steps.
    bool sequential_phase2 = false;
    /// Single-threaded linear algebra.
    bool strict_sequential = false;
    std::size_t threads = 1;
    double pi_floor = 1e-6;
    KMeansOptions kmeans;
    GraphOptions graph;
    std::string output_dir;

    /// Throws ConfigError on an invariant violation.
    void check() const;

    /// Weights actually used once the ablation switches are applied.
    LossWeights effective_weights() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Missing keys keep their defaults. Throws ConfigError on unknown keys or
/// wrongly typed values.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);
void write_config(const RunConfig& cfg, const std::filesystem::path& path);

} // namespace cdcg
