#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdcg/assign.hpp"
#include "cdcg/checkpoint.hpp"
#include "cdcg/config.hpp"
#include "cdcg/expr_data.hpp"
#include "cdcg/labels.hpp"
#include "cdcg/metrics.hpp"
#include "cdcg/nn.hpp"
#include "cdcg/sinkhorn.hpp"

namespace cdcg {

/// Value and gradients of  mu L_res + sigma L_NCut + tau L_KL.
/// A term is skipped when its weight is zero or its input pointer is null.
struct ObjectiveValue {
    double total = 0.0;
    std::optional<double> res;
    std::optional<double> ncut;  // beta * trace + gamma * orth
    std::optional<double> trace;
    std::optional<double> orth;
    std::optional<double> kl;
    ForwardCache cache;
    Matrix q;  // soft assignment, present when centroids are given
    AutoencoderGradients grads;
    Matrix d_centroids;  // empty unless the KL term is active
};

/// `p_hat` is treated as a constant target.
ObjectiveValue evaluate_objective(const AutoencoderState& ae, const Matrix& x, const Matrix* l_mix,
                                  const Matrix* centroids, const Matrix* p_hat, const LossWeights& w);

struct EpochLoss {
    std::string phase;  // "pretrain" or "train"
    std::size_t epoch = 0;
    double total = 0.0;
    std::optional<double> res;
    std::optional<double> ncut;
    std::optional<double> kl;
};

struct PhaseTimings {
    double preprocess_s = 0.0;
    double graph_s = 0.0;
    double pretrain_s = 0.0;
    double kmeans_s = 0.0;
    double train_s = 0.0;
    double total_s = 0.0;
};

struct SinkhornStats {
    std::size_t solves = 0;
    std::size_t max_iterations = 0;
    double max_violation = 0.0;
    std::size_t log_domain_solves = 0;
    std::size_t unconverged_solves = 0;
};

struct RunResult {
    std::vector<std::string> cell_ids;
    std::size_t n_genes = 0;  // after preprocessing
    std::size_t k = 0;
    Labels labels;
    Matrix embedding;
    Matrix q;
    std::vector<EpochLoss> losses;
    std::optional<ClusteringScores> metrics;
    PhaseTimings timings;
    SinkhornStats sinkhorn;
    /// Last refreshed target and the proportions it was built from.
    Matrix last_target;
    std::vector<double> last_pi;
    Checkpoint state;
};

/// Preprocess (unless disabled or already done), build graphs, pretrain on
/// reconstruction + NCut, initialize clusters with K-means, then train jointly
/// with the self-supervised target. Labels are the rowwise argmax of the final Q.
RunResult train(const ExpressionMatrix& x, const std::optional<Labels>& truth, const RunConfig& cfg);

/// assignments.csv, embedding.csv, losses.csv, metrics.json, checkpoint.bin,
/// config.resolved.json.
void write_run_outputs(const RunResult& result, const RunConfig& cfg, const std::filesystem::path& dir);

} // namespace cdcg
