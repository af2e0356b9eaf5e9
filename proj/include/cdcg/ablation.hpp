#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cdcg/config.hpp"
#include "cdcg/expr_data.hpp"
#include "cdcg/labels.hpp"
#include "cdcg/metrics.hpp"

namespace cdcg {

struct AblationVariant {
    std::string name;
    RunConfig config;
};

/// full, w/o NCut, w/o KL, w/o Res, w/o PMG, w/o SMG, w/o Graph, w/o Ort,
/// w/o OT (squared target instead of transport).
std::vector<AblationVariant> ablation_variants(const RunConfig& base);

struct AblationRun {
    std::string variant;
    std::uint64_t seed = 0;
    ClusteringScores scores;
};

struct AblationSummary {
    std::string variant;
    std::size_t runs = 0;
    ClusteringScores mean;
    ClusteringScores stddev;  // sample standard deviation; 0 for a single run
};

struct AblationTable {
    std::vector<AblationRun> runs;
    std::vector<AblationSummary> summary;  // one row per variant, in variant order

    const AblationSummary* find(const std::string& variant) const;
};

AblationTable run_ablation_suite(const ExpressionMatrix& x, const Labels& truth, const RunConfig& base,
                                 const std::vector<std::uint64_t>& seeds);

/// variant,runs,acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std
void write_ablation_csv(const AblationTable& table, const std::filesystem::path& path);
/// variant,seed,acc,nmi,ari
void write_ablation_runs_csv(const AblationTable& table, const std::filesystem::path& path);

struct TimingRow {
    std::size_t n = 0;
    double preprocess_s = 0.0;
    double graph_s = 0.0;
    double pretrain_s = 0.0;
    double kmeans_s = 0.0;
    double train_s = 0.0;
    double total_s = 0.0;
};

/// Trains on synthetic blobs for each n (same genes and k) and records the
/// per-phase wall clock.
std::vector<TimingRow> run_timing(const std::vector<std::size_t>& sizes, std::size_t genes, std::size_t k,
                                  double separation, double dropout, const RunConfig& cfg);

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path);

} // namespace cdcg
