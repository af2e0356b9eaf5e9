#include "cdcg/ablation.hpp"

#include <cmath>
#include <fstream>

#include "cdcg/csv.hpp"
#include "cdcg/synth.hpp"
#include "cdcg/trainer.hpp"

namespace cdcg {

std::vector<AblationVariant> ablation_variants(const RunConfig& base) {
    std::vector<AblationVariant> out;
    auto add = [&](const char* name, auto&& tweak) {
        RunConfig c = base;
        tweak(c);
        out.push_back({name, std::move(c)});
    };
    add("full", [](RunConfig&) {});
    add("w/o NCut", [](RunConfig& c) { c.ablation.use_ncut = false; });
    add("w/o KL", [](RunConfig& c) { c.ablation.use_kl = false; });
    add("w/o Res", [](RunConfig& c) { c.ablation.use_recon = false; });
    add("w/o PMG", [](RunConfig& c) { c.ablation.use_pmg = false; });
    add("w/o SMG", [](RunConfig& c) { c.ablation.use_smg = false; });
    add("w/o Graph", [](RunConfig& c) {
        c.ablation.use_pmg = false;
        c.ablation.use_smg = false;
        c.ablation.use_ncut = false;
    });
    add("w/o Ort", [](RunConfig& c) { c.ablation.use_orthogonality = false; });
    add("w/o OT", [](RunConfig& c) { c.target_strategy = TargetStrategy::Sdcn; });
    return out;
}

const AblationSummary* AblationTable::find(const std::string& variant) const {
    for (const auto& s : summary)
        if (s.variant == variant) return &s;
    return nullptr;
}

AblationTable run_ablation_suite(const ExpressionMatrix& x, const Labels& truth, const RunConfig& base,
                                 const std::vector<std::uint64_t>& seeds) {
    // Preprocess once; every variant sees the same input.
    ExpressionMatrix prepared = x;
    if (!prepared.is_preprocessed && base.preprocess_enabled) prepared = preprocess(prepared, base.preprocess);

    AblationTable table;
    for (const auto& variant : ablation_variants(base)) {
        AblationSummary s;
        s.variant = variant.name;
        std::vector<ClusteringScores> scores;
        for (std::uint64_t seed : seeds) {
            RunConfig c = variant.config;
            c.seed = seed;
            const RunResult r = train(prepared, truth, c);
            table.runs.push_back({variant.name, seed, *r.metrics});
            scores.push_back(*r.metrics);
        }
        s.runs = scores.size();
        for (const auto& sc : scores) {
            s.mean.acc += sc.acc / static_cast<double>(s.runs);
            s.mean.nmi += sc.nmi / static_cast<double>(s.runs);
            s.mean.ari += sc.ari / static_cast<double>(s.runs);
        }
        if (s.runs > 1) {
            for (const auto& sc : scores) {
                s.stddev.acc += (sc.acc - s.mean.acc) * (sc.acc - s.mean.acc);
                s.stddev.nmi += (sc.nmi - s.mean.nmi) * (sc.nmi - s.mean.nmi);
                s.stddev.ari += (sc.ari - s.mean.ari) * (sc.ari - s.mean.ari);
            }
            const double d = static_cast<double>(s.runs - 1);
            s.stddev.acc = std::sqrt(s.stddev.acc / d);
            s.stddev.nmi = std::sqrt(s.stddev.nmi / d);
            s.stddev.ari = std::sqrt(s.stddev.ari / d);
        }
        table.summary.push_back(s);
    }
    return table;
}

void write_ablation_csv(const AblationTable& table, const std::filesystem::path& path) {
    std::ofstream out = csv::open_output(path);
    out << "variant,runs,acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std\n";
    for (const auto& s : table.summary)
        out << s.variant << ',' << s.runs << ',' << csv::format_double(s.mean.acc) << ','
            << csv::format_double(s.stddev.acc) << ',' << csv::format_double(s.mean.nmi) << ','
            << csv::format_double(s.stddev.nmi) << ',' << csv::format_double(s.mean.ari) << ','
            << csv::format_double(s.stddev.ari) << '\n';
}

void write_ablation_runs_csv(const AblationTable& table, const std::filesystem::path& path) {
    std::ofstream out = csv::open_output(path);
    out << "variant,seed,acc,nmi,ari\n";
    for (const auto& r : table.runs)
        out << r.variant << ',' << r.seed << ',' << csv::format_double(r.scores.acc) << ','
            << csv::format_double(r.scores.nmi) << ',' << csv::format_double(r.scores.ari) << '\n';
}

std::vector<TimingRow> run_timing(const std::vector<std::size_t>& sizes, std::size_t genes, std::size_t k,
                                  double separation, double dropout, const RunConfig& cfg) {
    std::vector<TimingRow> rows;
    for (std::size_t n : sizes) {
        const SynthData data = synth_blobs(n, genes, k, separation, dropout, cfg.seed);
        RunConfig c = cfg;
        c.k = k;
        const RunResult r = train(data.x, data.labels, c);
        const PhaseTimings& t = r.timings;
        rows.push_back({n, t.preprocess_s, t.graph_s, t.pretrain_s, t.kmeans_s, t.train_s, t.total_s});
    }
    return rows;
}

void write_timing_csv(const std::vector<TimingRow>& rows, const std::filesystem::path& path) {
    std::ofstream out = csv::open_output(path);
    out << "n,preprocess_s,graph_s,pretrain_s,kmeans_s,train_s,total_s\n";
    for (const auto& r : rows)
        out << r.n << ',' << csv::format_double(r.preprocess_s) << ',' << csv::format_double(r.graph_s) << ','
            << csv::format_double(r.pretrain_s) << ',' << csv::format_double(r.kmeans_s) << ','
            << csv::format_double(r.train_s) << ',' << csv::format_double(r.total_s) << '\n';
}

} // namespace cdcg
