// Command-line front end: run, synth, eval, ablate, preprocess, timing.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdcg/ablation.hpp"
#include "cdcg/config.hpp"
#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"
#include "cdcg/expr_data.hpp"
#include "cdcg/graph.hpp"
#include "cdcg/labels.hpp"
#include "cdcg/metrics.hpp"
#include "cdcg/synth.hpp"
#include "cdcg/trainer.hpp"

namespace fs = std::filesystem;
using namespace cdcg;

namespace {

std::optional<std::size_t> parse_k(const std::string& s) {
    if (s == "auto" || s == "from-labels") return std::nullopt;
    const auto v = csv::parse_int(s);
    if (!v || *v < 1) throw_error(ErrorKind::Config, "--k must be a positive integer or 'auto'");
    return static_cast<std::size_t>(*v);
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw_error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string format_metrics(const ClusteringScores& s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "{\"acc\": %.6f, \"nmi\": %.6f, \"ari\": %.6f}", s.acc, s.nmi, s.ari);
    return buf;
}

struct RunArgs {
    std::string input, labels, k = "auto", config, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool dump_debug = false;
};

RunConfig resolve_config(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                         const std::optional<std::size_t>& threads) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    return cfg;
}

int cmd_run(const RunArgs& a) {
    RunConfig cfg = resolve_config(a.config, a.seed, a.threads);
    cfg.k = parse_k(a.k);
    cfg.output_dir = a.out;
    cfg.check();

    ExpressionMatrix x = load_matrix(a.input);
    std::optional<Labels> truth;
    if (!a.labels.empty()) truth = read_labels(fs::path(a.labels));
    if (cfg.preprocess_enabled && !x.is_preprocessed) x = preprocess(x, cfg.preprocess);

    const RunResult r = train(x, truth, cfg);
    write_run_outputs(r, cfg, a.out);

    if (a.dump_debug) {
        ExpressionMatrix prepared = x;
        prepared.is_preprocessed = true;
        const GraphPair g = build_graph_pair(prepared, cfg.graph);
        write_matrix_csv(g.c_matrix, fs::path(a.out) / "affinity_pmg.csv");
        write_matrix_csv(g.s_matrix, fs::path(a.out) / "affinity_smg.csv");
        write_matrix_csv(r.q, fs::path(a.out) / "q.csv");
        if (!r.last_target.empty()) write_matrix_csv(r.last_target, fs::path(a.out) / "target.csv");
    }
    if (r.metrics) std::cout << format_metrics(*r.metrics) << '\n';
    return 0;
}

int cmd_synth(std::size_t n, std::size_t genes, std::size_t k, const std::string& separation, double dropout,
              std::uint64_t seed, const std::string& out) {
    const auto sep = parse_separation(separation);
    if (!sep) throw_error(ErrorKind::Config, "--separation must be low, medium, high, or a positive number");
    const SynthData d = synth_blobs(n, genes, k, *sep, dropout, seed);
    make_dir(out);
    write_csv(d.x, fs::path(out) / "matrix.csv");
    write_labels(d.labels, fs::path(out) / "labels.csv");
    return 0;
}

int cmd_eval(const std::string& pred, const std::string& truth) {
    const Labels p = read_labels(fs::path(pred));
    const Labels t = read_labels(fs::path(truth));
    std::cout << format_metrics(score_clustering(p, t)) << '\n';
    return 0;
}

int cmd_ablate(const std::string& input, const std::string& labels, const std::string& out, std::size_t seeds,
               const std::string& config, const std::optional<std::size_t>& threads) {
    RunConfig cfg = resolve_config(config, std::nullopt, threads);
    cfg.check();
    const ExpressionMatrix x = load_matrix(input);
    const Labels truth = read_labels(fs::path(labels));
    std::vector<std::uint64_t> seed_list;
    for (std::size_t s = 0; s < seeds; ++s) seed_list.push_back(cfg.seed + s);
    const AblationTable table = run_ablation_suite(x, truth, cfg, seed_list);
    make_dir(out);
    write_ablation_csv(table, fs::path(out) / "ablation.csv");
    write_ablation_runs_csv(table, fs::path(out) / "ablation_runs.csv");
    for (const auto& s : table.summary)
        std::printf("%-10s acc %.4f+-%.4f  nmi %.4f+-%.4f  ari %.4f+-%.4f\n", s.variant.c_str(), s.mean.acc,
                    s.stddev.acc, s.mean.nmi, s.stddev.nmi, s.mean.ari, s.stddev.ari);
    return 0;
}

int cmd_preprocess(const std::string& input, const std::string& out, const std::string& config) {
    const RunConfig cfg = resolve_config(config, std::nullopt, std::nullopt);
    const ExpressionMatrix x = preprocess(load_matrix(input), cfg.preprocess);
    const fs::path path(out);
    if (path.has_parent_path()) make_dir(path.parent_path());
    write_csv(x, path);
    return 0;
}

int cmd_timing(const std::vector<std::size_t>& sizes, std::size_t genes, std::size_t k, const std::string& separation,
               double dropout, const std::string& config, const std::string& out) {
    const auto sep = parse_separation(separation);
    if (!sep) throw_error(ErrorKind::Config, "--separation must be low, medium, high, or a positive number");
    RunConfig cfg = resolve_config(config, std::nullopt, std::nullopt);
    const auto rows = run_timing(sizes, genes, k, *sep, dropout, cfg);
    make_dir(out);
    write_timing_csv(rows, fs::path(out) / "timing.csv");
    for (const auto& r : rows) std::printf("n=%zu total %.3fs (pretrain %.3fs, train %.3fs)\n", r.n, r.total_s,
                                           r.pretrain_s, r.train_s);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep cut-informed graph clustering for expression matrices"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Train and cluster one matrix");
    run->add_option("--input", run_args.input, "Expression matrix (.csv or .mtx)")->required();
    run->add_option("--labels", run_args.labels, "Ground-truth labels for scoring and K");
    run->add_option("--k", run_args.k, "Number of clusters, or 'auto' to take it from --labels");
    run->add_option("--config", run_args.config, "JSON config");
    run->add_option("--out", run_args.out, "Output directory")->required();
    run->add_option("--seed", run_args.seed, "Seed (overrides the config)");
    run->add_option("--threads", run_args.threads, "Linear-algebra threads");
    run->add_flag("--dump-debug", run_args.dump_debug, "Also write affinity matrices, Q and the last target");

    std::size_t s_n = 0, s_genes = 0, s_k = 0;
    std::string s_sep = "medium", s_out;
    double s_dropout = 0.0;
    std::uint64_t s_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate Gaussian-blob count data");
    synth->add_option("--n", s_n, "Cells")->required();
    synth->add_option("--genes", s_genes, "Genes")->required();
    synth->add_option("--k", s_k, "Clusters")->required();
    synth->add_option("--separation", s_sep, "low, medium, high, or a distance");
    synth->add_option("--dropout", s_dropout, "Zero-injection rate in [0, 1)");
    synth->add_option("--seed", s_seed, "Seed");
    synth->add_option("--out", s_out, "Output directory")->required();

    std::string e_pred, e_true;
    auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
    eval->add_option("--pred", e_pred, "Predicted labels")->required();
    eval->add_option("--true", e_true, "True labels")->required();

    std::string a_input, a_labels, a_out, a_config;
    std::size_t a_seeds = 10;
    std::optional<std::size_t> a_threads;
    auto* ablate = app.add_subcommand("ablate", "Run every ablation variant over several seeds");
    ablate->add_option("--input", a_input, "Expression matrix")->required();
    ablate->add_option("--labels", a_labels, "Ground-truth labels")->required();
    ablate->add_option("--out", a_out, "Output directory")->required();
    ablate->add_option("--seeds", a_seeds, "Number of seeds, starting at the config seed");
    ablate->add_option("--config", a_config, "JSON config");
    ablate->add_option("--threads", a_threads, "Linear-algebra threads");

    std::string p_input, p_out, p_config;
    auto* prep = app.add_subcommand("preprocess", "Filter, normalize, log1p, and select genes");
    prep->add_option("--input", p_input, "Raw matrix")->required();
    prep->add_option("--out", p_out, "Output CSV path")->required();
    prep->add_option("--config", p_config, "JSON config (preprocess section)");

    std::vector<std::size_t> t_sizes{500, 1000, 2000};
    std::size_t t_genes = 60, t_k = 4;
    std::string t_sep = "high", t_config, t_out;
    double t_dropout = 0.3;
    auto* timing = app.add_subcommand("timing", "Wall-clock per phase across dataset sizes");
    timing->add_option("--sizes", t_sizes, "Cell counts")->delimiter(',');
    timing->add_option("--genes", t_genes, "Genes");
    timing->add_option("--k", t_k, "Clusters");
    timing->add_option("--separation", t_sep, "low, medium, high, or a distance");
    timing->add_option("--dropout", t_dropout, "Zero-injection rate");
    timing->add_option("--config", t_config, "JSON config");
    timing->add_option("--out", t_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(run_args);
        if (*synth) return cmd_synth(s_n, s_genes, s_k, s_sep, s_dropout, s_seed, s_out);
        if (*eval) return cmd_eval(e_pred, e_true);
        if (*ablate) return cmd_ablate(a_input, a_labels, a_out, a_seeds, a_config, a_threads);
        if (*prep) return cmd_preprocess(p_input, p_out, p_config);
        if (*timing) return cmd_timing(t_sizes, t_genes, t_k, t_sep, t_dropout, t_config, t_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
