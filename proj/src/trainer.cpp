#include "cdcg/trainer.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "cdcg/adam.hpp"
#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"
#include "cdcg/graph.hpp"
#include "cdcg/kmeans.hpp"
#include "cdcg/linalg.hpp"
#include "cdcg/objective.hpp"
#include "cdcg/rng.hpp"

namespace cdcg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t resolve_k(const RunConfig& cfg, const std::optional<Labels>& truth, std::size_t n) {
    std::size_t k = 0;
    if (cfg.k) k = *cfg.k;
    else if (truth) k = static_cast<std::size_t>(num_distinct(*truth));
    else throw_error(ErrorKind::Config, "k is \"from-labels\" but no labels were supplied");
    if (k < 1 || k > n) throw_error(ErrorKind::Config, "k must lie in [1, n], got " + std::to_string(k));
    return k;
}

// Network blocks plus, when trained, the centroids.
std::vector<ParamBlock> blocks_for(AutoencoderState& ae, const ObjectiveValue& v, Matrix* centroids) {
    auto blocks = param_blocks(ae, v.grads);
    if (centroids && !v.d_centroids.empty())
        blocks.push_back({"centroids", centroids->values(), v.d_centroids.values()});
    return blocks;
}

EpochLoss trace_entry(const char* phase, std::size_t epoch, const ObjectiveValue& v) {
    return {phase, epoch, v.total, v.res, v.ncut, v.kl};
}

struct TargetBuilder {
    const RunConfig& cfg;
    SinkhornStats& stats;

    Matrix build(const Matrix& q, std::vector<double>& pi) {
        pi = estimate_pi(q, cfg.pi_floor);
        if (cfg.target_strategy == TargetStrategy::Sdcn) return sdcn_target(q);
        SinkhornOptions opts;
        opts.lambda = cfg.weights.lambda_smooth;
        opts.tol = cfg.sinkhorn.tol;
        opts.max_iter = cfg.sinkhorn.max_iter;
        opts.allow_log_domain = cfg.sinkhorn.allow_log_domain;
        opts.throw_on_no_convergence = cfg.sinkhorn.require_convergence;
        SinkhornResult r = sinkhorn_target(q, pi, opts);
        ++stats.solves;
        if (!r.report.converged) {
            ++stats.unconverged_solves;
            for (std::size_t i = 0; i < r.plan.rows(); ++i) {
                auto row = r.plan.row(i);
                double s = 0.0;
                for (double v : row) s += v;
                for (double& v : row) v /= s;
            }
        }
        stats.max_iterations = std::max(stats.max_iterations, r.report.iterations);
        stats.max_violation = std::max(stats.max_violation, r.report.violation);
        if (r.report.used_log_domain) ++stats.log_domain_solves;
        return std::move(r.plan);
    }
};

} // namespace

ObjectiveValue evaluate_objective(const AutoencoderState& ae, const Matrix& x, const Matrix* l_mix,
                                  const Matrix* centroids, const Matrix* p_hat, const LossWeights& w) {
    ObjectiveValue out;
    out.cache = forward(ae, x);
    const Matrix& h = out.cache.h;

    Matrix d_xhat;
    if (w.mu != 0.0) {
        LossGrad r = recon_loss(x, out.cache.x_hat);
        out.res = r.value;
        out.total += w.mu * r.value;
        for (double& g : r.grad.values()) g *= w.mu;
        d_xhat = std::move(r.grad);
    }

    Matrix d_h(h.rows(), h.cols());
    if (w.sigma != 0.0 && l_mix) {
        NcutLossParts nc = ncut_loss(h, *l_mix, w.beta, w.gamma);
        out.ncut = nc.value;
        out.trace = nc.trace_term;
        out.orth = nc.orth_term;
        out.total += w.sigma * nc.value;
        linalg::add_scaled(d_h, w.sigma, nc.grad);
    }

    if (centroids) out.q = soft_assign(h, *centroids, w.theta);
    if (w.tau != 0.0 && centroids && p_hat) {
        LossGrad kl = kl_loss(*p_hat, out.q);
        out.kl = kl.value;
        out.total += w.tau * kl.value;
        SoftAssignGrad sg = soft_assign_backward(h, *centroids, out.q, w.theta, kl.grad);
        linalg::add_scaled(d_h, w.tau, sg.d_h);
        for (double& g : sg.d_centroids.values()) g *= w.tau;
        out.d_centroids = std::move(sg.d_centroids);
    }

    out.grads = backward(ae, out.cache, d_h, d_xhat);
    return out;
}

RunResult train(const ExpressionMatrix& input, const std::optional<Labels>& truth, const RunConfig& cfg) {
    cfg.check();
    const auto t_start = Clock::now();
    linalg::set_num_threads(cfg.strict_sequential ? 1u : static_cast<unsigned>(cfg.threads));

    RunResult result;
    auto t0 = Clock::now();
    ExpressionMatrix x = input;
    if (!x.is_preprocessed) {
        if (cfg.preprocess_enabled) {
            x = preprocess(x, cfg.preprocess);
        } else {
            validate(x);
            x.is_preprocessed = true;
        }
    }
    result.timings.preprocess_s = seconds_since(t0);
    const std::size_t n = x.n_cells();
    if (truth && truth->size() != n)
        throw_error(ErrorKind::LengthMismatch, "labels have " + std::to_string(truth->size()) + " entries for " +
                                                   std::to_string(n) + " cells");
    const std::size_t k = resolve_k(cfg, truth, n);
    result.cell_ids = x.cell_ids;
    result.n_genes = x.n_genes();
    result.k = k;

    const LossWeights w = cfg.effective_weights();
    const SeedStreams streams(cfg.seed);

    t0 = Clock::now();
    Matrix l_mix;
    if (w.sigma != 0.0) {
        const GraphPair g = build_graph_pair(x, cfg.graph);
        l_mix = mixed_laplacian(g, w.alpha);
    }
    const Matrix* l_ptr = l_mix.empty() ? nullptr : &l_mix;
    result.timings.graph_s = seconds_since(t0);

    Rng init_rng = streams.stream("init");
    AutoencoderState ae = AutoencoderState::create(x.n_genes(), cfg.layers, init_rng);
    AdamState opt;
    opt.config = cfg.optimizer;

    // Phase 1: reconstruction + NCut.
    t0 = Clock::now();
    LossWeights w1 = w;
    w1.tau = 0.0;
    for (std::size_t e = 0; e < cfg.pretrain_epochs; ++e) {
        ObjectiveValue v = evaluate_objective(ae, x.values, l_ptr, nullptr, nullptr, w1);
        result.losses.push_back(trace_entry("pretrain", e, v));
        adam_step(opt, blocks_for(ae, v, nullptr));
    }
    result.timings.pretrain_s = seconds_since(t0);

    t0 = Clock::now();
    Rng km_rng = streams.stream("kmeans");
    ClusterState clusters = kmeans(encode(ae, x.values), k, cfg.kmeans, km_rng);
    result.timings.kmeans_s = seconds_since(t0);

    // Phase 2: joint training against a periodically refreshed target.
    t0 = Clock::now();
    TargetBuilder targets{cfg, result.sinkhorn};
    Matrix p_hat;
    struct Block {
        LossWeights weights;
        std::size_t epochs;
    };
    std::vector<Block> schedule;
    if (cfg.sequential_phase2) {
        LossWeights only = w;
        only.mu = only.tau = 0.0;
        schedule.push_back({only, cfg.train_epochs});
        only = w;
        only.sigma = only.tau = 0.0;
        schedule.push_back({only, cfg.train_epochs});
        only = w;
        only.mu = only.sigma = 0.0;
        schedule.push_back({only, cfg.train_epochs});
    } else {
        schedule.push_back({w, cfg.train_epochs});
    }

    std::size_t epoch = 0;
    for (const Block& block : schedule) {
        const bool use_target = block.weights.tau != 0.0;
        for (std::size_t e = 0; e < block.epochs; ++e, ++epoch) {
            if (use_target && (e % cfg.target_refresh_every == 0 || p_hat.empty())) {
                const Matrix q = soft_assign(encode(ae, x.values), clusters.centroids, w.theta);
                p_hat = targets.build(q, clusters.pi);
                result.last_target = p_hat;
                result.last_pi = clusters.pi;
            }
            ObjectiveValue v = evaluate_objective(ae, x.values, l_ptr, &clusters.centroids,
                                                  use_target ? &p_hat : nullptr, block.weights);
            result.losses.push_back(trace_entry("train", epoch, v));
            adam_step(opt, blocks_for(ae, v, use_target ? &clusters.centroids : nullptr));
        }
    }
    result.timings.train_s = seconds_since(t0);

    result.embedding = encode(ae, x.values);
    if (w.tau == 0.0) {
        // Centroids never trained: recluster the final embedding.
        Rng refit_rng = streams.stream("kmeans-final");
        clusters = kmeans(result.embedding, k, cfg.kmeans, refit_rng);
    }
    result.q = soft_assign(result.embedding, clusters.centroids, w.theta);
    result.labels = argmax_rows(result.q);
    if (truth) result.metrics = score_clustering(result.labels, *truth);

    result.state.model = std::move(ae);
    result.state.optimizer = std::move(opt);
    result.state.centroids = std::move(clusters.centroids);
    result.timings.total_s = seconds_since(t_start);
    return result;
}

void write_run_outputs(const RunResult& r, const RunConfig& cfg, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw_error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

    write_assignments(r.cell_ids, r.labels, dir / "assignments.csv");
    write_matrix_csv(r.embedding, dir / "embedding.csv");

    {
        std::ofstream out = csv::open_output(dir / "losses.csv");
        auto opt = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
        out << "phase,epoch,l_res,l_ncut,l_kl,total\n";
        for (const auto& e : r.losses)
            out << e.phase << ',' << e.epoch << ',' << opt(e.res) << ',' << opt(e.ncut) << ',' << opt(e.kl) << ','
                << csv::format_double(e.total) << '\n';
    }

    {
        nlohmann::json j;
        j["n_cells"] = r.cell_ids.size();
        j["n_genes"] = r.n_genes;
        j["k"] = r.k;
        if (r.metrics) j["metrics"] = {{"acc", r.metrics->acc}, {"nmi", r.metrics->nmi}, {"ari", r.metrics->ari}};
        else j["metrics"] = nullptr;
        j["timings_seconds"] = {{"preprocess", r.timings.preprocess_s}, {"graph", r.timings.graph_s},
                                {"pretrain", r.timings.pretrain_s},     {"kmeans", r.timings.kmeans_s},
                                {"train", r.timings.train_s},           {"total", r.timings.total_s}};
        j["sinkhorn"] = {{"solves", r.sinkhorn.solves},
                         {"max_iterations", r.sinkhorn.max_iterations},
                         {"max_violation", r.sinkhorn.max_violation},
                         {"log_domain_solves", r.sinkhorn.log_domain_solves},
                         {"unconverged_solves", r.sinkhorn.unconverged_solves}};
        std::ofstream out = csv::open_output(dir / "metrics.json");
        out << j.dump(2) << '\n';
    }

    write_checkpoint(dir / "checkpoint.bin", r.state);
    RunConfig resolved = cfg;
    resolved.k = r.k;
    resolved.output_dir = dir.string();
    write_config(resolved, dir / "config.resolved.json");
}

} // namespace cdcg
