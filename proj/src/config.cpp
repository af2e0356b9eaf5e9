#include "cdcg/config.hpp"

#include <fstream>
#include <set>

#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"

namespace cdcg {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw_error(ErrorKind::Config, what); }

// Reads typed fields out of one JSON object and rejects leftover keys.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) bad("'" + path_ + "' must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        const json* v = find(key);
        if (!v) return;
        try {
            out = v->get<T>();
        } catch (const json::exception&) {
            bad("'" + name(key) + "' has the wrong type");
        }
    }

    void get_count(const char* key, std::size_t& out) {
        const json* v = find(key);
        if (!v) return;
        if (!v->is_number_integer() || v->get<long long>() < 0) bad("'" + name(key) + "' must be a nonnegative integer");
        out = v->get<std::size_t>();
    }

    const json* find(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) bad("unknown config key '" + name(it.key().c_str()) + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_preprocess(Section& s, RunConfig& cfg) {
    s.get("enabled", cfg.preprocess_enabled);
    s.get("do_library_normalize", cfg.preprocess.do_library_normalize);
    s.get("target_sum", cfg.preprocess.target_sum);
    s.get("do_log1p", cfg.preprocess.do_log1p);
    if (const json* v = s.find("hvg_count")) {
        if (v->is_null()) cfg.preprocess.hvg_count.reset();
        else if (v->is_number_integer() && v->get<long long>() > 0) cfg.preprocess.hvg_count = v->get<std::size_t>();
        else bad("'preprocess.hvg_count' must be a positive integer or null");
    }
    s.get_count("min_cells_per_gene", cfg.preprocess.min_cells_per_gene);
}

void read_weights(Section& s, LossWeights& w) {
    s.get("alpha", w.alpha);
    s.get("beta", w.beta);
    s.get("gamma", w.gamma);
    s.get("mu", w.mu);
    s.get("sigma", w.sigma);
    s.get("tau", w.tau);
    s.get("theta", w.theta);
    s.get("lambda", w.lambda_smooth);
}

void read_ablation(Section& s, AblationSwitches& a) {
    s.get("use_pmg", a.use_pmg);
    s.get("use_smg", a.use_smg);
    s.get("use_ncut", a.use_ncut);
    s.get("use_kl", a.use_kl);
    s.get("use_recon", a.use_recon);
    s.get("use_orthogonality", a.use_orthogonality);
}

} // namespace

const char* to_string(TargetStrategy s) noexcept { return s == TargetStrategy::Ot ? "ot" : "sdcn"; }

void RunConfig::check() const {
    weights.check();
    optimizer.check();
    if (pretrain_epochs < 1 || train_epochs < 1) bad("pretrain_epochs and train_epochs must be >= 1");
    if (target_refresh_every < 1) bad("target_refresh_every must be >= 1");
    if (k && *k < 1) bad("k must be positive");
    if (layers.empty()) bad("layers must name at least the latent width");
    for (auto w : layers)
        if (w < 1) bad("layer widths must be positive");
    if (ablation.use_ncut && !ablation.use_pmg && !ablation.use_smg)
        bad("use_ncut needs at least one of use_pmg / use_smg");
    if (!(sinkhorn.tol > 0.0) || sinkhorn.max_iter < 1) bad("sinkhorn tol and max_iter must be positive");
    if (!(pi_floor > 0.0 && pi_floor < 1.0)) bad("pi_floor must lie in (0, 1)");
    if (kmeans.restarts < 1 || kmeans.max_iter < 1) bad("kmeans restarts and max_iter must be >= 1");
    if (threads < 1) bad("threads must be >= 1");
    if (preprocess_enabled && preprocess.do_library_normalize && !(preprocess.target_sum > 0.0))
        bad("preprocess.target_sum must be positive");
}

LossWeights RunConfig::effective_weights() const {
    LossWeights w = weights;
    if (!ablation.use_recon) w.mu = 0.0;
    if (!ablation.use_kl) w.tau = 0.0;
    if (!ablation.use_orthogonality) w.gamma = 0.0;
    if (!ablation.use_ncut || (!ablation.use_pmg && !ablation.use_smg)) w.sigma = 0.0;
    else if (!ablation.use_pmg) w.alpha = 0.0;
    else if (!ablation.use_smg) w.alpha = 1.0;
    return w;
}

json to_json(const RunConfig& c) {
    json j;
    j["preprocess"] = {{"enabled", c.preprocess_enabled},
                       {"do_library_normalize", c.preprocess.do_library_normalize},
                       {"target_sum", c.preprocess.target_sum},
                       {"do_log1p", c.preprocess.do_log1p},
                       {"hvg_count", c.preprocess.hvg_count ? json(*c.preprocess.hvg_count) : json(nullptr)},
                       {"min_cells_per_gene", c.preprocess.min_cells_per_gene}};
    const LossWeights& w = c.weights;
    j["weights"] = {{"alpha", w.alpha}, {"beta", w.beta},   {"gamma", w.gamma}, {"mu", w.mu},
                    {"sigma", w.sigma}, {"tau", w.tau},     {"theta", w.theta}, {"lambda", w.lambda_smooth}};
    j["k"] = c.k ? json(*c.k) : json("from-labels");
    j["layers"] = c.layers;
    j["pretrain_epochs"] = c.pretrain_epochs;
    j["train_epochs"] = c.train_epochs;
    j["seed"] = c.seed;
    j["optimizer"] = {{"lr", c.optimizer.lr},
                      {"beta1", c.optimizer.beta1},
                      {"beta2", c.optimizer.beta2},
                      {"epsilon", c.optimizer.epsilon},
                      {"weight_decay", c.optimizer.weight_decay}};
    j["sinkhorn"] = {{"tol", c.sinkhorn.tol},
                     {"max_iter", c.sinkhorn.max_iter},
                     {"allow_log_domain", c.sinkhorn.allow_log_domain},
                     {"require_convergence", c.sinkhorn.require_convergence}};
    j["target_strategy"] = to_string(c.target_strategy);
    const AblationSwitches& a = c.ablation;
    j["ablation"] = {{"use_pmg", a.use_pmg},   {"use_smg", a.use_smg},     {"use_ncut", a.use_ncut},
                     {"use_kl", a.use_kl},     {"use_recon", a.use_recon}, {"use_orthogonality", a.use_orthogonality}};
    j["target_refresh_every"] = c.target_refresh_every;
    j["sequential_phase2"] = c.sequential_phase2;
    j["strict_sequential"] = c.strict_sequential;
    j["threads"] = c.threads;
    j["pi_floor"] = c.pi_floor;
    j["kmeans"] = {{"restarts", c.kmeans.restarts}, {"max_iter", c.kmeans.max_iter}, {"tol", c.kmeans.tol}};
    j["graph"] = {{"sparsify_top_k", c.graph.sparsify_top_k ? json(*c.graph.sparsify_top_k) : json(nullptr)},
                  {"repair_isolated", c.graph.repair_isolated},
                  {"repair_weight", c.graph.repair_weight}};
    j["output_dir"] = c.output_dir;
    return j;
}

RunConfig config_from_json(const json& j, RunConfig cfg) {
    Section top(j, "");
    if (const json* v = top.find("preprocess")) {
        Section s(*v, "preprocess");
        read_preprocess(s, cfg);
        s.finish();
    }
    if (const json* v = top.find("weights")) {
        Section s(*v, "weights");
        read_weights(s, cfg.weights);
        s.finish();
    }
    if (const json* v = top.find("k")) {
        if (v->is_string() && (*v == "from-labels" || *v == "auto")) cfg.k.reset();
        else if (v->is_number_integer() && v->get<long long>() > 0) cfg.k = v->get<std::size_t>();
        else bad("'k' must be a positive integer or \"from-labels\"");
    }
    if (const json* v = top.find("layers")) {
        if (!v->is_array() || v->empty()) bad("'layers' must be a nonempty array");
        cfg.layers.clear();
        for (const auto& e : *v) {
            if (!e.is_number_integer() || e.get<long long>() < 1) bad("'layers' entries must be positive integers");
            cfg.layers.push_back(e.get<std::size_t>());
        }
    }
    top.get_count("pretrain_epochs", cfg.pretrain_epochs);
    top.get_count("train_epochs", cfg.train_epochs);
    top.get("seed", cfg.seed);
    if (const json* v = top.find("optimizer")) {
        Section s(*v, "optimizer");
        s.get("lr", cfg.optimizer.lr);
        s.get("beta1", cfg.optimizer.beta1);
        s.get("beta2", cfg.optimizer.beta2);
        s.get("epsilon", cfg.optimizer.epsilon);
        s.get("weight_decay", cfg.optimizer.weight_decay);
        s.finish();
    }
    if (const json* v = top.find("sinkhorn")) {
        Section s(*v, "sinkhorn");
        s.get("tol", cfg.sinkhorn.tol);
        s.get_count("max_iter", cfg.sinkhorn.max_iter);
        s.get("allow_log_domain", cfg.sinkhorn.allow_log_domain);
        s.get("require_convergence", cfg.sinkhorn.require_convergence);
        // Accepted here too for convenience; stored with the loss weights.
        s.get("lambda", cfg.weights.lambda_smooth);
        s.finish();
    }
    if (const json* v = top.find("target_strategy")) {
        if (*v == "ot") cfg.target_strategy = TargetStrategy::Ot;
        else if (*v == "sdcn") cfg.target_strategy = TargetStrategy::Sdcn;
        else bad("'target_strategy' must be \"ot\" or \"sdcn\"");
    }
    if (const json* v = top.find("ablation")) {
        Section s(*v, "ablation");
        read_ablation(s, cfg.ablation);
        s.finish();
    }
    top.get_count("target_refresh_every", cfg.target_refresh_every);
    top.get("sequential_phase2", cfg.sequential_phase2);
    top.get("strict_sequential", cfg.strict_sequential);
    top.get_count("threads", cfg.threads);
    top.get("pi_floor", cfg.pi_floor);
    if (const json* v = top.find("kmeans")) {
        Section s(*v, "kmeans");
        s.get_count("restarts", cfg.kmeans.restarts);
        s.get_count("max_iter", cfg.kmeans.max_iter);
        s.get("tol", cfg.kmeans.tol);
        s.finish();
    }
    if (const json* v = top.find("graph")) {
        Section s(*v, "graph");
        if (const json* t = s.find("sparsify_top_k")) {
            if (t->is_null()) cfg.graph.sparsify_top_k.reset();
            else if (t->is_number_integer() && t->get<long long>() > 0) cfg.graph.sparsify_top_k = t->get<std::size_t>();
            else bad("'graph.sparsify_top_k' must be a positive integer or null");
        }
        s.get("repair_isolated", cfg.graph.repair_isolated);
        s.get("repair_weight", cfg.graph.repair_weight);
        s.finish();
    }
    top.get("output_dir", cfg.output_dir);
    top.finish();
    cfg.kmeans.pi_floor = cfg.pi_floor;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in = csv::open_input(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        bad("cannot parse " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void write_config(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out = csv::open_output(path);
    out << to_json(cfg).dump(2) << '\n';
}

} // namespace cdcg
