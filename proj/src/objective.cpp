#include "cdcg/objective.hpp"

#include <algorithm>
#include <cmath>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"

namespace cdcg {

namespace {

constexpr double kProbFloor = 1e-30;

} // namespace

void LossWeights::check() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw_error(ErrorKind::Config, "alpha must lie in [0, 1]");
    for (double v : {beta, gamma, mu, sigma, tau})
        if (!(v >= 0.0)) throw_error(ErrorKind::Config, "loss weights must be nonnegative");
    if (!(theta > 0.0)) throw_error(ErrorKind::Config, "theta must be positive");
    if (!(lambda_smooth > 0.0)) throw_error(ErrorKind::Config, "lambda_smooth must be positive");
}

void require_row_stochastic(const Matrix& m, const char* what, double tol) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (double v : m.row(i)) {
            if (!(v >= 0.0)) throw_error(ErrorKind::NotStochastic, std::string(what) + " has a negative or NaN entry");
            s += v;
        }
        if (std::abs(s - 1.0) > tol)
            throw_error(ErrorKind::NotStochastic, std::string(what) + " row " + std::to_string(i) + " sums to " +
                                                      std::to_string(s));
    }
}

LossGrad recon_loss(const Matrix& x, const Matrix& x_hat) {
    require_shape(x.rows() == x_hat.rows() && x.cols() == x_hat.cols(), "recon_loss: shape mismatch");
    const double n = static_cast<double>(x.rows());
    LossGrad out{0.0, Matrix(x.rows(), x.cols())};
    const auto a = x.values();
    const auto b = x_hat.values();
    auto g = out.grad.values();
    double ss = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = b[k] - a[k];
        ss += d * d;
        g[k] = d / n;
    }
    out.value = ss / (2.0 * n);
    return out;
}

NcutLossParts ncut_loss(const Matrix& h, const Matrix& l_mix, double beta, double gamma) {
    require_shape(l_mix.rows() == h.rows() && l_mix.cols() == h.rows(), "ncut_loss: Laplacian must be n x n");
    NcutLossParts out;
    out.grad = Matrix(h.rows(), h.cols());
    if (beta != 0.0) {
        const Matrix lh = linalg::matmul(l_mix, h);
        out.trace_term = beta * linalg::frobenius_dot(h, lh);
        linalg::add_scaled(out.grad, 2.0 * beta, lh);
    }
    if (gamma != 0.0) {
        Matrix gram = linalg::matmul_tn(h, h);
        for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;
        out.orth_term = gamma * linalg::frobenius_dot(gram, gram);
        linalg::add_scaled(out.grad, 4.0 * gamma, linalg::matmul(h, gram));
    }
    out.value = out.trace_term + out.orth_term;
    return out;
}

NcutLossParts ncut_loss(const Matrix& h, const GraphPair& g, const LossWeights& w) {
    return ncut_loss(h, mixed_laplacian(g, w.alpha), w.beta, w.gamma);
}

LossGrad kl_loss(const Matrix& p_hat, const Matrix& q) {
    require_shape(p_hat.rows() == q.rows() && p_hat.cols() == q.cols(), "kl_loss: shape mismatch");
    require_row_stochastic(p_hat, "kl_loss target");
    require_row_stochastic(q, "kl_loss assignment");
    LossGrad out{0.0, Matrix(q.rows(), q.cols())};
    const auto p = p_hat.values();
    const auto qv = q.values();
    auto g = out.grad.values();
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double qk = std::max(qv[k], kProbFloor);
        if (p[k] > 0.0) s += p[k] * std::log(std::max(p[k], kProbFloor) / qk);
        g[k] = -p[k] / qk;
    }
    out.value = s;
    return out;
}

double total_loss(double l_res, double l_ncut, double l_kl, const LossWeights& w) {
    return w.mu * l_res + w.sigma * l_ncut + w.tau * l_kl;
}

} // namespace cdcg
