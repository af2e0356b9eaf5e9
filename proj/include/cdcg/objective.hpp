#pragma once

// The three training losses and their gradients:
//
//   L_res  = 1/(2N) ||X - X_hat||_F^2
//   L_NCut = beta * tr(H^T L_mix H) + gamma * ||H^T H - I||_F^2,
//            L_mix = alpha L_C + (1 - alpha) L_S
//   L_KL   = sum_ij P_ij log(P_ij / Q_ij)           (P held fixed)
//   L      = mu L_res + sigma L_NCut + tau L_KL
//
// The orthogonality penalty is squared so it stays smooth at its minimum.
// sigma multiplies a term that already carries beta and gamma, so the
// effective trace and orthogonality weights are sigma*beta and sigma*gamma.

#include "cdcg/graph.hpp"
#include "cdcg/matrix.hpp"

namespace cdcg {

struct LossWeights {
    double alpha = 0.5;  // L_C vs L_S balance
    double beta = 1e-3;  // trace term
    double gamma = 1e-6; // orthogonality term
    double mu = 1.0;     // reconstruction
    double sigma = 1.0;  // NCut
    double tau = 1.0;    // KL
    double theta = 1.0;  // Student-t degrees of freedom
    double lambda_smooth = 5.0;

    /// Throws ConfigError on an out-of-range weight.
    void check() const;
};

struct LossGrad {
    double value = 0.0;
    Matrix grad;
};

struct NcutLossParts {
    double value = 0.0;
    double trace_term = 0.0;  // beta * tr(H^T L H)
    double orth_term = 0.0;   // gamma * ||H^T H - I||_F^2
    Matrix grad;              // w.r.t. H
};

/// Gradient is with respect to x_hat.
LossGrad recon_loss(const Matrix& x, const Matrix& x_hat);

NcutLossParts ncut_loss(const Matrix& h, const Matrix& l_mix, double beta, double gamma);
NcutLossParts ncut_loss(const Matrix& h, const GraphPair& g, const LossWeights& w);

/// Rows of both inputs must sum to 1 within 1e-6 (NotStochastic otherwise).
/// Q is clamped below at 1e-30. Gradient is with respect to Q.
LossGrad kl_loss(const Matrix& p_hat, const Matrix& q);

double total_loss(double l_res, double l_ncut, double l_kl, const LossWeights& w);

void require_row_stochastic(const Matrix& m, const char* what, double tol = 1e-6);

} // namespace cdcg
