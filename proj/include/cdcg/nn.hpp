#pragma once

// Fully connected autoencoder with hand-written backpropagation.
//
// Rows are samples: a layer maps A (n x in) to act(A W + 1 b^T) with W stored
// in x out. Hidden layers use relu; the latent and reconstruction layers are
// linear.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cdcg/matrix.hpp"
#include "cdcg/rng.hpp"

namespace cdcg {

enum class Activation { Identity, Relu };

struct DenseLayer {
    Matrix weight;             // in x out
    std::vector<double> bias;  // out
    Activation activation = Activation::Identity;

    std::size_t in_dim() const noexcept { return weight.rows(); }
    std::size_t out_dim() const noexcept { return weight.cols(); }
};

struct AutoencoderState {
    /// Encoder layers first, then decoder layers.
    std::vector<DenseLayer> layers;
    std::size_t encoder_depth = 0;

    /// Mirrored MLP: input -> widths... -> latent -> ...widths -> input.
    /// Weights uniform(-a, a), a = sqrt(6 / (fan_in + fan_out)); biases zero.
    static AutoencoderState create(std::size_t input_dim, std::span<const std::size_t> encoder_widths, Rng& rng);

    std::size_t input_dim() const noexcept { return layers.front().in_dim(); }
    std::size_t latent_dim() const noexcept { return layers[encoder_depth - 1].out_dim(); }
    std::size_t output_dim() const noexcept { return layers.back().out_dim(); }
    std::size_t parameter_count() const noexcept;

    /// Throws ShapeMismatch if consecutive layers do not chain.
    void check() const;
};

struct ForwardCache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
    Matrix h;
    Matrix x_hat;
};

Matrix encode(const AutoencoderState& ae, const Matrix& x);
Matrix decode(const AutoencoderState& ae, const Matrix& h);
ForwardCache forward(const AutoencoderState& ae, const Matrix& x);

/// Parameter gradients, same layer order as AutoencoderState::layers.
struct AutoencoderGradients {
    std::vector<Matrix> weight;
    std::vector<std::vector<double>> bias;

    static AutoencoderGradients zeros_like(const AutoencoderState& ae);
};

/// Backpropagates upstream gradients on the latent H and the reconstruction.
/// An empty matrix stands for a zero upstream gradient.
AutoencoderGradients backward(const AutoencoderState& ae, const ForwardCache& cache, const Matrix& d_h,
                              const Matrix& d_xhat);

/// A named view over one parameter tensor and its gradient.
struct ParamBlock {
    std::string name;
    std::span<double> value;
    std::span<const double> grad;
};

/// W0, b0, W1, b1, ... in layer order.
std::vector<ParamBlock> param_blocks(AutoencoderState& ae, const AutoencoderGradients& grads);

} // namespace cdcg
