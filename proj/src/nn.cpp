#include "cdcg/nn.hpp"

#include <cmath>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"

namespace cdcg {

namespace {

DenseLayer make_layer(std::size_t in, std::size_t out, Activation act, Rng& rng) {
    DenseLayer layer{Matrix(in, out), std::vector<double>(out, 0.0), act};
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& w : layer.weight.values()) w = dist(rng);
    return layer;
}

Matrix apply_layer(const DenseLayer& layer, const Matrix& a, Matrix* pre_out) {
    Matrix z = linalg::matmul(a, layer.weight);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        auto r = z.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += layer.bias[j];
    }
    if (pre_out) *pre_out = z;
    if (layer.activation == Activation::Relu) {
        for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
    }
    return z;
}

} // namespace

AutoencoderState AutoencoderState::create(std::size_t input_dim, std::span<const std::size_t> encoder_widths,
                                          Rng& rng) {
    if (input_dim == 0 || encoder_widths.empty()) throw_error(ErrorKind::Config, "autoencoder needs at least one layer");
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), encoder_widths.begin(), encoder_widths.end());
    for (std::size_t d : dims)
        if (d == 0) throw_error(ErrorKind::Config, "layer widths must be positive");

    AutoencoderState ae;
    const std::size_t depth = encoder_widths.size();
    ae.encoder_depth = depth;
    for (std::size_t l = 0; l < depth; ++l)
        ae.layers.push_back(
            make_layer(dims[l], dims[l + 1], l + 1 == depth ? Activation::Identity : Activation::Relu, rng));
    for (std::size_t l = depth; l > 0; --l)
        ae.layers.push_back(make_layer(dims[l], dims[l - 1], l == 1 ? Activation::Identity : Activation::Relu, rng));
    return ae;
}

std::size_t AutoencoderState::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

void AutoencoderState::check() const {
    require_shape(encoder_depth >= 1 && encoder_depth < layers.size(), "autoencoder needs encoder and decoder layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        require_shape(layers[l].bias.size() == layers[l].out_dim(), "layer bias length mismatch");
        if (l > 0) require_shape(layers[l - 1].out_dim() == layers[l].in_dim(), "layers do not chain");
    }
    require_shape(output_dim() == input_dim(), "decoder output width must equal input width");
}

Matrix encode(const AutoencoderState& ae, const Matrix& x) {
    require_shape(x.cols() == ae.input_dim(), "encode: input has " + std::to_string(x.cols()) + " columns, expected " +
                                                  std::to_string(ae.input_dim()));
    Matrix a = x;
    for (std::size_t l = 0; l < ae.encoder_depth; ++l) a = apply_layer(ae.layers[l], a, nullptr);
    return a;
}

Matrix decode(const AutoencoderState& ae, const Matrix& h) {
    require_shape(h.cols() == ae.latent_dim(), "decode: latent width mismatch");
    Matrix a = h;
    for (std::size_t l = ae.encoder_depth; l < ae.layers.size(); ++l) a = apply_layer(ae.layers[l], a, nullptr);
    return a;
}

ForwardCache forward(const AutoencoderState& ae, const Matrix& x) {
    require_shape(x.cols() == ae.input_dim(), "forward: input width mismatch");
    ForwardCache cache;
    const std::size_t depth = ae.layers.size();
    cache.inputs.resize(depth);
    cache.pre.resize(depth);
    Matrix a = x;
    for (std::size_t l = 0; l < depth; ++l) {
        cache.inputs[l] = a;
        a = apply_layer(ae.layers[l], a, &cache.pre[l]);
        if (l + 1 == ae.encoder_depth) cache.h = a;
    }
    cache.x_hat = std::move(a);
    return cache;
}

AutoencoderGradients AutoencoderGradients::zeros_like(const AutoencoderState& ae) {
    AutoencoderGradients g;
    for (const auto& l : ae.layers) {
        g.weight.emplace_back(l.weight.rows(), l.weight.cols());
        g.bias.emplace_back(l.bias.size(), 0.0);
    }
    return g;
}

AutoencoderGradients backward(const AutoencoderState& ae, const ForwardCache& cache, const Matrix& d_h,
                              const Matrix& d_xhat) {
    const std::size_t n = cache.inputs.front().rows();
    if (!d_h.empty()) require_shape(d_h.rows() == n && d_h.cols() == ae.latent_dim(), "backward: d_h shape mismatch");
    if (!d_xhat.empty())
        require_shape(d_xhat.rows() == n && d_xhat.cols() == ae.output_dim(), "backward: d_xhat shape mismatch");

    AutoencoderGradients g;
    g.weight.resize(ae.layers.size());
    g.bias.resize(ae.layers.size());

    Matrix upstream = d_xhat.empty() ? Matrix(n, ae.output_dim()) : d_xhat;
    for (std::size_t l = ae.layers.size(); l-- > 0;) {
        const DenseLayer& layer = ae.layers[l];
        if (l + 1 == ae.encoder_depth && !d_h.empty()) linalg::add_scaled(upstream, 1.0, d_h);
        Matrix& dz = upstream;
        if (layer.activation == Activation::Relu) {
            const auto pre = cache.pre[l].values();
            auto dv = dz.values();
            for (std::size_t k = 0; k < dv.size(); ++k)
                if (!(pre[k] > 0.0)) dv[k] = 0.0;
        }
        g.weight[l] = linalg::matmul_tn(cache.inputs[l], dz);
        g.bias[l] = linalg::column_sums(dz);
        if (l > 0) upstream = linalg::matmul_nt(dz, layer.weight);
    }
    return g;
}

std::vector<ParamBlock> param_blocks(AutoencoderState& ae, const AutoencoderGradients& grads) {
    require_shape(grads.weight.size() == ae.layers.size(), "param_blocks: gradient layer count mismatch");
    std::vector<ParamBlock> blocks;
    for (std::size_t l = 0; l < ae.layers.size(); ++l) {
        blocks.push_back({"W" + std::to_string(l), ae.layers[l].weight.values(), grads.weight[l].values()});
        blocks.push_back({"b" + std::to_string(l), ae.layers[l].bias, grads.bias[l]});
    }
    return blocks;
}

} // namespace cdcg
