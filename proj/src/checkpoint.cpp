#include "cdcg/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cdcg/csv.hpp"
#include "cdcg/error.hpp"

namespace cdcg {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'C', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put_le(std::ostream& out, U v) {
    std::array<char, sizeof(U)> buf;
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf.data(), buf.size());
}

void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

void put_f64s(std::ostream& out, std::span<const double> v) {
    for (double x : v) put_f64(out, x);
}

void put_moment(std::ostream& out, const std::vector<std::vector<double>>& moments, std::size_t block,
                std::size_t size) {
    if (block < moments.size()) {
        require_shape(moments[block].size() == size, "checkpoint: moment buffer size mismatch");
        put_f64s(out, moments[block]);
    } else {
        for (std::size_t i = 0; i < size; ++i) put_f64(out, 0.0);
    }
}

template <typename U>
U get_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> buf;
    if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size()))
        throw_error(ErrorKind::Parse, "checkpoint is truncated");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void get_f64s(std::istream& in, std::span<double> v) {
    for (double& x : v) x = get_f64(in);
}

} // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    const auto& layers = ckpt.model.layers;
    const auto& opt = ckpt.optimizer;
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(layers.size()));
    for (const auto& l : layers) {
        put_u32(out, static_cast<std::uint32_t>(l.weight.rows()));
        put_u32(out, static_cast<std::uint32_t>(l.weight.cols()));
        put_f64s(out, l.weight.values());
        put_f64s(out, l.bias);
    }
    put_f64(out, opt.config.lr);
    put_f64(out, opt.config.beta1);
    put_f64(out, opt.config.beta2);
    put_f64(out, opt.config.epsilon);
    put_f64(out, opt.config.weight_decay);
    put_le<std::uint64_t>(out, opt.step_count);
    // Optimizer blocks are W0, b0, W1, b1, ..., then the centroids.
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::size_t w = layers[l].weight.size();
        const std::size_t b = layers[l].bias.size();
        put_moment(out, opt.first_moment, 2 * l, w);
        put_moment(out, opt.first_moment, 2 * l + 1, b);
        put_moment(out, opt.second_moment, 2 * l, w);
        put_moment(out, opt.second_moment, 2 * l + 1, b);
    }
    const std::size_t cblock = 2 * layers.size();
    put_u32(out, static_cast<std::uint32_t>(ckpt.centroids.rows()));
    put_u32(out, static_cast<std::uint32_t>(ckpt.centroids.cols()));
    put_f64s(out, ckpt.centroids.values());
    put_moment(out, opt.first_moment, cblock, ckpt.centroids.size());
    put_moment(out, opt.second_moment, cblock, ckpt.centroids.size());
    if (!out) throw_error(ErrorKind::Io, "checkpoint write failed");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    auto out = csv::open_output(path);
    write_checkpoint(out, ckpt);
}

Checkpoint read_checkpoint(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw_error(ErrorKind::Parse, "bad checkpoint magic");
    if (const auto v = get_u32(in); v != kVersion)
        throw_error(ErrorKind::Parse, "unsupported checkpoint version " + std::to_string(v));
    const std::uint32_t count = get_u32(in);
    if (count < 2 || count % 2 != 0) throw_error(ErrorKind::Parse, "checkpoint layer count must be even and >= 2");

    Checkpoint ckpt;
    auto& model = ckpt.model;
    model.encoder_depth = count / 2;
    for (std::uint32_t l = 0; l < count; ++l) {
        const std::uint32_t rows = get_u32(in);
        const std::uint32_t cols = get_u32(in);
        DenseLayer layer{Matrix(rows, cols), std::vector<double>(cols), Activation::Relu};
        if (l + 1 == model.encoder_depth || l + 1 == count) layer.activation = Activation::Identity;
        get_f64s(in, layer.weight.values());
        get_f64s(in, layer.bias);
        model.layers.push_back(std::move(layer));
    }
    model.check();

    auto& opt = ckpt.optimizer;
    opt.config.lr = get_f64(in);
    opt.config.beta1 = get_f64(in);
    opt.config.beta2 = get_f64(in);
    opt.config.epsilon = get_f64(in);
    opt.config.weight_decay = get_f64(in);
    opt.step_count = get_le<std::uint64_t>(in);
    for (const auto& l : model.layers) {
        std::vector<double> mw(l.weight.size()), mb(l.bias.size()), vw(l.weight.size()), vb(l.bias.size());
        get_f64s(in, mw);
        get_f64s(in, mb);
        get_f64s(in, vw);
        get_f64s(in, vb);
        opt.first_moment.push_back(std::move(mw));
        opt.first_moment.push_back(std::move(mb));
        opt.second_moment.push_back(std::move(vw));
        opt.second_moment.push_back(std::move(vb));
    }
    const std::uint32_t k = get_u32(in);
    const std::uint32_t d = get_u32(in);
    ckpt.centroids = Matrix(k, d);
    get_f64s(in, ckpt.centroids.values());
    if (k * d > 0) {
        std::vector<double> mc(static_cast<std::size_t>(k) * d), vc(static_cast<std::size_t>(k) * d);
        get_f64s(in, mc);
        get_f64s(in, vc);
        opt.first_moment.push_back(std::move(mc));
        opt.second_moment.push_back(std::move(vc));
    }
    return ckpt;
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorKind::Io, "cannot open " + path.string());
    return read_checkpoint(in);
}

} // namespace cdcg
