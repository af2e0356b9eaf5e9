#pragma once

// Binary checkpoint, little-endian throughout:
//
//   "SCDC"  u32 version = 1  u32 layer_count
//   per layer:  u32 rows  u32 cols  f64 weights[rows*cols] (row-major)  f64 bias[cols]
//   f64 lr  f64 beta1  f64 beta2  f64 epsilon  f64 weight_decay  u64 step_count
//   per layer:  f64 m_weights[]  f64 m_bias[]  f64 v_weights[]  f64 v_bias[]
//   u32 k  u32 d  f64 centroids[k*d]  f64 m_centroids[]  f64 v_centroids[]
//
// Moment buffers are written as zeros before the first optimizer step. The
// trailing centroid section has k = d = 0 when no centroids are stored.
// Layer activations are implied: the first half of the layers is the encoder,
// the latent and output layers are linear, every other layer is relu.

#include <filesystem>
#include <iosfwd>

#include "cdcg/adam.hpp"
#include "cdcg/matrix.hpp"
#include "cdcg/nn.hpp"

namespace cdcg {

struct Checkpoint {
    AutoencoderState model;
    AdamState optimizer;
    Matrix centroids;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws ParseError on a bad magic, version, or truncated stream.
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint(const std::filesystem::path& path);

} // namespace cdcg
