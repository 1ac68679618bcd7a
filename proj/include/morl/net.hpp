#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "morl/common.hpp"

namespace morl {

// Activation scheme for a whole network.
//   ReluLinear: ReLU on hidden layers, identity on the output layer
//               (value regression heads).
//   SigmoidAll: sigmoid on every layer including output (reconstruction
//               heads whose inputs live in [0,1]).
enum class Activation : std::uint32_t { ReluLinear = 0, SigmoidAll = 1 };

struct LayerShape {
    std::vector<int> sizes;  // input dim, hidden dims..., output dim
    Activation act = Activation::ReluLinear;

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
    std::size_t param_count() const;
    bool operator==(const LayerShape&) const = default;
};

// Flat parameter record: all weight matrices (layer-major, each row-major
// out x in), then all bias vectors (layer-major).
struct MlpParams {
    LayerShape shape;
    std::vector<double> theta;

    std::size_t weight_offset(int layer) const;
    std::size_t bias_offset(int layer) const;
};

// Seeded initialization: He-uniform for ReluLinear nets, Xavier-uniform for
// SigmoidAll nets. Biases start at zero.
MlpParams init_mlp(const LayerShape& shape, std::uint64_t seed);

std::vector<double> forward(const MlpParams& params, std::span<const double> x);

// Gradient of grad_out . forward(params, x) with respect to theta.
std::vector<double> backward(const MlpParams& params, std::span<const double> x,
                             std::span<const double> grad_out);

// Same, but adds the gradient into grad_accum (batch accumulation without
// reallocating).
void backward_accum(const MlpParams& params, std::span<const double> x,
                    std::span<const double> grad_out, std::vector<double>& grad_accum);

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam(std::size_t n_params, double lr);

// One bias-corrected Adam update in place; increments t by exactly 1.
void adam_step(MlpParams& params, AdamState& adam, std::span<const double> grad);

// loss = mean((pred - target)^2), grad = d loss / d pred.
std::pair<double, std::vector<double>> mse_loss_grad(std::span<const double> pred,
                                                     std::span<const double> target);

// Binary checkpoint: shape header followed by theta as little-endian f64.
// Byte layout documented in docs/formats.md.
void save_params(const MlpParams& params, const std::string& path);
MlpParams load_params(const std::string& path);

// FNV-1a over the raw theta bytes; used to assert parameter identity.
std::uint64_t params_hash(const MlpParams& params);

}  // namespace morl
