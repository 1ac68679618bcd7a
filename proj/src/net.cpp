#include "morl/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace morl {

namespace {

void check_shape(const LayerShape& shape) {
    if (shape.sizes.size() < 2)
        throw std::invalid_argument("LayerShape needs at least input and output sizes");
    for (int s : shape.sizes)
        if (s < 1) throw std::invalid_argument("LayerShape sizes must be >= 1");
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::size_t LayerShape::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
        n += static_cast<std::size_t>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
    return n;
}

std::size_t MlpParams::weight_offset(int layer) const {
    std::size_t off = 0;
    for (int l = 0; l < layer; ++l)
        off += static_cast<std::size_t>(shape.sizes[l]) * shape.sizes[l + 1];
    return off;
}

std::size_t MlpParams::bias_offset(int layer) const {
    std::size_t off = 0;
    for (int l = 0; l + 1 < static_cast<int>(shape.sizes.size()); ++l)
        off += static_cast<std::size_t>(shape.sizes[l]) * shape.sizes[l + 1];
    for (int l = 0; l < layer; ++l) off += shape.sizes[l + 1];
    return off;
}

MlpParams init_mlp(const LayerShape& shape, std::uint64_t seed) {
    check_shape(shape);
    MlpParams p;
    p.shape = shape;
    p.theta.assign(shape.param_count(), 0.0);
    Rng rng(seed);
    for (int l = 0; l < shape.num_layers(); ++l) {
        const int fan_in = shape.sizes[l];
        const int fan_out = shape.sizes[l + 1];
        const double limit = shape.act == Activation::ReluLinear
                                 ? std::sqrt(6.0 / fan_in)
                                 : std::sqrt(6.0 / (fan_in + fan_out));
        double* w = p.theta.data() + p.weight_offset(l);
        for (int i = 0; i < fan_out * fan_in; ++i) w[i] = uniform_real(rng, -limit, limit);
        // biases stay zero
    }
    return p;
}

std::vector<double> forward(const MlpParams& params, std::span<const double> x) {
    const LayerShape& s = params.shape;
    check_shape(s);
    if (static_cast<int>(x.size()) != s.input_dim())
        throw std::invalid_argument("forward: input length does not match network input dim");

    std::vector<double> a(x.begin(), x.end());
    std::vector<double> z;
    for (int l = 0; l < s.num_layers(); ++l) {
        const int n_in = s.sizes[l];
        const int n_out = s.sizes[l + 1];
        const double* w = params.theta.data() + params.weight_offset(l);
        const double* b = params.theta.data() + params.bias_offset(l);
        z.assign(n_out, 0.0);
        for (int o = 0; o < n_out; ++o) {
            double acc = b[o];
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        const bool last = (l == s.num_layers() - 1);
        if (s.act == Activation::SigmoidAll) {
            for (double& v : z) v = sigmoid(v);
        } else if (!last) {
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        }
        a.swap(z);
    }
    return a;
}

void backward_accum(const MlpParams& params, std::span<const double> x,
                    std::span<const double> grad_out, std::vector<double>& grad_accum) {
    const LayerShape& s = params.shape;
    check_shape(s);
    if (static_cast<int>(x.size()) != s.input_dim())
        throw std::invalid_argument("backward: input length does not match network input dim");
    if (static_cast<int>(grad_out.size()) != s.output_dim())
        throw std::invalid_argument("backward: cotangent length does not match output dim");
    for (double v : x)
        if (!std::isfinite(v)) throw NumericError("backward: non-finite input");
    for (double v : grad_out)
        if (!std::isfinite(v)) throw NumericError("backward: non-finite cotangent");
    if (grad_accum.size() != params.theta.size())
        grad_accum.assign(params.theta.size(), 0.0);

    const int L = s.num_layers();
    // forward trace: activations per layer (post-activation), a[0] = input
    std::vector<std::vector<double>> acts(L + 1);
    acts[0].assign(x.begin(), x.end());
    for (int l = 0; l < L; ++l) {
        const int n_in = s.sizes[l];
        const int n_out = s.sizes[l + 1];
        const double* w = params.theta.data() + params.weight_offset(l);
        const double* b = params.theta.data() + params.bias_offset(l);
        acts[l + 1].assign(n_out, 0.0);
        for (int o = 0; o < n_out; ++o) {
            double acc = b[o];
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) acc += row[i] * acts[l][i];
            const bool last = (l == L - 1);
            if (s.act == Activation::SigmoidAll)
                acc = sigmoid(acc);
            else if (!last)
                acc = acc > 0.0 ? acc : 0.0;
            acts[l + 1][o] = acc;
        }
    }

    // delta = dL/dz for the current layer, walking backwards
    std::vector<double> delta(grad_out.begin(), grad_out.end());
    for (int o = 0; o < s.sizes[L]; ++o) {
        if (s.act == Activation::SigmoidAll) {
            const double y = acts[L][o];
            delta[o] *= y * (1.0 - y);
        }
        // ReluLinear output layer is linear: delta unchanged
    }
    for (int l = L - 1; l >= 0; --l) {
        const int n_in = s.sizes[l];
        const int n_out = s.sizes[l + 1];
        const double* w = params.theta.data() + params.weight_offset(l);
        double* gw = grad_accum.data() + params.weight_offset(l);
        double* gb = grad_accum.data() + params.bias_offset(l);
        for (int o = 0; o < n_out; ++o) {
            const double d = delta[o];
            gb[o] += d;
            double* grow = gw + static_cast<std::size_t>(o) * n_in;
            const double* arow = acts[l].data();
            for (int i = 0; i < n_in; ++i) grow[i] += d * arow[i];
        }
        if (l == 0) break;
        std::vector<double> prev(n_in, 0.0);
        for (int o = 0; o < n_out; ++o) {
            const double d = delta[o];
            const double* row = w + static_cast<std::size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) prev[i] += d * row[i];
        }
        for (int i = 0; i < n_in; ++i) {
            const double y = acts[l][i];
            if (s.act == Activation::SigmoidAll)
                prev[i] *= y * (1.0 - y);
            else
                prev[i] *= y > 0.0 ? 1.0 : 0.0;
        }
        delta.swap(prev);
    }
}

std::vector<double> backward(const MlpParams& params, std::span<const double> x,
                             std::span<const double> grad_out) {
    std::vector<double> grad(params.theta.size(), 0.0);
    backward_accum(params, x, grad_out, grad);
    return grad;
}

AdamState make_adam(std::size_t n_params, double lr) {
    AdamState a;
    a.m.assign(n_params, 0.0);
    a.v.assign(n_params, 0.0);
    a.lr = lr;
    return a;
}

void adam_step(MlpParams& params, AdamState& adam, std::span<const double> grad) {
    if (grad.size() != params.theta.size() || adam.m.size() != params.theta.size())
        throw std::invalid_argument("adam_step: gradient/state length mismatch");
    adam.t += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.t));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i];
        adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * g;
        adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * g * g;
        const double mhat = adam.m[i] / bc1;
        const double vhat = adam.v[i] / bc2;
        params.theta[i] -= adam.lr * mhat / (std::sqrt(vhat) + adam.eps);
    }
}

std::pair<double, std::vector<double>> mse_loss_grad(std::span<const double> pred,
                                                     std::span<const double> target) {
    if (pred.empty()) throw std::invalid_argument("mse_loss_grad: empty input");
    if (pred.size() != target.size())
        throw std::invalid_argument("mse_loss_grad: length mismatch");
    const double n = static_cast<double>(pred.size());
    double loss = 0.0;
    std::vector<double> grad(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        loss += d * d;
        grad[i] = 2.0 * d / n;
    }
    return {loss / n, std::move(grad)};
}

namespace {

constexpr std::uint32_t kMagic = 0x314C504DU;  // "MLP1" little-endian

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::ifstream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError("checkpoint: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("checkpoint: truncated header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_params(const MlpParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    put_u32(out, kMagic);
    put_u32(out, static_cast<std::uint32_t>(params.shape.act));
    put_u32(out, static_cast<std::uint32_t>(params.shape.sizes.size()));
    for (int s : params.shape.sizes) put_u32(out, static_cast<std::uint32_t>(s));
    put_u64(out, params.theta.size());
    for (double d : params.theta) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        put_u64(out, bits);
    }
    if (!out) throw DataError("checkpoint write failed: " + path);
}

MlpParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    if (get_u32(in) != kMagic) throw DataError("checkpoint: bad magic in " + path);
    MlpParams p;
    const std::uint32_t act = get_u32(in);
    if (act > 1) throw DataError("checkpoint: unknown activation code");
    p.shape.act = static_cast<Activation>(act);
    const std::uint32_t n_sizes = get_u32(in);
    if (n_sizes < 2 || n_sizes > 64) throw DataError("checkpoint: implausible layer count");
    p.shape.sizes.resize(n_sizes);
    for (auto& s : p.shape.sizes) s = static_cast<int>(get_u32(in));
    const std::uint64_t n = get_u64(in);
    if (n != p.shape.param_count()) throw DataError("checkpoint: theta length does not match shape");
    p.theta.resize(n);
    for (auto& d : p.theta) {
        std::uint64_t bits = get_u64(in);
        std::memcpy(&d, &bits, 8);
        if (!std::isfinite(d)) throw DataError("checkpoint: non-finite parameter");
    }
    return p;
}

std::uint64_t params_hash(const MlpParams& params) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double d : params.theta) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace morl
