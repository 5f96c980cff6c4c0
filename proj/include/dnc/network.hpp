#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dnc/activations.hpp"
#include "dnc/linalg.hpp"
#include "dnc/pooling.hpp"

namespace dnc {

struct Layer {
    Mat weight;
    Vec bias;
    /// Filter mask when the weight is the Toeplitz matrix of a convolution.
    std::optional<Vec> mask;
};

/// Known limits of a layer sequence. `weight` is W* for bounded widths,
/// `mask` the limit filter for convolutional sequences. The bias limit is
/// zero-extended when compared against longer biases.
struct DeclaredLimits {
    std::optional<Mat> weight;
    std::optional<Vec> mask;
    Vec bias;
};

/// Lazily generated layers (W_n, b_n), n >= 1. Layers are produced in order
/// and cached; `layer(n)` is safe to call from several threads.
class LayerSeq {
public:
    using Generator = std::function<Layer(std::size_t n)>;

    LayerSeq(std::size_t input_dim, Generator generator, std::optional<std::size_t> width_bound = std::nullopt,
             std::optional<DeclaredLimits> limits = std::nullopt, std::optional<double> rate = std::nullopt);

    std::size_t input_dim() const noexcept;
    /// n >= 1. Throws std::invalid_argument naming the layer on a shape mismatch.
    const Layer& layer(std::size_t n) const;
    /// m_n; width(0) is the input dimension.
    std::size_t width(std::size_t n) const;
    /// Uniform bound l on the widths when they are bounded.
    std::optional<std::size_t> width_bound() const noexcept;
    const std::optional<DeclaredLimits>& limits() const noexcept;
    std::optional<double> rate() const noexcept;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Convolution masks w^(n) of fixed length tau + 1.
class MaskSeq {
public:
    using Generator = std::function<Vec(std::size_t n)>;

    MaskSeq(std::size_t tau, Generator generator, std::optional<Vec> limit = std::nullopt,
            std::optional<double> rate = std::nullopt);

    std::size_t tau() const noexcept { return tau_; }
    /// n >= 1; throws when the generator returns a mask of the wrong length.
    Vec mask(std::size_t n) const;
    const std::optional<Vec>& limit() const noexcept { return limit_; }
    std::optional<double> rate() const noexcept { return rate_; }

private:
    std::size_t tau_;
    Generator generator_;
    std::optional<Vec> limit_;
    std::optional<double> rate_;
};

/// Bias for layer n of width m_n.
using BiasSource = std::function<Vec(std::size_t n, std::size_t width)>;

/// CNN layers: m_n = s + n tau and W_n = toeplitz_from_mask(mask(n), m_{n-1}).
LayerSeq cnn_layer_seq(const MaskSeq& masks, BiasSource biases, std::size_t s,
                       std::optional<Vec> bias_limit = std::nullopt);

class NetworkKind {
public:
    enum class Kind { Plain, Pooled, Cnn };

    static NetworkKind plain() { return {Kind::Plain, PoolingOp::identity()}; }
    /// Layers must have W_n with bias dimension + mu rows.
    static NetworkKind pooled(PoolingOp op) { return {Kind::Pooled, op}; }
    /// Layers must carry masks; evaluation convolves instead of multiplying.
    static NetworkKind cnn() { return {Kind::Cnn, PoolingOp::identity()}; }

    Kind kind() const noexcept { return kind_; }
    const PoolingOp& pooling() const noexcept { return pool_; }

private:
    NetworkKind(Kind kind, PoolingOp pool) : kind_(kind), pool_(pool) {}
    Kind kind_;
    PoolingOp pool_;
};

enum class Padding { Zero, Constant };

/// Pre-activation of layer n before pooling: W_n y.
Vec layer_linear(const LayerSeq& seq, const NetworkKind& kind, std::size_t n, const Vec& y);
/// One step sigma(P(W_n y) + b_n).
Vec layer_step(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, std::size_t n, const Vec& y);

/// N_n(x), n >= 1.
Vec eval(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x, std::size_t n);
/// [x, N_1(x), ..., N_n(x)].
std::vector<Vec> trajectory(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x,
                            std::size_t n);

/// Extension of N_n(x) to a semi-infinite vector. Zero: zero-padded layers,
/// head N_n(x) and tail sigma(0). Constant: CNN layers constant-padded from
/// layer 2 on, with tail t_n = sigma((sum_k w_k^(n)) t_{n-1}) and t_1 = sigma(0).
EventuallyConstSeq eval_extended(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x,
                                 std::size_t n, Padding padding);
/// [x zero-extended, ext N_1(x), ..., ext N_n(x)].
std::vector<EventuallyConstSeq> trajectory_extended(const LayerSeq& seq, const NetworkKind& kind,
                                                    const Activation& act, const Vec& x, std::size_t n,
                                                    Padding padding);

/// (L P)^n prod_j ||W_j||_p, with interpolation bounds for general p.
double network_lipschitz_bound(const LayerSeq& seq, const Activation& act, const PoolingOp& pool, std::size_t n,
                               PNorm p);

}  // namespace dnc
