#include "dnc/network.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>

namespace dnc {

struct LayerSeq::Impl {
    std::size_t input_dim;
    Generator generator;
    std::optional<std::size_t> width_bound;
    std::optional<DeclaredLimits> limits;
    std::optional<double> rate;

    std::mutex mutex;
    std::deque<Layer> cache;  // cache[k] is layer k + 1; deque keeps references stable
};

LayerSeq::LayerSeq(std::size_t input_dim, Generator generator, std::optional<std::size_t> width_bound,
                   std::optional<DeclaredLimits> limits, std::optional<double> rate)
    : impl_(std::make_shared<Impl>())
{
    if (input_dim == 0) throw std::invalid_argument("LayerSeq: input dimension must be >= 1");
    if (!generator) throw std::invalid_argument("LayerSeq: missing generator");
    if (rate && !(*rate > 0.0 && *rate < 1.0)) throw std::invalid_argument("LayerSeq: rate must lie in (0,1)");
    impl_->input_dim = input_dim;
    impl_->generator = std::move(generator);
    impl_->width_bound = width_bound;
    impl_->limits = std::move(limits);
    impl_->rate = rate;
}

std::size_t LayerSeq::input_dim() const noexcept { return impl_->input_dim; }

const Layer& LayerSeq::layer(std::size_t n) const
{
    if (n == 0) throw std::invalid_argument("LayerSeq::layer: layers are numbered from 1");
    std::lock_guard lock(impl_->mutex);
    auto& cache = impl_->cache;
    while (cache.size() < n) {
        const std::size_t k = cache.size() + 1;
        Layer l = impl_->generator(k);
        const std::size_t prev = k == 1 ? impl_->input_dim : cache.back().bias.dim();
        if (l.weight.cols() != prev) {
            throw std::invalid_argument("layer " + std::to_string(k) + ": weight has " +
                                        std::to_string(l.weight.cols()) + " columns, previous width is " +
                                        std::to_string(prev));
        }
        if (l.mask) {
            if (l.weight.rows() != l.bias.dim()) {
                throw std::invalid_argument("layer " + std::to_string(k) + ": convolution output width " +
                                            std::to_string(l.weight.rows()) + " does not match bias dimension " +
                                            std::to_string(l.bias.dim()));
            }
        }
        if (impl_->width_bound && l.bias.dim() > *impl_->width_bound) {
            throw std::invalid_argument("layer " + std::to_string(k) + ": width " + std::to_string(l.bias.dim()) +
                                        " exceeds declared bound " + std::to_string(*impl_->width_bound));
        }
        cache.push_back(std::move(l));
    }
    return cache[n - 1];
}

std::size_t LayerSeq::width(std::size_t n) const { return n == 0 ? impl_->input_dim : layer(n).bias.dim(); }

std::optional<std::size_t> LayerSeq::width_bound() const noexcept { return impl_->width_bound; }

const std::optional<DeclaredLimits>& LayerSeq::limits() const noexcept { return impl_->limits; }

std::optional<double> LayerSeq::rate() const noexcept { return impl_->rate; }

MaskSeq::MaskSeq(std::size_t tau, Generator generator, std::optional<Vec> limit, std::optional<double> rate)
    : tau_(tau), generator_(std::move(generator)), limit_(std::move(limit)), rate_(rate)
{
    if (!generator_) throw std::invalid_argument("MaskSeq: missing generator");
    if (limit_ && limit_->dim() != tau + 1) throw std::invalid_argument("MaskSeq: limit mask has wrong length");
}

Vec MaskSeq::mask(std::size_t n) const
{
    if (n == 0) throw std::invalid_argument("MaskSeq::mask: masks are numbered from 1");
    Vec w = generator_(n);
    if (w.dim() != tau_ + 1) {
        throw std::invalid_argument("mask " + std::to_string(n) + ": length " + std::to_string(w.dim()) +
                                    ", expected " + std::to_string(tau_ + 1));
    }
    return w;
}

LayerSeq cnn_layer_seq(const MaskSeq& masks, BiasSource biases, std::size_t s, std::optional<Vec> bias_limit)
{
    if (!biases) throw std::invalid_argument("cnn_layer_seq: missing bias source");
    const std::size_t tau = masks.tau();
    auto gen = [masks, biases = std::move(biases), s, tau](std::size_t n) {
        const std::size_t in = s + (n - 1) * tau;
        const std::size_t out = in + tau;
        Vec w = masks.mask(n);
        Vec b = biases(n, out);
        if (b.dim() != out) {
            throw std::invalid_argument("layer " + std::to_string(n) + ": bias dimension " + std::to_string(b.dim()) +
                                        " does not match width " + std::to_string(out));
        }
        Mat dense = toeplitz_from_mask(w, in).to_dense();
        return Layer{std::move(dense), std::move(b), std::move(w)};
    };
    std::optional<DeclaredLimits> limits;
    if (masks.limit()) {
        limits = DeclaredLimits{std::nullopt, masks.limit(), bias_limit ? *bias_limit : Vec::zeros(1)};
    }
    return LayerSeq(s, std::move(gen), std::nullopt, std::move(limits), masks.rate());
}

Vec layer_linear(const LayerSeq& seq, const NetworkKind& kind, std::size_t n, const Vec& y)
{
    const Layer& l = seq.layer(n);
    if (kind.kind() == NetworkKind::Kind::Cnn) {
        if (!l.mask) throw std::invalid_argument("layer " + std::to_string(n) + ": CNN evaluation needs a mask");
        return BandedToeplitz::finite(*l.mask, l.weight.cols()).apply(y);
    }
    if (y.dim() != l.weight.cols()) {
        throw std::invalid_argument("layer " + std::to_string(n) + ": input dimension " + std::to_string(y.dim()) +
                                    " does not match " + std::to_string(l.weight.cols()) + " columns");
    }
    return l.weight * y;
}

Vec layer_step(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, std::size_t n, const Vec& y)
{
    const Layer& l = seq.layer(n);
    Vec z = layer_linear(seq, kind, n, y);
    if (kind.kind() == NetworkKind::Kind::Pooled) {
        if (z.dim() != l.bias.dim() + kind.pooling().mu()) {
            throw std::invalid_argument("layer " + std::to_string(n) + ": pooled layer needs " +
                                        std::to_string(l.bias.dim() + kind.pooling().mu()) + " rows, has " +
                                        std::to_string(z.dim()));
        }
        z = pool(kind.pooling(), z);
    } else if (z.dim() != l.bias.dim()) {
        throw std::invalid_argument("layer " + std::to_string(n) + ": weight has " + std::to_string(z.dim()) +
                                    " rows, bias has dimension " + std::to_string(l.bias.dim()));
    }
    return apply_vec(act, z + l.bias);
}

std::vector<Vec> trajectory(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x,
                            std::size_t n)
{
    if (x.dim() != seq.input_dim()) {
        throw std::invalid_argument("input dimension " + std::to_string(x.dim()) + ", network expects " +
                                    std::to_string(seq.input_dim()));
    }
    std::vector<Vec> out;
    out.reserve(n + 1);
    out.push_back(x);
    for (std::size_t k = 1; k <= n; ++k) out.push_back(layer_step(seq, kind, act, k, out.back()));
    return out;
}

Vec eval(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x, std::size_t n)
{
    if (n == 0) throw std::invalid_argument("eval: depth must be >= 1");
    return trajectory(seq, kind, act, x, n).back();
}

std::vector<EventuallyConstSeq> trajectory_extended(const LayerSeq& seq, const NetworkKind& kind,
                                                    const Activation& act, const Vec& x, std::size_t n,
                                                    Padding padding)
{
    std::vector<EventuallyConstSeq> out;
    out.reserve(n + 1);
    if (padding == Padding::Zero) {
        const std::vector<Vec> plain = trajectory(seq, kind, act, x, n);
        out.push_back(EventuallyConstSeq::zero_extended(plain[0]));
        for (std::size_t k = 1; k <= n; ++k) out.emplace_back(plain[k].data(), act.sigma0());
        return out;
    }
    if (kind.kind() != NetworkKind::Kind::Cnn) {
        throw std::invalid_argument("constant padding applies to CNN networks only");
    }
    if (x.dim() != seq.input_dim()) {
        throw std::invalid_argument("input dimension " + std::to_string(x.dim()) + ", network expects " +
                                    std::to_string(seq.input_dim()));
    }
    out.push_back(EventuallyConstSeq::zero_extended(x));
    for (std::size_t k = 1; k <= n; ++k) {
        const Layer& l = seq.layer(k);
        if (k == 1) {
            // First layer is zero-padded: rows beyond m_1 see no input.
            Vec h = layer_step(seq, kind, act, 1, x);
            out.emplace_back(h.data(), act.sigma0());
            continue;
        }
        EventuallyConstSeq z = apply_banded(BandedToeplitz::semi_infinite(*l.mask), out.back());
        std::vector<double> head(z.head().begin(), z.head().end());
        if (head.size() != l.bias.dim()) {
            throw std::invalid_argument("layer " + std::to_string(k) + ": extended head " +
                                        std::to_string(head.size()) + " does not match width " +
                                        std::to_string(l.bias.dim()));
        }
        for (std::size_t i = 0; i < head.size(); ++i) head[i] = act.eval(head[i] + l.bias[i]);
        out.emplace_back(std::move(head), act.eval(z.tail()));
    }
    return out;
}

EventuallyConstSeq eval_extended(const LayerSeq& seq, const NetworkKind& kind, const Activation& act, const Vec& x,
                                 std::size_t n, Padding padding)
{
    if (n == 0) throw std::invalid_argument("eval_extended: depth must be >= 1");
    return trajectory_extended(seq, kind, act, x, n, padding).back();
}

double network_lipschitz_bound(const LayerSeq& seq, const Activation& act, const PoolingOp& pool, std::size_t n,
                               PNorm p)
{
    const double lp = act.lipschitz() * pool_lipschitz(pool, p);
    double bound = 1.0;
    for (std::size_t j = 1; j <= n; ++j) bound *= lp * matrix_norm(seq.layer(j).weight, p);
    return bound;
}

}  // namespace dnc
