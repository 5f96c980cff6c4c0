#include "dnc/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dnc/random.hpp"

namespace dnc {

namespace {

// Salts separating the independent random streams of one spec.
enum Stream : std::uint64_t { kLimitW = 1, kLimitB, kFirstW, kDeltaW, kDeltaB, kMaskLimit, kDeltaMask, kScale };

std::uint64_t stream_seed(std::uint64_t seed, Stream stream, std::size_t n)
{
    return splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + static_cast<std::uint64_t>(n));
}

void validate(const GenSpec& spec)
{
    if (spec.s == 0) throw std::invalid_argument("generator: s must be >= 1");
    const bool needs_rate = spec.family == Family::ExpDecay || spec.family == Family::RandomConvergent ||
                            (spec.family == Family::CnnMasks && (spec.mask_profile == MaskProfile::VanishingGeometric ||
                                                                 spec.mask_profile == MaskProfile::ConvergentToLimit));
    if (needs_rate && !(spec.r > 0.0 && spec.r < 1.0)) throw std::invalid_argument("generator: r must lie in (0,1)");
    if (!(spec.c >= 0.0) || !std::isfinite(spec.c)) throw std::invalid_argument("generator: c must be >= 0");
    if (spec.family == Family::Scalar) {
        if (spec.s != 1) throw std::invalid_argument("generator: scalar family has s = 1");
        return;
    }
    const bool zero_ok = spec.family == Family::Constant && spec.norm_target == 0.0;
    if (!zero_ok && (!(spec.norm_target > 0.0) || !std::isfinite(spec.norm_target))) {
        throw std::invalid_argument("generator: norm_target must be > 0");
    }
    if (!(spec.bias_scale >= 0.0) || !std::isfinite(spec.bias_scale)) {
        throw std::invalid_argument("generator: bias_scale must be >= 0");
    }
    const auto& w = spec.widths;
    if (spec.family == Family::CnnMasks) {
        if (w.kind != WidthSchedule::Kind::Cnn) throw std::invalid_argument("generator: cnn_masks needs a cnn width schedule");
        if (spec.pool_mu != 0) throw std::invalid_argument("generator: pooling is not supported for CNN layers");
        return;
    }
    if (w.kind == WidthSchedule::Kind::Cnn) throw std::invalid_argument("generator: cnn widths need the cnn_masks family");
    if (w.widths.empty() || std::find(w.widths.begin(), w.widths.end(), 0) != w.widths.end()) {
        throw std::invalid_argument("generator: widths must be >= 1");
    }
    if (w.kind == WidthSchedule::Kind::Fixed && w.widths.size() != 1) {
        throw std::invalid_argument("generator: fixed schedule takes one width");
    }
    if (w.kind == WidthSchedule::Kind::Cyclic && spec.pool_mu != 0) {
        throw std::invalid_argument("generator: pooling needs a fixed width");
    }
}

double delta(const GenSpec& spec, std::size_t n)
{
    switch (spec.family) {
    case Family::Constant:
    case Family::DivergingControl: return 0.0;
    case Family::ExpDecay: return spec.c * std::pow(spec.r, static_cast<double>(n));
    case Family::Harmonic: return spec.c / static_cast<double>(n);
    case Family::RandomConvergent: {
        Rng rng(stream_seed(spec.seed, kScale, n));
        return spec.c * std::pow(spec.r, static_cast<double>(n)) * rng.unit();
    }
    case Family::CnnMasks:
    case Family::Scalar: break;
    }
    return 0.0;
}

double mask_delta(const GenSpec& spec, std::size_t n)
{
    const double dn = static_cast<double>(n);
    switch (spec.mask_profile) {
    case MaskProfile::VanishingGeometric:
    case MaskProfile::ConvergentToLimit: return spec.c * std::pow(spec.r, dn);
    case MaskProfile::VanishingHarmonic:
    case MaskProfile::HarmonicToLimit: return spec.c / dn;
    }
    return 0.0;
}

// A random matrix of the given norm (zero matrix for target 0).
Mat unit_direction(std::size_t rows, std::size_t cols, std::uint64_t seed, PNorm p, double target)
{
    if (target == 0.0) return Mat::zeros(rows, cols);
    Mat g = random_matrix(rows, cols, seed);
    if (matrix_norm(g, p) == 0.0) g = Mat::identity(std::max(rows, cols)).block(rows, cols);
    return rescale_to_norm(g, p, target);
}

Vec unit_vector(std::size_t dim, std::uint64_t seed, PNorm p, double target)
{
    Vec v = random_vector(dim, seed);
    if (norm(v, p) == 0.0) v = zero_pad_vector(Vec{1.0}, dim);
    return rescale_to_norm(v, p, target);
}

// Perron root `target` with row sums all equal to it.
Mat positive_stochastic(std::size_t rows, std::size_t cols, std::uint64_t seed, double target)
{
    Rng rng(seed);
    std::vector<double> d(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            d[i * cols + j] = 0.5 + rng.unit();
            sum += d[i * cols + j];
        }
        for (std::size_t j = 0; j < cols; ++j) d[i * cols + j] *= target / sum;
    }
    return Mat(rows, cols, std::move(d));
}

Generated build_matrix_family(const GenSpec& spec)
{
    const auto& ws = spec.widths;
    const std::size_t mu = spec.pool_mu;
    const std::size_t l = *std::max_element(ws.widths.begin(), ws.widths.end());
    const std::size_t k = *std::min_element(ws.widths.begin(), ws.widths.end());
    auto width = [ws](std::size_t n) { return ws.widths[(n - 1) % ws.widths.size()]; };

    // W* lives in the top-left (k + mu) x k block of an (l + mu) x l matrix.
    Mat core = spec.family == Family::DivergingControl
                   ? positive_stochastic(k + mu, k, stream_seed(spec.seed, kLimitW, 0), spec.norm_target)
                   : unit_direction(k + mu, k, stream_seed(spec.seed, kLimitW, 0), spec.p, spec.norm_target);
    Mat w_star = zero_pad_matrix(core, l + mu, l);
    Vec b_core = spec.family == Family::DivergingControl
                     ? rescale_to_norm(Vec::filled(k, 1.0), spec.p, std::max(spec.bias_scale, 1e-3))
                     : (spec.bias_scale > 0.0 ? unit_vector(k, stream_seed(spec.seed, kLimitB, 0), spec.p, spec.bias_scale)
                                              : Vec::zeros(k));
    Vec b_star = zero_pad_vector(b_core, l);

    const Mat first_w =
        spec.family == Family::DivergingControl
            ? positive_stochastic(width(1) + mu, spec.s, stream_seed(spec.seed, kFirstW, 0), spec.norm_target)
            : unit_direction(width(1) + mu, spec.s, stream_seed(spec.seed, kFirstW, 0), spec.p, spec.norm_target);
    const bool first_follows_limit = spec.s == l && width(1) == l;

    GenSpec copy = spec;
    auto gen = [copy, w_star, b_star, first_w, first_follows_limit, width, mu](std::size_t n) {
        const std::size_t rows = width(n) + mu;
        const std::size_t cols = n == 1 ? copy.s : width(n - 1);
        const double dn = delta(copy, n);
        Mat base = n == 1 && !first_follows_limit ? first_w : w_star.block(rows, cols);
        if (dn > 0.0) base = base + unit_direction(rows, cols, stream_seed(copy.seed, kDeltaW, n), copy.p, dn);
        Vec bias = b_star.dim() == width(n) ? b_star : Vec(std::vector<double>(b_star.data().begin(),
                                                                               b_star.data().begin() + width(n)));
        if (dn > 0.0) bias = bias + unit_vector(width(n), stream_seed(copy.seed, kDeltaB, n), copy.p, dn);
        return Layer{std::move(base), std::move(bias), std::nullopt};
    };

    std::optional<double> rate;
    if (spec.family == Family::ExpDecay || spec.family == Family::RandomConvergent) rate = spec.r;
    DeclaredLimits limits{w_star, std::nullopt, b_star};
    return {LayerSeq(spec.s, std::move(gen), l, std::move(limits), rate), std::nullopt};
}

Generated build_cnn(const GenSpec& spec)
{
    const std::size_t tau = spec.widths.tau;
    const bool vanishing = spec.mask_profile == MaskProfile::VanishingGeometric ||
                           spec.mask_profile == MaskProfile::VanishingHarmonic;
    const Vec limit = vanishing ? Vec::zeros(tau + 1)
                                : unit_vector(tau + 1, stream_seed(spec.seed, kMaskLimit, 0), PNorm::one(), spec.norm_target);
    GenSpec copy = spec;
    auto mask_gen = [copy, limit, tau](std::size_t n) {
        return limit + unit_vector(tau + 1, stream_seed(copy.seed, kDeltaMask, n), PNorm::one(), mask_delta(copy, n));
    };
    std::optional<double> rate;
    if (spec.mask_profile == MaskProfile::VanishingGeometric || spec.mask_profile == MaskProfile::ConvergentToLimit) {
        rate = spec.r;
    }
    MaskSeq masks(tau, mask_gen, limit, rate);

    // Bias limit supported on the first s + tau entries; perturbations live there too.
    const std::size_t core = spec.s + tau;
    const Vec b_star = spec.bias_scale > 0.0
                           ? unit_vector(core, stream_seed(spec.seed, kLimitB, 0), spec.p, spec.bias_scale)
                           : Vec::zeros(core);
    auto bias_gen = [copy, b_star, core](std::size_t n, std::size_t width) {
        Vec b = zero_pad_vector(b_star, width);
        const double dn = mask_delta(copy, n) * copy.bias_scale;
        if (dn > 0.0) b = b + zero_pad_vector(unit_vector(core, stream_seed(copy.seed, kDeltaB, n), copy.p, dn), width);
        return b;
    };
    LayerSeq seq = cnn_layer_seq(masks, bias_gen, spec.s, b_star);
    return {std::move(seq), std::move(masks)};
}

}  // namespace

Family family_from_name(std::string_view name)
{
    if (name == "constant") return Family::Constant;
    if (name == "exp_decay") return Family::ExpDecay;
    if (name == "harmonic") return Family::Harmonic;
    if (name == "random_convergent") return Family::RandomConvergent;
    if (name == "cnn_masks") return Family::CnnMasks;
    if (name == "diverging_control") return Family::DivergingControl;
    if (name == "scalar") return Family::Scalar;
    throw std::invalid_argument("unknown generator family '" + std::string(name) + "'");
}

std::string family_name(Family f)
{
    switch (f) {
    case Family::Constant: return "constant";
    case Family::ExpDecay: return "exp_decay";
    case Family::Harmonic: return "harmonic";
    case Family::RandomConvergent: return "random_convergent";
    case Family::CnnMasks: return "cnn_masks";
    case Family::DivergingControl: return "diverging_control";
    case Family::Scalar: return "scalar";
    }
    return "?";
}

MaskProfile mask_profile_from_name(std::string_view name)
{
    if (name == "vanishing_geometric") return MaskProfile::VanishingGeometric;
    if (name == "vanishing_harmonic") return MaskProfile::VanishingHarmonic;
    if (name == "convergent_to_limit") return MaskProfile::ConvergentToLimit;
    if (name == "harmonic_to_limit") return MaskProfile::HarmonicToLimit;
    throw std::invalid_argument("unknown mask profile '" + std::string(name) + "'");
}

std::string mask_profile_name(MaskProfile m)
{
    switch (m) {
    case MaskProfile::VanishingGeometric: return "vanishing_geometric";
    case MaskProfile::VanishingHarmonic: return "vanishing_harmonic";
    case MaskProfile::ConvergentToLimit: return "convergent_to_limit";
    case MaskProfile::HarmonicToLimit: return "harmonic_to_limit";
    }
    return "?";
}

Generated build(const GenSpec& spec)
{
    validate(spec);
    if (spec.family == Family::Scalar) return {scalar_net(spec.scalar_weight, spec.scalar_bias), std::nullopt};
    return spec.family == Family::CnnMasks ? build_cnn(spec) : build_matrix_family(spec);
}

Mat rescale_to_norm(const Mat& w, PNorm p, double target)
{
    if (!(target > 0.0) || !std::isfinite(target)) throw std::invalid_argument("rescale_to_norm: target must be > 0");
    const double n = matrix_norm(w, p);
    if (n == 0.0) throw std::invalid_argument("rescale_to_norm: zero matrix");
    return (target / n) * w;
}

Vec rescale_to_norm(const Vec& v, PNorm p, double target)
{
    if (!(target > 0.0) || !std::isfinite(target)) throw std::invalid_argument("rescale_to_norm: target must be > 0");
    const double n = norm(v, p);
    if (n == 0.0) throw std::invalid_argument("rescale_to_norm: zero vector");
    return (target / n) * v;
}

LayerSeq scalar_net(double weight, double bias)
{
    auto gen = [weight, bias](std::size_t) { return Layer{Mat{{weight}}, Vec{bias}, std::nullopt}; };
    return LayerSeq(1, gen, 1, DeclaredLimits{Mat{{weight}}, std::nullopt, Vec{bias}});
}

Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> d(rows * cols);
    for (auto& e : d) e = rng.symmetric();
    return Mat(rows, cols, std::move(d));
}

Vec random_vector(std::size_t dim, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> d(dim);
    for (auto& e : d) e = rng.symmetric();
    return Vec(std::move(d));
}

}  // namespace dnc
