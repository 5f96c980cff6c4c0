#include "dnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "dnc/random.hpp"

namespace dnc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * b with 0 * inf treated as 0: a vanishing factor kills the term.
double mul0(double a, double b)
{
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

Mat pad_to(const Mat& w, std::size_t rows, std::size_t cols) { return zero_pad_matrix(w, rows, cols); }

double mask_abs_sum(const Vec& w) { return norm(w, PNorm::one()); }

Vec mask_diff(const Vec& a, const Vec& b)
{
    if (a.dim() != b.dim()) throw std::invalid_argument("mask length mismatch");
    return a - b;
}

double padded_bias_gap(const Vec& a, const Vec& b, PNorm p)
{
    const std::size_t d = std::max(a.dim(), b.dim());
    return norm(zero_pad_vector(a, d) - zero_pad_vector(b, d), p);
}

double padded_weight_gap(const Mat& a, const Mat& b, PNorm p)
{
    const std::size_t r = std::max(a.rows(), b.rows());
    const std::size_t c = std::max(a.cols(), b.cols());
    return matrix_norm(pad_to(a, r, c) - pad_to(b, r, c), p);
}

bool is_zero(const Vec& v)
{
    return std::all_of(v.data().begin(), v.data().end(), [](double x) { return x == 0.0; });
}

ConditionVerdict verdict(double estimate, double threshold, ConditionVerdict::Method method,
                         std::optional<Window> window, std::string note = {})
{
    ConditionVerdict v;
    v.omega_estimate = estimate;
    v.threshold = threshold;
    v.passed = estimate < threshold;
    v.method = method;
    v.window = window;
    v.margin = threshold - estimate;
    v.note = std::move(note);
    return v;
}

void check_window(Window w)
{
    if (w.first < 1 || w.last <= w.first) throw std::invalid_argument("window needs 1 <= first < last");
}

}  // namespace

std::string method_name(ConditionVerdict::Method m)
{
    return m == ConditionVerdict::Method::Analytic ? "analytic" : "tail-scan";
}

// ---------------------------------------------------------------- Model

void Model::validate() const
{
    if (padding == Padding::Constant && kind.kind() != NetworkKind::Kind::Cnn) {
        throw std::invalid_argument("constant padding requires a CNN network");
    }
    if (kind.kind() == NetworkKind::Kind::Cnn && !seq.layer(1).mask) {
        throw std::invalid_argument("CNN network requires mask layers");
    }
    if (kind.kind() == NetworkKind::Kind::Pooled && !seq.width_bound()) {
        throw std::invalid_argument("pooled networks require a fixed width");
    }
}

std::optional<std::size_t> Model::ambient() const
{
    if (padding == Padding::Constant) return std::nullopt;
    return seq.width_bound();
}

// ---------------------------------------------------------------- conditions

namespace {

double limit_weight_norm(const Model& model)
{
    const auto& lim = model.seq.limits();
    if (!lim) throw std::invalid_argument("no declared limits");
    if (lim->weight) return matrix_norm(*lim->weight, model.p);
    if (lim->mask) return mask_abs_sum(*lim->mask);
    throw std::invalid_argument("declared limits carry no weight limit");
}

}  // namespace

ConditionVerdict check_condition(const Model& model, Window window)
{
    check_window(window);
    const double lp = model.act.lipschitz() * pool_lipschitz(model.pooling(), model.p);
    const auto& lim = model.seq.limits();
    if (lim && (lim->weight || lim->mask)) {
        std::string note;
        if (lim->mask && model.p.kind() != PNorm::Kind::One && !model.p.is_inf()) {
            note = "mask-sum bound on the limit operator norm";
        } else if (!model.p.has_exact_induced()) {
            note = "interpolation bound on the limit operator norm";
        }
        return verdict(lp * limit_weight_norm(model), 1.0, ConditionVerdict::Method::Analytic, std::nullopt, note);
    }
    BoundCalculator calc(model);
    double best = 0.0;
    for (std::size_t n = window.first; n <= window.last; ++n) best = std::max(best, lp * calc.weight_norm(n));
    return verdict(best, 1.0, ConditionVerdict::Method::TailScan, window, "estimate of the limit from a finite window");
}

MaskConditionReport check_mask_conditions(const MaskSeq& masks, const Activation& act, Window window)
{
    check_window(window);
    MaskConditionReport rep;
    const double L = act.lipschitz();

    if (masks.limit()) {
        const double sup = norm(*masks.limit(), PNorm::inf());
        rep.vanishing = verdict(sup, std::numeric_limits<double>::min(), ConditionVerdict::Method::Analytic,
                                std::nullopt, "largest limit mask entry; passes only when it is zero");
        rep.bounded_sum = verdict(L * mask_abs_sum(*masks.limit()), 1.0, ConditionVerdict::Method::Analytic,
                                  std::nullopt);
    } else {
        const std::size_t mid = window.first + (window.last - window.first) / 2;
        double first_half = 0.0;
        double second_half = 0.0;
        double sum_max = 0.0;
        for (std::size_t n = window.first; n <= window.last; ++n) {
            const Vec w = masks.mask(n);
            const double m = norm(w, PNorm::inf());
            if (n <= mid) first_half = std::max(first_half, m);
            else second_half = std::max(second_half, m);
            sum_max = std::max(sum_max, L * mask_abs_sum(w));
        }
        const double ratio = first_half == 0.0 ? 0.0 : second_half / first_half;
        rep.vanishing = verdict(ratio, 0.5, ConditionVerdict::Method::TailScan, window,
                                "ratio of largest entries, second half over first half of the window");
        rep.bounded_sum = verdict(sum_max, 1.0, ConditionVerdict::Method::TailScan, window);
    }

    const Vec limit = masks.limit() ? *masks.limit() : Vec::zeros(masks.tau() + 1);
    std::vector<std::pair<std::size_t, double>> gaps;
    for (std::size_t n = window.first; n <= window.last; ++n) {
        gaps.emplace_back(n, norm(mask_diff(masks.mask(n), limit), PNorm::inf()));
    }
    try {
        const RateFit fit = fit_exponential_rate(gaps);
        const bool good_fit = fit.r_squared >= 0.98;
        rep.exponential = verdict(fit.r_fit, 1.0, ConditionVerdict::Method::TailScan, window,
                                  good_fit ? "fitted rate of |w^(n) - w*|_inf"
                                           : "fitted rate of |w^(n) - w*|_inf; poor fit (R^2 < 0.98)");
        rep.exponential.passed = rep.exponential.passed && good_fit;
    } catch (const std::invalid_argument&) {
        // Masks at their limit across the window: exponential in the trivial sense.
        rep.exponential = verdict(0.0, 1.0, ConditionVerdict::Method::TailScan, window,
                                  "masks equal their limit across the window");
    }
    return rep;
}

// ---------------------------------------------------------------- rate fit and oracles

RateFit fit_exponential_rate(const std::vector<std::pair<std::size_t, double>>& devs)
{
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t excluded = 0;
    for (const auto& [n, d] : devs) {
        if (!(d > 1e-15) || !std::isfinite(d)) {
            ++excluded;
            continue;
        }
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(d));
    }
    if (xs.size() < 4) {
        throw std::invalid_argument("fit_exponential_rate: need at least 4 values above 1e-15, have " +
                                    std::to_string(xs.size()));
    }
    const double k = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_exponential_rate: all points at the same depth");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        ss_res += r * r;
    }
    // Relative cut-off so exact geometric data is not spoiled by rounding in log.
    const double r2 = syy <= 1e-24 * k ? 1.0 : 1.0 - ss_res / syy;
    return {std::exp(slope), intercept, r2, xs.size(), excluded};
}

ProductOracle sequence_oracle_products(const std::vector<double>& alphas, std::size_t n_max)
{
    if (alphas.size() < n_max) throw std::invalid_argument("sequence_oracle_products: too few alphas");
    ProductOracle out;
    out.a.reserve(n_max);
    out.b.reserve(n_max);
    double a = 1.0;
    double b = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double alpha = alphas[n - 1];
        if (alpha < 0.0) throw std::invalid_argument("sequence_oracle_products: alphas must be >= 0");
        a *= alpha;
        b = 1.0 + alpha * b;  // B_n = 1 + alpha_n B_{n-1}
        out.a.push_back(a);
        out.b.push_back(b);
    }
    return out;
}

std::vector<double> sequence_oracle_weighted_sum(const std::vector<double>& alphas, const std::vector<double>& betas,
                                                 std::size_t n_max)
{
    if (alphas.size() < n_max || betas.size() < n_max) {
        throw std::invalid_argument("sequence_oracle_weighted_sum: too few terms");
    }
    std::vector<double> out;
    out.reserve(n_max);
    double s = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double alpha = alphas[n - 1];
        const double beta = betas[n - 1];
        if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("sequence_oracle_weighted_sum: negative term");
        s = beta + alpha * s;  // S_n = beta_n + alpha_n S_{n-1}
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------- BoundCalculator

BoundCalculator::BoundCalculator(Model model) : model_(std::move(model)), cache_(std::make_shared<Cache>())
{
    model_.validate();
    lp_ = model_.act.lipschitz() * pool_lipschitz(model_.pooling(), model_.p);
}

double BoundCalculator::weight_norm(std::size_t n) const
{
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->weight_norms.find(n); it != cache_->weight_norms.end()) return it->second;
    }
    const Layer& l = model_.seq.layer(n);
    const double v = model_.padding == Padding::Constant && n >= 2 ? mask_abs_sum(*l.mask)
                                                                   : matrix_norm(l.weight, model_.p);
    std::lock_guard lock(cache_->mutex);
    cache_->weight_norms.emplace(n, v);
    return v;
}

double BoundCalculator::weight_gap(std::size_t m, std::size_t k) const
{
    const auto key = std::make_pair(m, k);
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->weight_gaps.find(key); it != cache_->weight_gaps.end()) return it->second;
    }
    const Layer& a = model_.seq.layer(m + k);
    const Layer& b = model_.seq.layer(k);
    const double v = model_.padding == Padding::Constant && k >= 2
                         ? mask_abs_sum(mask_diff(*a.mask, *b.mask))
                         : padded_weight_gap(a.weight, b.weight, model_.p);
    std::lock_guard lock(cache_->mutex);
    cache_->weight_gaps.emplace(key, v);
    return v;
}

double BoundCalculator::bias_gap(std::size_t m, std::size_t k) const
{
    const auto key = std::make_pair(m, k);
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->bias_gaps.find(key); it != cache_->bias_gaps.end()) return it->second;
    }
    const double v = padded_bias_gap(model_.seq.layer(m + k).bias, model_.seq.layer(k).bias, model_.p);
    std::lock_guard lock(cache_->mutex);
    cache_->bias_gaps.emplace(key, v);
    return v;
}

double BoundCalculator::weight_limit_gap(std::size_t n) const
{
    const auto& lim = model_.seq.limits();
    if (!lim) throw std::invalid_argument("weight_limit_gap: no declared limits");
    const Layer& l = model_.seq.layer(n);
    if (lim->weight) return padded_weight_gap(l.weight, *lim->weight, model_.p);
    if (!lim->mask) throw std::invalid_argument("weight_limit_gap: no declared weight limit");
    if (model_.padding == Padding::Constant) {
        if (n < 2) throw std::invalid_argument("weight_limit_gap: first layer is not constant-padded");
        return mask_abs_sum(mask_diff(*l.mask, *lim->mask));
    }
    if (!is_zero(*lim->mask)) {
        throw std::invalid_argument("weight_limit_gap: zero-padded convolution layers converge only to a zero mask");
    }
    return matrix_norm(l.weight, model_.p);
}

double BoundCalculator::bias_limit_gap(std::size_t n) const
{
    const auto& lim = model_.seq.limits();
    if (!lim) throw std::invalid_argument("bias_limit_gap: no declared limits");
    return padded_bias_gap(model_.seq.layer(n).bias, lim->bias, model_.p);
}

double BoundCalculator::sigma0_norm(std::size_t n) const
{
    const double s0 = std::abs(model_.act.sigma0());
    if (s0 == 0.0) return 0.0;
    if (model_.p.is_inf()) return s0;
    std::optional<std::size_t> dim = model_.ambient();
    if (!dim) return kInf;
    (void)n;
    return s0 * std::pow(static_cast<double>(*dim), 1.0 / model_.p.exponent());
}

double BoundCalculator::state_norm(const EventuallyConstSeq& s) const
{
    if (s.tail() == 0.0) return s.norm(model_.p, std::nullopt);
    return s.norm(model_.p, model_.ambient());
}

std::vector<EventuallyConstSeq> BoundCalculator::states(const Vec& x, std::size_t n) const
{
    return trajectory_extended(model_.seq, model_.kind, model_.act, x, n, model_.padding);
}

double BoundCalculator::deviation(const std::vector<EventuallyConstSeq>& states, std::size_t n, std::size_t m) const
{
    if (states.size() <= n + m) throw std::invalid_argument("deviation: trajectory too short");
    return state_norm(states[n + m] - states[n]);
}

double BoundCalculator::apriori_bound(std::size_t n, double radius) const
{
    if (n == 0) throw std::invalid_argument("apriori_bound: depth must be >= 1");
    const double L = model_.act.lipschitz();
    double b = radius;
    for (std::size_t k = 1; k <= n; ++k) {
        const double bias = norm(model_.seq.layer(k).bias, model_.p);
        b = mul0(lp_ * weight_norm(k), b) + L * bias + sigma0_norm(k);
    }
    return b;
}

double BoundCalculator::deviation_bound(std::size_t n, std::size_t m, const std::vector<EventuallyConstSeq>& st) const
{
    if (n == 0 || m == 0) throw std::invalid_argument("deviation_bound: n and m must be >= 1");
    if (st.size() <= std::max(n - 1, m)) throw std::invalid_argument("deviation_bound: trajectory too short");
    const double L = model_.act.lipschitz();

    // lambda holds Lambda_{n+m}^{i-1} = prod_{j=0}^{i-1} LP ||W_{n+m-j}||.
    double term1 = 0.0;
    double lambda = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        term1 += mul0(lambda, L * bias_gap(m, n - i));
        lambda = mul0(lambda, lp_ * weight_norm(n + m - i));
    }

    double term2 = 0.0;
    lambda = 1.0;
    for (std::size_t i = 0; i + 2 <= n; ++i) {
        const double gap = weight_gap(m, n - i);
        if (gap != 0.0) term2 += mul0(lambda, mul0(state_norm(st[n - 1 - i]), gap));
        lambda = mul0(lambda, lp_ * weight_norm(n + m - i));
    }
    term2 = lp_ * term2;

    // lambda is now Lambda_{n+m}^{n-2}.
    if (st[0].head_size() != model_.seq.input_dim()) throw std::invalid_argument("deviation_bound: bad input state");
    const Vec x = st[0].truncate(model_.seq.input_dim());
    const Vec first = layer_linear(model_.seq, model_.kind, 1, x);
    EventuallyConstSeq lifted = [&] {
        if (model_.padding == Padding::Constant) {
            return apply_banded(BandedToeplitz::semi_infinite(*model_.seq.layer(m + 1).mask), st[m]);
        }
        const std::vector<double> h(st[m].head().begin(), st[m].head().end());
        return EventuallyConstSeq::zero_extended(layer_linear(model_.seq, model_.kind, m + 1, Vec(h)));
    }();
    const double start = state_norm(lifted - EventuallyConstSeq::zero_extended(first));
    const double term3 = lp_ * mul0(lambda, start);

    return term1 + term2 + term3;
}

double BoundCalculator::deviation_bound(std::size_t n, std::size_t m, const Vec& x) const
{
    return deviation_bound(n, m, states(x, std::max<std::size_t>(std::max(n - 1, m), 1)));
}

double BoundCalculator::limit_bound(std::size_t n, const LimitConstants& c) const
{
    if (!model_.seq.limits()) throw std::invalid_argument("limit_bound: no declared limits");
    if (n == 0) throw std::invalid_argument("limit_bound: depth must be >= 1");
    const double L = model_.act.lipschitz();
    double s1 = 0.0;
    double pw = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += pw * bias_limit_gap(n - i);
        pw *= c.omega0;
    }
    double s2 = 0.0;
    pw = 1.0;
    for (std::size_t i = 0; i + 2 <= n; ++i) {
        s2 += pw * weight_limit_gap(n - i);
        pw *= c.omega0;
    }
    const double s3 = lp_ * c.w * (c.rho + c.domain) * std::pow(c.omega0, static_cast<double>(n - 1));
    // Unrolling ||N_n - N|| <= L e_n + LP (rho E_n + ||W*|| ||N_{n-1} - N||) puts L
    // only on the bias sum. Factoring L out of all three terms is therefore
    // valid for L >= 1 only; max(L, 1) keeps that form there and stays sound below.
    return L * s1 + std::max(L, 1.0) * (c.rho * lp_ * s2 + s3);
}

std::optional<LimitConstants> derive_limit_constants(const BoundCalculator& calc, double radius, std::size_t n_scan,
                                                     std::size_t n_end)
{
    const Model& model = calc.model();
    const auto& lim = model.seq.limits();
    if (!lim || !(lim->weight || lim->mask)) return std::nullopt;
    if (model.padding == Padding::Zero && lim->mask && !is_zero(*lim->mask)) return std::nullopt;
    if (n_scan < 1 || n_end < n_scan) throw std::invalid_argument("derive_limit_constants: bad scan range");

    const double limit_norm = limit_weight_norm(model);
    double omega0 = calc.lp() * limit_norm;
    for (std::size_t n = n_scan; n <= n_end; ++n) omega0 = std::max(omega0, calc.lp() * calc.weight_norm(n));
    if (!(omega0 < 1.0)) return std::nullopt;

    double w = limit_norm;
    double rho = 0.0;
    for (std::size_t n = 1; n <= n_end; ++n) {
        w = std::max(w, calc.weight_norm(n));
        rho = std::max(rho, calc.apriori_bound(n, radius));
    }
    if (!std::isfinite(rho)) return std::nullopt;
    return LimitConstants{omega0, w, rho, radius, n_scan};
}

// ---------------------------------------------------------------- Domain

Domain Domain::grid(std::size_t s, double bound, std::size_t per_axis)
{
    if (s == 0 || !(bound > 0.0) || per_axis == 0) throw std::invalid_argument("Domain::grid: bad parameters");
    std::size_t total = 1;
    for (std::size_t i = 0; i < s; ++i) {
        total *= per_axis;
        if (total > 1'000'000) throw std::invalid_argument("Domain::grid: too many points");
    }
    std::vector<Vec> samples;
    samples.reserve(total);
    std::vector<std::size_t> idx(s, 0);
    auto coord = [&](std::size_t k) {
        if (per_axis == 1) return 0.0;
        return -bound + 2.0 * bound * static_cast<double>(k) / static_cast<double>(per_axis - 1);
    };
    for (std::size_t t = 0; t < total; ++t) {
        std::vector<double> v(s);
        for (std::size_t i = 0; i < s; ++i) v[i] = coord(idx[i]);
        samples.emplace_back(std::move(v));
        for (std::size_t i = s; i-- > 0;) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
    }
    return Domain(s, bound, std::move(samples));
}

Domain Domain::uniform(std::size_t s, double bound, std::size_t count, std::uint64_t seed)
{
    if (s == 0 || !(bound > 0.0) || count == 0) throw std::invalid_argument("Domain::uniform: bad parameters");
    Rng rng(seed);
    std::vector<Vec> samples;
    samples.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<double> v(s);
        for (auto& e : v) e = bound * rng.symmetric();
        samples.emplace_back(std::move(v));
    }
    return Domain(s, bound, std::move(samples));
}

double Domain::norm_bound(PNorm p) const
{
    if (p.is_inf()) return bound_;
    return bound_ * std::pow(static_cast<double>(s_), 1.0 / p.exponent());
}

SupDeviation empirical_sup_deviation(const BoundCalculator& calc, const std::vector<Vec>& samples, std::size_t n,
                                     std::size_t m)
{
    if (samples.empty()) throw std::invalid_argument("empirical_sup_deviation: no samples");
    SupDeviation best{-1.0, 0};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = calc.deviation(calc.states(samples[i], n + m), n, m);
        if (d > best.value) best = {d, i};
    }
    return best;
}

// ---------------------------------------------------------------- study

namespace {

struct SampleResult {
    std::vector<double> dev;      // per (n, m) cell
    std::vector<double> dbound;   // per (n, m) cell
    std::vector<double> norms;    // ||N_k(x)||, k = 1..depth
    std::vector<double> limit;    // ||N_n(x) - N_M(x)|| per n in n_list
};

bool exceeds(double observed, double bound, double rel_tol)
{
    if (std::isinf(bound) && bound > 0) return false;
    return observed > bound * (1.0 + rel_tol);
}

}  // namespace

ConvergenceReport run_study(const BoundCalculator& calc, const Domain& domain, const StudyOptions& opt,
                            const std::optional<MaskSeq>& masks)
{
    if (opt.n_list.empty() || opt.m_list.empty()) throw std::invalid_argument("run_study: empty depth lists");
    if (!std::is_sorted(opt.n_list.begin(), opt.n_list.end()) || opt.n_list.front() == 0) {
        throw std::invalid_argument("run_study: n_list must be ascending and >= 1");
    }
    if (*std::min_element(opt.m_list.begin(), opt.m_list.end()) == 0) {
        throw std::invalid_argument("run_study: m_list entries must be >= 1");
    }
    const Model& model = calc.model();
    if (domain.dim() != model.seq.input_dim()) throw std::invalid_argument("run_study: domain dimension mismatch");

    ConvergenceReport rep;
    const std::size_t n_max = opt.n_list.back();
    const std::size_t m_max = *std::max_element(opt.m_list.begin(), opt.m_list.end());
    rep.big_m = opt.big_m ? opt.big_m : n_max + 20;
    if (rep.big_m <= n_max) throw std::invalid_argument("run_study: M must exceed every n");
    const std::size_t depth = std::max(n_max + m_max, rep.big_m);
    const double radius = domain.norm_bound(model.p);

    rep.condition = check_condition(model, opt.window);
    if (masks) rep.mask_conditions = check_mask_conditions(*masks, model.act, opt.window);
    rep.asserted = rep.condition.passed;
    rep.limit_constants = derive_limit_constants(calc, radius, opt.window.first, rep.big_m);

    // Fill the layer cache and the norm memo before fanning out.
    for (std::size_t k = 1; k <= depth; ++k) calc.weight_norm(k);

    const auto& samples = domain.samples();
    std::vector<SampleResult> results(samples.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            const auto st = calc.states(samples[s], depth);
            SampleResult& r = results[s];
            for (std::size_t n : opt.n_list)
                for (std::size_t m : opt.m_list) {
                    r.dev.push_back(calc.deviation(st, n, m));
                    r.dbound.push_back(calc.deviation_bound(n, m, st));
                }
            for (std::size_t k = 1; k <= n_max + m_max; ++k) r.norms.push_back(calc.state_norm(st[k]));
            for (std::size_t n : opt.n_list) r.limit.push_back(calc.deviation(st, n, rep.big_m - n));
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, samples.size()));
    if (threads == 1) {
        work(0, samples.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (samples.size() + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(samples.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> apriori(n_max + m_max + 1, 0.0);
    for (std::size_t k = 1; k <= n_max + m_max; ++k) apriori[k] = calc.apriori_bound(k, radius);
    std::optional<double> lb_big;
    if (rep.limit_constants) lb_big = calc.limit_bound(rep.big_m, *rep.limit_constants);

    std::size_t cell = 0;
    for (std::size_t ni = 0; ni < opt.n_list.size(); ++ni) {
        const std::size_t n = opt.n_list[ni];
        std::optional<double> lb;
        if (rep.limit_constants) lb = calc.limit_bound(n, *rep.limit_constants);
        for (std::size_t m : opt.m_list) {
            ReportRow row{n, m, -1.0, 0, 0.0, apriori[n], lb};
            for (std::size_t s = 0; s < samples.size(); ++s) {
                const double d = results[s].dev[cell];
                if (d > row.empirical_dev) {
                    row.empirical_dev = d;
                    row.argmax = s;
                }
                if (rep.asserted && exceeds(d, results[s].dbound[cell], opt.rel_tol)) {
                    rep.violations.push_back({"deviation_bound", n, m, s, d, results[s].dbound[cell]});
                }
            }
            row.deviation_bound = results[row.argmax].dbound[cell];
            rep.rows.push_back(row);
            ++cell;
        }
        double worst = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double d = results[s].limit[ni];
            worst = std::max(worst, d);
            if (rep.asserted && lb && exceeds(d, *lb + *lb_big, opt.rel_tol)) {
                rep.violations.push_back({"limit_bound", n, rep.big_m - n, s, d, *lb + *lb_big});
            }
        }
        rep.limit_devs.emplace_back(n, worst);
    }
    if (rep.asserted) {
        for (std::size_t s = 0; s < samples.size(); ++s)
            for (std::size_t k = 1; k <= n_max + m_max; ++k) {
                const double v = results[s].norms[k - 1];
                if (exceeds(v, apriori[k], opt.rel_tol)) rep.violations.push_back({"apriori_bound", k, 0, s, v, apriori[k]});
            }
    }

    try {
        rep.rate_fit = fit_exponential_rate(rep.limit_devs);
    } catch (const std::invalid_argument& e) {
        rep.rate_note = e.what();
    }
    return rep;
}

}  // namespace dnc
