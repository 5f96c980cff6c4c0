#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnc/activations.hpp"
#include "dnc/linalg.hpp"
#include "dnc/network.hpp"
#include "dnc/pooling.hpp"

namespace dnc {

/// A layer sequence together with everything needed to evaluate and bound it.
struct Model {
    LayerSeq seq;
    Activation act;
    NetworkKind kind;
    PNorm p;
    Padding padding = Padding::Zero;

    /// Rejects inconsistent combinations (constant padding without masks, pooling with CNN layers).
    void validate() const;
    const PoolingOp& pooling() const { return kind.pooling(); }
    /// Ambient dimension for extended states: the width bound under zero
    /// padding, none (sequence space) otherwise.
    std::optional<std::size_t> ambient() const;
};

struct Window {
    std::size_t first;
    std::size_t last;
};

struct ConditionVerdict {
    enum class Method { Analytic, TailScan };
    double omega_estimate = 0.0;
    double threshold = 1.0;
    bool passed = false;
    Method method = Method::Analytic;
    std::optional<Window> window;  // set for tail scans
    double margin = 0.0;           // threshold - omega_estimate
    std::string note;
};

std::string method_name(ConditionVerdict::Method m);

/// omega = L P ||W*||_p when the limit is declared, otherwise the window max of
/// L P ||W_n||_p (an estimate, flagged as such). Passes iff omega < 1.
ConditionVerdict check_condition(const Model& model, Window window);

struct MaskConditionReport {
    ConditionVerdict vanishing;    // w^(n) -> 0
    ConditionVerdict bounded_sum;  // lim L sum_k |w_k^(n)| < 1
    ConditionVerdict exponential;  // |w^(n) - w*| = O(r^n); estimate is the fitted r
};

/// Without a declared limit the vanishing check compares the largest mask
/// entry over the second half of the window with the first half and passes
/// when it has at least halved.
MaskConditionReport check_mask_conditions(const MaskSeq& masks, const Activation& act, Window window);

struct RateFit {
    double r_fit;
    double intercept;
    double r_squared;
    std::size_t used;
    std::size_t excluded;
};

/// Least squares on (n, log d_n). Values <= 1e-15 are excluded.
RateFit fit_exponential_rate(const std::vector<std::pair<std::size_t, double>>& devs);

struct ProductOracle {
    std::vector<double> a;  // a[n-1] = prod_{j<=n} alpha_j
    std::vector<double> b;  // b[n-1] = sum_{j<=n} prod_{j<i<=n} alpha_i
};

/// alphas[j-1] = alpha_j.
ProductOracle sequence_oracle_products(const std::vector<double>& alphas, std::size_t n_max);
/// out[n-1] = sum_{i=0}^{n-1} (prod_{j=0}^{i-1} alpha_{n-j}) beta_{n-i}.
std::vector<double> sequence_oracle_weighted_sum(const std::vector<double>& alphas, const std::vector<double>& betas,
                                                 std::size_t n_max);

struct LimitConstants {
    double omega0;
    double w;
    double rho;
    double domain;
    std::size_t n_scan;
};

/// Norms, gaps and bounds of a model. Caches x-independent quantities; all
/// methods may be called concurrently. Copies share the cache.
class BoundCalculator {
public:
    explicit BoundCalculator(Model model);

    const Model& model() const noexcept { return model_; }
    double lp() const noexcept { return lp_; }

    /// ||W_n|| of the extended operator.
    double weight_norm(std::size_t n) const;
    /// E_{m,k} = ||W_{m+k} - W_k||, k >= 2.
    double weight_gap(std::size_t m, std::size_t k) const;
    /// e_{m,k} = ||b_{m+k} - b_k||.
    double bias_gap(std::size_t m, std::size_t k) const;
    /// E_n = ||W_n - W*||; requires declared limits.
    double weight_limit_gap(std::size_t n) const;
    /// e_n = ||b_n - b*||; requires declared limits.
    double bias_limit_gap(std::size_t n) const;
    /// ||sigma(P(0_n))|| in the ambient space of layer n.
    double sigma0_norm(std::size_t n) const;
    /// Norm of an extended state.
    double state_norm(const EventuallyConstSeq& s) const;

    /// Extended trajectory [x, N_1(x), ..., N_n(x)].
    std::vector<EventuallyConstSeq> states(const Vec& x, std::size_t n) const;
    /// ||N_{n+m}(x) - N_n(x)|| between extended states.
    double deviation(const std::vector<EventuallyConstSeq>& states, std::size_t n, std::size_t m) const;

    /// A-priori bound on ||N_n(x)|| for ||x|| <= radius.
    double apriori_bound(std::size_t n, double radius) const;
    /// Three-term bound on ||N_{n+m}(x) - N_n(x)||; `states` must reach max(n-1, m).
    double deviation_bound(std::size_t n, std::size_t m, const std::vector<EventuallyConstSeq>& states) const;
    double deviation_bound(std::size_t n, std::size_t m, const Vec& x) const;
    /// Bound on ||N_n(x) - N(x)||:
    /// L sum_i w0^i e_{n-i} + max(L,1) [rho LP sum_i w0^i E_{n-i} + LP w (rho + D) w0^(n-1)].
    /// Requires declared limits.
    double limit_bound(std::size_t n, const LimitConstants& c) const;

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::size_t, double> weight_norms;
        std::map<std::pair<std::size_t, std::size_t>, double> weight_gaps;
        std::map<std::pair<std::size_t, std::size_t>, double> bias_gaps;
    };
    Model model_;
    double lp_;
    std::shared_ptr<Cache> cache_;
};

/// omega0 = max(declared omega, window max of L P ||W_n||) over [n_scan, n_end];
/// w = max ||W_n|| up to n_end and ||W*||; rho = max apriori bound up to n_end.
/// Empty when omega0 >= 1 or no limits are declared.
std::optional<LimitConstants> derive_limit_constants(const BoundCalculator& calc, double radius, std::size_t n_scan,
                                                     std::size_t n_end);

/// Samples from [-D, D]^s.
class Domain {
public:
    static Domain grid(std::size_t s, double bound, std::size_t per_axis);
    static Domain uniform(std::size_t s, double bound, std::size_t count, std::uint64_t seed);

    std::size_t dim() const noexcept { return s_; }
    double bound() const noexcept { return bound_; }
    /// Radius D s^(1/p) of the hypercube in the p-norm.
    double norm_bound(PNorm p) const;
    const std::vector<Vec>& samples() const noexcept { return samples_; }

private:
    Domain(std::size_t s, double bound, std::vector<Vec> samples) : s_(s), bound_(bound), samples_(std::move(samples)) {}
    std::size_t s_;
    double bound_;
    std::vector<Vec> samples_;
};

struct SupDeviation {
    double value;
    std::size_t argmax;
};

/// max over samples of ||N_{n+m}(x) - N_n(x)||; a lower bound of the true sup.
SupDeviation empirical_sup_deviation(const BoundCalculator& calc, const std::vector<Vec>& samples, std::size_t n,
                                     std::size_t m);

struct StudyOptions {
    std::vector<std::size_t> n_list;
    std::vector<std::size_t> m_list;
    std::size_t big_m = 0;  // 0 means n_max + 20
    Window window{10, 40};
    double rel_tol = 1e-9;
    std::size_t threads = 1;
};

struct ReportRow {
    std::size_t n;
    std::size_t m;
    double empirical_dev;
    std::size_t argmax;
    double deviation_bound;  // at the maximizing sample
    double apriori_bound;
    std::optional<double> limit_bound;
};

struct Violation {
    std::string what;
    std::size_t n;
    std::size_t m;
    std::size_t sample;
    double observed;
    double bound;
};

struct ConvergenceReport {
    ConditionVerdict condition;
    std::optional<MaskConditionReport> mask_conditions;
    std::optional<LimitConstants> limit_constants;
    std::vector<ReportRow> rows;
    /// (n, max_x ||N_n(x) - N_M(x)||) for every n in n_list.
    std::vector<std::pair<std::size_t, double>> limit_devs;
    std::optional<RateFit> rate_fit;
    std::string rate_note;
    std::vector<Violation> violations;
    std::size_t big_m = 0;
    bool asserted = false;  // dominance checks are asserted only when the condition passes
};

/// Evaluates every bound against sampled behaviour. Samples are split across
/// threads and merged in sample order, so the result does not depend on the
/// thread count.
ConvergenceReport run_study(const BoundCalculator& calc, const Domain& domain, const StudyOptions& opt,
                            const std::optional<MaskSeq>& masks = std::nullopt);

}  // namespace dnc
