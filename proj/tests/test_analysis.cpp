#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dnc/analysis.hpp"
#include "dnc/generators.hpp"
#include "oracles.hpp"

using namespace dnc;

namespace {

Model plain_model(LayerSeq seq, Activation act, PNorm p = PNorm::two())
{
    return Model{std::move(seq), act, NetworkKind::plain(), p, Padding::Zero};
}

// ||W_n|| = 0.5 + 1/n, limit 0.5.
LayerSeq harmonic_scalar()
{
    auto gen = [](std::size_t n) { return Layer{Mat{{0.5 + 1.0 / n}}, Vec{0.0}, std::nullopt}; };
    return LayerSeq(1, gen, 1, DeclaredLimits{Mat{{0.5}}, std::nullopt, Vec{0.0}});
}

LayerSeq harmonic_scalar_undeclared()
{
    auto gen = [](std::size_t n) { return Layer{Mat{{0.5 + 1.0 / n}}, Vec{0.0}, std::nullopt}; };
    return LayerSeq(1, gen, 1);
}

// Direct transcription of the three-term estimate for plain fixed-width networks.
double oracle_deviation_bound(const LayerSeq& seq, double L, PNorm p, std::size_t n, std::size_t m, const Vec& x)
{
    const Activation act = Activation::relu();
    auto W = [&](std::size_t k) { return seq.layer(k).weight; };
    auto b = [&](std::size_t k) { return seq.layer(k).bias; };
    auto lam = [&](int i_minus_1) {
        double prod = 1;
        for (int j = 0; j <= i_minus_1; ++j) prod *= L * induced_norm(W(n + m - j), p);
        return prod;
    };
    std::vector<Vec> N{x};
    for (std::size_t k = 1; k <= std::max(n, m); ++k) N.push_back(apply_vec(act, W(k) * N.back() + b(k)));
    double t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < n; ++i) t1 += lam(int(i) - 1) * norm(b(m + n - i) - b(n - i), p);
    for (std::size_t i = 0; i + 2 <= n; ++i)
        t2 += lam(int(i) - 1) * norm(N[n - 1 - i], p) * induced_norm(W(m + n - i) - W(n - i), p);
    const double t3 = lam(int(n) - 2) * norm(W(m + 1) * N[m] - W(1) * x, p);
    return L * t1 + L * t2 + L * t3;
}

LayerSeq random_convergent(std::uint64_t seed, std::size_t l, double target)
{
    GenSpec spec;
    spec.family = Family::RandomConvergent;
    spec.s = l;
    spec.widths = WidthSchedule::fixed(l);
    spec.r = 0.6;
    spec.seed = seed;
    spec.norm_target = target;
    return build(spec).seq;
}

}  // namespace

TEST(Condition, ScalarPasses)
{
    const auto v = check_condition(plain_model(scalar_net(0.4, 0.0), Activation::relu()), {10, 40});
    EXPECT_DOUBLE_EQ(v.omega_estimate, 0.4);
    EXPECT_TRUE(v.passed);
    EXPECT_EQ(v.method, ConditionVerdict::Method::Analytic);
    EXPECT_NEAR(v.margin, 0.6, 1e-15);
}

TEST(Condition, AnalyticVersusTailScan)
{
    const Activation act = Activation::prelu(1.9);
    const auto analytic = check_condition(plain_model(harmonic_scalar(), act), {10, 100});
    EXPECT_NEAR(analytic.omega_estimate, 0.95, 1e-15);
    EXPECT_TRUE(analytic.passed);

    const auto scan = check_condition(plain_model(harmonic_scalar_undeclared(), act), {10, 100});
    EXPECT_EQ(scan.method, ConditionVerdict::Method::TailScan);
    EXPECT_NEAR(scan.omega_estimate, 1.9 * 0.6, 1e-15);
    EXPECT_FALSE(scan.passed);
    ASSERT_TRUE(scan.window);
    EXPECT_EQ(scan.window->first, 10u);
    EXPECT_EQ(scan.window->last, 100u);
    const auto late = check_condition(plain_model(harmonic_scalar_undeclared(), act), {100, 200});
    EXPECT_NEAR(late.omega_estimate, 1.9 * 0.51, 1e-15);
    EXPECT_TRUE(late.passed);
}

TEST(Condition, BoundaryFails)
{
    const auto v = check_condition(plain_model(scalar_net(0.5, 0.0), Activation::prelu(2.0)), {10, 40});
    EXPECT_EQ(v.omega_estimate, 1.0);
    EXPECT_FALSE(v.passed);
}

TEST(Condition, PoolingEntersThroughP)
{
    auto gen = [](std::size_t n) { return Layer{Mat{{0.3}, {0.3}}, Vec{0.0}, std::nullopt}; };
    LayerSeq seq(1, gen, 1, DeclaredLimits{Mat{{0.3}, {0.3}}, std::nullopt, Vec{0.0}});
    Model m{seq, Activation::relu(), NetworkKind::pooled(PoolingOp::max(1)), PNorm::one(), Padding::Zero};
    EXPECT_NEAR(check_condition(m, {10, 40}).omega_estimate, 2.0 * 0.6, 1e-15);
}

TEST(MaskConditions, VanishingHarmonic)
{
    MaskSeq masks(1, [](std::size_t n) { return Vec{0.5 / n, 0.1 / n}; }, Vec{0.0, 0.0});
    const auto r = check_mask_conditions(masks, Activation::relu(), {10, 100});
    EXPECT_TRUE(r.vanishing.passed);
    EXPECT_TRUE(r.bounded_sum.passed);
    EXPECT_EQ(r.bounded_sum.omega_estimate, 0.0);
}

TEST(MaskConditions, ConvergentButNotVanishing)
{
    MaskSeq masks(1, [](std::size_t n) { return Vec{0.3 * (1 + 1.0 / n), 0.1}; }, Vec{0.3, 0.1});
    const auto r = check_mask_conditions(masks, Activation::relu(), {10, 100});
    EXPECT_FALSE(r.vanishing.passed);
    EXPECT_TRUE(r.bounded_sum.passed);
    EXPECT_NEAR(r.bounded_sum.omega_estimate, 0.4, 1e-15);
}

TEST(MaskConditions, TailScanWithoutLimits)
{
    MaskSeq vanishing(1, [](std::size_t n) { return Vec{0.5 / n, 0.1 / n}; });
    EXPECT_TRUE(check_mask_conditions(vanishing, Activation::relu(), {10, 100}).vanishing.passed);
    MaskSeq stuck(1, [](std::size_t n) { return Vec{0.3 * (1 + 1.0 / n), 0.1}; });
    const auto r = check_mask_conditions(stuck, Activation::relu(), {10, 100});
    EXPECT_FALSE(r.vanishing.passed);
    EXPECT_EQ(r.vanishing.method, ConditionVerdict::Method::TailScan);
}

TEST(MaskConditions, ExponentialFit)
{
    MaskSeq masks(0, [](std::size_t n) { return Vec{std::pow(0.9, n)}; }, Vec{0.0});
    const auto r = check_mask_conditions(masks, Activation::relu(), {10, 60});
    EXPECT_TRUE(r.exponential.passed);
    EXPECT_NEAR(r.exponential.omega_estimate, 0.9, 1e-12);
}

TEST(Apriori, ScalarIsTight)
{
    const BoundCalculator calc(plain_model(scalar_net(0.4, 0.0), Activation::relu()));
    for (std::size_t n = 1; n <= 15; ++n) {
        const double bound = calc.apriori_bound(n, 1.0);
        EXPECT_NEAR(bound, std::pow(0.4, n), 1e-15);
        EXPECT_NEAR(norm(eval(calc.model().seq, NetworkKind::plain(), Activation::relu(), Vec{1.0}, n), PNorm::two()),
                    bound, 1e-15);
    }
}

TEST(Apriori, SigmoidZeroNetClosedForm)
{
    const std::size_t m = 5;
    auto gen = [m](std::size_t n) { return Layer{Mat::zeros(m, n == 1 ? 2 : m), Vec::zeros(m), std::nullopt}; };
    for (PNorm p : {PNorm::one(), PNorm::two(), PNorm::general(3.0), PNorm::inf()}) {
        const BoundCalculator calc(plain_model(LayerSeq(2, gen, m), Activation::sigmoid(), p));
        const double expected = p.is_inf() ? 0.5 : 0.5 * std::pow(double(m), 1.0 / p.exponent());
        for (std::size_t n = 1; n <= 5; ++n) {
            EXPECT_NEAR(calc.apriori_bound(n, 1.0), expected, 1e-12);
            const auto st = calc.states(Vec{0.3, -0.9}, n);
            EXPECT_NEAR(calc.state_norm(st[n]), expected, 1e-12);
        }
    }
}

TEST(Apriori, OneLinearLayer)
{
    auto gen = [](std::size_t) { return Layer{Mat{{1, 2}, {0, -1}}, Vec{0.5, -0.5}, std::nullopt}; };
    const BoundCalculator calc(plain_model(LayerSeq(2, gen, 2), Activation::identity(), PNorm::one()));
    EXPECT_DOUBLE_EQ(calc.apriori_bound(1, 2.0), 3.0 * 2.0 + 1.0);
}

TEST(DeviationBound, ScalarEquality)
{
    const BoundCalculator calc(plain_model(scalar_net(0.4, 0.0), Activation::relu()));
    for (std::size_t n = 1; n <= 12; ++n)
        for (std::size_t m = 1; m <= 8; ++m) {
            const Vec x{1.0};
            const double bound = calc.deviation_bound(n, m, x);
            EXPECT_NEAR(bound, std::pow(0.4, n) - std::pow(0.4, n + m), 1e-15);
            const auto st = calc.states(x, n + m);
            EXPECT_NEAR(calc.deviation(st, n, m), bound, 1e-12);
        }
}

TEST(DeviationBound, ConstantLayersKeepOnlyThirdTerm)
{
    std::mt19937_64 g(67);
    const Mat W = oracle::random_mat(g, 3, 3, 0.3);
    const Vec b = oracle::random_vec(g, 3, 0.2);
    auto gen = [W, b](std::size_t) { return Layer{W, b, std::nullopt}; };
    const BoundCalculator calc(plain_model(LayerSeq(3, gen, 3), Activation::relu(), PNorm::inf()));
    const Vec x{0.5, -0.2, 0.8};
    const double w = induced_norm(W, PNorm::inf());
    for (std::size_t n = 1; n <= 6; ++n)
        for (std::size_t m = 1; m <= 4; ++m) {
            EXPECT_EQ(calc.bias_gap(m, n), 0.0);
            const Vec Nm = eval(calc.model().seq, NetworkKind::plain(), Activation::relu(), x, m);
            const double third = std::pow(w, double(n - 1)) * norm(W * Nm - W * x, PNorm::inf());
            EXPECT_NEAR(calc.deviation_bound(n, m, x), third, 1e-14 * (1 + third));
        }
}

TEST(DeviationBound, MatchesDirectTranscription)
{
    std::mt19937_64 g(71);
    const LayerSeq seq = random_convergent(5, 4, 0.5);
    const BoundCalculator calc(plain_model(seq, Activation::relu(), PNorm::one()));
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t m = 1; m <= 5; ++m) {
            const Vec x = oracle::random_vec(g, 4);
            const double ref = oracle_deviation_bound(seq, 1.0, PNorm::one(), n, m, x);
            EXPECT_NEAR(calc.deviation_bound(n, m, x), ref, 1e-12 * ref);
        }
}

TEST(DeviationBound, DominatesOnRandomConvergentInstance)
{
    const LayerSeq seq = random_convergent(9, 4, 0.5 / 1.75809);
    const BoundCalculator calc(plain_model(seq, Activation::selu()));
    const Domain dom = Domain::uniform(4, 1.0, 100, 3);
    for (const Vec& x : dom.samples()) {
        const auto st = calc.states(x, 20);
        for (std::size_t n = 1; n <= 12; ++n)
            for (std::size_t m = 1; m <= 8; ++m) {
                EXPECT_LE(calc.deviation(st, n, m), calc.deviation_bound(n, m, st) * (1 + 1e-9));
            }
    }
}

TEST(LimitBound, ConstantLayersGeometric)
{
    std::mt19937_64 g(73);
    const Mat W = oracle::random_mat(g, 3, 3, 0.25);
    const Vec b = oracle::random_vec(g, 3, 0.2);
    auto gen = [W, b](std::size_t) { return Layer{W, b, std::nullopt}; };
    LayerSeq seq(3, gen, 3, DeclaredLimits{W, std::nullopt, b});
    const BoundCalculator calc(plain_model(seq, Activation::relu()));
    const LimitConstants c{0.7, 2.0, 3.0, 1.0, 1};
    for (std::size_t n = 1; n <= 10; ++n) {
        EXPECT_NEAR(calc.limit_bound(n, c), 1.0 * 1.0 * 2.0 * (3.0 + 1.0) * std::pow(0.7, double(n - 1)), 1e-12);
    }
}

TEST(LimitBound, ScalarDominatesClosedFormLimit)
{
    const BoundCalculator calc(plain_model(scalar_net(0.4, 0.0), Activation::relu()));
    const auto c = derive_limit_constants(calc, 1.0, 10, 40);
    ASSERT_TRUE(c);
    EXPECT_DOUBLE_EQ(c->omega0, 0.4);
    for (std::size_t n = 1; n <= 20; ++n) EXPECT_GE(calc.limit_bound(n, *c), std::pow(0.4, n));
}

TEST(LimitBound, ExponentialGapsGiveNTimesGeometricShape)
{
    GenSpec spec;
    spec.family = Family::ExpDecay;
    spec.s = 3;
    spec.widths = WidthSchedule::fixed(3);
    spec.r = 0.5;
    spec.norm_target = 0.6;
    const BoundCalculator calc(plain_model(build(spec).seq, Activation::relu()));
    const auto c = derive_limit_constants(calc, 1.0, 10, 60);
    ASSERT_TRUE(c);
    const double r0 = std::max(0.5, c->omega0);
    double worst = 0;
    for (std::size_t n = 5; n <= 60; ++n) worst = std::max(worst, calc.limit_bound(n, *c) / (n * std::pow(r0, n)));
    double late = 0;
    for (std::size_t n = 40; n <= 60; ++n) late = std::max(late, calc.limit_bound(n, *c) / (n * std::pow(r0, n)));
    EXPECT_LE(late, worst);
    EXPECT_TRUE(std::isfinite(worst));
}

TEST(LimitBound, RequiresLimits)
{
    const BoundCalculator calc(plain_model(harmonic_scalar_undeclared(), Activation::relu()));
    EXPECT_THROW(calc.limit_bound(3, LimitConstants{0.5, 1, 1, 1, 1}), std::invalid_argument);
    EXPECT_FALSE(derive_limit_constants(calc, 1.0, 10, 20));
}

TEST(SupDeviation, ContractionDecreases)
{
    std::mt19937_64 g(79);
    const Mat W = rescale_to_norm(oracle::random_mat(g, 4, 4), PNorm::two(), 0.6);
    const Vec b = oracle::random_vec(g, 4, 0.3);
    auto gen = [W, b](std::size_t) { return Layer{W, b, std::nullopt}; };
    const BoundCalculator calc(plain_model(LayerSeq(4, gen, 4), Activation::tanh()));
    const Domain dom = Domain::uniform(4, 1.0, 50, 5);
    for (std::size_t m : {1u, 3u}) {
        double prev = INFINITY;
        for (std::size_t n = 1; n <= 15; ++n) {
            const double d = empirical_sup_deviation(calc, dom.samples(), n, m).value;
            EXPECT_LE(d, prev);
            prev = d;
        }
    }
}

TEST(SupDeviation, ZeroWeightsNoDeviation)
{
    auto gen = [](std::size_t n) { return Layer{Mat::zeros(2, 2), Vec{0.3, -0.1}, std::nullopt}; };
    const BoundCalculator calc(plain_model(LayerSeq(2, gen, 2), Activation::sigmoid(), PNorm::inf()));
    const Domain dom = Domain::grid(2, 1.0, 5);
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t m = 1; m <= 3; ++m) EXPECT_EQ(empirical_sup_deviation(calc, dom.samples(), n, m).value, 0.0);
}

TEST(RateFit, ExactGeometric)
{
    std::vector<std::pair<std::size_t, double>> d;
    for (std::size_t n = 1; n <= 20; ++n) d.emplace_back(n, 3 * std::pow(0.5, n));
    const RateFit f = fit_exponential_rate(d);
    EXPECT_NEAR(f.r_fit, 0.5, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
}

TEST(RateFit, ConstantInput)
{
    std::vector<std::pair<std::size_t, double>> d;
    for (std::size_t n = 1; n <= 6; ++n) d.emplace_back(n, 0.2);
    EXPECT_NEAR(fit_exponential_rate(d).r_fit, 1.0, 1e-15);
}

TEST(RateFit, InsufficientSignal)
{
    std::vector<std::pair<std::size_t, double>> d;
    for (std::size_t n = 1; n <= 10; ++n) d.emplace_back(n, 1e-16);
    EXPECT_THROW(fit_exponential_rate(d), std::invalid_argument);
    d = {{1, 0.5}, {2, 0.25}, {3, 0.0}, {4, 0.1}};
    EXPECT_THROW(fit_exponential_rate(d), std::invalid_argument);
}

TEST(SequenceOracles, ConstantHalf)
{
    const auto r = sequence_oracle_products(std::vector<double>(60, 0.5), 60);
    for (std::size_t n = 1; n <= 60; ++n) {
        EXPECT_NEAR(r.a[n - 1], std::pow(0.5, n), 1e-300);
        EXPECT_NEAR(r.b[n - 1], 2.0 - std::pow(0.5, n - 1), 1e-14);
    }
}

TEST(SequenceOracles, ZeroAlphas)
{
    const auto r = sequence_oracle_products(std::vector<double>(10, 0.0), 10);
    for (std::size_t n = 1; n <= 10; ++n) {
        EXPECT_EQ(r.a[n - 1], 0.0);
        EXPECT_EQ(r.b[n - 1], 1.0);
    }
}

TEST(SequenceOracles, MatchesBruteForceSums)
{
    std::mt19937_64 g(83);
    std::uniform_real_distribution<double> u(0, 1.2);
    std::vector<double> a(30), b(30);
    for (auto& e : a) e = u(g);
    for (auto& e : b) e = u(g);
    const auto pr = sequence_oracle_products(a, 30);
    const auto ws = sequence_oracle_weighted_sum(a, b, 30);
    for (std::size_t n = 1; n <= 30; ++n) {
        double A = 1, B = 0, S = 0;
        for (std::size_t j = 1; j <= n; ++j) A *= a[j - 1];
        for (std::size_t j = 1; j <= n; ++j) {
            double p = 1;
            for (std::size_t i = j + 1; i <= n; ++i) p *= a[i - 1];
            B += p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double p = 1;
            for (std::size_t j = 0; j < i; ++j) p *= a[n - j - 1];
            S += p * b[n - i - 1];
        }
        EXPECT_NEAR(pr.a[n - 1], A, 1e-12 * (1 + A));
        EXPECT_NEAR(pr.b[n - 1], B, 1e-12 * (1 + B));
        EXPECT_NEAR(ws[n - 1], S, 1e-12 * (1 + S));
    }
}

TEST(SequenceOracles, HarmonicPerturbationStaysBounded)
{
    const std::size_t N = 10000;
    std::vector<double> a(N);
    for (std::size_t n = 1; n <= N; ++n) a[n - 1] = 0.5 + 1.0 / n;
    const auto r = sequence_oracle_products(a, N);
    const double amax = *std::max_element(r.a.begin(), r.a.end());
    const double bmax = *std::max_element(r.b.begin(), r.b.end());
    EXPECT_LT(amax, 10.0);
    EXPECT_LT(bmax, 100.0);
}

TEST(SequenceOracles, WeightedSums)
{
    const std::size_t N = 400;
    std::vector<double> half(N, 0.5), zero(N, 0.0), inv(N), nine(N, 0.9), geo(N);
    for (std::size_t n = 1; n <= N; ++n) {
        inv[n - 1] = 1.0 / n;
        geo[n - 1] = std::pow(0.9, n);
    }
    for (double v : sequence_oracle_weighted_sum(half, zero, N)) EXPECT_EQ(v, 0.0);
    const auto s = sequence_oracle_weighted_sum(half, inv, N);
    EXPECT_LT(s.back(), 1e-2);
    EXPECT_TRUE(std::any_of(s.begin(), s.end(), [](double v) { return v < 1e-2; }));
    const auto t = sequence_oracle_weighted_sum(nine, geo, N);
    for (std::size_t n = 1; n <= N; n += 37) EXPECT_NEAR(t[n - 1], n * std::pow(0.9, n), 1e-12);
}

TEST(DomainSampling, GridAndUniform)
{
    const Domain g = Domain::grid(2, 0.5, 3);
    ASSERT_EQ(g.samples().size(), 9u);
    EXPECT_EQ(g.samples().front(), (Vec{-0.5, -0.5}));
    EXPECT_EQ(g.samples().back(), (Vec{0.5, 0.5}));
    const Domain u1 = Domain::uniform(3, 2.0, 40, 7), u2 = Domain::uniform(3, 2.0, 40, 7);
    EXPECT_EQ(u1.samples(), u2.samples());
    for (PNorm p : {PNorm::one(), PNorm::two(), PNorm::inf(), PNorm::general(1.5)})
        for (const auto& x : u1.samples()) EXPECT_LE(norm(x, p), u1.norm_bound(p));
}

TEST(Study, ThreadCountDoesNotChangeResults)
{
    const LayerSeq seq = random_convergent(13, 3, 0.5);
    const BoundCalculator c1(plain_model(seq, Activation::relu()));
    const BoundCalculator c2(plain_model(random_convergent(13, 3, 0.5), Activation::relu()));
    const Domain dom = Domain::uniform(3, 1.0, 37, 1);
    StudyOptions o;
    o.n_list = {1, 2, 3, 5, 8};
    o.m_list = {1, 4};
    o.threads = 1;
    const auto r1 = run_study(c1, dom, o);
    o.threads = 5;
    const auto r2 = run_study(c2, dom, o);
    ASSERT_EQ(r1.rows.size(), r2.rows.size());
    for (std::size_t i = 0; i < r1.rows.size(); ++i) {
        EXPECT_EQ(r1.rows[i].empirical_dev, r2.rows[i].empirical_dev);
        EXPECT_EQ(r1.rows[i].argmax, r2.rows[i].argmax);
        EXPECT_EQ(r1.rows[i].deviation_bound, r2.rows[i].deviation_bound);
    }
    EXPECT_TRUE(r1.violations.empty());
    EXPECT_TRUE(r1.asserted);
}
