// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dnc/analysis.hpp"
#include "dnc/experiment.hpp"
#include "dnc/generators.hpp"
#include "dnc/linalg.hpp"
#include "dnc/network.hpp"
#include "dnc/pooling.hpp"
#include "oracles.hpp"

using namespace dnc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (ok) detail = why;
        ok = false;
    }
};

const std::vector<PNorm> kExact{PNorm::one(), PNorm::two(), PNorm::inf()};

Outcome norm_preservation()
{
    Outcome out;
    std::mt19937_64 g(1001);
    std::uniform_int_distribution<std::size_t> dim(1, 6), extra(0, 5);
    double worst2 = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t r = dim(g), c = dim(g);
        const Mat W = oracle::random_mat(g, r, c);
        const std::size_t l = std::max(r, c) + extra(g);
        const Mat Wt = zero_pad_matrix(W, l);
        if (induced_norm(Wt, PNorm::one()) != oracle::col_sum_max(W)) out.fail("p=1 case " + std::to_string(t));
        if (induced_norm(Wt, PNorm::inf()) != oracle::row_sum_max(W)) out.fail("p=inf case " + std::to_string(t));
        const double ref = oracle::spectral_jacobi(W);
        const double rel = std::fabs(induced_norm(Wt, PNorm::two()) - ref) / ref;
        worst2 = std::max(worst2, rel);
        if (rel > 1e-7) out.fail("p=2 case " + std::to_string(t));
        // Extension into sequence space: the padded state has the same norm as the original.
        const Vec x = oracle::random_vec(g, c);
        const Vec y = W * x;
        const auto ext = EventuallyConstSeq::zero_extended(y);
        for (PNorm p : kExact)
            if (ext.norm(p) != norm(y, p)) out.fail("sequence extension case " + std::to_string(t));
    }
    if (out.ok) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "500 cases, worst p=2 relative error %.2e", worst2);
        out.detail = buf;
    }
    return out;
}

Outcome pooling_lipschitz()
{
    Outcome out;
    std::mt19937_64 g(1002);
    std::uniform_int_distribution<std::size_t> extra(0, 6);
    std::size_t checked = 0;
    for (const char* kind : {"identity", "average", "max"})
        for (std::size_t mu = 0; mu <= 4; ++mu) {
            if (std::string(kind) == "identity" && mu > 0) continue;
            const PoolingOp op = PoolingOp::from_name(kind, mu);
            for (PNorm p : kExact) {
                const double lip = pool_lipschitz(op, p);
                for (int t = 0; t < 10000; ++t) {
                    const std::size_t d = mu + 1 + extra(g);
                    const Vec x = oracle::random_vec(g, d, 2.0), y = oracle::random_vec(g, d, 2.0);
                    const double lhs = norm(pool(op, x) - pool(op, y), p);
                    const double rhs = lip * norm(x - y, p);
                    if (lhs > rhs * (1 + 1e-12)) out.fail(std::string(kind) + " mu=" + std::to_string(mu) + " p=" + p.name());
                    ++checked;
                }
            }
        }
    if (out.ok) out.detail = std::to_string(checked) + " pairs";
    return out;
}

std::vector<Instance>& corpus()
{
    static std::vector<Instance> inst = [] {
        std::vector<Instance> v;
        for (const auto& cfg : selftest_corpus()) v.push_back(instantiate(cfg));
        return v;
    }();
    return inst;
}

Outcome apriori_dominance()
{
    Outcome out;
    std::size_t checked = 0;
    for (const Instance& inst : corpus()) {
        const double radius = inst.domain.norm_bound(inst.calc.model().p);
        std::vector<double> bound(16);
        for (std::size_t n = 1; n <= 15; ++n) bound[n] = inst.calc.apriori_bound(n, radius);
        for (std::size_t i = 0; i < inst.domain.samples().size(); ++i) {
            const auto st = inst.calc.states(inst.domain.samples()[i], 15);
            for (std::size_t n = 1; n <= 15; ++n) {
                ++checked;
                if (inst.calc.state_norm(st[n]) > bound[n] * (1 + 1e-9))
                    out.fail(inst.name + " n=" + std::to_string(n) + " x=" + std::to_string(i));
            }
        }
    }
    if (out.ok) out.detail = std::to_string(corpus().size()) + " instances, " + std::to_string(checked) + " states";
    return out;
}

Outcome deviation_dominance()
{
    Outcome out;
    std::size_t checked = 0;
    for (const Instance& inst : corpus()) {
        for (std::size_t i = 0; i < inst.domain.samples().size(); ++i) {
            const auto st = inst.calc.states(inst.domain.samples()[i], 20);
            for (std::size_t n = 1; n <= 12; ++n)
                for (std::size_t m = 1; m <= 8; ++m) {
                    ++checked;
                    const double dev = inst.calc.deviation(st, n, m);
                    const double bound = inst.calc.deviation_bound(n, m, st);
                    if (dev > bound * (1 + 1e-9) + 1e-300)
                        out.fail(inst.name + " n=" + std::to_string(n) + " m=" + std::to_string(m) + " x=" +
                                 std::to_string(i));
                }
        }
    }
    // Tightness on the scalar 0.4 network.
    const BoundCalculator scalar(Model{scalar_net(0.4, 0.0), Activation::relu(), NetworkKind::plain(), PNorm::two()});
    const Domain grid = Domain::grid(1, 1.0, 21);
    double worst = 0;
    for (std::size_t n = 1; n <= 12; ++n)
        for (std::size_t m = 1; m <= 8; ++m) {
            const auto sup = empirical_sup_deviation(scalar, grid.samples(), n, m);
            const auto st = scalar.states(grid.samples()[sup.argmax], n + m);
            const double bound = scalar.deviation_bound(n, m, st);
            const double closed = std::pow(0.4, double(n)) - std::pow(0.4, double(n + m));
            worst = std::max({worst, std::fabs(sup.value - bound), std::fabs(bound - closed)});
        }
    if (worst > 1e-12) out.fail("scalar 0.4 network not tight");
    if (out.ok) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu cells, scalar gap %.1e", checked, worst);
        out.detail = buf;
    }
    return out;
}

Outcome uniform_convergence()
{
    Outcome out;
    std::size_t considered = 0;
    for (const Instance& inst : corpus()) {
        if (!check_condition(inst.calc.model(), inst.options.window).passed) continue;
        ++considered;
        const auto& xs = inst.domain.samples();
        std::vector<std::vector<EventuallyConstSeq>> st;
        for (const auto& x : xs) st.push_back(inst.calc.states(x, 40 + 16));
        bool reached = false;
        for (std::size_t n = 1; n <= 40 && !reached; ++n) {
            double worst = 0;
            for (std::size_t m : {1u, 2u, 4u, 8u, 16u})
                for (const auto& s : st) worst = std::max(worst, inst.calc.deviation(s, n, m));
            reached = worst < 1e-6;
        }
        if (!reached) out.fail(inst.name);
    }
    if (considered == 0) out.fail("no instance passed its condition");
    if (out.ok) out.detail = std::to_string(considered) + " instances";
    return out;
}

Outcome exponential_rate()
{
    Outcome out;
    double worst_r = 0, worst_r2 = 1;
    int count = 0;
    for (const char* act : {"relu", "selu", "sigmoid", "tanh", "prelu"})
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            ExperimentConfig cfg;
            cfg.name = "rate";
            cfg.generator.family = Family::ExpDecay;
            cfg.generator.s = 3;
            cfg.generator.widths = WidthSchedule::fixed(5);
            cfg.generator.r = 0.5;
            cfg.generator.seed = seed;
            cfg.activation = act;
            cfg.alpha = std::string(act) == "prelu" ? 2.0 : 0.01;
            const double L = Activation::from_name(cfg.activation, cfg.alpha, cfg.lambda).lipschitz();
            cfg.generator.norm_target = 0.6 / L;
            cfg.domain.count = 100;
            cfg.domain.seed = seed + 10;
            cfg.n_list = {4, 6, 8, 10, 12, 14, 16, 18, 20};
            cfg.m_list = {1};
            const Instance inst = instantiate(cfg);
            const ConvergenceReport rep = run_study(inst.calc, inst.domain, inst.options, inst.masks);
            ++count;
            if (!rep.rate_fit) {
                out.fail(std::string(act) + " seed " + std::to_string(seed) + ": " + rep.rate_note);
                continue;
            }
            worst_r = std::max(worst_r, rep.rate_fit->r_fit);
            worst_r2 = std::min(worst_r2, rep.rate_fit->r_squared);
            if (rep.rate_fit->r_fit > 0.65 || rep.rate_fit->r_squared < 0.98)
                out.fail(std::string(act) + " seed " + std::to_string(seed));
        }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d instances, max r_fit %.4f, min R2 %.4f", count, worst_r, worst_r2);
    if (out.ok) out.detail = buf;
    else out.detail += std::string(" (") + buf + ")";
    return out;
}

Outcome cnn_extensions()
{
    Outcome out;
    std::mt19937_64 g(1007);
    std::uniform_int_distribution<std::size_t> taus(0, 4), cols(1, 12);
    for (int t = 0; t < 500; ++t) {
        const Vec w = oracle::random_vec(g, taus(g) + 1);
        const Vec x = oracle::random_vec(g, cols(g));
        const Vec y = toeplitz_from_mask(w, x.dim()).apply(x);
        const Vec yd = toeplitz_from_mask(w, x.dim()).to_dense() * x;
        const auto ref = oracle::convolve(w.data(), x.data());
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (std::fabs(y[i] - ref[i]) > 1e-12 || std::fabs(yd[i] - ref[i]) > 1e-12) out.fail("convolution");

        const auto semi = BandedToeplitz::semi_infinite(w);
        double abs_sum = 0;
        for (double v : w.data()) abs_sum += std::fabs(v);
        if (toeplitz_norm(semi, PNorm::one()) != abs_sum || toeplitz_norm(semi, PNorm::inf()) != abs_sum)
            out.fail("sequence-space Toeplitz norm");
        // A long truncation attains the same value in both exact norms.
        const Mat dense = toeplitz_from_mask(w, w.dim() + 3).to_dense();
        if (std::fabs(induced_norm(dense, PNorm::one()) - abs_sum) > 1e-15 * (1 + abs_sum) ||
            std::fabs(induced_norm(dense, PNorm::inf()) - abs_sum) > 1e-15 * (1 + abs_sum))
            out.fail("truncated Toeplitz norm");
    }

    // Constant padding against dense truncation of the semi-infinite network.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GenSpec spec;
        spec.family = Family::CnnMasks;
        spec.s = 2;
        spec.widths = WidthSchedule::cnn(1 + seed % 3);
        spec.mask_profile = MaskProfile::ConvergentToLimit;
        spec.norm_target = 0.5;
        spec.c = 0.3;
        spec.seed = seed;
        const Generated gen = build(spec);
        const Activation act = seed % 2 ? Activation::sigmoid() : Activation::tanh();
        const Vec x = random_vector(2, seed + 100);
        const std::size_t depth = 6, T = 80;
        // Dense evaluation on a long window: layer 1 zero-pads x, later layers act on the whole window.
        std::vector<double> state(T, 0.0);
        {
            const Vec w = gen.masks->mask(1);
            const Vec b = gen.seq.layer(1).bias;
            for (std::size_t i = 0; i < T; ++i) {
                double s = i < b.dim() ? b[i] : 0.0;
                for (std::size_t k = 0; k < w.dim(); ++k)
                    if (i >= k && i - k < x.dim()) s += w[k] * x[i - k];
                state[i] = act.eval(s);
            }
        }
        for (std::size_t n = 2; n <= depth; ++n) {
            const Vec w = gen.masks->mask(n);
            const Vec b = gen.seq.layer(n).bias;
            std::vector<double> next(T);
            for (std::size_t i = 0; i < T; ++i) {
                double s = i < b.dim() ? b[i] : 0.0;
                for (std::size_t k = 0; k < w.dim(); ++k)
                    if (i >= k) s += w[k] * state[i - k];
                next[i] = act.eval(s);
            }
            state = next;
        }
        const EventuallyConstSeq ext =
            eval_extended(gen.seq, NetworkKind::cnn(), act, x, depth, Padding::Constant);
        // Entries near the left edge of the window see the full filter history.
        for (std::size_t i = 0; i < T / 2; ++i)
            if (std::fabs(ext.at(i) - state[i]) > 1e-12) out.fail("constant padding interior, seed " + std::to_string(seed));
    }

    // Mask verdicts on constructed families.
    GenSpec spec;
    spec.family = Family::CnnMasks;
    spec.s = 2;
    spec.widths = WidthSchedule::cnn(2);
    spec.norm_target = 0.6;
    const Window win{10, 60};
    spec.mask_profile = MaskProfile::VanishingGeometric;
    auto r = check_mask_conditions(*build(spec).masks, Activation::relu(), win);
    if (!r.vanishing.passed || !r.bounded_sum.passed || !r.exponential.passed) out.fail("vanishing geometric verdicts");
    spec.mask_profile = MaskProfile::VanishingHarmonic;
    r = check_mask_conditions(*build(spec).masks, Activation::relu(), win);
    if (!r.vanishing.passed || !r.bounded_sum.passed || r.exponential.passed) out.fail("vanishing harmonic verdicts");
    spec.mask_profile = MaskProfile::ConvergentToLimit;
    r = check_mask_conditions(*build(spec).masks, Activation::relu(), win);
    if (r.vanishing.passed || !r.bounded_sum.passed || std::fabs(r.bounded_sum.omega_estimate - 0.6) > 1e-12 ||
        !r.exponential.passed)
        out.fail("convergent-to-limit verdicts");
    spec.norm_target = 1.5;
    r = check_mask_conditions(*build(spec).masks, Activation::relu(), win);
    if (r.bounded_sum.passed) out.fail("oversized mask limit passed");
    if (out.ok) out.detail = "500 convolutions, 20 constant-padding networks, 4 mask families";
    return out;
}

Outcome sequence_lemmas()
{
    Outcome out;
    const std::size_t N = 10000;
    std::vector<double> constant(N, 0.7), harmonic(N);
    for (std::size_t n = 1; n <= N; ++n) harmonic[n - 1] = 0.5 + 1.0 / n;
    for (const auto* alphas : {&constant, &harmonic}) {
        const auto r = sequence_oracle_products(*alphas, N);
        const double amax = *std::max_element(r.a.begin(), r.a.end());
        const double bmax = *std::max_element(r.b.begin(), r.b.end());
        if (!(amax < 10) || !(bmax < 10)) out.fail("products unbounded");
        if (!(r.a.back() < 1e-6)) out.fail("products do not vanish");
    }
    // The weighted sums need long horizons when beta decays like 1/n.
    const std::size_t Nlong = 10'000'000;
    std::string reached;
    for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi) {
            std::vector<double> a(Nlong), b(Nlong);
            for (std::size_t n = 1; n <= Nlong; ++n) {
                a[n - 1] = ai == 0 ? 0.7 : 0.5 + 1.0 / n;
                b[n - 1] = bi == 0 ? 1.0 / n : std::pow(0.8, double(n));
            }
            const auto s = sequence_oracle_weighted_sum(a, b, Nlong);
            const auto it = std::find_if(s.begin(), s.end(), [](double v) { return v < 1e-6; });
            if (it == s.end()) {
                out.fail("weighted sum stays above 1e-6");
                continue;
            }
            const std::size_t first = std::size_t(it - s.begin()) + 1;
            if (std::any_of(it, s.end(), [](double v) { return v >= 1e-6; })) out.fail("weighted sum rises again");
            reached += (reached.empty() ? "" : ", ") + std::to_string(first);
        }
    if (out.ok) out.detail = "below 1e-6 at n = " + reached;
    return out;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string without_timestamp(const std::string& text)
{
    return std::regex_replace(text, std::regex("\"timestamp\": \"[^\"]*\""), "\"timestamp\": \"\"");
}

Outcome reproducibility()
{
    Outcome out;
    const fs::path work = fs::temp_directory_path() / ("dnc-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(work);
    for (const char* config : {"exp_decay.json", "cnn_constant.json"}) {
        std::vector<std::string> json_out, csv_out;
        for (int threads : {1, 8}) {
            const fs::path dir = work / (std::string(config) + "-" + std::to_string(threads));
            const std::string cmd = std::string("\"") + DNC_LAB_PATH + "\" run --config \"" + DNC_CONFIG_DIR + "/" +
                                    config + "\" --out \"" + dir.string() + "\" --threads " + std::to_string(threads) +
                                    " > /dev/null";
            if (std::system(cmd.c_str()) != 0) out.fail(std::string("run failed for ") + config);
            const std::string prefix = parse_config(nlohmann::json::parse(read_file(fs::path(DNC_CONFIG_DIR) / config))).prefix;
            json_out.push_back(without_timestamp(read_file(dir / (prefix + ".json"))));
            csv_out.push_back(read_file(dir / (prefix + ".csv")));
        }
        if (json_out[0].empty() || json_out[0] != json_out[1]) out.fail(std::string("JSON differs for ") + config);
        if (csv_out[0].empty() || csv_out[0] != csv_out[1]) out.fail(std::string("CSV differs for ") + config);
    }
    fs::remove_all(work);
    if (out.ok) out.detail = "2 configs, 1 and 8 threads";
    return out;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "norm preservation under padding", 5, norm_preservation},
        {2, "pooling Lipschitz constants", 5, pooling_lipschitz},
        {3, "a-priori bound dominance", 60, apriori_dominance},
        {4, "deviation bound dominance and tightness", 120, deviation_dominance},
        {5, "uniform convergence on the corpus", 120, uniform_convergence},
        {6, "exponential rate", 30, exponential_rate},
        {7, "CNN evaluation and extensions", 30, cnn_extensions},
        {8, "sequence oracles", 10, sequence_lemmas},
        {9, "report reproducibility across thread counts", 120, reproducibility},
    };
    // Instantiating the corpus is shared by criteria 3 to 5; it is charged to criterion 3.
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_s) o.fail("took longer than " + std::to_string(int(c.limit_s)) + " s");
        std::printf("%s criterion %d: %s (%.2f s) %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
