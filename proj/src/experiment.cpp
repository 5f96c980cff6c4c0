#include "dnc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dnc {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("config: " + what); }

std::vector<std::size_t> positive_list(const json& j, const char* key)
{
    if (!j.is_array() || j.empty()) bad(std::string(key) + " must be a non-empty array");
    std::vector<std::size_t> out;
    for (const auto& e : j) {
        if (!e.is_number_integer() || e.get<long long>() < 1) bad(std::string(key) + " entries must be integers >= 1");
        out.push_back(e.get<std::size_t>());
    }
    return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
            bad("unknown key '" + it.key() + "' in " + where);
        }
    }
}

std::string padding_name(Padding p) { return p == Padding::Zero ? "zero" : "constant"; }

json num(double v)
{
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

GenSpec parse_generator(const json& g, std::optional<double>& omega_target)
{
    if (!g.is_object()) bad("generator must be an object");
    reject_unknown(g, {"family", "s", "widths", "r", "c", "seed", "norm_target", "omega_target", "pool_mu",
                       "mask_profile", "bias_scale", "weight", "bias"},
                   "generator");
    GenSpec spec;
    spec.family = family_from_name(g.value("family", std::string("constant")));
    spec.s = g.value("s", std::size_t{1});
    spec.r = g.value("r", 0.5);
    spec.c = g.value("c", 1.0);
    spec.seed = g.value("seed", std::uint64_t{1});
    spec.bias_scale = g.value("bias_scale", 0.1);
    spec.scalar_weight = g.value("weight", 0.4);
    spec.scalar_bias = g.value("bias", 0.0);
    if (g.contains("norm_target") && g.contains("omega_target")) bad("give norm_target or omega_target, not both");
    if (g.contains("norm_target")) spec.norm_target = g.at("norm_target").get<double>();
    if (g.contains("omega_target")) omega_target = g.at("omega_target").get<double>();
    if (g.contains("pool_mu")) spec.pool_mu = g.at("pool_mu").get<std::size_t>();
    if (g.contains("mask_profile")) spec.mask_profile = mask_profile_from_name(g.at("mask_profile").get<std::string>());
    if (g.contains("widths")) {
        const json& w = g.at("widths");
        reject_unknown(w, {"kind", "l", "list", "tau"}, "generator.widths");
        const std::string kind = w.value("kind", std::string("fixed"));
        if (kind == "fixed") spec.widths = WidthSchedule::fixed(w.value("l", std::size_t{1}));
        else if (kind == "cyclic") spec.widths = WidthSchedule::cyclic(positive_list(w.at("list"), "widths.list"));
        else if (kind == "cnn") spec.widths = WidthSchedule::cnn(w.value("tau", std::size_t{1}));
        else bad("unknown width schedule '" + kind + "'");
    }
    return spec;
}

json generator_echo(const GenSpec& g, const std::optional<double>& omega_target)
{
    json w;
    switch (g.widths.kind) {
    case WidthSchedule::Kind::Fixed: w = {{"kind", "fixed"}, {"l", g.widths.widths.at(0)}}; break;
    case WidthSchedule::Kind::Cyclic: w = {{"kind", "cyclic"}, {"list", g.widths.widths}}; break;
    case WidthSchedule::Kind::Cnn: w = {{"kind", "cnn"}, {"tau", g.widths.tau}}; break;
    }
    json j = {{"family", family_name(g.family)}, {"s", g.s}, {"widths", w}, {"r", g.r}, {"c", g.c},
              {"seed", g.seed}, {"norm_target", g.norm_target}, {"pool_mu", g.pool_mu},
              {"mask_profile", mask_profile_name(g.mask_profile)}, {"bias_scale", g.bias_scale}};
    if (g.family == Family::Scalar) {
        j["weight"] = g.scalar_weight;
        j["bias"] = g.scalar_bias;
    }
    if (omega_target) j["omega_target"] = *omega_target;
    return j;
}

void refresh_echo(ExperimentConfig& cfg)
{
    cfg.echo = {
        {"name", cfg.name},
        {"generator", generator_echo(cfg.generator, cfg.omega_target)},
        {"activation", {{"name", cfg.activation}, {"alpha", cfg.alpha}, {"lambda", cfg.lambda}}},
        {"pooling", {{"name", cfg.pooling}, {"mu", cfg.mu}}},
        {"norm", cfg.generator.p.name()},
        {"padding", padding_name(cfg.padding)},
        {"domain",
         {{"D", cfg.domain.bound}, {"sampler", cfg.domain.sampler}, {"count", cfg.domain.count},
          {"per_axis", cfg.domain.per_axis}, {"seed", cfg.domain.seed}}},
        {"depths", {{"n_list", cfg.n_list}, {"m_list", cfg.m_list}, {"M", cfg.big_m}}},
        {"window", {cfg.window.first, cfg.window.last}},
        {"tolerances", {{"relative", cfg.rel_tol}}},
        {"output", {{"dir", cfg.out_dir}, {"prefix", cfg.prefix}}},
    };
}

Activation make_activation(const ExperimentConfig& cfg)
{
    return Activation::from_name(cfg.activation, cfg.alpha, cfg.lambda);
}

}  // namespace

ExperimentConfig parse_config(const json& j)
{
    try {
        if (!j.is_object()) bad("top level must be an object");
        reject_unknown(j, {"name", "generator", "activation", "pooling", "norm", "padding", "domain", "depths", "window",
                           "tolerances", "output"},
                       "config");
        ExperimentConfig cfg;
        cfg.name = j.value("name", std::string("experiment"));
        if (!j.contains("generator")) bad("missing generator");
        cfg.generator = parse_generator(j.at("generator"), cfg.omega_target);

        if (j.contains("activation")) {
            const json& a = j.at("activation");
            if (a.is_object()) reject_unknown(a, {"name", "alpha", "lambda"}, "activation");
            cfg.activation = a.is_string() ? a.get<std::string>() : a.value("name", std::string("relu"));
            double default_alpha = 0.01;
            if (cfg.activation == "selu") default_alpha = 1.67326;
            else if (cfg.activation == "elu") default_alpha = 1.0;
            else if (cfg.activation == "prelu") default_alpha = 0.25;
            cfg.alpha = a.is_object() ? a.value("alpha", default_alpha) : default_alpha;
            cfg.lambda = a.is_object() ? a.value("lambda", 1.0507) : 1.0507;
        }
        const Activation act = make_activation(cfg);

        if (j.contains("pooling")) {
            const json& p = j.at("pooling");
            reject_unknown(p, {"name", "mu"}, "pooling");
            cfg.pooling = p.value("name", std::string("identity"));
            cfg.mu = p.value("mu", std::size_t{0});
        }
        const PoolingOp pool = PoolingOp::from_name(cfg.pooling, cfg.mu);
        if (j.at("generator").contains("pool_mu") && cfg.generator.pool_mu != cfg.mu) {
            bad("generator.pool_mu differs from pooling.mu");
        }
        cfg.generator.pool_mu = cfg.mu;

        const json norm = j.value("norm", json("2"));
        cfg.generator.p = PNorm::parse(norm.is_string() ? norm.get<std::string>() : norm.dump());

        const std::string padding = j.value("padding", std::string("zero"));
        if (padding == "zero") cfg.padding = Padding::Zero;
        else if (padding == "constant") cfg.padding = Padding::Constant;
        else bad("padding must be 'zero' or 'constant'");

        if (cfg.omega_target) {
            if (!(*cfg.omega_target > 0.0)) bad("omega_target must be > 0");
            cfg.generator.norm_target = *cfg.omega_target / (act.lipschitz() * pool_lipschitz(pool, cfg.generator.p));
        }

        if (j.contains("domain")) {
            const json& d = j.at("domain");
            reject_unknown(d, {"s", "D", "sampler", "count", "per_axis", "seed"}, "domain");
            if (d.contains("s") && d.at("s").get<std::size_t>() != cfg.generator.s) bad("domain.s differs from generator.s");
            cfg.domain.bound = d.value("D", 1.0);
            cfg.domain.sampler = d.value("sampler", std::string("uniform"));
            cfg.domain.count = d.value("count", std::size_t{100});
            cfg.domain.per_axis = d.value("per_axis", std::size_t{11});
            cfg.domain.seed = d.value("seed", std::uint64_t{1});
        }
        if (!(cfg.domain.bound > 0.0)) bad("domain.D must be > 0");
        if (cfg.domain.sampler != "uniform" && cfg.domain.sampler != "grid") bad("domain.sampler must be uniform or grid");

        if (!j.contains("depths")) bad("missing depths");
        const json& dep = j.at("depths");
        reject_unknown(dep, {"n_list", "m_list", "M"}, "depths");
        cfg.n_list = positive_list(dep.at("n_list"), "n_list");
        cfg.m_list = positive_list(dep.at("m_list"), "m_list");
        if (!std::is_sorted(cfg.n_list.begin(), cfg.n_list.end()) ||
            std::adjacent_find(cfg.n_list.begin(), cfg.n_list.end()) != cfg.n_list.end()) {
            bad("n_list must be strictly ascending");
        }
        cfg.big_m = dep.value("M", std::size_t{0});
        if (cfg.big_m != 0 && cfg.big_m <= cfg.n_list.back()) bad("depths.M must exceed every n");

        if (j.contains("window")) {
            const auto w = positive_list(j.at("window"), "window");
            if (w.size() != 2 || w[1] <= w[0]) bad("window must be [first, last] with first < last");
            cfg.window = {w[0], w[1]};
        }
        if (j.contains("tolerances")) {
            reject_unknown(j.at("tolerances"), {"relative"}, "tolerances");
            cfg.rel_tol = j.at("tolerances").value("relative", 1e-9);
            if (!(cfg.rel_tol >= 0.0)) bad("tolerances.relative must be >= 0");
        }
        if (j.contains("output")) {
            reject_unknown(j.at("output"), {"dir", "prefix"}, "output");
            cfg.out_dir = j.at("output").value("dir", std::string("."));
            cfg.prefix = j.at("output").value("prefix", std::string("report"));
        }
        refresh_echo(cfg);
        return cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

void override_seed(ExperimentConfig& cfg, std::uint64_t seed)
{
    cfg.generator.seed = seed;
    cfg.domain.seed = seed;
    refresh_echo(cfg);
}

Instance instantiate(const ExperimentConfig& cfg, std::size_t threads)
{
    Generated g = build(cfg.generator);
    const PoolingOp pool = PoolingOp::from_name(cfg.pooling, cfg.mu);
    NetworkKind kind = cfg.generator.family == Family::CnnMasks
                           ? NetworkKind::cnn()
                           : (pool.kind() == PoolingOp::Kind::Identity ? NetworkKind::plain() : NetworkKind::pooled(pool));
    if (cfg.generator.family == Family::CnnMasks && pool.kind() != PoolingOp::Kind::Identity) {
        throw std::invalid_argument("config: pooling is not supported with CNN layers");
    }
    Model model{g.seq, make_activation(cfg), kind, cfg.generator.p, cfg.padding};
    const std::size_t s = cfg.generator.s;
    Domain domain = cfg.domain.sampler == "grid" ? Domain::grid(s, cfg.domain.bound, cfg.domain.per_axis)
                                                 : Domain::uniform(s, cfg.domain.bound, cfg.domain.count, cfg.domain.seed);
    StudyOptions opt;
    opt.n_list = cfg.n_list;
    opt.m_list = cfg.m_list;
    opt.big_m = cfg.big_m;
    opt.window = cfg.window;
    opt.rel_tol = cfg.rel_tol;
    opt.threads = threads;
    return Instance{cfg.name, BoundCalculator(std::move(model)), std::move(domain), std::move(g.masks), std::move(opt)};
}

std::string csv_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string report_csv(const ConvergenceReport& rep)
{
    std::ostringstream out;
    out << kCsvHeader << "\r\n";
    const std::string cond = rep.condition.passed ? "pass" : "fail";
    for (const auto& row : rep.rows) {
        std::string dominance = "unchecked";
        if (rep.asserted) {
            const bool hit = std::any_of(rep.violations.begin(), rep.violations.end(), [&](const Violation& v) {
                return v.what == "deviation_bound" && v.n == row.n && v.m == row.m;
            });
            dominance = hit ? "violated" : "ok";
        }
        out << row.n << ',' << row.m << ',' << csv_number(row.empirical_dev) << ',' << csv_number(row.deviation_bound)
            << ',' << csv_number(row.apriori_bound) << ',' << (row.limit_bound ? csv_number(*row.limit_bound) : "")
            << ",condition=" << cond << ";dominance=" << dominance << "\r\n";
    }
    return out.str();
}

json condition_json(const ConditionVerdict& v)
{
    json j = {{"omega_estimate", num(v.omega_estimate)}, {"threshold", num(v.threshold)}, {"passed", v.passed},
              {"method", method_name(v.method)}, {"margin", num(v.margin)}};
    if (v.window) j["window"] = {v.window->first, v.window->last};
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

json report_json(const ExperimentConfig& cfg, const ConvergenceReport& rep, const std::string& section,
                 const std::string& timestamp)
{
    if (section != "run" && section != "check" && section != "bounds" && section != "rates")
        throw std::invalid_argument("unknown report section '" + section + "'");
    json j = {{"schema", kReportSchema}, {"timestamp", timestamp}, {"section", section}, {"config", cfg.echo}};
    const bool all = section == "run";
    if (all || section == "check") {
        j["condition"] = condition_json(rep.condition);
        if (!rep.condition.passed) j["condition"]["verdict"] = "condition failed";
        if (rep.mask_conditions) {
            j["mask_conditions"] = {{"vanishing", condition_json(rep.mask_conditions->vanishing)},
                                    {"bounded_sum", condition_json(rep.mask_conditions->bounded_sum)},
                                    {"exponential", condition_json(rep.mask_conditions->exponential)}};
        }
    }
    if (all || section == "bounds") {
        if (rep.limit_constants) {
            const auto& c = *rep.limit_constants;
            j["limit_constants"] = {{"omega0", num(c.omega0)}, {"w", num(c.w)}, {"rho", num(c.rho)},
                                    {"D", num(c.domain)}, {"n_scan", c.n_scan}};
        } else {
            j["limit_constants"] = nullptr;
        }
        json rows = json::array();
        for (const auto& r : rep.rows) {
            rows.push_back({{"n", r.n}, {"m", r.m}, {"empirical_dev", num(r.empirical_dev)}, {"argmax", r.argmax},
                            {"deviation_bound", num(r.deviation_bound)}, {"apriori_bound", num(r.apriori_bound)},
                            {"limit_bound", r.limit_bound ? num(*r.limit_bound) : json(nullptr)}});
        }
        j["rows"] = rows;
    }
    if (all || section == "rates") {
        json devs = json::array();
        for (const auto& [n, d] : rep.limit_devs) devs.push_back({{"n", n}, {"dev", num(d)}});
        j["limit_devs"] = devs;
        j["M"] = rep.big_m;
        if (rep.rate_fit) {
            j["rate_fit"] = {{"r_fit", num(rep.rate_fit->r_fit)}, {"intercept", num(rep.rate_fit->intercept)},
                             {"r_squared", num(rep.rate_fit->r_squared)}, {"used", rep.rate_fit->used},
                             {"excluded", rep.rate_fit->excluded}};
        } else {
            j["rate_fit"] = {{"error", rep.rate_note}};
        }
    }
    if (all || section == "bounds") {
        json viol = json::array();
        for (const auto& v : rep.violations) {
            viol.push_back({{"check", v.what}, {"n", v.n}, {"m", v.m}, {"sample", v.sample},
                            {"observed", num(v.observed)}, {"bound", num(v.bound)}});
        }
        j["violations"] = viol;
        j["asserted"] = rep.asserted;
    }
    return j;
}

// ---------------------------------------------------------------- corpus

namespace {

struct CorpusCase {
    std::string tag;
    Family family;
    std::size_t s;
    WidthSchedule widths;
    std::string norm;
    std::string pooling = "identity";
    std::size_t mu = 0;
    Padding padding = Padding::Zero;
    MaskProfile profile = MaskProfile::VanishingGeometric;
    double r = 0.5;
    // Sigmoid keeps sigma(0) = 1/2 in every coordinate of the sequence-space
    // extension, which only has finite norm for p = inf.
    bool sigmoid_needs_inf = false;
};

ExperimentConfig corpus_config(const CorpusCase& cc, const std::string& act, double alpha, std::uint64_t seed)
{
    json g = {{"family", family_name(cc.family)}, {"s", cc.s}, {"r", cc.r}, {"c", 1.0}, {"seed", seed},
              {"bias_scale", 0.1}};
    switch (cc.widths.kind) {
    case WidthSchedule::Kind::Fixed: g["widths"] = {{"kind", "fixed"}, {"l", cc.widths.widths[0]}}; break;
    case WidthSchedule::Kind::Cyclic: g["widths"] = {{"kind", "cyclic"}, {"list", cc.widths.widths}}; break;
    case WidthSchedule::Kind::Cnn: g["widths"] = {{"kind", "cnn"}, {"tau", cc.widths.tau}}; break;
    }
    if (cc.family == Family::CnnMasks) {
        g["mask_profile"] = mask_profile_name(cc.profile);
        g["norm_target"] = 0.5 / Activation::from_name(act, alpha, 1.0507).lipschitz();
    } else {
        g["omega_target"] = 0.5;
    }
    std::string norm = cc.norm;
    if (act == "sigmoid" && cc.sigmoid_needs_inf) norm = "inf";
    json a = {{"name", act}};
    if (act == "prelu") a["alpha"] = alpha;
    std::vector<std::size_t> n_list(12);
    for (std::size_t i = 0; i < 12; ++i) n_list[i] = i + 1;
    json j = {{"name", cc.tag + "/" + act},
              {"generator", g},
              {"activation", a},
              {"pooling", {{"name", cc.pooling}, {"mu", cc.mu}}},
              {"norm", norm},
              {"padding", padding_name(cc.padding)},
              {"domain", {{"D", 1.0}, {"sampler", "uniform"}, {"count", 100}, {"seed", seed + 1000}}},
              {"depths", {{"n_list", n_list}, {"m_list", {1, 2, 3, 4, 5, 6, 7, 8}}, {"M", 0}}},
              {"window", {10, 40}}};
    return parse_config(j);
}

}  // namespace

std::vector<ExperimentConfig> selftest_corpus()
{
    const std::vector<CorpusCase> cases = {
        {"fixed-constant", Family::Constant, 3, WidthSchedule::fixed(4), "2"},
        {"fixed-exp", Family::ExpDecay, 2, WidthSchedule::fixed(5), "2"},
        {"fixed-random-p1", Family::RandomConvergent, 4, WidthSchedule::fixed(4), "1", "identity", 0,
         Padding::Zero, MaskProfile::VanishingGeometric, 0.6},
        {"pooled-average", Family::ExpDecay, 2, WidthSchedule::fixed(4), "2", "average", 1},
        {"pooled-max-inf", Family::ExpDecay, 2, WidthSchedule::fixed(3), "inf", "max", 2},
        {"pooled-max-p1", Family::ExpDecay, 3, WidthSchedule::fixed(6), "1", "max", 1},
        {"cyclic-exp", Family::ExpDecay, 2, WidthSchedule::cyclic({5, 4, 3}), "2"},
        {"cyclic-random-inf", Family::RandomConvergent, 3, WidthSchedule::cyclic({4, 6}), "inf", "identity", 0,
         Padding::Zero, MaskProfile::VanishingGeometric, 0.6},
        {"general-p", Family::ExpDecay, 3, WidthSchedule::fixed(4), "1.5"},
        {"cnn-zero", Family::CnnMasks, 2, WidthSchedule::cnn(1), "2", "identity", 0, Padding::Zero,
         MaskProfile::VanishingGeometric, 0.5, true},
        {"cnn-zero-p1", Family::CnnMasks, 3, WidthSchedule::cnn(2), "1", "identity", 0, Padding::Zero,
         MaskProfile::VanishingGeometric, 0.5, true},
        {"cnn-constant", Family::CnnMasks, 3, WidthSchedule::cnn(2), "2", "identity", 0, Padding::Constant,
         MaskProfile::ConvergentToLimit, 0.5, true},
    };
    const std::vector<std::pair<std::string, double>> acts = {{"relu", 0.0}, {"prelu", 2.0}, {"selu", 0.0},
                                                              {"sigmoid", 0.0}};
    std::vector<ExperimentConfig> out;
    std::uint64_t seed = 101;
    for (const auto& cc : cases)
        for (const auto& [act, alpha] : acts) out.push_back(corpus_config(cc, act, alpha, seed++));

    json scalar = {{"name", "scalar-0.4/relu"},
                   {"generator", {{"family", "scalar"}, {"s", 1}, {"weight", 0.4}, {"bias", 0.0}}},
                   {"activation", "relu"},
                   {"norm", "2"},
                   {"domain", {{"D", 1.0}, {"sampler", "grid"}, {"per_axis", 21}}},
                   {"depths", {{"n_list", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}, {"m_list", {1, 2, 3, 4, 5, 6, 7, 8}}}},
                   {"window", {10, 40}}};
    out.push_back(parse_config(scalar));
    CorpusCase tanh_case{"fixed-exp", Family::ExpDecay, 3, WidthSchedule::fixed(4), "inf"};
    out.push_back(corpus_config(tanh_case, "tanh", 0.0, seed++));
    return out;
}

SelftestResult run_selftest(std::size_t threads)
{
    SelftestResult res;
    constexpr std::size_t kDepth = 40;
    for (const auto& cfg : selftest_corpus()) {
        ++res.instances;
        const Instance inst = instantiate(cfg, threads);
        const ConvergenceReport rep = run_study(inst.calc, inst.domain, inst.options, inst.masks);
        ++res.checks;
        if (!rep.condition.passed) {
            res.failures.push_back(cfg.name + ": condition failed (omega " + csv_number(rep.condition.omega_estimate) + ")");
            continue;
        }
        for (const auto& v : rep.violations) {
            res.failures.push_back(cfg.name + ": " + v.what + " violated at n=" + std::to_string(v.n) +
                                   " m=" + std::to_string(v.m) + " sample=" + std::to_string(v.sample));
        }

        // Cauchy behaviour: some n <= 40 with max_m sup_x deviation below 1e-6.
        ++res.checks;
        const std::size_t m_max = *std::max_element(cfg.m_list.begin(), cfg.m_list.end());
        std::vector<double> worst(kDepth + 1, 0.0);
        for (const Vec& x : inst.domain.samples()) {
            const auto st = inst.calc.states(x, kDepth + m_max);
            for (std::size_t n = 1; n <= kDepth; ++n)
                for (std::size_t m : cfg.m_list) worst[n] = std::max(worst[n], inst.calc.deviation(st, n, m));
        }
        if (std::none_of(worst.begin() + 1, worst.end(), [](double d) { return d < 1e-6; })) {
            res.failures.push_back(cfg.name + ": deviations stay above 1e-6 up to n=40");
        }
    }

    // Declared activation constants against a fine grid.
    for (const Activation& a : {Activation::relu(), Activation::leaky_relu(), Activation::prelu(2.0), Activation::elu(),
                                Activation::elu(2.0), Activation::selu(), Activation::sigmoid(), Activation::tanh(),
                                Activation::identity()}) {
        ++res.checks;
        const double est = empirical_lipschitz(a, {-5.0, 5.0, 100001});
        if (est > a.lipschitz() * (1.0 + 1e-9)) {
            res.failures.push_back("activation " + a.name() + ": empirical Lipschitz " + csv_number(est) +
                                   " above declared " + csv_number(a.lipschitz()));
        }
    }
    return res;
}

}  // namespace dnc
