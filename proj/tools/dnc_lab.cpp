// dnc-lab: batch driver for the convergence laboratory.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dnc/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAssertion = 2;

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

void print_condition(const dnc::ConditionVerdict& v, const char* label)
{
    std::cout << label << ": omega=" << dnc::csv_number(v.omega_estimate) << " (" << dnc::method_name(v.method)
              << ") " << (v.passed ? "pass" : "condition failed") << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Deep network convergence laboratory"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::size_t threads = 1;
    bool require_pass = false;
    app.add_option("command", command, "run | check | bounds | rates | selftest")
        ->required()
        ->check(CLI::IsMember({"run", "check", "bounds", "rates", "selftest"}));
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    app.add_flag("--require-pass", require_pass, "exit 2 when the convergence condition fails");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    if (command == "selftest") {
        try {
            const dnc::SelftestResult res = dnc::run_selftest(threads);
            for (const auto& f : res.failures) std::cout << "FAIL " << f << '\n';
            std::cout << "selftest: " << res.instances << " instances, " << res.checks << " checks, "
                      << res.failures.size() << " failures\n";
            return res.failures.empty() ? kOk : kAssertion;
        } catch (const std::exception& e) {
            std::cerr << "dnc-lab: " << e.what() << '\n';
            return kInvalid;
        }
    }

    if (config_path.empty()) {
        std::cerr << "dnc-lab: --config is required for '" << command << "'\n";
        return kInvalid;
    }

    dnc::ExperimentConfig cfg;
    try {
        cfg = dnc::load_config(config_path);
        if (const char* env = std::getenv("DNC_LAB_SEED")) {
            std::size_t used = 0;
            const std::string text(env);
            std::uint64_t seed = 0;
            try {
                seed = std::stoull(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != text.size()) throw std::invalid_argument("DNC_LAB_SEED must be an unsigned integer");
            dnc::override_seed(cfg, seed);
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
    } catch (const std::exception& e) {
        std::cerr << "dnc-lab: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        dnc::Instance inst = dnc::instantiate(cfg, threads);
        fs::create_directories(cfg.out_dir);
        const fs::path base = fs::path(cfg.out_dir) / cfg.prefix;
        dnc::ConvergenceReport rep;

        if (command == "check") {
            rep.condition = dnc::check_condition(inst.calc.model(), cfg.window);
            if (inst.masks) rep.mask_conditions = dnc::check_mask_conditions(*inst.masks, inst.calc.model().act, cfg.window);
        } else {
            rep = dnc::run_study(inst.calc, inst.domain, inst.options, inst.masks);
        }

        const std::string suffix = command == "run" ? "" : "." + command;
        write_file(base.string() + suffix + ".json", dnc::report_json(cfg, rep, command, utc_timestamp()).dump(2) + "\n");
        if (command == "run" || command == "bounds") write_file(base.string() + suffix + ".csv", dnc::report_csv(rep));

        print_condition(rep.condition, "condition");
        if (rep.mask_conditions) {
            print_condition(rep.mask_conditions->vanishing, "mask vanishing");
            print_condition(rep.mask_conditions->bounded_sum, "mask bounded sum");
            print_condition(rep.mask_conditions->exponential, "mask exponential");
        }
        if (command == "rates" || command == "run") {
            if (rep.rate_fit) {
                std::cout << "rate: r_fit=" << dnc::csv_number(rep.rate_fit->r_fit)
                          << " R2=" << dnc::csv_number(rep.rate_fit->r_squared) << '\n';
            } else {
                std::cout << "rate: " << rep.rate_note << '\n';
            }
        }

        int rc = kOk;
        if (command == "run" || command == "bounds") {
            for (const auto& v : rep.violations) {
                std::cerr << "violation: " << v.what << " n=" << v.n << " m=" << v.m << " x-index=" << v.sample
                          << " observed=" << dnc::csv_number(v.observed) << " bound=" << dnc::csv_number(v.bound)
                          << '\n';
            }
            if (!rep.violations.empty()) rc = kAssertion;
        }
        if (require_pass && !rep.condition.passed) {
            std::cerr << "dnc-lab: condition failed\n";
            rc = kAssertion;
        }
        return rc;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dnc-lab: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "dnc-lab: " << e.what() << '\n';
        return kInvalid;
    }
}
