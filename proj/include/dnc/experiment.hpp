#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnc/analysis.hpp"
#include "dnc/generators.hpp"

namespace dnc {

inline constexpr const char* kReportSchema = "dnc-lab/report/1";
inline constexpr const char* kCsvHeader = "n,m,empirical_dev,deviation_bound,apriori_bound,limit_bound,verdicts";

struct DomainSpec {
    double bound = 1.0;
    std::string sampler = "uniform";  // "uniform" or "grid"
    std::size_t count = 100;          // uniform
    std::size_t per_axis = 11;        // grid
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    std::string name = "experiment";
    GenSpec generator;
    std::optional<double> omega_target;  // overrides generator.norm_target via L P
    std::string activation = "relu";
    double alpha = 0.01;
    double lambda = 1.0507;
    std::string pooling = "identity";
    std::size_t mu = 0;
    Padding padding = Padding::Zero;
    DomainSpec domain;
    std::vector<std::size_t> n_list;
    std::vector<std::size_t> m_list;
    std::size_t big_m = 0;
    Window window{10, 40};
    double rel_tol = 1e-9;
    std::string out_dir = ".";
    std::string prefix = "report";
    nlohmann::json echo;  // normalised config written back into reports
};

/// Throws std::invalid_argument with a diagnostic on any invalid field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
/// Replaces generator and domain seeds (DNC_LAB_SEED).
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

struct Instance {
    std::string name;
    BoundCalculator calc;
    Domain domain;
    std::optional<MaskSeq> masks;
    StudyOptions options;
};

Instance instantiate(const ExperimentConfig& cfg, std::size_t threads = 1);

std::string csv_number(double v);
std::string report_csv(const ConvergenceReport& rep);

nlohmann::json condition_json(const ConditionVerdict& v);
/// `section` is one of run, check, bounds, rates.
nlohmann::json report_json(const ExperimentConfig& cfg, const ConvergenceReport& rep, const std::string& section,
                           const std::string& timestamp);

/// The shipped corpus: every instance satisfies the convergence hypotheses.
std::vector<ExperimentConfig> selftest_corpus();

struct SelftestResult {
    std::size_t instances = 0;
    std::size_t checks = 0;
    std::vector<std::string> failures;
};

SelftestResult run_selftest(std::size_t threads);

}  // namespace dnc
