#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dynrg/model.hpp"
#include "dynrg/moments.hpp"
#include "dynrg/sim.hpp"

namespace dynrg {

struct ExperimentConfig {
    ModelSpec model;
    Observable observable = Observable::edges;
    Family family = Family::geo_geo;
    std::int64_t K = 0;
    int reps = 1;
    std::uint64_t seed = 1;
    int workers = 1;
    std::filesystem::path out{};
};

/// Reads {"on":..,"off":..,"n"|"N":..,"observable":..,"K":..,"reps":..,
/// "seed":..,"family":..,"workers":..,"out":..}. "family" defaults to the
/// one matching the laws; "observable" to edges.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct RepResult {
    int rep = 0;
    std::uint64_t seed = 0;
    std::vector<double> moments;
    std::vector<double> values;
    bool range_violation = false;
    std::string error;  // non-empty when estimation failed

    bool usable() const { return error.empty() && !range_violation; }
};

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<std::int64_t> counts;
};

struct ParamSummary {
    std::string name;
    std::optional<double> truth;
    double mean = 0.0;
    std::optional<double> sd;
    std::optional<double> delta_sd;  // delta-method prediction when available
    Histogram hist;
    std::vector<std::pair<double, double>> qq;  // (theoretical, sample), ascending
    std::optional<double> qq_slope;             // least squares over the central 95%
};

struct MomentSummary {
    double mean = 0.0;
    std::optional<double> scaled_var;  // K * sample variance
};

struct CampaignSummary {
    ExperimentConfig config;
    std::vector<RepResult> rows{};  // ordered by rep
    std::vector<ParamSummary> params{};
    std::vector<MomentSummary> moments{};
    std::optional<double> scaled_cov01{};  // K * sample covariance of mu0, mu1
    int errors = 0;
    int range_flags = 0;
    double wall_seconds = 0.0;  // not written to disk
};

/// Replication r = 1..R uses seed derive_seed(cfg.seed, r). Work is spread
/// over cfg.workers threads; results are ordered by rep before aggregation.
CampaignSummary run_campaign(const ExperimentConfig& cfg);

Histogram freedman_diaconis(const std::vector<double>& xs, int min_bins = 10);
std::vector<std::pair<double, double>> normal_qq(const std::vector<double>& xs);
std::optional<double> central_qq_slope(const std::vector<std::pair<double, double>>& qq, double mass = 0.95);

/// Writes estimates.csv, summary.json, hist_<param>.csv and qq_<param>.csv.
void emit_outputs(const CampaignSummary& summary, const std::filesystem::path& dir);
nlohmann::json summary_json(const CampaignSummary& summary);

}  // namespace dynrg
