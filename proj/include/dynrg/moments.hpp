#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dynrg/model.hpp"
#include "dynrg/sim.hpp"

namespace dynrg {

/// mu[0] = mean of the trace; mu[l] = mean of x(k) x(k + l) over k = 1..K-l.
struct MomentSet {
    Observable kind = Observable::edges;
    std::vector<double> mu;
    std::int64_t n = 0;
    std::optional<int> N;
    std::int64_t K = 0;
};

/// One-pass accumulator for the lag moments up to L - 1. Keeps the last
/// L - 1 values in a ring and exact 128-bit integer sums.
class MomentAccumulator {
public:
    explicit MomentAccumulator(int L);

    void push(std::int64_t value);
    std::int64_t count() const noexcept { return count_; }

    /// Throws Error(insufficient_data) unless more than L - 1 values were pushed.
    MomentSet finish(Observable kind, std::int64_t n, std::optional<int> N = std::nullopt) const;

private:
    int L_;
    std::int64_t count_ = 0;
    std::vector<std::int64_t> ring_;
    std::vector<__int128> sums_;
};

MomentSet empirical_moments(const CountTrace& trace, int L);

/// s_l = E A(1) A(1 + l) for l >= 1 and s_0 = E A(1) = n rho. Lags up to 3
/// use the on/off scenario sums; longer lags the joint law of epochs {1, l+1}.
double theoretical_moment(const ModelSpec& model, int lag);
/// Same quantity for any lag via the joint law only.
double theoretical_moment_joint(const ModelSpec& model, int lag);
MomentSet theoretical_moments(const ModelSpec& model, int L);

// ---------------------------------------------------------------------------

enum class Family { geo_geo, pareto_pareto, weibull_geo, pareto_geo };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);
/// Number of lag moments (L) each family's estimator consumes.
int moments_needed(Family family);
/// Family whose parameterisation matches the model's laws; Error(config) otherwise.
Family infer_family(const ModelSpec& model);
/// Parameter names and true values of `model` in the family's parameterisation.
std::vector<std::string> parameter_names(Family family);
std::vector<double> true_parameters(Family family, const ModelSpec& model);
/// Model with the given parameters, vertex/edge count copied from `like`.
ModelSpec model_from_parameters(Family family, const std::vector<double>& params,
                                const ModelSpec& like);

struct EstimateReport {
    Family family = Family::geo_geo;
    Observable observable = Observable::edges;
    std::vector<std::string> names;
    std::vector<double> values;
    /// Empirical moments used and the model moments at the estimate, minus the former.
    std::vector<double> moments;
    std::vector<double> residuals;
    /// Limit covariance of sqrt(K) (estimate - truth), evaluated at the estimate.
    std::optional<std::vector<std::vector<double>>> covariance;
    std::string covariance_method;
    int iterations = 0;
    bool range_violation = false;
    std::vector<std::string> notes;
};

nlohmann::json to_json(const EstimateReport& report);

/// p = D / mu0, q = D / (n - mu0), D = mu0 - mu1 + (1 - 1/n) mu0^2.
EstimateReport estimate_gg(const MomentSet& m);
/// alpha = zeta^-1(mu0 / D), beta = zeta^-1((n - mu0) / D).
EstimateReport estimate_parpar(const MomentSet& m);
/// X ~ W(1, alpha), Y ~ G(q): alpha = chi^-1(mu0 / D), q as in estimate_gg.
EstimateReport estimate_weibull_geo(const MomentSet& m);
/// X ~ Par(C, alpha), Y ~ G(q): zeta(C, alpha) = mu0 / D and
/// (C / (C + 1))^alpha = q - (mu2 - mu1) / D.
EstimateReport estimate_pareto_geo(const MomentSet& m);

EstimateReport estimate(Family family, const MomentSet& m);

// ---------------------------------------------------------------------------
// Triangle and wedge counts for geometric on/off times.

/// For a fixed vertex triple, the number of triples sharing with it
/// no vertex (a0), one vertex (a1 = 3 C(N-3, 2)), one edge (a2 = 3 (N - 3))
/// or all three edges (a3 = 1). total = C(N, 3).
struct TripleOverlap {
    double total, a0, a1, a2, a3;
};
TripleOverlap triple_overlap(int N);

/// Lag 0: E T(k); lag 1: E T(k) T(k+1). Same for wedges.
double triangle_moment(int N, double rho, double fbar1, int lag);
double wedge_moment(int N, double rho, double fbar1, int lag);
double triangle_moment(const ModelSpec& model, int lag);
double wedge_moment(const ModelSpec& model, int lag);

/// Solves the subgraph moment equations for (rho, fbar1) and maps to (p, q).
EstimateReport estimate_from_subgraph(const MomentSet& m);

}  // namespace dynrg
