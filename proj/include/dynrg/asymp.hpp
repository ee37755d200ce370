#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "dynrg/model.hpp"

namespace dynrg {

/// Limit variances and covariance of sqrt(K) (mu0 - s0, mu1 - s1).
struct MomentCov {
    double v0 = 0.0;
    double v1 = 0.0;
    double c01 = 0.0;
};

/// Limit covariance of sqrt(K) (p - p0, q - q0): [[sigma2, cross], [cross, tau2]].
struct ParamCov {
    double sigma2 = 0.0;
    double tau2 = 0.0;
    double cross = 0.0;
};

/// gradient of p (gamma) and q (delta) with respect to (mu0, mu1) at the truth.
struct DeltaCoefficients {
    double gamma0, gamma1, delta0, delta1;
};

/// `exact` differentiates q = D / (n - mu0) directly. `proportional` uses
/// delta = (q/p) gamma, which drops the term (p + q)^2 / (n p) from delta0 and
/// makes the covariance rank one.
enum class DeltaForm { exact, proportional };

DeltaCoefficients delta_coefficients(std::int64_t n, double p, double q,
                                     DeltaForm form = DeltaForm::exact);

/// Closed forms for geometric on-times G(p) and off-times G(q).
/// Throws Error(parameter_domain) unless p, q lie in (0, 1).
MomentCov geometric_moment_cov(std::int64_t n, double p, double q);

ParamCov delta_method_cov(std::int64_t n, double p, double q, const MomentCov& mc,
                          DeltaForm form = DeltaForm::exact);

inline constexpr double kCovTol = 1e-12;
inline constexpr std::int64_t kCovCap = std::int64_t{1} << 14;

struct GeneralCovResult {
    MomentCov cov;
    std::int64_t terms = 0;    // lags summed explicitly
    bool converged = false;    // stopped on the tolerance before k_cap
    bool summable = true;      // false when the tail does not look summable
    double tail_slope = 0.0;   // log-log slope of the terms near k_cap (when reached)
    std::string warning;
};

/// Any model with finite means: sums the lagged covariances of A and of
/// A(k) A(k+1), expanding products of aggregate counts over set partitions
/// of the edge indices. Stops once `tol`-relative increments persist or at
/// k_cap, where a power-law tail correction is added if the terms decay
/// faster than 1/k.
GeneralCovResult general_moment_cov(const ModelSpec& model, double tol = kCovTol,
                                    std::int64_t k_cap = kCovCap);

struct Finiteness {
    bool finite = true;
    std::string explanation;
};

/// v0, v1 and c01 are finite when every Pareto law involved has alpha > 2.
Finiteness finiteness_check(const ModelSpec& model);

nlohmann::json to_json(const MomentCov& mc);
nlohmann::json to_json(const ParamCov& pc);

}  // namespace dynrg
