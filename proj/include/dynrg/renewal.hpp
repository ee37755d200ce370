#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dynrg/error.hpp"
#include "dynrg/model.hpp"

namespace dynrg {

/// theta entry forcing the edge off at that epoch.
inline constexpr double kForceOff = -std::numeric_limits<double>::infinity();

/// Largest epoch set accepted by joint_distribution.
inline constexpr int kJointEpochCap = 12;

/// M(theta) = E exp(sum_k theta_k 1(k)) for one stationary edge over k = 1..K,
/// K = theta.size(). Entries equal to kForceOff act as exact zero factors.
double joint_mgf(const ModelSpec& model, std::span<const double> theta);

/// Joint law of the on/off indicators at the given distinct epochs (>= 1).
/// Entry `mask` is the probability that the edge is on exactly at the epochs
/// whose bit is set (bit i <-> epochs[i] after sorting ascending).
std::vector<double> joint_distribution(const ModelSpec& model, std::vector<std::int64_t> epochs);

/// Renewal recursions for one edge, extended on demand. With a fresh on-period
/// starting at time 1 (r) or a fresh off-period (s):
///   r_t  = P(on at t),          s_t  = P(on at t),
///   r2_t = P(on at t and t+1),  s2_t = P(on at t and t+1),
/// and the residual versions conditioned only on being on at time 1 in
/// stationarity. So P(on at 1 and k) = rho * r_res(k).
class RenewalTables {
public:
    explicit RenewalTables(const ModelSpec& model);

    void extend_to(std::int64_t t);
    std::int64_t size() const noexcept { return static_cast<std::int64_t>(r_.size()) - 1; }

    double rho() const noexcept { return rho_; }
    double r(std::int64_t t) { return at(r_, t); }
    double s(std::int64_t t) { return at(s_, t); }
    double r2(std::int64_t t) { return at(r2_, t); }
    double s2(std::int64_t t) { return at(s2_, t); }
    double r_res(std::int64_t t) { return at(rr_, t); }
    double r2_res(std::int64_t t) { return at(rr2_, t); }
    /// Residual on-time pmf.
    double fbar(std::int64_t t) { return at(fbar_, t); }

private:
    double at(const std::vector<double>& v, std::int64_t t) {
        if (t < 1) throw Error(ErrorKind::parameter_domain, "renewal index must be >= 1");
        if (t > size()) extend_to(t);
        return v[static_cast<std::size_t>(t)];
    }

    ModelSpec model_;
    double rho_;
    // index 0 unused everywhere
    std::vector<double> f_, g_, sx_, sy_, fbar_, sbar_;
    std::vector<double> r_, s_, r2_, s2_, rr_, rr2_;
};

struct AutocovTable {
    std::int64_t k_max = 0;
    double rho = 0.0;
    // index 0 unused; entries 1..k_max
    std::vector<double> r, s, r_res;

    /// Cov(1(1), 1(k)) = rho (r_res(k) - rho).
    double cov(std::int64_t k) const { return rho * (r_res.at(static_cast<std::size_t>(k)) - rho); }
};

AutocovTable autocovariance(const ModelSpec& model, std::int64_t k_max);

// ---------------------------------------------------------------------------
// Saddlepoint approximation of the trace likelihood.

inline constexpr double kFiniteDiffStep = 1e-5;
inline constexpr int kLegendreIterCap = 500;

struct LegendreResult {
    double value = 0.0;          // I(counts)
    std::vector<double> theta;   // maximiser
    int iterations = 0;
};

class LegendreError : public Error {
public:
    LegendreError(const std::string& what, LegendreResult best)
        : Error(ErrorKind::convergence, what), best_(std::move(best)) {}
    const LegendreResult& best() const noexcept { return best_; }

private:
    LegendreResult best_;
};

/// I(c) = sup_theta (theta . c - n log M(theta)) for counts c_1..c_K of n
/// edges. Counts are clamped to [eps, n - eps].
LegendreResult legendre_I(const ModelSpec& model, std::span<const double> counts);

/// -J(c) = -(K/2) log(2 pi) - log det(n Hess log M(theta_c)) / 2 - I(c).
/// Throws Error(degenerate_saddle) if that Hessian is not positive definite.
double saddlepoint_logprob(const ModelSpec& model, std::span<const double> counts);

}  // namespace dynrg
