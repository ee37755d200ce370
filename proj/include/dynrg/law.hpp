#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "json.hpp"

#include "dynrg/rng.hpp"

namespace dynrg {

struct Geometric {
    double p;
};

struct Weibull {
    double lambda;
    double alpha;
};

struct Pareto {
    double C;
    double alpha;
};

enum class LawKind { geometric, weibull, pareto };

/// Largest duration a sampler will return. Keeps remaining-time counters
/// far from overflow even for very heavy tails.
inline constexpr std::int64_t kMaxDuration = std::int64_t{1} << 62;

/// Positive-integer duration law with survival S(i) = P(Z >= i):
///   G(p):        (1 - p)^(i - 1)
///   W(lambda,a): exp(-lambda (i - 1)^a)
///   Par(C,a):    (C / (C + i - 1))^a
/// Immutable once built; safe to share between threads.
class OnOffLaw {
public:
    using Params = std::variant<Geometric, Weibull, Pareto>;

    static OnOffLaw geometric(double p);
    static OnOffLaw weibull(double lambda, double alpha);
    static OnOffLaw pareto(double C, double alpha);

    LawKind kind() const noexcept { return static_cast<LawKind>(params_.index()); }
    const Params& params() const noexcept { return params_; }

    double survival(std::int64_t i) const;
    double pmf(std::int64_t k) const;

    /// T(from) = sum_{i >= from} S(i); equals E[Z] at from = 1.
    double tail_sum(std::int64_t from) const;

    bool has_finite_mean() const noexcept;
    /// Throws Error(infinite_mean) for Pareto with alpha <= 1.
    double mean() const;

    /// Power-law tail index (Pareto alpha); +inf for light-tailed laws.
    double tail_index() const noexcept;

    /// Unique i >= 1 with S(i + 1) < u <= S(i), capped at kMaxDuration.
    std::int64_t sample(double u) const;
    std::int64_t sample(Xoshiro256& rng) const { return sample(rng.uniform_open()); }

    std::string describe() const;

private:
    explicit OnOffLaw(Params params);

    Params params_;
    double mean_;
};

/// Equilibrium (residual) law of an OnOffLaw: pmf S(k) / E[Z].
/// Copies share one lazily extended, mutex-protected CDF cache.
class ResidualLaw {
public:
    explicit ResidualLaw(const OnOffLaw& base);

    const OnOffLaw& base() const noexcept { return base_; }

    double pmf(std::int64_t k) const;
    /// Residual survival sum_{l >= k} pmf(l) = T(k) / E[Z].
    double survival(std::int64_t k) const;

    std::int64_t sample(double u) const;
    std::int64_t sample(Xoshiro256& rng) const { return sample(rng.uniform_open()); }

private:
    struct Cache;

    OnOffLaw base_;
    std::shared_ptr<Cache> cache_;
};

nlohmann::json to_json(const OnOffLaw& law);
/// Parses {"kind":"geometric","p":..}, {"kind":"weibull","lambda":..,"alpha":..}
/// or {"kind":"pareto","C":..,"alpha":..}. Throws Error(config) on malformed input.
OnOffLaw law_from_json(const nlohmann::json& j);

}  // namespace dynrg
