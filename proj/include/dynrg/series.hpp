#pragma once

#include <cstdint>

namespace dynrg {

inline constexpr double kSeriesTol = 1e-12;
inline constexpr double kInversionTol = 1e-10;

// Tolerances below are absolute for values up to 1 and relative beyond,
// i.e. |error| <= tol * max(1, |value|).

/// Sum_{i >= from} (C / (C + i - 1))^alpha, the tail of the Pareto-Lomax
/// survival series. Requires C > 0, alpha > 1, from >= 1.
double pareto_survival_sum(double C, double alpha, std::int64_t from = 1, double tol = kSeriesTol);

/// Sum_{i >= from} exp(-lambda (i - 1)^alpha), the tail of the discrete
/// Weibull survival series. Requires lambda > 0, alpha > 0, from >= 1.
/// May return +inf when the value exceeds the double range.
double weibull_survival_sum(double lambda, double alpha, std::int64_t from = 1,
                            double tol = kSeriesTol);

enum class SeriesKind { zeta, hurwitz, chi };

/// Selects one of the three mean functions used by the estimators:
///   zeta:       sum_i i^-alpha
///   hurwitz(C): sum_i C^alpha / (C + i - 1)^alpha   (mean of Par(C, alpha))
///   chi:        sum_i exp(-(i - 1)^alpha)           (mean of W(1, alpha))
struct ZetaLike {
    SeriesKind kind = SeriesKind::zeta;
    double C = 1.0;

    static constexpr ZetaLike riemann() { return {SeriesKind::zeta, 1.0}; }
    static constexpr ZetaLike hurwitz(double C) { return {SeriesKind::hurwitz, C}; }
    static constexpr ZetaLike chi() { return {SeriesKind::chi, 1.0}; }
};

double zeta_like(const ZetaLike& fn, double alpha, double tol = kSeriesTol);

/// Solves zeta_like(fn, alpha) = target for alpha by bisection. All three
/// functions are strictly decreasing in alpha. The range is (1, inf) for
/// zeta and hurwitz and (1 + 1/e, inf) for chi.
/// Throws Error(out_of_range) when target is not inside that range.
double invert_zeta_like(const ZetaLike& fn, double target, double tol = kInversionTol);

}  // namespace dynrg
