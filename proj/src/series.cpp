#include "dynrg/series.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "dynrg/error.hpp"

namespace dynrg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// B_{2j} / (2j)! for j = 1..7.
constexpr std::array<double, 7> kBernoulliOverFactorial = {
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
    (5.0 / 66.0) / 3628800.0,
    (-691.0 / 2730.0) / 479001600.0,
    (7.0 / 6.0) / 87178291200.0,
};
constexpr int kEmTerms = 6;

constexpr std::int64_t kMaxDirectTerms = std::int64_t{1} << 24;

bool accept(double bound, double value, double tol) {
    return bound <= tol * std::max(1.0, std::fabs(value));
}

// Euler-Maclaurin tail of sum_{i >= b} (C / (C + i - 1))^alpha.
// Returns the estimate; `bound` receives the first omitted correction.
double pareto_em_tail(double C, double alpha, double b, double& bound) {
    const double y = C + b - 1.0;
    const double head = std::pow(C / y, alpha);
    double tail = head * y / (alpha - 1.0) + 0.5 * head;
    // h^{(m)}(b) = (-1)^m (alpha)_m head y^-m; odd m only enters.
    double rising = alpha;  // (alpha)_1
    double ypow = 1.0 / y;
    for (int j = 1; j <= kEmTerms + 1; ++j) {
        const int m = 2 * j - 1;
        const double deriv_abs = rising * head * ypow;
        const double term = kBernoulliOverFactorial[j - 1] * deriv_abs;
        if (j <= kEmTerms) {
            tail += term;
        } else {
            bound = std::fabs(term);
        }
        rising *= (alpha + m) * (alpha + m + 1);
        ypow /= y * y;
    }
    return tail;
}

// Euler-Maclaurin tail of sum_{i >= b} exp(-lambda (i - 1)^alpha) for alpha <= 1,
// where the summand is completely monotone and the first omitted term bounds the error.
double weibull_em_tail(double lambda, double alpha, double b, double& bound) {
    const double y = b - 1.0;
    const double h = std::exp(-lambda * std::pow(y, alpha));
    double integral;
    try {
        const double a = 1.0 / alpha;
        const double z = lambda * std::pow(y, alpha);
        integral = a * std::pow(lambda, -a) * boost::math::tgamma(a, z);
    } catch (const std::overflow_error&) {
        bound = 0.0;
        return kInf;
    }
    if (!std::isfinite(integral)) {
        bound = 0.0;
        return kInf;
    }
    if (h == 0.0) {
        bound = 0.0;
        return integral;
    }

    // phi = log h; phi^{(j)} = -lambda alpha (alpha-1)...(alpha-j+1) y^{alpha-j}.
    constexpr int kOrders = 2 * kEmTerms + 2;
    std::array<double, kOrders + 1> dphi{};
    double falling = 1.0;
    for (int j = 1; j <= kOrders; ++j) {
        falling *= alpha - (j - 1);
        dphi[j] = -lambda * falling * std::pow(y, alpha - j);
    }
    // Complete Bell polynomials give h^{(m)} / h.
    std::array<double, kOrders + 1> bell{};
    bell[0] = 1.0;
    for (int m = 0; m < kOrders; ++m) {
        double acc = 0.0;
        double binom = 1.0;
        for (int j = 0; j <= m; ++j) {
            acc += binom * bell[m - j] * dphi[j + 1];
            binom = binom * (m - j) / (j + 1);
        }
        bell[m + 1] = acc;
    }

    double tail = integral + 0.5 * h;
    for (int j = 1; j <= kEmTerms; ++j) {
        tail -= kBernoulliOverFactorial[j - 1] * h * bell[2 * j - 1];
    }
    bound = std::fabs(kBernoulliOverFactorial[kEmTerms] * h * bell[2 * kEmTerms + 1]);
    return tail;
}

void require_tol(double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::parameter_domain, "tolerance must be positive");
}

}  // namespace

double pareto_survival_sum(double C, double alpha, std::int64_t from, double tol) {
    require_tol(tol);
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw Error(ErrorKind::parameter_domain, "Pareto scale C must be positive");
    }
    if (!(alpha > 1.0)) {
        throw Error(ErrorKind::divergence,
                    "Pareto survival series diverges for alpha <= 1 (alpha = " +
                        std::to_string(alpha) + ")");
    }
    if (from < 1) throw Error(ErrorKind::parameter_domain, "series start must be >= 1");

    const double logC = std::log(C);
    double direct = 0.0;
    std::int64_t next = from;
    std::int64_t width = 32;
    for (;;) {
        const std::int64_t stop = from + width;
        for (; next < stop; ++next) {
            const double y = C + static_cast<double>(next) - 1.0;
            direct += std::exp(alpha * (logC - std::log(y)));
        }
        double bound = 0.0;
        const double value = direct + pareto_em_tail(C, alpha, static_cast<double>(stop), bound);
        if (accept(bound, value, tol) || width >= kMaxDirectTerms) return value;
        width *= 2;
    }
}

double weibull_survival_sum(double lambda, double alpha, std::int64_t from, double tol) {
    require_tol(tol);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::parameter_domain, "Weibull lambda must be positive");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::divergence, "Weibull survival series requires alpha > 0");
    }
    if (from < 1) throw Error(ErrorKind::parameter_domain, "series start must be >= 1");

    auto term = [&](std::int64_t i) {
        return std::exp(-lambda * std::pow(static_cast<double>(i - 1), alpha));
    };

    if (alpha > 1.0) {
        // Successive ratios h(i+1)/h(i) decrease, so the remainder after i is
        // at most h(i+1) / (1 - r) with r = h(i+1)/h(i).
        double sum = 0.0;
        double cur = term(from);
        for (std::int64_t i = from; i < from + kMaxDirectTerms; ++i) {
            sum += cur;
            const double nxt = term(i + 1);
            if (nxt == 0.0) return sum;
            const double r = nxt / cur;
            if (r < 1.0 && nxt / (1.0 - r) <= tol * std::max(1.0, sum)) {
                return sum + nxt / (1.0 - r);
            }
            cur = nxt;
        }
        throw Error(ErrorKind::convergence, "Weibull survival series did not converge");
    }

    double direct = 0.0;
    std::int64_t next = from;
    std::int64_t width = 32;
    for (;;) {
        const std::int64_t stop = from + width;
        for (; next < stop; ++next) direct += term(next);
        double bound = 0.0;
        const double tail = weibull_em_tail(lambda, alpha, static_cast<double>(stop), bound);
        const double value = direct + tail;
        if (!std::isfinite(value)) return kInf;
        if (accept(bound, value, tol) || width >= kMaxDirectTerms) return value;
        width *= 2;
    }
}

double zeta_like(const ZetaLike& fn, double alpha, double tol) {
    switch (fn.kind) {
        case SeriesKind::zeta: return pareto_survival_sum(1.0, alpha, 1, tol);
        case SeriesKind::hurwitz: return pareto_survival_sum(fn.C, alpha, 1, tol);
        case SeriesKind::chi: return weibull_survival_sum(1.0, alpha, 1, tol);
    }
    throw Error(ErrorKind::parameter_domain, "unknown series kind");
}

double invert_zeta_like(const ZetaLike& fn, double target, double tol) {
    require_tol(tol);
    if (!(target > 1.0) || !std::isfinite(target)) {
        throw Error(ErrorKind::out_of_range,
                    "inversion target " + std::to_string(target) +
                        " lies outside the range (1, inf)");
    }
    const bool chi = fn.kind == SeriesKind::chi;
    // chi(alpha) -> 1 + 1/e as alpha -> inf because the i = 2 term is e^-1 for every alpha.
    const double floor = chi ? 1.0 + std::exp(-1.0) : 1.0;
    if (target <= floor) {
        throw Error(ErrorKind::out_of_range,
                    "inversion target " + std::to_string(target) +
                        " lies below the infimum " + std::to_string(floor));
    }
    const double boundary = chi ? 0.0 : 1.0;
    auto value = [&](double a) { return zeta_like(fn, a, tol * 1e-2); };

    double lo = boundary + 1e-6;
    double hi = 64.0;
    while (value(lo) < target) {
        const double gap = (lo - boundary) / 16.0;
        if (gap < 1e-15 * std::max(1.0, boundary)) {
            throw Error(ErrorKind::out_of_range,
                        "inversion target " + std::to_string(target) + " is too large");
        }
        lo = boundary + gap;
    }
    while (value(hi) > target) {
        hi *= 2.0;
        if (hi > 1e6) {
            throw Error(ErrorKind::out_of_range,
                        "inversion target " + std::to_string(target) + " is too close to 1");
        }
    }

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double v = value(mid);
        if (std::fabs(v - target) <= tol * std::max(1.0, target)) return mid;
        if (v > target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) break;
    }
    return mid;
}

}  // namespace dynrg
