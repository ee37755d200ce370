#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "dynrg/error.hpp"
#include "dynrg/series.hpp"

using namespace dynrg;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

// Direct sum in long double, tail closed by the midpoint integral.
double pareto_reference(double C, double alpha, std::int64_t from) {
    const std::int64_t N = 2'000'000;
    long double s = 0.0L;
    for (std::int64_t i = from; i < from + N; ++i) {
        s += std::pow(static_cast<long double>(C) / (C + i - 1), static_cast<long double>(alpha));
    }
    const double y = C + static_cast<double>(from + N) - 1.5;
    s += std::pow(C, alpha) * std::pow(y, 1.0 - alpha) / (alpha - 1.0);
    return static_cast<double>(s);
}

}  // namespace

TEST_CASE("riemann zeta agrees with boost") {
    for (double a : {1.05, 1.3, 1.5, 2.0, 2.5, 3.0, 4.0, 7.5, 20.0}) {
        CAPTURE(a);
        CHECK(rel(zeta_like(ZetaLike::riemann(), a), boost::math::zeta(a)) < 1e-12);
    }
}

TEST_CASE("hurwitz form at integer scale") {
    for (int C : {2, 3, 7}) {
        for (double a : {1.5, 2.5, 4.0}) {
            CAPTURE(C);
            CAPTURE(a);
            CHECK(rel(zeta_like(ZetaLike::hurwitz(C), a), oracle::hurwitz_integer_C(C, a)) < 1e-12);
        }
    }
}

TEST_CASE("pareto survival sums at fractional scale and later starts") {
    struct Case {
        double C, alpha;
        std::int64_t from;
    };
    for (const Case c : {Case{1.7, 4.0, 1}, Case{0.3, 3.0, 1}, Case{2.0, 4.0, 5}, Case{12.5, 2.5, 40},
                         Case{1.0, 6.0, 1000}}) {
        CAPTURE(c.C);
        CAPTURE(c.alpha);
        CAPTURE(c.from);
        CHECK(rel(pareto_survival_sum(c.C, c.alpha, c.from), pareto_reference(c.C, c.alpha, c.from)) < 1e-11);
    }
}

TEST_CASE("weibull survival sums against direct summation") {
    for (double lambda : {0.2, 1.0, 3.0}) {
        for (double a : {0.3, 0.5, 1.0, 1.7, 3.0}) {
            CAPTURE(lambda);
            CAPTURE(a);
            CHECK(rel(weibull_survival_sum(lambda, a), oracle::weibull_direct(lambda, a)) < 1e-12);
        }
    }
    CHECK(rel(zeta_like(ZetaLike::chi(), 0.5), oracle::weibull_direct(1.0, 0.5)) < 1e-12);
    // alpha = 1 is geometric with ratio e^-lambda
    CHECK(rel(weibull_survival_sum(0.7, 1.0), 1.0 / (1.0 - std::exp(-0.7))) < 1e-13);
}

TEST_CASE("tail sums are consistent with the head") {
    const double total = pareto_survival_sum(2.0, 3.5);
    double head = 0.0;
    for (int i = 1; i < 25; ++i) head += std::pow(2.0 / (1.0 + i), 3.5);
    CHECK(rel(pareto_survival_sum(2.0, 3.5, 25), total - head) < 1e-12);

    const double wt = weibull_survival_sum(0.5, 0.6);
    double wh = 0.0;
    for (int i = 1; i < 30; ++i) wh += std::exp(-0.5 * std::pow(i - 1.0, 0.6));
    CHECK(rel(weibull_survival_sum(0.5, 0.6, 30), wt - wh) < 1e-12);
}

TEST_CASE("inversion round trips") {
    for (double a : {1.2, 1.8, 2.5, 3.0, 6.0}) {
        CAPTURE(a);
        CHECK(invert_zeta_like(ZetaLike::riemann(), zeta_like(ZetaLike::riemann(), a)) ==
              doctest::Approx(a).epsilon(1e-8));
        CHECK(invert_zeta_like(ZetaLike::hurwitz(2.0), zeta_like(ZetaLike::hurwitz(2.0), a)) ==
              doctest::Approx(a).epsilon(1e-8));
    }
    for (double a : {0.2, 0.5, 1.0, 2.5, 3.0}) {
        CAPTURE(a);
        CHECK(invert_zeta_like(ZetaLike::chi(), zeta_like(ZetaLike::chi(), a)) ==
              doctest::Approx(a).epsilon(1e-8));
    }
    // zeta(2) = pi^2 / 6
    CHECK(invert_zeta_like(ZetaLike::riemann(), M_PI * M_PI / 6.0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("inversion outside the range") {
    CHECK(kind_of([] { invert_zeta_like(ZetaLike::riemann(), 1.0); }) == ErrorKind::out_of_range);
    CHECK(kind_of([] { invert_zeta_like(ZetaLike::riemann(), 0.5); }) == ErrorKind::out_of_range);
    CHECK(kind_of([] { invert_zeta_like(ZetaLike::hurwitz(3.0), 0.9); }) == ErrorKind::out_of_range);
    // chi tends to 1 + 1/e as alpha grows, never to 1
    CHECK(kind_of([] { invert_zeta_like(ZetaLike::chi(), 1.3); }) == ErrorKind::out_of_range);
    CHECK(zeta_like(ZetaLike::chi(), 40.0) == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("domain errors") {
    CHECK(kind_of([] { pareto_survival_sum(1.0, 1.0); }) == ErrorKind::divergence);
    CHECK(kind_of([] { pareto_survival_sum(1.0, 0.5); }) == ErrorKind::divergence);
    CHECK(kind_of([] { pareto_survival_sum(-1.0, 2.0); }) == ErrorKind::parameter_domain);
    CHECK(kind_of([] { weibull_survival_sum(0.0, 2.0); }) == ErrorKind::parameter_domain);
    CHECK(kind_of([] { pareto_survival_sum(1.0, 2.0, 0); }) == ErrorKind::parameter_domain);
}
