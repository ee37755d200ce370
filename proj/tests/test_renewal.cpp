#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

#include "dynrg/renewal.hpp"

using namespace dynrg;

namespace {

std::vector<ModelSpec> mixed_models() {
    return {ModelSpec(OnOffLaw::pareto(1.0, 3.0), OnOffLaw::pareto(1.0, 2.5), 10),
            ModelSpec(OnOffLaw::weibull(1.0, 0.5), OnOffLaw::geometric(0.3), 10),
            ModelSpec(OnOffLaw::pareto(2.0, 4.0), OnOffLaw::geometric(0.3), 10),
            ModelSpec(OnOffLaw::weibull(0.7, 1.6), OnOffLaw::weibull(0.3, 0.8), 10)};
}

std::vector<int> bits_of(std::uint64_t path, int K) {
    std::vector<int> b(static_cast<std::size_t>(K));
    for (int t = 0; t < K; ++t) b[static_cast<std::size_t>(t)] = (path >> t) & 1U;
    return b;
}

}  // namespace

TEST_CASE("geometric joint law is the Markov chain") {
    for (auto [p, q] : {std::pair{0.3, 0.8}, std::pair{0.5, 0.5}, std::pair{0.05, 0.1}, std::pair{0.9, 0.7}}) {
        const ModelSpec m(OnOffLaw::geometric(p), OnOffLaw::geometric(q), 1);
        for (int K = 1; K <= 6; ++K) {
            std::vector<std::int64_t> epochs(static_cast<std::size_t>(K));
            std::iota(epochs.begin(), epochs.end(), 1);
            const auto law = joint_distribution(m, epochs);
            for (std::uint64_t mask = 0; mask < law.size(); ++mask) {
                CHECK(std::fabs(law[mask] - oracle::markov_path(p, q, bits_of(mask, K))) < 1e-12);
            }
        }
    }
}

TEST_CASE("joint law by path enumeration for renewal laws") {
    const std::vector<std::vector<std::int64_t>> sets = {{1, 2}, {1, 2, 3, 4, 5, 6}, {1, 3, 6}, {2, 5}, {1, 4, 5}};
    for (const auto& m : mixed_models()) {
        CAPTURE(m.on().describe());
        CAPTURE(m.off().describe());
        for (const auto& e : sets) {
            const auto got = joint_distribution(m, e);
            std::vector<std::int64_t> shifted(e);
            for (auto& t : shifted) t -= e.front() - 1;
            const auto want = oracle::joint_by_paths(m, shifted);
            double total = 0.0;
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(std::fabs(got[i] - want[i]) < 1e-10);
                total += got[i];
            }
            CHECK(std::fabs(total - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("epochs are sorted before indexing") {
    const auto m = mixed_models()[0];
    const auto a = joint_distribution(m, {1, 3, 6});
    const auto b = joint_distribution(m, {6, 1, 3});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("joint mgf against the path sum") {
    const std::vector<double> theta = {0.3, -0.2, 1.1, 0.0, -0.7};
    for (const auto& m : mixed_models()) {
        double want = 0.0;
        for (std::uint64_t path = 0; path < 32; ++path) {
            const auto b = bits_of(path, 5);
            double s = 0.0;
            for (int t = 0; t < 5; ++t) s += theta[static_cast<std::size_t>(t)] * b[static_cast<std::size_t>(t)];
            want += std::exp(s) * oracle::path_probability(m, b);
        }
        CHECK(joint_mgf(m, theta) == doctest::Approx(want).epsilon(1e-12));
        // Forcing off epochs 2 and 4 keeps only paths with zeros there.
        const std::vector<double> forced = {0.3, kForceOff, 1.1, kForceOff, -0.7};
        double want_forced = 0.0;
        for (std::uint64_t path = 0; path < 32; ++path) {
            const auto b = bits_of(path, 5);
            if (b[1] || b[3]) continue;
            want_forced += std::exp(0.3 * b[0] + 1.1 * b[2] - 0.7 * b[4]) * oracle::path_probability(m, b);
        }
        CHECK(joint_mgf(m, forced) == doctest::Approx(want_forced).epsilon(1e-12));
        const std::vector<double> zero(7, 0.0);
        CHECK(joint_mgf(m, zero) == doctest::Approx(1.0).epsilon(1e-13));
        const std::vector<double> all_off(4, kForceOff);
        CHECK(joint_mgf(m, all_off) == doctest::Approx(oracle::path_probability(m, {0, 0, 0, 0})));
    }
}

TEST_CASE("joint law argument checks") {
    const auto m = mixed_models()[1];
    CHECK(kind_of([&] { joint_distribution(m, {}); }) == ErrorKind::parameter_domain);
    CHECK(kind_of([&] { joint_distribution(m, {0, 2}); }) == ErrorKind::parameter_domain);
    CHECK(kind_of([&] { joint_distribution(m, {2, 2}); }) == ErrorKind::parameter_domain);
    std::vector<std::int64_t> many(kJointEpochCap + 1);
    std::iota(many.begin(), many.end(), 1);
    CHECK(kind_of([&] { joint_distribution(m, many); }) == ErrorKind::size);
    CHECK(kind_of([&] { joint_mgf(m, std::vector<double>{}); }) == ErrorKind::parameter_domain);
}

TEST_CASE("renewal tables give the two-epoch joint laws") {
    for (const auto& m : mixed_models()) {
        RenewalTables tab(m);
        const double rho = m.rho();
        CHECK(tab.rho() == doctest::Approx(rho));
        CHECK(tab.r_res(1) == doctest::Approx(1.0));
        CHECK(tab.fbar(1) == doctest::Approx(1.0 / m.on().mean()));
        for (std::int64_t k = 2; k <= 9; ++k) {
            CAPTURE(k);
            const auto j2 = oracle::joint_by_paths(m, {1, k});
            CHECK(std::fabs(rho * tab.r_res(k) - j2[3]) < 1e-12);
            const auto j3 = oracle::joint_by_paths(m, {1, k, k + 1});
            CHECK(std::fabs(rho * tab.r2_res(k) - j3[7]) < 1e-12);
        }
    }
}

TEST_CASE("autocovariance decays to zero") {
    const ModelSpec m(OnOffLaw::weibull(1.0, 0.5), OnOffLaw::geometric(0.3), 1);
    const auto ac = autocovariance(m, 3000);
    CHECK(ac.cov(1) == doctest::Approx(ac.rho * (1 - ac.rho)));
    CHECK(std::fabs(ac.cov(3000)) < 1e-6);
    const auto j = oracle::joint_by_paths(m, {1, 5});
    CHECK(ac.cov(5) == doctest::Approx(j[3] - ac.rho * ac.rho).epsilon(1e-11));
}

TEST_CASE("legendre transform at one epoch is the binomial rate") {
    const ModelSpec m(OnOffLaw::pareto(2.0, 4.0), OnOffLaw::geometric(0.3), 100);
    const double rho = m.rho();
    for (double c : {10.0, 22.0, 28.0, 40.0, 70.0}) {
        const std::vector<double> counts = {c};
        const double want = c * std::log(c / (100 * rho)) + (100 - c) * std::log((100 - c) / (100 * (1 - rho)));
        const auto r = legendre_I(m, counts);
        CAPTURE(c);
        CHECK(std::fabs(r.value - want) < 1e-8);
        CHECK(r.theta[0] == doctest::Approx(std::log(c * (1 - rho) / ((100 - c) * rho))).epsilon(1e-5));
    }
    const std::vector<double> centre = {100 * rho};
    CHECK(legendre_I(m, centre).value < 1e-8);
}

TEST_CASE("saddlepoint against the exact two-epoch law") {
    // Two epochs of a geometric system: P(A1 = a, A2 = b) from the aggregate chain.
    const double p = 0.3, q = 0.4;
    const int n = 60;
    const ModelSpec m(OnOffLaw::geometric(p), OnOffLaw::geometric(q), n);
    const double rho = q / (p + q);
    auto exact = [&](int a, int b) {
        double s = 0.0;
        for (int stay = 0; stay <= std::min(a, b); ++stay) {
            s += oracle::binom_pmf(a, 1 - p, stay) * oracle::binom_pmf(n - a, q, b - stay);
        }
        return oracle::binom_pmf(n, rho, a) * s;
    };
    const int mid = static_cast<int>(std::lround(n * rho));
    for (auto [a, b] : {std::pair{mid, mid}, std::pair{mid - 3, mid + 2}, std::pair{mid + 4, mid + 1}}) {
        const std::vector<double> counts = {double(a), double(b)};
        CAPTURE(a);
        CAPTURE(b);
        CHECK(std::fabs(saddlepoint_logprob(m, counts) - std::log(exact(a, b))) < 0.1);
    }
}
