#include "dynrg/moments.hpp"

#include "dynrg/error.hpp"
#include "dynrg/renewal.hpp"

namespace dynrg {

MomentAccumulator::MomentAccumulator(int L) : L_(L) {
    if (L < 1) throw Error(ErrorKind::parameter_domain, "need at least one moment");
    ring_.assign(static_cast<std::size_t>(L), 0);
    sums_.assign(static_cast<std::size_t>(L), 0);
}

void MomentAccumulator::push(std::int64_t value) {
    const auto L = static_cast<std::int64_t>(L_);
    sums_[0] += value;
    // ring_[(t) mod L] holds x(t) for the last L values; lag l pairs x(t - l) with x(t).
    for (std::int64_t l = 1; l < L && l <= count_; ++l) {
        const std::int64_t prev = ring_[static_cast<std::size_t>((count_ - l) % L)];
        sums_[static_cast<std::size_t>(l)] += static_cast<__int128>(prev) * value;
    }
    ring_[static_cast<std::size_t>(count_ % L)] = value;
    ++count_;
}

MomentSet MomentAccumulator::finish(Observable kind, std::int64_t n, std::optional<int> N) const {
    if (count_ <= L_ - 1 || count_ < 1) {
        throw Error(ErrorKind::insufficient_data,
                    "trace of length " + std::to_string(count_) + " is too short for " +
                        std::to_string(L_) + " lag moments");
    }
    MomentSet m;
    m.kind = kind;
    m.n = n;
    m.N = N;
    m.K = count_;
    m.mu.resize(static_cast<std::size_t>(L_));
    for (int l = 0; l < L_; ++l) {
        m.mu[static_cast<std::size_t>(l)] =
            static_cast<double>(sums_[static_cast<std::size_t>(l)]) / static_cast<double>(count_ - l);
    }
    return m;
}

MomentSet empirical_moments(const CountTrace& trace, int L) {
    if (static_cast<std::int64_t>(trace.values.size()) <= L) {
        throw Error(ErrorKind::insufficient_data,
                    "trace of length " + std::to_string(trace.values.size()) +
                        " must be longer than L = " + std::to_string(L));
    }
    MomentAccumulator acc(L);
    for (const auto v : trace.values) acc.push(v);
    return acc.finish(trace.kind, trace.n, trace.N);
}

double theoretical_moment_joint(const ModelSpec& model, int lag) {
    if (lag < 0) throw Error(ErrorKind::parameter_domain, "lag must be >= 0");
    const double n = static_cast<double>(model.n());
    const double rho = model.rho();
    if (lag == 0) return n * rho;
    const auto p = joint_distribution(model, {1, 1 + static_cast<std::int64_t>(lag)});
    return n * p[3] + (n * n - n) * rho * rho;
}

double theoretical_moment(const ModelSpec& model, int lag) {
    if (lag < 0) throw Error(ErrorKind::parameter_domain, "lag must be >= 0");
    if (lag > 3) return theoretical_moment_joint(model, lag);
    const double n = static_cast<double>(model.n());
    const double rho = model.rho();
    if (lag == 0) return n * rho;

    const ResidualLaw& xr = model.on_residual();
    const OnOffLaw& x = model.on();
    const OnOffLaw& y = model.off();
    const double fb1 = xr.pmf(1), fb2 = xr.pmf(2), fb3 = xr.pmf(3);
    // P(on at 1 + lag | on at 1), summed over the on/off scenarios in between.
    double stay = 0.0;
    switch (lag) {
        case 1: stay = 1.0 - fb1; break;
        case 2: stay = (1.0 - fb1 - fb2) + fb1 * y.pmf(1); break;
        default:
            stay = (1.0 - fb1 - fb2 - fb3) + fb1 * y.pmf(2) + fb1 * y.pmf(1) * (1.0 - x.pmf(1)) +
                   fb2 * y.pmf(1);
            break;
    }
    return n * rho * stay + (n * n - n) * rho * rho;
}

MomentSet theoretical_moments(const ModelSpec& model, int L) {
    MomentSet m;
    m.kind = Observable::edges;
    m.n = model.n();
    m.N = model.vertices();
    m.K = 0;
    for (int l = 0; l < L; ++l) m.mu.push_back(theoretical_moment(model, l));
    return m;
}

}  // namespace dynrg
