#include "dynrg/asymp.hpp"

#include <cmath>
#include <sstream>

#include "dynrg/error.hpp"

namespace dynrg {
namespace {

void check_pq(double p, double q) {
    if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
        throw Error(ErrorKind::parameter_domain, "geometric parameters must lie in (0,1)");
    }
}

}  // namespace

DeltaCoefficients delta_coefficients(std::int64_t n_, double p, double q, DeltaForm form) {
    check_pq(p, q);
    const double n = static_cast<double>(n_);
    DeltaCoefficients d{};
    d.gamma0 = 2.0 + (p - q - (p + q) * p) / (n * q);
    d.gamma1 = -(p + q) / (n * q);
    d.delta0 = (q / p) * d.gamma0;
    d.delta1 = (q / p) * d.gamma1;
    if (form == DeltaForm::exact) d.delta0 += (p + q) * (p + q) / (n * p);
    return d;
}

MomentCov geometric_moment_cov(std::int64_t n_, double p, double q) {
    check_pq(p, q);
    const double n = static_cast<double>(n_);
    const double f = 1.0 - p - q;
    const double rho = q / (p + q);

    // Raw moments of Binomial(n, rho) from falling factorial moments.
    const double e1 = n * rho;
    const double e2 = n * (n - 1) * rho * rho;
    const double e3 = e2 * (n - 2) * rho;
    const double e4 = e3 * (n - 3) * rho;
    const double m1 = e1;
    const double m2 = e2 + e1;
    const double m3 = e3 + 3 * e2 + e1;
    const double m4 = e4 + 6 * e3 + 7 * e2 + e1;

    // Given A(1) = a, A(2) ~ Bin(a, 1 - p) + Bin(n - a, q).
    // jm_j = E[A(1) A(2)^j].
    const double c2a = p - q + 2 * n * q;
    const double c2b = n * q * (1 - q) + n * n * q * q;
    const double jm1 = f * m2 + n * q * m1;
    const double jm2 = f * f * m3 + f * c2a * m2 + c2b * m1;
    const double jm3 = f * f * f * m4 + 3 * f * f * (p - q + n * q) * m3 +
                       f *
                           (3 * n * n * q * q + 3 * n * p * q - 6 * n * q * q + 3 * n * q +
                            2 * p * p - 2 * p * q - p + 2 * q * q - q) *
                           m2 +
                       (n * (n - 1) * (n - 2) * q * q * q + 3 * n * (n - 1) * q * q + n * q) * m1;

    // Lag-k coefficients multiplied through by f so that f = 0 needs no special case.
    const double c1f2 = (f * (1 - 2 * rho) + n * rho * (1 + f)) * jm2 -
                        (n * f * rho * (1 - 2 * rho) + n * n * rho * rho * (1 + f)) * jm1;
    const double c2f3 = jm3 + (2 * rho - 1 - 2 * n * rho) * jm2 + n * rho * rho * (n - 1) * jm1;
    const double d1f = (f - 2 * f * rho + n * q + 2 * f * n * rho) * (m2 - n * rho * m1);
    const double d2f = m3 - (2 * n * rho - 2 * rho + 1) * m2 + n * rho * rho * (n - 1) * m1;

    const double t1 = f * f * m4 + f * c2a * m3 + c2b * m2 - jm1 * jm1;

    MomentCov mc;
    mc.v0 = n * rho * (1 - rho) * (1 + f) / (1 - f);
    mc.v1 = t1 + 2 * (c1f2 / (1 - f) + c2f3 * f / (1 - f * f));
    mc.c01 = d1f / (1 - f) + d2f * f / (1 - f * f) + (jm2 - n * rho * jm1) / (1 - f);
    return mc;
}

ParamCov delta_method_cov(std::int64_t n, double p, double q, const MomentCov& mc, DeltaForm form) {
    const DeltaCoefficients d = delta_coefficients(n, p, q, form);
    auto quad = [&mc](double a0, double a1, double b0, double b1) {
        return a0 * b0 * mc.v0 + (a0 * b1 + a1 * b0) * mc.c01 + a1 * b1 * mc.v1;
    };
    ParamCov pc;
    pc.sigma2 = quad(d.gamma0, d.gamma1, d.gamma0, d.gamma1);
    pc.tau2 = quad(d.delta0, d.delta1, d.delta0, d.delta1);
    pc.cross = quad(d.gamma0, d.gamma1, d.delta0, d.delta1);
    return pc;
}

Finiteness finiteness_check(const ModelSpec& model) {
    Finiteness out;
    std::ostringstream why;
    bool any_pareto = false;
    for (const auto* law : {&model.on(), &model.off()}) {
        const double a = law->tail_index();
        if (std::isinf(a)) continue;
        any_pareto = true;
        if (!(a > 2.0)) {
            out.finite = false;
            why << law->describe() << " has tail index " << a << " <= 2, so the lag "
                << "covariances decay too slowly to be summable; ";
        }
    }
    if (out.finite) {
        why << (any_pareto ? "every Pareto tail index exceeds 2 and the other laws are lighter"
                           : "geometric and Weibull laws have all moments finite");
        why << "; v0, v1 and c01 are finite";
    } else {
        why << "v0, v1 and c01 are not guaranteed finite";
    }
    out.explanation = why.str();
    return out;
}

nlohmann::json to_json(const MomentCov& mc) {
    return {{"v0", mc.v0}, {"v1", mc.v1}, {"c01", mc.c01}};
}

nlohmann::json to_json(const ParamCov& pc) {
    return {{"sigma2", pc.sigma2}, {"tau2", pc.tau2}, {"cross", pc.cross}};
}

}  // namespace dynrg
