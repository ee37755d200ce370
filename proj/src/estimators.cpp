#include <cmath>
#include <limits>
#include <sstream>

#include "dynrg/asymp.hpp"
#include "dynrg/error.hpp"
#include "dynrg/moments.hpp"
#include "dynrg/series.hpp"

namespace dynrg {

std::string_view to_string(Family family) {
    switch (family) {
        case Family::geo_geo: return "geo_geo";
        case Family::pareto_pareto: return "pareto_pareto";
        case Family::weibull_geo: return "weibull_geo";
        case Family::pareto_geo: return "pareto_geo";
    }
    return "geo_geo";
}

Family family_from_string(std::string_view name) {
    if (name == "geo_geo") return Family::geo_geo;
    if (name == "pareto_pareto") return Family::pareto_pareto;
    if (name == "weibull_geo") return Family::weibull_geo;
    if (name == "pareto_geo") return Family::pareto_geo;
    throw Error(ErrorKind::config, "unknown estimator family \"" + std::string(name) + "\"");
}

int moments_needed(Family family) { return family == Family::pareto_geo ? 3 : 2; }

Family infer_family(const ModelSpec& model) {
    const LawKind x = model.on().kind();
    const LawKind y = model.off().kind();
    if (x == LawKind::geometric && y == LawKind::geometric) return Family::geo_geo;
    if (x == LawKind::pareto && y == LawKind::pareto) {
        const auto& a = std::get<Pareto>(model.on().params());
        const auto& b = std::get<Pareto>(model.off().params());
        if (a.C == 1.0 && b.C == 1.0) return Family::pareto_pareto;
    }
    if (x == LawKind::weibull && y == LawKind::geometric &&
        std::get<Weibull>(model.on().params()).lambda == 1.0) {
        return Family::weibull_geo;
    }
    if (x == LawKind::pareto && y == LawKind::geometric) return Family::pareto_geo;
    throw Error(ErrorKind::config, "no estimator family matches " + model.on().describe() + " / " +
                                       model.off().describe());
}

std::vector<std::string> parameter_names(Family family) {
    switch (family) {
        case Family::geo_geo: return {"p", "q"};
        case Family::pareto_pareto: return {"alpha", "beta"};
        case Family::weibull_geo: return {"alpha", "q"};
        case Family::pareto_geo: return {"C", "alpha", "q"};
    }
    return {};
}

std::vector<double> true_parameters(Family family, const ModelSpec& model) {
    if (infer_family(model) != family) {
        throw Error(ErrorKind::config, std::string("model does not belong to family ") +
                                           std::string(to_string(family)));
    }
    switch (family) {
        case Family::geo_geo:
            return {std::get<Geometric>(model.on().params()).p,
                    std::get<Geometric>(model.off().params()).p};
        case Family::pareto_pareto:
            return {std::get<Pareto>(model.on().params()).alpha,
                    std::get<Pareto>(model.off().params()).alpha};
        case Family::weibull_geo:
            return {std::get<Weibull>(model.on().params()).alpha,
                    std::get<Geometric>(model.off().params()).p};
        case Family::pareto_geo: {
            const auto& x = std::get<Pareto>(model.on().params());
            return {x.C, x.alpha, std::get<Geometric>(model.off().params()).p};
        }
    }
    return {};
}

ModelSpec model_from_parameters(Family family, const std::vector<double>& v,
                                const ModelSpec& like) {
    auto build = [&like](OnOffLaw on, OnOffLaw off) {
        if (like.vertices()) return ModelSpec::with_vertices(on, off, *like.vertices());
        return ModelSpec(on, off, like.n());
    };
    switch (family) {
        case Family::geo_geo: return build(OnOffLaw::geometric(v.at(0)), OnOffLaw::geometric(v.at(1)));
        case Family::pareto_pareto:
            return build(OnOffLaw::pareto(1.0, v.at(0)), OnOffLaw::pareto(1.0, v.at(1)));
        case Family::weibull_geo:
            return build(OnOffLaw::weibull(1.0, v.at(0)), OnOffLaw::geometric(v.at(1)));
        case Family::pareto_geo:
            return build(OnOffLaw::pareto(v.at(0), v.at(1)), OnOffLaw::geometric(v.at(2)));
    }
    throw Error(ErrorKind::config, "unknown family");
}

nlohmann::json to_json(const EstimateReport& r) {
    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < r.names.size(); ++i) params[r.names[i]] = r.values[i];
    nlohmann::json j = {{"family", to_string(r.family)},
                        {"observable", to_string(r.observable)},
                        {"params", params},
                        {"moments", r.moments},
                        {"residuals", r.residuals},
                        {"iterations", r.iterations},
                        {"range_violation", r.range_violation},
                        {"notes", r.notes}};
    if (r.covariance) {
        j["covariance"] = {{"method", r.covariance_method}, {"matrix", *r.covariance}};
    } else {
        j["covariance"] = nullptr;
    }
    return j;
}

namespace {

struct Basic {
    double n, mu0, mu1, D;
};

Basic basic_terms(const MomentSet& m, int L) {
    if (static_cast<int>(m.mu.size()) < L) {
        throw Error(ErrorKind::insufficient_data,
                    "estimator needs " + std::to_string(L) + " lag moments");
    }
    const double n = static_cast<double>(m.n);
    const double mu0 = m.mu[0];
    const double mu1 = m.mu[1];
    if (!(mu0 > 0.0 && mu0 < n)) {
        throw Error(ErrorKind::out_of_range,
                    "mean count " + std::to_string(mu0) + " must lie strictly inside (0, n)");
    }
    return {n, mu0, mu1, mu0 - mu1 + (1.0 - 1.0 / n) * mu0 * mu0};
}

bool in_unit(double x) { return x > 0.0 && x < 1.0; }

double invert_or_incompatible(const ZetaLike& fn, double target, const char* what) {
    try {
        return invert_zeta_like(fn, target);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::out_of_range) throw;
        throw Error(ErrorKind::incompatible_moments, std::string(what) + ": " + e.what());
    }
}

// Fills the residual block of the report when the estimate names a valid model.
void attach_residuals(EstimateReport& r, const MomentSet& m, int L) {
    r.moments.assign(m.mu.begin(), m.mu.begin() + L);
    try {
        ModelSpec like(OnOffLaw::geometric(0.5), OnOffLaw::geometric(0.5), m.n);
        const ModelSpec fitted = model_from_parameters(r.family, r.values, like);
        r.residuals.clear();
        for (int l = 0; l < L; ++l) {
            r.residuals.push_back(theoretical_moment(fitted, l) - m.mu[static_cast<std::size_t>(l)]);
        }
    } catch (const Error& e) {
        r.residuals.clear();
        r.notes.push_back(std::string("residuals unavailable: ") + e.what());
    }
}

EstimateReport blank(Family family, const MomentSet& m) {
    EstimateReport r;
    r.family = family;
    r.observable = m.kind;
    r.names = parameter_names(family);
    return r;
}

}  // namespace

EstimateReport estimate_gg(const MomentSet& m) {
    const Basic b = basic_terms(m, 2);
    EstimateReport r = blank(Family::geo_geo, m);
    const double p = b.D / b.mu0;
    const double q = b.D / (b.n - b.mu0);
    r.values = {p, q};
    r.range_violation = !in_unit(p) || !in_unit(q);
    if (r.range_violation) {
        r.notes.push_back("estimate outside (0,1)");
        r.moments.assign(m.mu.begin(), m.mu.begin() + 2);
        return r;
    }
    attach_residuals(r, m, 2);
    const ParamCov pc = delta_method_cov(m.n, p, q, geometric_moment_cov(m.n, p, q));
    r.covariance = std::vector<std::vector<double>>{{pc.sigma2, pc.cross}, {pc.cross, pc.tau2}};
    r.covariance_method = "closed_form_geometric";
    return r;
}

EstimateReport estimate_parpar(const MomentSet& m) {
    const Basic b = basic_terms(m, 2);
    if (!(b.D > 0.0)) {
        throw Error(ErrorKind::incompatible_moments, "moment combination D is not positive");
    }
    EstimateReport r = blank(Family::pareto_pareto, m);
    const double alpha = invert_or_incompatible(ZetaLike::riemann(), b.mu0 / b.D, "on-time tail");
    const double beta =
        invert_or_incompatible(ZetaLike::riemann(), (b.n - b.mu0) / b.D, "off-time tail");
    r.values = {alpha, beta};
    attach_residuals(r, m, 2);
    return r;
}

EstimateReport estimate_weibull_geo(const MomentSet& m) {
    const Basic b = basic_terms(m, 2);
    if (!(b.D > 0.0)) {
        throw Error(ErrorKind::incompatible_moments, "moment combination D is not positive");
    }
    EstimateReport r = blank(Family::weibull_geo, m);
    const double alpha = invert_or_incompatible(ZetaLike::chi(), b.mu0 / b.D, "on-time shape");
    const double q = b.D / (b.n - b.mu0);
    r.values = {alpha, q};
    r.range_violation = !in_unit(q);
    if (r.range_violation) {
        r.notes.push_back("q outside (0,1)");
        r.moments.assign(m.mu.begin(), m.mu.begin() + 2);
        return r;
    }
    attach_residuals(r, m, 2);
    return r;
}

namespace {

// log zeta(C, alpha) with alpha fixed by the second equation; +inf when that
// alpha puts the series at or past divergence.
double log_hurwitz(double C, double alpha) {
    if (!(alpha > 1.0)) return std::numeric_limits<double>::infinity();
    return std::log(zeta_like(ZetaLike::hurwitz(C), alpha));
}

}  // namespace

EstimateReport estimate_pareto_geo(const MomentSet& m) {
    const Basic b = basic_terms(m, 3);
    if (!(b.D > 0.0)) {
        throw Error(ErrorKind::incompatible_moments, "moment combination D is not positive");
    }
    EstimateReport r = blank(Family::pareto_geo, m);
    const double q = b.D / (b.n - b.mu0);
    const double t1 = b.mu0 / b.D;
    const double t2 = q - (m.mu[2] - b.mu1) / b.D;
    if (!in_unit(t2)) {
        throw Error(ErrorKind::incompatible_moments,
                    "(C/(C+1))^alpha target " + std::to_string(t2) + " is outside (0,1)");
    }
    // As C grows with (C/(C+1))^alpha = t2 fixed the law tends to G(1 - t2),
    // whose mean 1/(1 - t2) is the infimum of zeta(C, alpha) on that curve.
    if (!(t1 > 1.0 / (1.0 - t2))) {
        throw Error(ErrorKind::incompatible_moments,
                    "mean target " + std::to_string(t1) + " is not above the geometric limit " +
                        std::to_string(1.0 / (1.0 - t2)));
    }
    const double log_t1 = std::log(t1);
    const double log_t2 = std::log(t2);
    auto alpha_of = [log_t2](double u) { return log_t2 / -std::log1p(std::exp(-u)); };
    auto h = [&](double u) { return log_hurwitz(std::exp(u), alpha_of(u)) - log_t1; };

    // Scan log C for a sign change of h, which falls from +inf to a negative limit.
    double lo = -12.0;
    double hi = lo;
    int iterations = 0;
    for (double u = lo; u <= 36.0; u += 0.5) {
        ++iterations;
        if (h(u) <= 0.0) {
            hi = u;
            break;
        }
        lo = u;
    }
    if (hi == -12.0 || lo == hi) {
        throw Error(ErrorKind::convergence, "no bracket found for the Pareto scale");
    }
    for (int it = 0; it < 40; ++it) {
        ++iterations;
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }

    // Damped Newton in (log C, log alpha) on both equations.
    double x[2] = {0.5 * (lo + hi), std::log(alpha_of(0.5 * (lo + hi)))};
    auto resid = [&](const double* v, double* out) {
        const double C = std::exp(v[0]);
        const double a = std::exp(v[1]);
        out[0] = log_hurwitz(C, a) - log_t1;
        out[1] = -a * std::log1p(1.0 / C) - log_t2;
    };
    double F[2];
    resid(x, F);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        ++iterations;
        const double norm = std::max(std::fabs(F[0]), std::fabs(F[1]));
        if (norm <= 1e-13) {
            converged = true;
            break;
        }
        double J[2][2];
        for (int j = 0; j < 2; ++j) {
            const double step = 1e-6;
            double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]};
            xp[j] += step;
            xm[j] -= step;
            double Fp[2], Fm[2];
            resid(xp, Fp);
            resid(xm, Fm);
            J[0][j] = (Fp[0] - Fm[0]) / (2 * step);
            J[1][j] = (Fp[1] - Fm[1]) / (2 * step);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (!std::isfinite(det) || det == 0.0) break;
        const double dx0 = -(J[1][1] * F[0] - J[0][1] * F[1]) / det;
        const double dx1 = -(-J[1][0] * F[0] + J[0][0] * F[1]) / det;
        double t = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            double xn[2] = {x[0] + t * dx0, x[1] + t * dx1};
            double Fn[2];
            resid(xn, Fn);
            const double nn = std::max(std::fabs(Fn[0]), std::fabs(Fn[1]));
            if (std::isfinite(nn) && nn < norm) {
                x[0] = xn[0];
                x[1] = xn[1];
                F[0] = Fn[0];
                F[1] = Fn[1];
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) {
            converged = norm <= 1e-10;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "Pareto scale/shape solver did not converge, residuals " << F[0] << ", " << F[1];
        throw Error(ErrorKind::convergence, msg.str());
    }
    r.values = {std::exp(x[0]), std::exp(x[1]), q};
    r.iterations = iterations;
    r.range_violation = !in_unit(q);
    if (r.range_violation) {
        r.notes.push_back("q outside (0,1)");
        r.moments.assign(m.mu.begin(), m.mu.begin() + 3);
        return r;
    }
    attach_residuals(r, m, 3);
    return r;
}

EstimateReport estimate(Family family, const MomentSet& m) {
    if (m.kind != Observable::edges) {
        if (family != Family::geo_geo) {
            throw Error(ErrorKind::config, "subgraph counts support the geo_geo family only");
        }
        return estimate_from_subgraph(m);
    }
    switch (family) {
        case Family::geo_geo: return estimate_gg(m);
        case Family::pareto_pareto: return estimate_parpar(m);
        case Family::weibull_geo: return estimate_weibull_geo(m);
        case Family::pareto_geo: return estimate_pareto_geo(m);
    }
    throw Error(ErrorKind::config, "unknown family");
}

}  // namespace dynrg
