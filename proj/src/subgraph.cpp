#include <cmath>

#include "dynrg/error.hpp"
#include "dynrg/moments.hpp"

namespace dynrg {

TripleOverlap triple_overlap(int N) {
    if (N < 3) throw Error(ErrorKind::parameter_domain, "subgraph moments need N >= 3");
    const double n = N;
    const double total = n * (n - 1) * (n - 2) / 6.0;
    const double a1 = 3.0 * (n - 3) * (n - 4) / 2.0;
    const double a2 = 3.0 * (n - 3);
    const double a3 = 1.0;
    return {total, total - a1 - a2 - a3, a1, a2, a3};
}

namespace {

void check_lag(int lag) {
    if (lag != 0 && lag != 1) {
        throw Error(ErrorKind::parameter_domain, "subgraph moments are available for lags 0 and 1");
    }
}

// Geometric on/off laws only: the residual on-time pmf at 1 equals p.
double geometric_fbar1(const ModelSpec& model) {
    if (model.on().kind() != LawKind::geometric || model.off().kind() != LawKind::geometric) {
        throw Error(ErrorKind::parameter_domain,
                    "subgraph moment equations are stated for geometric on/off times");
    }
    return model.on_residual().pmf(1);
}

int vertices_of(const ModelSpec& model) {
    if (!model.vertices()) throw Error(ErrorKind::parameter_domain, "model has no vertex count N");
    return *model.vertices();
}

}  // namespace

double triangle_moment(int N, double rho, double fbar1, int lag) {
    check_lag(lag);
    const TripleOverlap a = triple_overlap(N);
    if (lag == 0) return a.total * rho * rho * rho;
    const double x = 1.0 - fbar1;
    const double r3 = rho * rho * rho;
    return a.total * ((a.a0 + a.a1) * r3 * r3 + a.a2 * r3 * rho * rho * x + a.a3 * r3 * x * x * x);
}

double wedge_moment(int N, double rho, double fbar1, int lag) {
    check_lag(lag);
    const TripleOverlap a = triple_overlap(N);
    const double r2 = rho * rho;
    if (lag == 0) return 3.0 * a.total * r2;
    const double x = 1.0 - fbar1;
    return a.total * ((9.0 * a.a0 + 9.0 * a.a1 + 5.0 * a.a2) * r2 * r2 + 4.0 * a.a2 * r2 * rho * x +
                      3.0 * a.a3 * r2 * x * x + 6.0 * a.a3 * r2 * rho * x);
}

double triangle_moment(const ModelSpec& model, int lag) {
    return triangle_moment(vertices_of(model), model.rho(), geometric_fbar1(model), lag);
}

double wedge_moment(const ModelSpec& model, int lag) {
    return wedge_moment(vertices_of(model), model.rho(), geometric_fbar1(model), lag);
}

EstimateReport estimate_from_subgraph(const MomentSet& m) {
    if (m.kind == Observable::edges) {
        throw Error(ErrorKind::parameter_domain, "subgraph estimator needs triangle or wedge counts");
    }
    if (!m.N) throw Error(ErrorKind::insufficient_data, "subgraph moments need the vertex count N");
    if (m.mu.size() < 2) throw Error(ErrorKind::insufficient_data, "need lag-0 and lag-1 moments");
    const int N = *m.N;
    const bool tri = m.kind == Observable::triangles;
    const TripleOverlap a = triple_overlap(N);

    const double mean = m.mu[0];
    const double top = tri ? a.total : 3.0 * a.total;
    if (!(mean > 0.0 && mean < top)) {
        throw Error(ErrorKind::incompatible_moments,
                    "mean subgraph count " + std::to_string(mean) + " is outside (0, " +
                        std::to_string(top) + ")");
    }
    const double rho = tri ? std::cbrt(mean / a.total) : std::sqrt(mean / (3.0 * a.total));

    // Second moment is increasing in x = 1 - fbar1 on [0, 1].
    auto second = [&](double x) {
        return tri ? triangle_moment(N, rho, 1.0 - x, 1) : wedge_moment(N, rho, 1.0 - x, 1);
    };
    const double target = m.mu[1];
    if (!(target > second(0.0) && target <= second(1.0))) {
        throw Error(ErrorKind::incompatible_moments,
                    "lag-1 subgraph moment " + std::to_string(target) +
                        " admits no residual on-time probability in [0, 1)");
    }
    double lo = 0.0, hi = 1.0;
    int iterations = 0;
    while (hi - lo > 1e-15 && iterations < 200) {
        ++iterations;
        const double mid = 0.5 * (lo + hi);
        (second(mid) < target ? lo : hi) = mid;
    }
    const double x = 0.5 * (lo + hi);
    const double p = 1.0 - x;
    const double q = rho * p / (1.0 - rho);

    EstimateReport r;
    r.family = Family::geo_geo;
    r.observable = m.kind;
    r.names = {"p", "q"};
    r.values = {p, q};
    r.iterations = iterations;
    r.moments = {m.mu[0], m.mu[1]};
    r.range_violation = !(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0);
    if (r.range_violation) {
        r.notes.push_back("estimate outside (0,1)");
    } else {
        const double fitted_rho = q / (p + q);
        if (tri) {
            r.residuals = {triangle_moment(N, fitted_rho, p, 0) - m.mu[0],
                           triangle_moment(N, fitted_rho, p, 1) - m.mu[1]};
        } else {
            r.residuals = {wedge_moment(N, fitted_rho, p, 0) - m.mu[0],
                           wedge_moment(N, fitted_rho, p, 1) - m.mu[1]};
        }
    }
    return r;
}

}  // namespace dynrg
