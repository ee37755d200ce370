#include "dynrg/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace dynrg {
namespace {

// Law tables needed by the MGF recursion over a horizon of K epochs.
class MgfEvaluator {
public:
    MgfEvaluator(const ModelSpec& model, std::int64_t K) : K_(K), rho_(model.rho()) {
        if (K < 1) throw Error(ErrorKind::parameter_domain, "MGF horizon must be >= 1");
        const auto size = static_cast<std::size_t>(K) + 2;
        f_.assign(size, 0.0);
        g_.assign(size, 0.0);
        sx_.assign(size, 0.0);
        sy_.assign(size, 0.0);
        fbar_.assign(size, 0.0);
        gbar_.assign(size, 0.0);
        const double ex = model.on().mean();
        const double ey = model.off().mean();
        for (std::int64_t l = 1; l <= K + 1; ++l) {
            const auto i = static_cast<std::size_t>(l);
            f_[i] = model.on().pmf(l);
            g_[i] = model.off().pmf(l);
            sx_[i] = model.on().survival(l);
            sy_[i] = model.off().survival(l);
            fbar_[i] = sx_[i] / ex;
            gbar_[i] = sy_[i] / ey;
        }
        sbar_x_K_ = model.on_residual().survival(K);
        sbar_y_K_ = model.off_residual().survival(K);
    }

    std::int64_t horizon() const noexcept { return K_; }

    double operator()(std::span<const double> theta) {
        if (static_cast<std::int64_t>(theta.size()) != K_) {
            throw Error(ErrorKind::parameter_domain, "theta length does not match the horizon");
        }
        const auto K = static_cast<std::size_t>(K_);
        // Prefix sums of the finite entries and prefix counts of forced-off entries.
        prefix_.assign(K + 1, 0.0);
        blocked_.assign(K + 1, 0);
        for (std::size_t i = 1; i <= K; ++i) {
            const double t = theta[i - 1];
            const bool off = std::isinf(t) && t < 0;
            prefix_[i] = prefix_[i - 1] + (off ? 0.0 : t);
            blocked_[i] = blocked_[i - 1] + (off ? 1 : 0);
        }
        // exp(sum_{i=a}^{b} theta_i), exactly 0 when a forced-off epoch is inside.
        auto span_exp = [this](std::size_t a, std::size_t b) {
            if (blocked_[b] != blocked_[a - 1]) return 0.0;
            return std::exp(prefix_[b] - prefix_[a - 1]);
        };

        // v[k], w[k]: MGF of the epochs k..K given a fresh on (off) period starts at k.
        v_.assign(K + 2, 0.0);
        w_.assign(K + 2, 0.0);
        for (std::size_t k = K; k >= 2; --k) {
            const std::size_t span = K - k;
            double v = sx_[span + 1] * span_exp(k, K);
            double w = sy_[span + 1];
            for (std::size_t l = 1; l <= span; ++l) {
                v += f_[l] * span_exp(k, k + l - 1) * w_[k + l];
                w += g_[l] * v_[k + l];
            }
            v_[k] = v;
            w_[k] = w;
        }
        double plus = sbar_x_K_ * span_exp(1, K);
        double minus = sbar_y_K_;
        for (std::size_t l = 1; l + 1 <= K; ++l) {
            plus += fbar_[l] * span_exp(1, l) * w_[1 + l];
            minus += gbar_[l] * v_[1 + l];
        }
        return rho_ * plus + (1.0 - rho_) * minus;
    }

private:
    std::int64_t K_;
    double rho_;
    std::vector<double> f_, g_, sx_, sy_, fbar_, gbar_;
    double sbar_x_K_ = 0.0;
    double sbar_y_K_ = 0.0;
    std::vector<double> prefix_, v_, w_;
    std::vector<int> blocked_;
};

}  // namespace

double joint_mgf(const ModelSpec& model, std::span<const double> theta) {
    MgfEvaluator mgf(model, static_cast<std::int64_t>(theta.size()));
    return mgf(theta);
}

std::vector<double> joint_distribution(const ModelSpec& model, std::vector<std::int64_t> epochs) {
    if (epochs.empty()) throw Error(ErrorKind::parameter_domain, "epoch set is empty");
    if (epochs.size() > static_cast<std::size_t>(kJointEpochCap)) {
        throw Error(ErrorKind::size, "joint law over " + std::to_string(epochs.size()) +
                                         " epochs exceeds the cap of " +
                                         std::to_string(kJointEpochCap));
    }
    std::sort(epochs.begin(), epochs.end());
    if (epochs.front() < 1) throw Error(ErrorKind::parameter_domain, "epochs must be >= 1");
    if (std::adjacent_find(epochs.begin(), epochs.end()) != epochs.end()) {
        throw Error(ErrorKind::parameter_domain, "epochs must be distinct");
    }
    // Stationarity: only the gaps matter.
    const std::int64_t shift = epochs.front() - 1;
    for (auto& e : epochs) e -= shift;

    const std::size_t m = epochs.size();
    const std::size_t masks = std::size_t{1} << m;
    MgfEvaluator mgf(model, epochs.back());
    std::vector<double> theta(static_cast<std::size_t>(epochs.back()), 0.0);

    // F[S] = P(off at every epoch in S) = M(theta) with -inf on S.
    std::vector<double> F(masks);
    for (std::size_t S = 0; S < masks; ++S) {
        for (std::size_t i = 0; i < m; ++i) {
            theta[static_cast<std::size_t>(epochs[i] - 1)] = (S >> i) & 1U ? kForceOff : 0.0;
        }
        F[S] = mgf(theta);
    }
    // Superset Moebius inversion: afterwards F[S] = P(off exactly on S).
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t S = 0; S < masks; ++S) {
            if (!(S & bit)) F[S] -= F[S | bit];
        }
    }
    std::vector<double> p(masks);
    for (std::size_t S = 0; S < masks; ++S) {
        p[(masks - 1) ^ S] = std::max(0.0, F[S]);
    }
    return p;
}

// ---------------------------------------------------------------------------

RenewalTables::RenewalTables(const ModelSpec& model) : model_(model), rho_(model.rho()) {
    for (auto* v : {&f_, &g_, &sx_, &sy_, &fbar_, &sbar_, &r_, &s_, &r2_, &s2_, &rr_, &rr2_}) {
        v->push_back(0.0);
    }
}

void RenewalTables::extend_to(std::int64_t t) {
    const auto want = static_cast<std::size_t>(t);
    if (want < r_.size()) return;

    // Law tables reach one index further than the recursions.
    const double ex = model_.on().mean();
    const ResidualLaw& res = model_.on_residual();
    while (sx_.size() < want + 2) {
        const auto l = static_cast<std::int64_t>(sx_.size());
        f_.push_back(model_.on().pmf(l));
        g_.push_back(model_.off().pmf(l));
        sx_.push_back(model_.on().survival(l));
        sy_.push_back(model_.off().survival(l));
        fbar_.push_back(sx_.back() / ex);
        sbar_.push_back(res.survival(l));
    }

    for (std::size_t k = r_.size(); k <= want; ++k) {
        double r = sx_[k], s = 0.0, r2 = sx_[k + 1], s2 = 0.0, rr = sbar_[k], rr2 = sbar_[k + 1];
        for (std::size_t l = 1; l < k; ++l) {
            const std::size_t j = k - l;
            r += f_[l] * s_[j];
            s += g_[l] * r_[j];
            r2 += f_[l] * s2_[j];
            s2 += g_[l] * r2_[j];
            rr += fbar_[l] * s_[j];
            rr2 += fbar_[l] * s2_[j];
        }
        r_.push_back(r);
        s_.push_back(s);
        r2_.push_back(r2);
        s2_.push_back(s2);
        rr_.push_back(rr);
        rr2_.push_back(rr2);
    }
}

AutocovTable autocovariance(const ModelSpec& model, std::int64_t k_max) {
    if (k_max < 1) throw Error(ErrorKind::parameter_domain, "k_max must be >= 1");
    RenewalTables tables(model);
    tables.extend_to(k_max);
    AutocovTable out;
    out.k_max = k_max;
    out.rho = tables.rho();
    const auto size = static_cast<std::size_t>(k_max) + 1;
    out.r.assign(size, 0.0);
    out.s.assign(size, 0.0);
    out.r_res.assign(size, 0.0);
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const auto i = static_cast<std::size_t>(k);
        out.r[i] = tables.r(k);
        out.s[i] = tables.s(k);
        out.r_res[i] = tables.r_res(k);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct SaddleObjective {
    MgfEvaluator mgf;
    std::vector<double> counts;
    double n;

    double log_m(const std::vector<double>& theta) { return std::log(mgf(theta)); }

    double value(const std::vector<double>& theta) {
        double dot = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) dot += theta[i] * counts[i];
        return dot - n * log_m(theta);
    }

    Eigen::VectorXd grad_log_m(std::vector<double> theta) {
        const double h = kFiniteDiffStep;
        Eigen::VectorXd g(static_cast<Eigen::Index>(theta.size()));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double t0 = theta[i];
            theta[i] = t0 + h;
            const double up = log_m(theta);
            theta[i] = t0 - h;
            const double down = log_m(theta);
            theta[i] = t0;
            g[static_cast<Eigen::Index>(i)] = (up - down) / (2.0 * h);
        }
        return g;
    }

    Eigen::MatrixXd hess_log_m(std::vector<double> theta) {
        const double h = kFiniteDiffStep;
        const auto K = static_cast<Eigen::Index>(theta.size());
        Eigen::MatrixXd H(K, K);
        const double center = log_m(theta);
        for (Eigen::Index i = 0; i < K; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const double ti = theta[ui];
            theta[ui] = ti + h;
            const double up = log_m(theta);
            theta[ui] = ti - h;
            const double down = log_m(theta);
            theta[ui] = ti;
            H(i, i) = (up - 2.0 * center + down) / (h * h);
            for (Eigen::Index j = 0; j < i; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                const double tj = theta[uj];
                double acc = 0.0;
                for (int si : {1, -1}) {
                    for (int sj : {1, -1}) {
                        theta[ui] = ti + si * h;
                        theta[uj] = tj + sj * h;
                        acc += si * sj * log_m(theta);
                    }
                }
                theta[ui] = ti;
                theta[uj] = tj;
                H(i, j) = H(j, i) = acc / (4.0 * h * h);
            }
        }
        return H;
    }
};

SaddleObjective make_objective(const ModelSpec& model, std::span<const double> counts) {
    if (counts.empty()) throw Error(ErrorKind::parameter_domain, "counts vector is empty");
    const double n = static_cast<double>(model.n());
    const double eps = 1e-6;
    std::vector<double> c(counts.begin(), counts.end());
    for (auto& x : c) {
        if (!std::isfinite(x)) throw Error(ErrorKind::parameter_domain, "counts must be finite");
        x = std::clamp(x, eps, n - eps);
    }
    return SaddleObjective{MgfEvaluator(model, static_cast<std::int64_t>(c.size())), std::move(c), n};
}

LegendreResult maximise(SaddleObjective& obj) {
    const std::size_t K = obj.counts.size();
    std::vector<double> theta(K, 0.0);
    double phi = obj.value(theta);
    const double grad_tol = 1e-7 * std::max(1.0, obj.n);

    Eigen::Map<const Eigen::VectorXd> c(obj.counts.data(), static_cast<Eigen::Index>(K));
    for (int it = 0; it < kLegendreIterCap; ++it) {
        const Eigen::VectorXd grad = c - obj.n * obj.grad_log_m(theta);
        if (grad.lpNorm<Eigen::Infinity>() <= grad_tol) {
            return {std::max(0.0, phi), theta, it};
        }
        const Eigen::MatrixXd curv = obj.n * obj.hess_log_m(theta);
        Eigen::LLT<Eigen::MatrixXd> llt(curv);
        Eigen::VectorXd dir = llt.info() == Eigen::Success ? Eigen::VectorXd(llt.solve(grad))
                                                           : Eigen::VectorXd(grad / obj.n);
        double step = 1.0;
        const double slope = grad.dot(dir);
        bool moved = false;
        std::vector<double> trial(K);
        for (int half = 0; half < 60; ++half) {
            for (std::size_t i = 0; i < K; ++i) trial[i] = theta[i] + step * dir[static_cast<Eigen::Index>(i)];
            const double val = obj.value(trial);
            if (std::isfinite(val) && val >= phi + 1e-4 * step * slope) {
                theta = trial;
                phi = val;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            if (grad.lpNorm<Eigen::Infinity>() <= 1e-5 * std::max(1.0, obj.n)) {
                return {std::max(0.0, phi), theta, it};
            }
            std::ostringstream msg;
            msg << "Legendre ascent stalled with gradient norm " << grad.lpNorm<Eigen::Infinity>();
            throw LegendreError(msg.str(), {std::max(0.0, phi), theta, it});
        }
    }
    throw LegendreError("Legendre ascent hit the iteration cap",
                        {std::max(0.0, phi), theta, kLegendreIterCap});
}

}  // namespace

LegendreResult legendre_I(const ModelSpec& model, std::span<const double> counts) {
    auto obj = make_objective(model, counts);
    return maximise(obj);
}

double saddlepoint_logprob(const ModelSpec& model, std::span<const double> counts) {
    auto obj = make_objective(model, counts);
    const LegendreResult best = maximise(obj);
    const Eigen::MatrixXd curv = obj.n * obj.hess_log_m(best.theta);
    Eigen::LLT<Eigen::MatrixXd> llt(curv);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::degenerate_saddle, "Hessian of n log M is not positive definite");
    }
    const Eigen::MatrixXd L = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
        if (!(L(i, i) > 0.0)) {
            throw Error(ErrorKind::degenerate_saddle, "Hessian of n log M is singular");
        }
        logdet += 2.0 * std::log(L(i, i));
    }
    const double K = static_cast<double>(counts.size());
    return -0.5 * K * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - best.value;
}

}  // namespace dynrg
