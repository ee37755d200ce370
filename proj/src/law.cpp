#include "dynrg/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <vector>

#include "dynrg/error.hpp"
#include "dynrg/series.hpp"

namespace dynrg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const OnOffLaw::Params& params) {
    std::visit(
        [](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                if (!(law.p > 0.0 && law.p < 1.0)) {
                    throw Error(ErrorKind::parameter_domain, "geometric p must lie in (0,1)");
                }
            } else if constexpr (std::is_same_v<T, Weibull>) {
                if (!(law.lambda > 0.0) || !std::isfinite(law.lambda)) {
                    throw Error(ErrorKind::parameter_domain, "Weibull lambda must be positive");
                }
                if (!(law.alpha > 0.0) || !std::isfinite(law.alpha)) {
                    throw Error(ErrorKind::parameter_domain, "Weibull alpha must be positive");
                }
            } else {
                if (!(law.C > 0.0) || !std::isfinite(law.C)) {
                    throw Error(ErrorKind::parameter_domain, "Pareto C must be positive");
                }
                if (!(law.alpha > 0.0) || !std::isfinite(law.alpha)) {
                    throw Error(ErrorKind::parameter_domain, "Pareto alpha must be positive");
                }
            }
        },
        params);
}

void require_index(std::int64_t i) {
    if (i < 1) throw Error(ErrorKind::parameter_domain, "duration index must be >= 1");
}

// Continuous seed x with i = 1 + floor(x) solving S(i + 1) < u <= S(i) in exact arithmetic.
double seed_point(const OnOffLaw::Params& params, double u) {
    return std::visit(
        [u](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return std::log(u) / std::log1p(-law.p);
            } else if constexpr (std::is_same_v<T, Weibull>) {
                return std::pow(-std::log(u) / law.lambda, 1.0 / law.alpha);
            } else {
                return law.C * std::expm1(-std::log(u) / law.alpha);
            }
        },
        params);
}

}  // namespace

OnOffLaw::OnOffLaw(Params params) : params_(params), mean_(kInf) {
    check_params(params_);
    if (has_finite_mean()) mean_ = tail_sum(1);
}

OnOffLaw OnOffLaw::geometric(double p) { return OnOffLaw(Geometric{p}); }
OnOffLaw OnOffLaw::weibull(double lambda, double alpha) {
    return OnOffLaw(Weibull{lambda, alpha});
}
OnOffLaw OnOffLaw::pareto(double C, double alpha) { return OnOffLaw(Pareto{C, alpha}); }

double OnOffLaw::survival(std::int64_t i) const {
    require_index(i);
    const double k = static_cast<double>(i - 1);
    return std::visit(
        [k](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return std::exp(k * std::log1p(-law.p));
            } else if constexpr (std::is_same_v<T, Weibull>) {
                return std::exp(-law.lambda * std::pow(k, law.alpha));
            } else {
                return std::exp(-law.alpha * std::log1p(k / law.C));
            }
        },
        params_);
}

double OnOffLaw::pmf(std::int64_t k) const {
    require_index(k);
    const double kd = static_cast<double>(k);
    const double s = survival(k);
    return std::visit(
        [kd, s](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return law.p * s;
            } else if constexpr (std::is_same_v<T, Weibull>) {
                const double step = std::pow(kd, law.alpha) - std::pow(kd - 1.0, law.alpha);
                return -s * std::expm1(-law.lambda * step);
            } else {
                return -s * std::expm1(-law.alpha * std::log1p(1.0 / (law.C + kd - 1.0)));
            }
        },
        params_);
}

double OnOffLaw::tail_sum(std::int64_t from) const {
    require_index(from);
    if (!has_finite_mean()) {
        throw Error(ErrorKind::infinite_mean, "survival series diverges for " + describe());
    }
    return std::visit(
        [this, from](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return survival(from) / law.p;
            } else if constexpr (std::is_same_v<T, Weibull>) {
                return weibull_survival_sum(law.lambda, law.alpha, from);
            } else {
                return pareto_survival_sum(law.C, law.alpha, from);
            }
        },
        params_);
}

bool OnOffLaw::has_finite_mean() const noexcept {
    if (const auto* par = std::get_if<Pareto>(&params_)) return par->alpha > 1.0;
    return true;
}

double OnOffLaw::mean() const {
    if (!has_finite_mean()) {
        throw Error(ErrorKind::infinite_mean, "infinite mean for " + describe());
    }
    return mean_;
}

double OnOffLaw::tail_index() const noexcept {
    if (const auto* par = std::get_if<Pareto>(&params_)) return par->alpha;
    return kInf;
}

std::int64_t OnOffLaw::sample(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw Error(ErrorKind::parameter_domain, "uniform draw must lie in (0,1)");
    }
    const double x = seed_point(params_, u);
    if (!(x < 0x1.0p62)) return kMaxDuration;
    auto i = static_cast<std::int64_t>(std::floor(x)) + 1;
    // The closed form only seeds the answer; settle boundary cases against survival.
    const double frac = x - std::floor(x);
    if (frac < 1e-9 || frac > 1.0 - 1e-9) {
        while (i > 1 && survival(i) < u) --i;
        while (i < kMaxDuration && survival(i + 1) >= u) ++i;
    }
    return i;
}

std::string OnOffLaw::describe() const {
    std::ostringstream os;
    os.precision(12);
    std::visit(
        [&os](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                os << "G(" << law.p << ")";
            } else if constexpr (std::is_same_v<T, Weibull>) {
                os << "W(" << law.lambda << "," << law.alpha << ")";
            } else {
                os << "Par(" << law.C << "," << law.alpha << ")";
            }
        },
        params_);
    return os.str();
}

// ---------------------------------------------------------------------------

struct ResidualLaw::Cache {
    static constexpr std::int64_t kBlock = 1024;
    static constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

    std::mutex mu;
    // surv[k - 1] = residual survival at k; extended one block at a time.
    std::vector<double> surv;
};

ResidualLaw::ResidualLaw(const OnOffLaw& base) : base_(base), cache_(std::make_shared<Cache>()) {
    if (!base_.has_finite_mean()) {
        throw Error(ErrorKind::infinite_mean,
                    "residual law undefined for infinite-mean " + base_.describe());
    }
}

double ResidualLaw::pmf(std::int64_t k) const { return base_.survival(k) / base_.mean(); }

double ResidualLaw::survival(std::int64_t k) const {
    if (k == 1) return 1.0;
    return std::min(1.0, base_.tail_sum(k) / base_.mean());
}

std::int64_t ResidualLaw::sample(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
        throw Error(ErrorKind::parameter_domain, "uniform draw must lie in (0,1)");
    }
    if (base_.kind() == LawKind::geometric) return base_.sample(u);

    const double mean = base_.mean();
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto& surv = cache_->surv;
        // Each block starts from a directly evaluated tail so the contents are
        // independent of the order in which draws extended the cache.
        while ((surv.empty() || surv.back() >= u) && surv.size() < Cache::kMaxEntries) {
            const auto start = static_cast<std::int64_t>(surv.size()) + 1;
            double s = survival(start);
            for (std::int64_t k = start; k < start + Cache::kBlock; ++k) {
                surv.push_back(s);
                s = std::max(0.0, s - base_.survival(k) / mean);
            }
        }
        if (surv.back() < u) {
            // First index whose survival drops below u; the answer is one before it.
            auto it = std::upper_bound(surv.begin(), surv.end(), u, std::greater<double>());
            return static_cast<std::int64_t>(it - surv.begin());
        }
    }

    // Far tail: exponential search then bisection on the direct evaluation.
    std::int64_t lo = static_cast<std::int64_t>(Cache::kMaxEntries);  // survival(lo) >= u
    std::int64_t hi = 2 * lo;
    while (survival(hi) >= u) {
        if (hi >= kMaxDuration / 2) return kMaxDuration;
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (survival(mid) >= u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const OnOffLaw& law) {
    return std::visit(
        [](const auto& p) -> nlohmann::json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Geometric>) {
                return {{"kind", "geometric"}, {"p", p.p}};
            } else if constexpr (std::is_same_v<T, Weibull>) {
                return {{"kind", "weibull"}, {"lambda", p.lambda}, {"alpha", p.alpha}};
            } else {
                return {{"kind", "pareto"}, {"C", p.C}, {"alpha", p.alpha}};
            }
        },
        law.params());
}

OnOffLaw law_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw Error(ErrorKind::config, "law description needs a string \"kind\" field");
    }
    auto number = [&j](const char* key) {
        if (!j.contains(key) || !j[key].is_number()) {
            throw Error(ErrorKind::config,
                        std::string("law description is missing numeric field \"") + key + "\"");
        }
        return j[key].get<double>();
    };
    const auto kind = j["kind"].get<std::string>();
    if (kind == "geometric") return OnOffLaw::geometric(number("p"));
    if (kind == "weibull") return OnOffLaw::weibull(number("lambda"), number("alpha"));
    if (kind == "pareto") return OnOffLaw::pareto(number("C"), number("alpha"));
    throw Error(ErrorKind::config, "unknown law kind \"" + kind + "\"");
}

}  // namespace dynrg
