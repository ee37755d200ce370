#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "dynrg/asymp.hpp"
#include "dynrg/error.hpp"
#include "dynrg/renewal.hpp"

namespace dynrg {
namespace {

using Epochs = std::vector<std::int64_t>;

// P(one stationary edge is on at every epoch of a set drawn from {1, 2, k, k+1}).
class JointOn {
public:
    explicit JointOn(const ModelSpec& model) : model_(model), tables_(model), rho_(model.rho()) {}

    double operator()(Epochs e) {
        std::sort(e.begin(), e.end());
        e.erase(std::unique(e.begin(), e.end()), e.end());
        const std::int64_t shift = e.front() - 1;
        for (auto& t : e) t -= shift;
        if (e.size() == 1) return rho_;
        if (e.back() <= kShortSpan) return short_span(e);

        // Far apart: a head within {1, 2} and a tail {g} or {g, g+1}.
        const bool two_head = e[1] == 2;
        const std::size_t tail_at = two_head ? 2 : 1;
        const std::int64_t g = e[tail_at];
        const bool two_tail = e.size() == tail_at + 2;
        if (e.size() > tail_at + 2 || (two_tail && e[tail_at + 1] != g + 1)) {
            throw Error(ErrorKind::parameter_domain, "unsupported epoch pattern");
        }
        const double fb1 = tables_.fbar(1);
        if (!two_head) return rho_ * (two_tail ? tables_.r2_res(g) : tables_.r_res(g));
        return rho_ * (two_tail ? tables_.r2_res(g) - fb1 * tables_.s2(g - 1)
                                : tables_.r_res(g) - fb1 * tables_.s(g - 1));
    }

    RenewalTables& tables() { return tables_; }

private:
    static constexpr std::int64_t kShortSpan = 8;

    double short_span(const Epochs& e) {
        auto it = cache_.find(e);
        if (it != cache_.end()) return it->second;
        const auto p = joint_distribution(model_, e);
        const double v = p.back();
        cache_.emplace(e, v);
        return v;
    }

    ModelSpec model_;
    RenewalTables tables_;
    double rho_;
    std::map<Epochs, double> cache_;
};

double falling(double n, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= std::max(0.0, n - i);
    return out;
}

// Cov(prod_{t in L} A(t), prod_{t in R} A(t)). Expanding each A(t) over edges,
// index tuples group by the set partition of positions they induce; only
// partitions with a block meeting both sides contribute.
double cov_products(JointOn& q, double n, const Epochs& left, const Epochs& right) {
    Epochs t(left);
    t.insert(t.end(), right.begin(), right.end());
    const int m = static_cast<int>(t.size());
    const int nl = static_cast<int>(left.size());

    std::array<int, 4> block{};  // restricted growth string
    double total = 0.0;
    auto visit = [&](int blocks) {
        bool crossing = false;
        double joint = 1.0, split = 1.0;
        for (int b = 0; b < blocks; ++b) {
            Epochs all, l, r;
            for (int i = 0; i < m; ++i) {
                if (block[i] != b) continue;
                all.push_back(t[i]);
                (i < nl ? l : r).push_back(t[i]);
            }
            if (!l.empty() && !r.empty()) crossing = true;
            joint *= q(all);
            if (!l.empty()) split *= q(l);
            if (!r.empty()) split *= q(r);
        }
        if (crossing) total += falling(n, blocks) * (joint - split);
    };

    // Enumerate set partitions of m <= 4 positions as restricted growth strings.
    block.fill(0);
    for (;;) {
        int blocks = 0;
        for (int i = 0; i < m; ++i) blocks = std::max(blocks, block[i] + 1);
        visit(blocks);
        int i = m - 1;
        for (; i > 0; --i) {
            const int mx = *std::max_element(block.begin(), block.begin() + i);
            if (block[i] <= mx) break;
        }
        if (i == 0) break;
        ++block[i];
        for (int j = i + 1; j < m; ++j) block[j] = 0;
    }
    return total;
}

struct TailFit {
    double slope = 0.0;
    double correction = 0.0;
    bool summable = true;
};

// Least-squares slope of log|term| against log k over the last three quarters
// of the run; when steeper than -1 the remaining sum is close to
// term_K K / (-slope - 1).
TailFit fit_tail(const std::vector<double>& terms, std::int64_t first_k) {
    TailFit fit;
    const auto K = static_cast<std::int64_t>(terms.size()) + first_k - 1;
    const std::int64_t from = std::max(first_k, K / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::int64_t k = from; k <= K; ++k) {
        const double v = std::fabs(terms[static_cast<std::size_t>(k - first_k)]);
        if (v == 0.0) continue;
        const double x = std::log(static_cast<double>(k));
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) return fit;
    fit.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (fit.slope < -1.1) {
        fit.correction = terms.back() * static_cast<double>(K) / (-fit.slope - 1.0);
    } else {
        fit.summable = false;
    }
    return fit;
}

}  // namespace

GeneralCovResult general_moment_cov(const ModelSpec& model, double tol, std::int64_t k_cap) {
    if (!(tol > 0.0)) throw Error(ErrorKind::parameter_domain, "tolerance must be positive");
    if (k_cap < 8) throw Error(ErrorKind::parameter_domain, "k_cap must be at least 8");
    const double n = static_cast<double>(model.n());
    JointOn q(model);

    const double var_a = cov_products(q, n, {1}, {1});
    const double var_aa = cov_products(q, n, {1, 2}, {1, 2});
    double s0 = 0.0, s1 = 0.0;
    double s01 = cov_products(q, n, {1}, {1, 2});

    std::vector<double> t0, t1, t01;
    constexpr int kQuietRun = 16;
    int quiet = 0;
    GeneralCovResult out;
    std::int64_t k = 2;
    for (; k <= k_cap; ++k) {
        const double a = cov_products(q, n, {1}, {k});
        const double b = cov_products(q, n, {1, 2}, {k, k + 1});
        const double c = cov_products(q, n, {1}, {k, k + 1}) + cov_products(q, n, {k}, {1, 2});
        s0 += a;
        s1 += b;
        s01 += c;
        t0.push_back(a);
        t1.push_back(b);
        t01.push_back(c);
        const bool small = std::fabs(a) <= tol * std::max(1.0, std::fabs(var_a + 2 * s0)) &&
                           std::fabs(b) <= tol * std::max(1.0, std::fabs(var_aa + 2 * s1)) &&
                           std::fabs(c) <= tol * std::max(1.0, std::fabs(s01));
        quiet = small ? quiet + 1 : 0;
        if (quiet >= kQuietRun) {
            out.converged = true;
            break;
        }
    }
    out.terms = std::min(k, k_cap);

    if (!out.converged) {
        const TailFit f0 = fit_tail(t0, 2);
        const TailFit f1 = fit_tail(t1, 2);
        const TailFit f01 = fit_tail(t01, 2);
        out.tail_slope = std::max({f0.slope, f1.slope, f01.slope});
        out.summable = f0.summable && f1.summable && f01.summable;
        s0 += f0.correction;
        s1 += f1.correction;
        s01 += f01.correction;
        std::ostringstream msg;
        if (out.summable) {
            msg << "tolerance not reached by k = " << k_cap << "; added a power-law tail with slope "
                << out.tail_slope;
        } else {
            msg << "lag terms decay like k^" << out.tail_slope
                << " near k = " << k_cap << ", which is not summable; the variances are "
                << "likely infinite and the reported values are partial sums";
        }
        out.warning = msg.str();
    }

    out.cov.v0 = var_a + 2 * s0;
    out.cov.v1 = var_aa + 2 * s1;
    out.cov.c01 = s01;
    return out;
}

}  // namespace dynrg
