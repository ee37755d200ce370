#include "dynrg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "dynrg/asymp.hpp"
#include "dynrg/error.hpp"
#include "dynrg/rng.hpp"

namespace dynrg {
namespace {

template <class T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j[key].get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::config, std::string("config field \"") + key + "\" has the wrong type");
    }
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double quantile7(const std::vector<double>& sorted, double prob) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::optional<double> sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return std::nullopt;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

RepResult run_rep(const ExperimentConfig& cfg, int rep) {
    RepResult row;
    row.rep = rep;
    row.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    try {
        const int L = cfg.observable == Observable::edges ? moments_needed(cfg.family) : 2;
        MomentAccumulator acc(L);
        stream_trace(cfg.model, cfg.observable, cfg.K, row.seed,
                     [&acc](std::int64_t v) { acc.push(v); });
        const MomentSet m = acc.finish(cfg.observable, cfg.model.n(), cfg.model.vertices());
        row.moments = m.mu;
        const EstimateReport est = estimate(cfg.family, m);
        row.values = est.values;
        row.range_violation = est.range_violation;
    } catch (const Error& e) {
        row.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    return row;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
    ModelSpec model = model_from_json(j);
    const auto observable =
        observable_from_string(get_field<std::string>(j, "observable", "edges"));
    if (observable != Observable::edges && !model.vertices()) {
        throw Error(ErrorKind::config, "triangle and wedge observables need \"N\"");
    }
    const Family family = j.contains("family")
                              ? family_from_string(get_field<std::string>(j, "family", ""))
                              : infer_family(model);
    if (observable != Observable::edges && family != Family::geo_geo) {
        throw Error(ErrorKind::config, "subgraph observables support the geo_geo family only");
    }
    ExperimentConfig cfg{.model = model};
    cfg.observable = observable;
    cfg.family = family;
    cfg.K = get_field<std::int64_t>(j, "K", 0);
    cfg.reps = get_field<int>(j, "reps", 1);
    cfg.seed = get_field<std::uint64_t>(j, "seed", 1);
    cfg.workers = get_field<int>(j, "workers", 1);
    cfg.out = get_field<std::string>(j, "out", "");
    // K may be left out for commands that only need the model.
    if (j.contains("K") && cfg.K < 2) throw Error(ErrorKind::config, "K must be >= 2");
    if (cfg.reps < 1) throw Error(ErrorKind::config, "reps must be >= 1");
    if (cfg.workers < 1) throw Error(ErrorKind::config, "workers must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    nlohmann::json j = to_json(cfg.model);
    j["observable"] = to_string(cfg.observable);
    j["family"] = to_string(cfg.family);
    j["K"] = cfg.K;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    return j;
}

Histogram freedman_diaconis(const std::vector<double>& xs, int min_bins) {
    Histogram h;
    if (xs.empty()) return h;
    std::vector<double> s(xs);
    std::sort(s.begin(), s.end());
    double lo = s.front(), hi = s.back();
    int bins = min_bins;
    if (hi > lo) {
        const double iqr = quantile7(s, 0.75) - quantile7(s, 0.25);
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
        if (width > 0.0) {
            const double wanted = std::ceil((hi - lo) / width);
            bins = static_cast<int>(std::clamp(wanted, static_cast<double>(min_bins), 1000.0));
        }
    } else {
        lo -= 0.5;
        hi += 0.5;
    }
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double x : s) {
        auto b = static_cast<int>((x - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

std::vector<std::pair<double, double>> normal_qq(const std::vector<double>& xs) {
    std::vector<std::pair<double, double>> qq;
    const double mean = mean_of(xs);
    const auto sd = sample_sd(xs, mean);
    if (!sd || !(*sd > 0.0)) return qq;
    std::vector<double> z(xs);
    std::sort(z.begin(), z.end());
    const boost::math::normal_distribution<double> normal;
    const auto m = static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double prob = (static_cast<double>(i) + 0.5) / m;
        qq.emplace_back(boost::math::quantile(normal, prob), (z[i] - mean) / *sd);
    }
    return qq;
}

std::optional<double> central_qq_slope(const std::vector<std::pair<double, double>>& qq, double mass) {
    const boost::math::normal_distribution<double> normal;
    const double cut = boost::math::quantile(normal, 0.5 + 0.5 * mass);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& [x, y] : qq) {
        if (std::fabs(x) > cut) continue;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    if (cnt < 3 || !(den > 0.0)) return std::nullopt;
    return (cnt * sxy - sx * sy) / den;
}

CampaignSummary run_campaign(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw Error(ErrorKind::config, "reps must be >= 1");
    if (cfg.K < 2) throw Error(ErrorKind::config, "K must be >= 2");
    const auto start = std::chrono::steady_clock::now();

    CampaignSummary summary{.config = cfg};
    summary.rows.resize(static_cast<std::size_t>(cfg.reps));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next++; i < cfg.reps; i = next++) {
            summary.rows[static_cast<std::size_t>(i)] = run_rep(cfg, i + 1);
        }
    };
    const int threads = std::clamp(cfg.workers, 1, cfg.reps);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<const RepResult*> usable;
    for (const auto& row : summary.rows) {
        if (!row.error.empty()) {
            ++summary.errors;
        } else if (row.range_violation) {
            ++summary.range_flags;
        } else {
            usable.push_back(&row);
        }
    }

    std::optional<std::vector<double>> truth;
    try {
        truth = true_parameters(cfg.family, cfg.model);
    } catch (const Error&) {
    }
    std::optional<ParamCov> predicted;
    if (cfg.family == Family::geo_geo && cfg.observable == Observable::edges && truth) {
        const double p = (*truth)[0], q = (*truth)[1];
        predicted = delta_method_cov(cfg.model.n(), p, q, geometric_moment_cov(cfg.model.n(), p, q));
    }

    const auto names = parameter_names(cfg.family);
    for (std::size_t k = 0; k < names.size(); ++k) {
        ParamSummary ps;
        ps.name = names[k];
        if (truth) ps.truth = (*truth)[k];
        std::vector<double> xs;
        for (const auto* row : usable) xs.push_back(row->values[k]);
        ps.mean = mean_of(xs);
        ps.sd = sample_sd(xs, ps.mean);
        if (predicted) {
            const double var = k == 0 ? predicted->sigma2 : predicted->tau2;
            ps.delta_sd = std::sqrt(var / static_cast<double>(cfg.K));
        }
        ps.hist = freedman_diaconis(xs);
        ps.qq = normal_qq(xs);
        ps.qq_slope = central_qq_slope(ps.qq);
        summary.params.push_back(std::move(ps));
    }

    // Moment statistics over every replication that produced moments.
    std::vector<std::vector<double>> mus;
    for (const auto& row : summary.rows) {
        if (!row.moments.empty()) mus.push_back(row.moments);
    }
    if (!mus.empty()) {
        const std::size_t L = mus.front().size();
        const double K = static_cast<double>(cfg.K);
        std::vector<double> means(L, 0.0);
        for (std::size_t l = 0; l < L; ++l) {
            std::vector<double> col;
            for (const auto& m : mus) col.push_back(m[l]);
            MomentSummary ms;
            ms.mean = means[l] = mean_of(col);
            if (const auto sd = sample_sd(col, ms.mean)) ms.scaled_var = K * *sd * *sd;
            summary.moments.push_back(ms);
        }
        if (mus.size() >= 2 && L >= 2) {
            double acc = 0.0;
            for (const auto& m : mus) acc += (m[0] - means[0]) * (m[1] - means[1]);
            summary.scaled_cov01 = K * acc / static_cast<double>(mus.size() - 1);
        }
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

nlohmann::json summary_json(const CampaignSummary& s) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::json {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json params = nlohmann::json::object();
    for (const auto& p : s.params) {
        params[p.name] = {{"truth", opt(p.truth)},
                          {"mean", p.hist.counts.empty() ? nlohmann::json(nullptr) : nlohmann::json(p.mean)},
                          {"sd", opt(p.sd)},
                          {"delta_sd", opt(p.delta_sd)},
                          {"qq_slope_central95", opt(p.qq_slope)},
                          {"histogram_bins", p.hist.counts.size()}};
    }
    nlohmann::json moments = nlohmann::json::array();
    for (const auto& m : s.moments) {
        moments.push_back({{"mean", m.mean}, {"K_var", opt(m.scaled_var)}});
    }
    const int R = s.config.reps;
    return {{"config", to_json(s.config)},
            {"reps", R},
            {"used", R - s.errors - s.range_flags},
            {"errors", s.errors},
            {"range_flags", s.range_flags},
            {"params", params},
            {"moments", moments},
            {"K_cov_mu0_mu1", opt(s.scaled_cov01)}};
}

void emit_outputs(const CampaignSummary& s, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

    auto open = [](const std::filesystem::path& path) {
        std::ofstream out(path);
        if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
        return out;
    };
    auto done = [](std::ofstream& out, const std::filesystem::path& path) {
        out.close();
        if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
    };

    const auto names = parameter_names(s.config.family);
    {
        const auto path = dir / "estimates.csv";
        auto out = open(path);
        const std::size_t L =
            s.config.observable == Observable::edges ? moments_needed(s.config.family) : 2;
        out << "rep,seed";
        for (const auto& n : names) out << ',' << n;
        for (std::size_t l = 0; l < L; ++l) out << ",mu" << l;
        out << ",range_violation,error\n";
        for (const auto& row : s.rows) {
            out << row.rep << ',' << row.seed;
            for (std::size_t k = 0; k < names.size(); ++k) {
                out << ',' << (k < row.values.size() ? fmt(row.values[k]) : "");
            }
            for (std::size_t l = 0; l < L; ++l) {
                out << ',' << (l < row.moments.size() ? fmt(row.moments[l]) : "");
            }
            std::string err = row.error;
            std::replace(err.begin(), err.end(), '"', '\'');
            out << ',' << (row.range_violation ? 1 : 0) << ",\"" << err << "\"\n";
        }
        done(out, path);
    }
    {
        const auto path = dir / "summary.json";
        auto out = open(path);
        out << summary_json(s).dump(2) << '\n';
        done(out, path);
    }
    for (const auto& p : s.params) {
        const auto hpath = dir / ("hist_" + p.name + ".csv");
        auto h = open(hpath);
        h << "bin_left,bin_right,count\n";
        for (std::size_t b = 0; b < p.hist.counts.size(); ++b) {
            h << fmt(p.hist.edges[b]) << ',' << fmt(p.hist.edges[b + 1]) << ',' << p.hist.counts[b]
              << '\n';
        }
        done(h, hpath);

        const auto qpath = dir / ("qq_" + p.name + ".csv");
        auto q = open(qpath);
        q << "theoretical_quantile,sample_quantile\n";
        for (const auto& [x, y] : p.qq) q << fmt(x) << ',' << fmt(y) << '\n';
        done(q, qpath);
    }
}

}  // namespace dynrg
