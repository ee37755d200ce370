#include "dynrg/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynrg/asymp.hpp"
#include "dynrg/error.hpp"
#include "dynrg/harness.hpp"
#include "dynrg/renewal.hpp"

namespace dynrg {
namespace {

using nlohmann::json;

struct Options {
    std::string config;
    std::string out;
    std::string trace;
    std::string theta;
    std::string epochs;
    std::string method = "auto";
    std::string family;
    std::uint64_t seed = 0;
    std::int64_t k = 0;
    int reps = 0;
    int workers = 0;
    std::int64_t k_cap = kCovCap;
};

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "-inf" || item == "off") {
            out.push_back(kForceOff);
            continue;
        }
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::config, "cannot parse number \"" + item + "\"");
        }
    }
    return out;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::config, path + ": " + e.what());
    }
}

json require_config(const Options& o) {
    if (o.config.empty()) throw Error(ErrorKind::config, "--config is required");
    return read_json(o.config);
}

int resolve_workers(const Options& o, int from_config) {
    if (o.workers > 0) return o.workers;
    if (const char* env = std::getenv("RG_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception&) {
        }
    }
    return std::max(1, from_config);
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const json j = require_config(o);
    ExperimentConfig cfg = config_from_json(j);
    if (o.seed) cfg.seed = o.seed;
    if (o.k) cfg.K = o.k;
    if (cfg.K < 1) throw Error(ErrorKind::config, "trace length K must be set (--k or \"K\")");
    const std::string path = !o.out.empty() ? o.out : (!o.trace.empty() ? o.trace : "trace.csv");
    CountTrace trace = cfg.observable == Observable::edges
                           ? simulate_edge_trace(cfg.model, cfg.K, cfg.seed)
                           : simulate_graph_trace(cfg.model, cfg.K, cfg.seed, cfg.observable);
    write_trace(path, trace);
    out << json{{"trace", path}, {"sidecar", sidecar_path(path).string()}, {"K", cfg.K},
                {"seed", cfg.seed}}
               .dump()
        << '\n';
    return 0;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    if (o.trace.empty()) throw Error(ErrorKind::config, "--trace is required");
    CountTrace trace = read_trace(o.trace);
    std::optional<Family> family;
    if (!o.family.empty()) family = family_from_string(o.family);
    json model_json = trace.model;
    if (!o.config.empty()) {
        const json j = read_json(o.config);
        const ExperimentConfig cfg = config_from_json(j);
        if (!family) family = cfg.family;
        if (trace.n == 0) {
            trace.n = cfg.model.n();
            trace.N = cfg.model.vertices();
            if (j.contains("observable")) trace.kind = cfg.observable;
        }
    }
    if (!family && model_json.is_object()) family = infer_family(model_from_json(model_json));
    if (!family) throw Error(ErrorKind::config, "estimator family unknown: pass --family or --config");
    if (trace.n == 0) throw Error(ErrorKind::config, "edge count unknown: pass --config");
    const int L = trace.kind == Observable::edges ? moments_needed(*family) : 2;
    const MomentSet m = empirical_moments(trace, L);
    const EstimateReport report = estimate(*family, m);
    out << to_json(report).dump(2) << '\n';
    return 0;
}

int cmd_campaign(const Options& o, std::ostream& out, std::ostream& err) {
    const json j = require_config(o);
    ExperimentConfig cfg = config_from_json(j);
    if (o.seed) cfg.seed = o.seed;
    if (o.k) cfg.K = o.k;
    if (o.reps) cfg.reps = o.reps;
    cfg.workers = resolve_workers(o, j.contains("workers") ? cfg.workers : 0);
    if (!o.out.empty()) cfg.out = o.out;
    if (cfg.out.empty()) throw Error(ErrorKind::config, "output directory needed (--out or \"out\")");
    const CampaignSummary summary = run_campaign(cfg);
    emit_outputs(summary, cfg.out);
    err << "campaign finished in " << summary.wall_seconds << " s with " << cfg.workers
        << " worker(s)\n";
    out << json{{"out", cfg.out.string()},
                {"reps", cfg.reps},
                {"errors", summary.errors},
                {"range_flags", summary.range_flags}}
               .dump()
        << '\n';
    return 0;
}

int cmd_mgf(const Options& o, std::ostream& out) {
    const ModelSpec model = model_from_json(require_config(o));
    if (o.theta.empty() == o.epochs.empty()) {
        throw Error(ErrorKind::config, "pass exactly one of --theta or --epochs");
    }
    if (!o.theta.empty()) {
        const auto theta = parse_doubles(o.theta);
        out << json{{"mgf", joint_mgf(model, theta)}}.dump() << '\n';
        return 0;
    }
    std::vector<std::int64_t> epochs;
    for (double e : parse_doubles(o.epochs)) {
        if (e != std::floor(e)) throw Error(ErrorKind::config, "epochs must be integers");
        epochs.push_back(static_cast<std::int64_t>(e));
    }
    auto sorted = epochs;
    std::sort(sorted.begin(), sorted.end());
    const auto p = joint_distribution(model, epochs);
    json probs = json::array();
    for (std::size_t mask = 0; mask < p.size(); ++mask) {
        std::string pattern;
        for (std::size_t i = 0; i < sorted.size(); ++i) pattern += (mask >> i) & 1U ? '1' : '0';
        probs.push_back({{"on", pattern}, {"p", p[mask]}});
    }
    out << json{{"epochs", sorted}, {"distribution", probs}}.dump(2) << '\n';
    return 0;
}

int cmd_cov(const Options& o, std::ostream& out) {
    const ModelSpec model = model_from_json(require_config(o));
    const bool geometric =
        model.on().kind() == LawKind::geometric && model.off().kind() == LawKind::geometric;
    std::string method = o.method;
    if (method == "auto") method = geometric ? "closed" : "general";
    json j;
    const Finiteness fin = finiteness_check(model);
    j["finite"] = fin.finite;
    j["explanation"] = fin.explanation;
    MomentCov mc;
    if (method == "closed") {
        if (!geometric) throw Error(ErrorKind::config, "closed form needs geometric on/off laws");
        const double p = std::get<Geometric>(model.on().params()).p;
        const double q = std::get<Geometric>(model.off().params()).p;
        mc = geometric_moment_cov(model.n(), p, q);
        j["method"] = "closed_form_geometric";
    } else if (method == "general") {
        const GeneralCovResult g = general_moment_cov(model, kCovTol, o.k_cap);
        mc = g.cov;
        j["method"] = "general_series";
        j["terms"] = g.terms;
        j["converged"] = g.converged;
        j["summable"] = g.summable;
        if (!g.warning.empty()) j["warning"] = g.warning;
    } else {
        throw Error(ErrorKind::config, "unknown --method \"" + method + "\"");
    }
    j["moment_cov"] = to_json(mc);
    if (geometric) {
        const double p = std::get<Geometric>(model.on().params()).p;
        const double q = std::get<Geometric>(model.off().params()).p;
        j["param_cov"] = to_json(delta_method_cov(model.n(), p, q, mc));
    }
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_check(const Options& o, std::ostream& out) {
    const ModelSpec model = model_from_json(require_config(o));
    const Finiteness fin = finiteness_check(model);
    out << json{{"finite", fin.finite}, {"explanation", fin.explanation}}.dump() << '\n';
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic Erdos-Renyi graphs with on/off renewal edges"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON configuration file");
        sub->add_option("--seed", o.seed, "base seed");
        sub->add_option("--out", o.out, "output path");
        sub->add_option("--workers", o.workers, "worker threads");
        sub->add_option("--k", o.k, "trace length K");
        sub->add_option("--reps", o.reps, "replications R");
    };
    auto* simulate = app.add_subcommand("simulate", "simulate one trace and write it as CSV");
    add_common(simulate);
    simulate->add_option("--trace", o.trace, "trace path (alias of --out)");
    auto* est = app.add_subcommand("estimate", "estimate parameters from a trace");
    add_common(est);
    est->add_option("--trace", o.trace, "trace CSV")->required();
    est->add_option("--family", o.family, "geo_geo|pareto_pareto|weibull_geo|pareto_geo");
    auto* campaign = app.add_subcommand("campaign", "run a replication campaign");
    add_common(campaign);
    auto* mgf = app.add_subcommand("mgf", "joint MGF or joint on/off law of one edge");
    add_common(mgf);
    mgf->add_option("--theta", o.theta, "comma-separated theta, -inf forces off");
    mgf->add_option("--epochs", o.epochs, "comma-separated epochs");
    auto* cov = app.add_subcommand("cov", "limit covariance of the moment statistics");
    add_common(cov);
    cov->add_option("--method", o.method, "closed|general|auto");
    cov->add_option("--k-cap", o.k_cap, "lag cap for the general series");
    auto* check = app.add_subcommand("check", "finiteness of the limit variances");
    add_common(check);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o, out);
        if (est->parsed()) return cmd_estimate(o, out);
        if (campaign->parsed()) return cmd_campaign(o, out, err);
        if (mgf->parsed()) return cmd_mgf(o, out);
        if (cov->parsed()) return cmd_cov(o, out);
        if (check->parsed()) return cmd_check(o, out);
    } catch (const Error& e) {
        const json body = {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
        out << body.dump() << '\n';
        if (e.kind() == ErrorKind::config) {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        return 2;
    } catch (const std::exception& e) {
        out << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << '\n';
        return 2;
    }
    err << app.help();
    return 1;
}

int cli_dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace dynrg
