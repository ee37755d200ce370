#include "dynrg/model.hpp"

#include "dynrg/error.hpp"

namespace dynrg {

ModelSpec::ModelSpec(OnOffLaw on, OnOffLaw off, std::int64_t n)
    : on_(std::move(on)), off_(std::move(off)), n_(n) {
    if (n_ < 1) throw Error(ErrorKind::parameter_domain, "edge count n must be >= 1");
    if (on_.has_finite_mean() && off_.has_finite_mean()) {
        on_res_.emplace(on_);
        off_res_.emplace(off_);
        rho_ = on_.mean() / (on_.mean() + off_.mean());
    }
}

ModelSpec ModelSpec::with_vertices(OnOffLaw on, OnOffLaw off, int N) {
    if (N < 2) throw Error(ErrorKind::parameter_domain, "vertex count N must be >= 2");
    const auto n = static_cast<std::int64_t>(N) * (N - 1) / 2;
    ModelSpec model(std::move(on), std::move(off), n);
    model.N_ = N;
    return model;
}

double ModelSpec::rho() const {
    if (!stationary()) {
        throw Error(ErrorKind::infinite_mean,
                    "stationary on-probability undefined: " + on_.describe() + " / " +
                        off_.describe() + " has an infinite mean");
    }
    return rho_;
}

const ResidualLaw& ModelSpec::on_residual() const {
    rho();
    return *on_res_;
}

const ResidualLaw& ModelSpec::off_residual() const {
    rho();
    return *off_res_;
}

ModelSpec ModelSpec::with_edges(std::int64_t n) const {
    ModelSpec copy = *this;
    if (n < 1) throw Error(ErrorKind::parameter_domain, "edge count n must be >= 1");
    copy.n_ = n;
    copy.N_.reset();
    return copy;
}

nlohmann::json to_json(const ModelSpec& model) {
    nlohmann::json j = {{"on", to_json(model.on())}, {"off", to_json(model.off())}};
    if (model.vertices()) {
        j["N"] = *model.vertices();
    } else {
        j["n"] = model.n();
    }
    return j;
}

ModelSpec model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("on") || !j.contains("off")) {
        throw Error(ErrorKind::config, "model needs \"on\" and \"off\" law descriptions");
    }
    auto on = law_from_json(j["on"]);
    auto off = law_from_json(j["off"]);
    const bool has_n = j.contains("n");
    const bool has_N = j.contains("N");
    if (has_n == has_N) throw Error(ErrorKind::config, "model needs exactly one of \"n\" or \"N\"");
    const auto& field = has_n ? j["n"] : j["N"];
    if (!field.is_number_integer()) {
        throw Error(ErrorKind::config, std::string("\"") + (has_n ? "n" : "N") +
                                           "\" must be an integer");
    }
    if (has_N) return ModelSpec::with_vertices(std::move(on), std::move(off), field.get<int>());
    return ModelSpec(std::move(on), std::move(off), field.get<std::int64_t>());
}

}  // namespace dynrg
