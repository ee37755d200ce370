#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "dynrg/law.hpp"

namespace dynrg {

/// On-time law X, off-time law Y and the number of edges n. When built from
/// a vertex count N, n = N(N - 1)/2.
class ModelSpec {
public:
    ModelSpec(OnOffLaw on, OnOffLaw off, std::int64_t n);

    static ModelSpec with_vertices(OnOffLaw on, OnOffLaw off, int N);

    const OnOffLaw& on() const noexcept { return on_; }
    const OnOffLaw& off() const noexcept { return off_; }
    std::int64_t n() const noexcept { return n_; }
    std::optional<int> vertices() const noexcept { return N_; }

    /// Both means finite, so the stationary version exists.
    bool stationary() const noexcept { return on_res_.has_value() && off_res_.has_value(); }

    /// rho = E X / (E X + E Y). Throws Error(infinite_mean) if either mean is infinite.
    double rho() const;
    const ResidualLaw& on_residual() const;
    const ResidualLaw& off_residual() const;

    ModelSpec with_edges(std::int64_t n) const;

private:
    OnOffLaw on_;
    OnOffLaw off_;
    std::int64_t n_;
    std::optional<int> N_;
    std::optional<ResidualLaw> on_res_;
    std::optional<ResidualLaw> off_res_;
    double rho_ = 0.0;
};

nlohmann::json to_json(const ModelSpec& model);
/// Reads {"on":{..},"off":{..}} plus exactly one of "n" or "N".
ModelSpec model_from_json(const nlohmann::json& j);

}  // namespace dynrg
