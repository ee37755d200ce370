#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dynrg/model.hpp"
#include "dynrg/rng.hpp"

namespace dynrg {

enum class Observable { edges, triangles, wedges };

std::string_view to_string(Observable kind);
Observable observable_from_string(std::string_view name);

/// Phase of one edge and the number of observations left in it, counting the
/// current one. A duration d drawn at time k covers observations k..k+d-1.
struct EdgeState {
    bool on = false;
    std::int64_t remaining = 1;
};

/// Independent alternating renewal processes, one per edge. Edge j draws from
/// its own stream seeded by derive_seed(seed, j), so any edge's path depends
/// only on (seed, j).
class EdgeEnsemble {
public:
    /// Stationary start: on with probability rho, remaining time from the
    /// residual law of the current phase.
    EdgeEnsemble(const ModelSpec& model, std::uint64_t seed);
    /// Explicit start; streams are still seeded per edge.
    EdgeEnsemble(const ModelSpec& model, std::uint64_t seed, std::vector<EdgeState> initial);

    std::size_t size() const noexcept { return states_.size(); }
    std::int64_t on_count() const noexcept { return on_count_; }
    const EdgeState& state(std::size_t j) const { return states_[j]; }
    const std::vector<EdgeState>& states() const noexcept { return states_; }

    /// Moves from time k to k + 1. `on_flip(j, now_on)` is called for every
    /// edge that changes phase, in increasing j.
    template <class OnFlip>
    void step(OnFlip&& on_flip) {
        for (std::size_t j = 0; j < states_.size(); ++j) {
            EdgeState& e = states_[j];
            if (--e.remaining > 0) continue;
            e.on = !e.on;
            on_count_ += e.on ? 1 : -1;
            e.remaining = (e.on ? on_ : off_).sample(rngs_[j]);
            on_flip(j, e.on);
        }
    }
    void step() {
        step([](std::size_t, bool) {});
    }

private:
    OnOffLaw on_;
    OnOffLaw off_;
    std::vector<EdgeState> states_;
    std::vector<Xoshiro256> rngs_;
    std::int64_t on_count_ = 0;
};

/// Stationary initial states for every edge of the model.
std::vector<EdgeState> stationary_init(const ModelSpec& model, std::uint64_t seed);

/// Vertex pairs (i, j), i < j, in lexicographic order; edge index = position.
std::vector<std::pair<int, int>> edge_endpoints(int N);

/// Symmetric adjacency matrix stored as one bitset row per vertex.
class AdjacencyBits {
public:
    explicit AdjacencyBits(int N);

    int vertices() const noexcept { return N_; }
    void set(int i, int j, bool on);
    bool test(int i, int j) const;
    int degree(int v) const;
    /// Number of common neighbours of i and j.
    int common(int i, int j) const;

    std::int64_t count_triangles() const;
    /// Paths of length two: sum over centres of C(deg, 2).
    std::int64_t count_wedges() const;

private:
    const std::uint64_t* row(int v) const { return bits_.data() + static_cast<std::size_t>(v) * words_; }
    std::uint64_t* row(int v) { return bits_.data() + static_cast<std::size_t>(v) * words_; }

    int N_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

struct CountTrace {
    Observable kind = Observable::edges;
    std::vector<std::int64_t> values;
    std::int64_t n = 0;
    std::optional<int> N;
    std::optional<std::uint64_t> seed;
    nlohmann::json model;  // law descriptions, empty when unknown
};

/// Streams the observable at k = 1..K into `sink` without storing the trace.
void stream_trace(const ModelSpec& model, Observable kind, std::int64_t K, std::uint64_t seed,
                  const std::function<void(std::int64_t)>& sink);

CountTrace simulate_edge_trace(const ModelSpec& model, std::int64_t K, std::uint64_t seed);
CountTrace simulate_graph_trace(const ModelSpec& model, std::int64_t K, std::uint64_t seed,
                                Observable kind);

/// Writes `k,value` rows to `path` and the metadata next to it with a .json extension.
void write_trace(const std::filesystem::path& path, const CountTrace& trace);
/// Reads a trace and, when present, its sidecar metadata.
CountTrace read_trace(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& trace_path);

}  // namespace dynrg
