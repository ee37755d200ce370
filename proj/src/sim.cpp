#include "dynrg/sim.hpp"

#include <bit>

#include "dynrg/error.hpp"

namespace dynrg {

std::string_view to_string(Observable kind) {
    switch (kind) {
        case Observable::edges: return "edges";
        case Observable::triangles: return "triangles";
        case Observable::wedges: return "wedges";
    }
    return "edges";
}

Observable observable_from_string(std::string_view name) {
    if (name == "edges") return Observable::edges;
    if (name == "triangles") return Observable::triangles;
    if (name == "wedges") return Observable::wedges;
    throw Error(ErrorKind::config, "unknown observable \"" + std::string(name) + "\"");
}

std::vector<EdgeState> stationary_init(const ModelSpec& model, std::uint64_t seed) {
    const double rho = model.rho();
    const ResidualLaw& on_res = model.on_residual();
    const ResidualLaw& off_res = model.off_residual();
    std::vector<EdgeState> states(static_cast<std::size_t>(model.n()));
    for (std::size_t j = 0; j < states.size(); ++j) {
        Xoshiro256 rng(derive_seed(seed, j));
        states[j].on = rng.uniform_open() < rho;
        states[j].remaining = (states[j].on ? on_res : off_res).sample(rng);
    }
    return states;
}

// The stationary constructor consumes the first draws of each edge stream for
// the initial state; the explicit constructor starts the streams fresh.
EdgeEnsemble::EdgeEnsemble(const ModelSpec& model, std::uint64_t seed)
    : on_(model.on()), off_(model.off()) {
    const double rho = model.rho();
    const ResidualLaw& on_res = model.on_residual();
    const ResidualLaw& off_res = model.off_residual();
    const auto n = static_cast<std::size_t>(model.n());
    states_.resize(n);
    rngs_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        rngs_.emplace_back(derive_seed(seed, j));
        EdgeState& e = states_[j];
        e.on = rngs_[j].uniform_open() < rho;
        e.remaining = (e.on ? on_res : off_res).sample(rngs_[j]);
        on_count_ += e.on ? 1 : 0;
    }
}

EdgeEnsemble::EdgeEnsemble(const ModelSpec& model, std::uint64_t seed,
                           std::vector<EdgeState> initial)
    : on_(model.on()), off_(model.off()), states_(std::move(initial)) {
    rngs_.reserve(states_.size());
    for (std::size_t j = 0; j < states_.size(); ++j) {
        if (states_[j].remaining < 1) {
            throw Error(ErrorKind::parameter_domain, "edge remaining time must be >= 1");
        }
        rngs_.emplace_back(derive_seed(seed, j));
        on_count_ += states_[j].on ? 1 : 0;
    }
}

std::vector<std::pair<int, int>> edge_endpoints(int N) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(N) * (N - 1) / 2);
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) out.emplace_back(i, j);
    }
    return out;
}

AdjacencyBits::AdjacencyBits(int N)
    : N_(N), words_((static_cast<std::size_t>(N) + 63) / 64), bits_(words_ * N, 0) {
    if (N < 1) throw Error(ErrorKind::parameter_domain, "vertex count must be positive");
}

void AdjacencyBits::set(int i, int j, bool on) {
    const std::uint64_t bi = std::uint64_t{1} << (i % 64);
    const std::uint64_t bj = std::uint64_t{1} << (j % 64);
    if (on) {
        row(i)[j / 64] |= bj;
        row(j)[i / 64] |= bi;
    } else {
        row(i)[j / 64] &= ~bj;
        row(j)[i / 64] &= ~bi;
    }
}

bool AdjacencyBits::test(int i, int j) const { return (row(i)[j / 64] >> (j % 64)) & 1U; }

int AdjacencyBits::degree(int v) const {
    int d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += std::popcount(row(v)[w]);
    return d;
}

int AdjacencyBits::common(int i, int j) const {
    int c = 0;
    const std::uint64_t* a = row(i);
    const std::uint64_t* b = row(j);
    for (std::size_t w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
    return c;
}

std::int64_t AdjacencyBits::count_triangles() const {
    // Each triangle i < j < l is counted once, at its two smallest vertices.
    std::int64_t total = 0;
    for (int i = 0; i < N_; ++i) {
        for (int j = i + 1; j < N_; ++j) {
            if (!test(i, j)) continue;
            const std::uint64_t* a = row(i);
            const std::uint64_t* b = row(j);
            const std::size_t first = static_cast<std::size_t>(j + 1) / 64;
            for (std::size_t w = first; w < words_; ++w) {
                std::uint64_t m = a[w] & b[w];
                if (w == first) {
                    const int shift = (j + 1) % 64;
                    m &= shift == 0 ? ~std::uint64_t{0} : ~((std::uint64_t{1} << shift) - 1);
                }
                total += std::popcount(m);
            }
        }
    }
    return total;
}

std::int64_t AdjacencyBits::count_wedges() const {
    std::int64_t total = 0;
    for (int v = 0; v < N_; ++v) {
        const std::int64_t d = degree(v);
        total += d * (d - 1) / 2;
    }
    return total;
}

void stream_trace(const ModelSpec& model, Observable kind, std::int64_t K, std::uint64_t seed,
                  const std::function<void(std::int64_t)>& sink) {
    if (K < 1) throw Error(ErrorKind::parameter_domain, "trace length K must be >= 1");
    EdgeEnsemble ensemble(model, seed);

    if (kind == Observable::edges) {
        for (std::int64_t k = 1; k <= K; ++k) {
            sink(ensemble.on_count());
            if (k < K) ensemble.step();
        }
        return;
    }

    const auto N = model.vertices();
    if (!N || *N < 3) {
        throw Error(ErrorKind::parameter_domain, "subgraph counts need a vertex count N >= 3");
    }
    const auto ends = edge_endpoints(*N);
    AdjacencyBits adj(*N);
    for (std::size_t e = 0; e < ends.size(); ++e) {
        if (ensemble.state(e).on) adj.set(ends[e].first, ends[e].second, true);
    }
    std::int64_t triangles = adj.count_triangles();
    std::int64_t wedges = adj.count_wedges();

    // Update counts flip by flip: an edge (i, j) takes part in one triangle per
    // common neighbour and in deg(i) + deg(j) wedges with the other edges.
    auto on_flip = [&](std::size_t e, bool now_on) {
        const auto [i, j] = ends[e];
        if (now_on) {
            triangles += adj.common(i, j);
            wedges += adj.degree(i) + adj.degree(j);
            adj.set(i, j, true);
        } else {
            adj.set(i, j, false);
            triangles -= adj.common(i, j);
            wedges -= adj.degree(i) + adj.degree(j);
        }
    };
    for (std::int64_t k = 1; k <= K; ++k) {
        sink(kind == Observable::triangles ? triangles : wedges);
        if (k < K) ensemble.step(on_flip);
    }
}

namespace {

CountTrace make_trace(const ModelSpec& model, Observable kind, std::int64_t K, std::uint64_t seed) {
    CountTrace trace;
    trace.kind = kind;
    trace.n = model.n();
    trace.N = model.vertices();
    trace.seed = seed;
    trace.model = to_json(model);
    trace.values.reserve(static_cast<std::size_t>(K));
    stream_trace(model, kind, K, seed, [&trace](std::int64_t v) { trace.values.push_back(v); });
    return trace;
}

}  // namespace

CountTrace simulate_edge_trace(const ModelSpec& model, std::int64_t K, std::uint64_t seed) {
    return make_trace(model, Observable::edges, K, seed);
}

CountTrace simulate_graph_trace(const ModelSpec& model, std::int64_t K, std::uint64_t seed,
                                Observable kind) {
    if (kind == Observable::edges) {
        throw Error(ErrorKind::parameter_domain, "graph traces count triangles or wedges");
    }
    return make_trace(model, kind, K, seed);
}

}  // namespace dynrg
