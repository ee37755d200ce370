#include <fstream>

#include "dynrg/error.hpp"
#include "dynrg/sim.hpp"

namespace dynrg {

std::filesystem::path sidecar_path(const std::filesystem::path& trace_path) {
    auto side = trace_path;
    side.replace_extension(".json");
    if (side == trace_path) side += ".json";
    return side;
}

void write_trace(const std::filesystem::path& path, const CountTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
    out << "k,value\n";
    for (std::size_t k = 0; k < trace.values.size(); ++k) {
        out << (k + 1) << ',' << trace.values[k] << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());

    nlohmann::json meta = {{"kind", to_string(trace.kind)},
                           {"n", trace.n},
                           {"K", trace.values.size()}};
    if (trace.N) meta["N"] = *trace.N;
    if (trace.seed) meta["seed"] = *trace.seed;
    if (!trace.model.is_null()) meta["model"] = trace.model;
    const auto side = sidecar_path(path);
    std::ofstream mo(side);
    if (!mo) throw Error(ErrorKind::io, "cannot open " + side.string() + " for writing");
    mo << meta.dump(2) << '\n';
    if (!mo) throw Error(ErrorKind::io, "failed writing " + side.string());
}

CountTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open trace " + path.string());
    CountTrace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("k,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) +
                                           ": expected `k,value`");
        }
        try {
            std::size_t used = 0;
            const std::string field = line.substr(comma + 1);
            const long long v = std::stoll(field, &used);
            if (used != field.size()) throw std::invalid_argument("trailing characters");
            trace.values.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::io, path.string() + ":" + std::to_string(lineno) +
                                           ": value is not an integer");
        }
    }

    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        std::ifstream mi(side);
        nlohmann::json meta;
        try {
            mi >> meta;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::io, side.string() + ": " + e.what());
        }
        if (meta.contains("kind")) trace.kind = observable_from_string(meta["kind"].get<std::string>());
        if (meta.contains("n")) trace.n = meta["n"].get<std::int64_t>();
        if (meta.contains("N")) trace.N = meta["N"].get<int>();
        if (meta.contains("seed")) trace.seed = meta["seed"].get<std::uint64_t>();
        if (meta.contains("model")) trace.model = meta["model"];
    }
    return trace;
}

}  // namespace dynrg
