#include "dynrg/rng.hpp"

#include "dynrg/error.hpp"

namespace dynrg {

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& word : s_) {
        z += 0x9E3779B97F4A7C15ULL;
        word = mix64(z);
    }
}

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parameter_domain: return "parameter_domain";
        case ErrorKind::infinite_mean: return "infinite_mean";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::out_of_range: return "out_of_range";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::size: return "size";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::incompatible_moments: return "incompatible_moments";
        case ErrorKind::degenerate_saddle: return "degenerate_saddle";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace dynrg
