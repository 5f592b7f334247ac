#pragma once

#include <cstdint>

namespace gridfreq {

enum class Stream : std::uint64_t {
    wind_minutes = 1,
    wind_seconds = 2,
    load_minutes = 3,
    load_seconds = 4,
    dispatch_error = 5,
};

/// Independent per-(bus, stream) seed from a master seed (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t bus, Stream stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ bus) ^ static_cast<std::uint64_t>(stream));
}

}  // namespace gridfreq
