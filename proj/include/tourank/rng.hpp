#pragma once

#include <cstdint>
#include <initializer_list>

namespace tourank {

// splitmix64 finalizer; used to derive independent seeds from a base seed
// plus structural salts (fold index, class range, candidate threshold, ...)
// so that results never depend on scheduling order.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> salts) {
    std::uint64_t h = splitmix64(base ^ 0x517cc1b727220a95ULL);
    for (std::uint64_t s : salts) {
        h = splitmix64(h ^ s);
    }
    return h;
}

} // namespace tourank
