#pragma once

#include <cstdint>
#include <random>

namespace dffls {

// Substream roles. All randomness in a run flows from one master seed;
// each (replication, sensor, role) triple gets its own generator so that
// replications are independent and runs with different topologies see
// identical data streams.
enum class StreamRole : std::uint64_t {
    Parameter = 1,  // network-level, sensor index ignored
    Noise = 2,
    Regressor = 3,
    Input = 4,
    Markov = 5,  // network-level
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic stream-splitting rule: hash the master seed with the
// replication index, sensor index and role through splitmix64.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t replication,
                                    std::uint64_t sensor, StreamRole role) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ replication);
    s = splitmix64(s ^ (sensor + 0x51ed270b0a9cf1a3ULL));
    s = splitmix64(s ^ static_cast<std::uint64_t>(role));
    return s;
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t replication,
                                   std::uint64_t sensor, StreamRole role) {
    return std::mt19937_64(substream_seed(master, replication, sensor, role));
}

// Sentinel sensor index for network-level streams.
inline constexpr std::uint64_t kNetworkStream = ~0ULL;

}  // namespace dffls
