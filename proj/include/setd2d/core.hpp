#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace setd2d {

/// Identifier of a user equipment inside the simulated cell.
enum class NodeId : std::uint32_t {};

constexpr NodeId node(std::uint32_t v) { return static_cast<NodeId>(v); }
constexpr std::uint32_t index_of(NodeId n) { return static_cast<std::uint32_t>(n); }

/// Ordered (receiver, relay) pair.
struct NodePair {
    NodeId receiver;
    NodeId relay;

    friend constexpr bool operator==(const NodePair&, const NodePair&) = default;
    friend constexpr auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct NodePairHash {
    std::size_t operator()(const NodePair& p) const noexcept {
        return (static_cast<std::size_t>(index_of(p.receiver)) << 32) ^ index_of(p.relay);
    }
};

using Bytes = std::vector<std::uint8_t>;

/// Raised for invalid scenario / weight configuration. Carries the offending field.
class config_error : public std::runtime_error {
public:
    config_error(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a protocol step happens out of order.
class protocol_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64 finalizer; used to derive independent, platform-stable streams
// from (seed, indices) tuples without carrying generator state around.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

template <typename... Rest>
constexpr std::uint64_t hash_combine(std::uint64_t seed, Rest... rest) {
    std::uint64_t h = mix64(seed);
    ((h = mix64(h ^ static_cast<std::uint64_t>(rest))), ...);
    return h;
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal variate from a hashed key (Box-Muller), identical on every platform.
inline double hashed_normal(std::uint64_t key) {
    double u1 = unit_double(mix64(key ^ 0xA5A5A5A5A5A5A5A5ULL));
    double u2 = unit_double(mix64(key ^ 0x5A5A5A5A5A5A5A5AULL));
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace setd2d

template <>
struct std::hash<setd2d::NodePair> : setd2d::NodePairHash {};
