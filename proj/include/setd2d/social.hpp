#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace setd2d::social {

enum class RelationshipKind : std::uint8_t { OOR, C_LOR, C_WOR, SOR, POR, None };

inline constexpr std::array<RelationshipKind, 6> all_kinds{
    RelationshipKind::OOR, RelationshipKind::C_LOR, RelationshipKind::C_WOR,
    RelationshipKind::SOR, RelationshipKind::POR,   RelationshipKind::None};

/// Trust attached to each relationship kind.
constexpr double trust_value(RelationshipKind k) {
    switch (k) {
    case RelationshipKind::OOR: return 0.9;
    case RelationshipKind::C_LOR: return 0.8;
    case RelationshipKind::C_WOR: return 0.8;
    case RelationshipKind::SOR: return 0.6;
    case RelationshipKind::POR: return 0.5;
    case RelationshipKind::None: return 0.1;
    }
    return 0.1;
}

constexpr std::string_view to_string(RelationshipKind k) {
    switch (k) {
    case RelationshipKind::OOR: return "OOR";
    case RelationshipKind::C_LOR: return "C-LOR";
    case RelationshipKind::C_WOR: return "C-WOR";
    case RelationshipKind::SOR: return "SOR";
    case RelationshipKind::POR: return "POR";
    case RelationshipKind::None: return "None";
    }
    return "None";
}

inline RelationshipKind parse_kind(std::string_view s) {
    for (auto k : all_kinds)
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown relationship kind: " + std::string(s));
}

/// Intelligence tiers: dummy, ordinary, smart.
inline constexpr std::array<double, 3> intelligence_tiers{0.2, 0.5, 0.8};

/// Probability of each relationship kind for a node pair, indexed like all_kinds.
struct RelationshipMix {
    std::array<double, 6> p{0.01, 0.03, 0.05, 0.06, 0.05, 0.80};

    static RelationshipMix only(RelationshipKind k) {
        RelationshipMix m;
        m.p.fill(0.0);
        m.p[static_cast<std::size_t>(k)] = 1.0;
        return m;
    }

    void validate(const char* field = "social.mix") const {
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw config_error(field, "probabilities must be >= 0");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw config_error(field, "probabilities must sum to 1");
    }

    RelationshipKind draw(double u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            if (u < acc) return all_kinds[i];
        }
        // rounding slack: last kind with nonzero mass
        for (std::size_t i = p.size(); i-- > 0;)
            if (p[i] > 0.0) return all_kinds[i];
        return RelationshipKind::None;
    }
};

/// Weights over intelligence_tiers.
struct IntelligenceMix {
    std::array<double, 3> p{0.4, 0.4, 0.2};

    double draw(double u) const {
        double total = p[0] + p[1] + p[2];
        double acc = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            acc += p[i] / total;
            if (u < acc) return intelligence_tiers[i];
        }
        return intelligence_tiers[2];
    }
};

/// Social layer of the cell: symmetric relationships, friend sets, intelligence.
class SocialProfile {
public:
    SocialProfile() = default;
    explicit SocialProfile(std::size_t n)
        : n_(n), kinds_(n * n, RelationshipKind::None), friends_(n), intelligence_(n, 0.5) {}

    std::size_t size() const { return n_; }

    RelationshipKind kind(NodeId i, NodeId j) const {
        check(i);
        check(j);
        return kinds_[index_of(i) * n_ + index_of(j)];
    }

    /// F_ij; symmetric.
    double relationship_factor(NodeId i, NodeId j) const { return trust_value(kind(i, j)); }

    /// N_i, sorted; never contains i.
    const std::vector<NodeId>& friends(NodeId i) const {
        check(i);
        return friends_[index_of(i)];
    }

    double intelligence(NodeId i) const {
        check(i);
        return intelligence_[index_of(i)];
    }

    void set_intelligence(NodeId i, double value) {
        check(i);
        if (!(value >= 0.0 && value <= 1.0)) throw std::domain_error("intelligence outside [0,1]");
        intelligence_[index_of(i)] = value;
    }

    void set_relationship(NodeId i, NodeId j, RelationshipKind k) {
        check(i);
        check(j);
        if (i == j) throw std::domain_error("self relationship");
        kinds_[index_of(i) * n_ + index_of(j)] = k;
        kinds_[index_of(j) * n_ + index_of(i)] = k;
        update_friend(i, j, k != RelationshipKind::None);
        update_friend(j, i, k != RelationshipKind::None);
    }

    bool contains(NodeId i) const { return index_of(i) < n_; }

    friend bool operator==(const SocialProfile&, const SocialProfile&) = default;

private:
    void check(NodeId i) const {
        if (index_of(i) >= n_) throw std::domain_error("unknown node id " + std::to_string(index_of(i)));
    }

    void update_friend(NodeId i, NodeId j, bool present) {
        auto& f = friends_[index_of(i)];
        auto it = std::lower_bound(f.begin(), f.end(), j);
        bool has = it != f.end() && *it == j;
        if (present && !has) f.insert(it, j);
        if (!present && has) f.erase(it);
    }

    std::size_t n_ = 0;
    std::vector<RelationshipKind> kinds_;
    std::vector<std::vector<NodeId>> friends_;
    std::vector<double> intelligence_;
};

struct GenerationOptions {
    RelationshipMix mix;
    IntelligenceMix intelligence;
    // Optional second population (e.g. adversarial nodes) with its own
    // relationship and intelligence distributions. A pair uses the
    // adversarial mix when either endpoint is flagged.
    std::vector<bool> adversarial;
    RelationshipMix adversarial_mix;
    IntelligenceMix adversarial_intelligence{{0.0, 0.0, 1.0}};
};

inline SocialProfile generate_social_graph(std::size_t n_nodes, std::uint64_t seed,
                                           const GenerationOptions& opt) {
    if (n_nodes < 2) throw std::domain_error("social graph needs at least 2 nodes");
    opt.mix.validate("social.mix");
    if (!opt.adversarial.empty()) opt.adversarial_mix.validate("social.adversarial_mix");
    auto flagged = [&](std::size_t i) { return i < opt.adversarial.size() && opt.adversarial[i]; };

    SocialProfile profile(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        double u = unit_double(hash_combine(seed, 2, i));
        profile.set_intelligence(node(static_cast<std::uint32_t>(i)),
                                 flagged(i) ? opt.adversarial_intelligence.draw(u)
                                            : opt.intelligence.draw(u));
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
        for (std::size_t j = i + 1; j < n_nodes; ++j) {
            const auto& mix = (flagged(i) || flagged(j)) ? opt.adversarial_mix : opt.mix;
            auto k = mix.draw(unit_double(hash_combine(seed, 1, i, j)));
            if (k != RelationshipKind::None)
                profile.set_relationship(node(static_cast<std::uint32_t>(i)),
                                         node(static_cast<std::uint32_t>(j)), k);
        }
    }
    return profile;
}

inline SocialProfile generate_social_graph(std::size_t n_nodes, std::uint64_t seed,
                                           const RelationshipMix& mix) {
    GenerationOptions opt;
    opt.mix = mix;
    return generate_social_graph(n_nodes, seed, opt);
}

/// R_ij = |N_i ∩ N_j| / |N_i|; zero for a node without friends.
inline double centrality(NodeId i, NodeId j, const SocialProfile& profile) {
    const auto& ni = profile.friends(i);
    const auto& nj = profile.friends(j);
    if (ni.empty()) return 0.0;
    std::size_t common = 0;
    auto a = ni.begin();
    auto b = nj.begin();
    while (a != ni.end() && b != nj.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++common;
            ++a;
            ++b;
        }
    }
    return static_cast<double>(common) / static_cast<double>(ni.size());
}

// Plain-text interchange: edge list "i j kind" (friendships only) and a
// node table "i intelligence". Lines starting with '#' are comments.

inline void write_edge_list(std::ostream& os, const SocialProfile& p) {
    os << "# i j kind\n";
    for (std::uint32_t i = 0; i < p.size(); ++i)
        for (NodeId j : p.friends(node(i)))
            if (index_of(j) > i) os << i << ' ' << index_of(j) << ' ' << to_string(p.kind(node(i), j)) << '\n';
}

inline void write_node_table(std::ostream& os, const SocialProfile& p) {
    os << "# i intelligence\n";
    for (std::uint32_t i = 0; i < p.size(); ++i) os << i << ' ' << p.intelligence(node(i)) << '\n';
}

inline SocialProfile read_social(std::istream& edges, std::istream& nodes) {
    std::vector<std::pair<std::uint32_t, double>> attrs;
    std::string line;
    while (std::getline(nodes, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::uint32_t i;
        double value;
        if (!(ls >> i >> value)) throw std::invalid_argument("bad node table line: " + line);
        attrs.emplace_back(i, value);
    }
    std::uint32_t n = 0;
    for (auto& [i, v] : attrs) n = std::max(n, i + 1);
    SocialProfile p(n);
    for (auto& [i, v] : attrs) p.set_intelligence(node(i), v);
    while (std::getline(edges, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::uint32_t i, j;
        std::string kind;
        if (!(ls >> i >> j >> kind)) throw std::invalid_argument("bad edge line: " + line);
        p.set_relationship(node(i), node(j), parse_kind(kind));
    }
    return p;
}

} // namespace setd2d::social
