#pragma once

// Scenario description and its INI form. Every key lives in a section
// (scenario, seeds, weights, radio, attacks, social, crypto, trace); unknown
// keys are rejected so typos surface as config errors with the field name.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "attack.hpp"
#include "core.hpp"
#include "crypto.hpp"
#include "radio.hpp"
#include "social.hpp"
#include "trust.hpp"

namespace setd2d {

enum class Variant {
    setd2d,  // security + social trust
    sed2d,   // security + direct-history trust only
    d2d,     // trust-unaware relay choice
};

constexpr std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::setd2d: return "SeT-D2D";
    case Variant::sed2d: return "Se-D2D";
    case Variant::d2d: return "D2D";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "SeT-D2D" || s == "setd2d") return Variant::setd2d;
    if (s == "Se-D2D" || s == "sed2d") return Variant::sed2d;
    if (s == "D2D" || s == "d2d") return Variant::d2d;
    throw config_error("scenario.variant", "expected SeT-D2D, Se-D2D or D2D");
}

enum class Experiment {
    network,  // full cell simulation
    fig5a,    // decay presets, short interval
    fig5b,    // decay presets, long interval
    fig6,     // consecutive on-off traces
    fig7,     // irregular on-off trace
    fig8,     // receiver-selective traces
    fig9,     // beta2 sensitivity under periodic attack
    figCI,    // integrity formula comparison on an all-good history
};

inline constexpr std::pair<Experiment, std::string_view> experiment_names[] = {
    {Experiment::network, "network"}, {Experiment::fig5a, "fig5a"}, {Experiment::fig5b, "fig5b"},
    {Experiment::fig6, "fig6"},       {Experiment::fig7, "fig7"},   {Experiment::fig8, "fig8"},
    {Experiment::fig9, "fig9"},       {Experiment::figCI, "figCI"},
};

constexpr std::string_view to_string(Experiment e) {
    for (auto [k, n] : experiment_names)
        if (k == e) return n;
    return "?";
}

inline Experiment parse_experiment(std::string_view s) {
    for (auto [k, n] : experiment_names)
        if (n == s) return k;
    throw config_error("scenario.experiment", "unknown experiment '" + std::string(s) + "'");
}

struct Seeds {
    std::uint64_t master = 1;
    std::optional<std::uint64_t> layout, channel, social, attacks, crypto;

    std::uint64_t layout_seed() const { return layout.value_or(hash_combine(master, 1)); }
    std::uint64_t channel_seed() const { return channel.value_or(hash_combine(master, 2)); }
    std::uint64_t social_seed() const { return social.value_or(hash_combine(master, 3)); }
    std::uint64_t attacks_seed() const { return attacks.value_or(hash_combine(master, 4)); }
    std::uint64_t crypto_seed() const { return crypto.value_or(hash_combine(master, 5)); }
};

/// Behaviour assigned to malicious relays.
struct AttackSpec {
    std::string kind = "consecutive";  // honest | consecutive | irregular | periodic | selective
    double rate = 1.0;
    attack::Phase phase = attack::Phase::final;
    std::uint32_t horizon = 0;  // 0: the scenario's frame count
    std::uint32_t period = 10;
    double victim_fraction = 0.5;  // selective: share of the other nodes targeted
    bool tamper_ciphertext = false;  // tamper after encryption instead of before
};

struct SocialSpec {
    social::RelationshipMix mix;
    social::IntelligenceMix intelligence;
    bool correlate = true;  // malicious nodes draw from the adversarial distributions
    social::RelationshipMix adversarial_mix{{0.0, 0.0, 0.0, 0.02, 0.03, 0.95}};
    social::IntelligenceMix adversarial_intelligence{{0.0, 0.0, 1.0}};
};

/// Single-relay trace experiments.
struct TraceSpec {
    std::uint32_t rounds = 100;
    std::uint32_t receivers = 1;
    double spacing = 0.01;  // seconds between rounds
    double relationship = 0.6;
    double centrality = 0.5;
    double intelligence = 0.5;
    std::vector<double> rates{0.3, 0.5, 0.8};
    std::vector<double> beta2_values{0.25, 0.5, 1.0};
};

struct Scenario {
    std::size_t n_nodes = 100;
    double side = 100.0;
    double malicious_fraction = 0.3;
    std::uint32_t frames = 100;
    double file_kbits = 1000.0;
    Variant variant = Variant::setd2d;
    Experiment experiment = Experiment::network;
    std::size_t payload_bytes = 256;
    bool transcript = false;

    Seeds seeds;
    trust::TrustWeights weights;
    radio::ChannelParams channel;
    radio::FramePlan plan;
    AttackSpec attack;
    std::map<std::uint32_t, attack::AttackProfile> node_attacks;  // explicit per-node profiles
    SocialSpec social;
    crypto::SuiteKind suite = crypto::SuiteKind::toy;
    TraceSpec trace;

    void validate() const {
        if (n_nodes < 2) throw config_error("scenario.n_nodes", "must be >= 2");
        if (!(side > 0.0)) throw config_error("scenario.side", "must be > 0");
        if (!(malicious_fraction >= 0.0 && malicious_fraction <= 1.0))
            throw config_error("scenario.malicious_fraction", "must lie in [0,1]");
        if (frames < 1) throw config_error("scenario.frames", "must be >= 1");
        if (!(file_kbits > 0.0)) throw config_error("scenario.file_kbits", "must be > 0");
        if (payload_bytes < 1) throw config_error("scenario.payload_bytes", "must be >= 1");
        weights.validate();
        channel.validate();
        plan.validate();
        static const std::set<std::string> kinds{"honest", "consecutive", "irregular", "periodic", "selective"};
        if (!kinds.contains(attack.kind)) throw config_error("attacks.kind", "unknown attack kind '" + attack.kind + "'");
        if (!(attack.rate >= 0.0 && attack.rate <= 1.0)) throw config_error("attacks.rate", "must lie in [0,1]");
        if (attack.period < 1) throw config_error("attacks.period", "must be >= 1");
        if (!(attack.victim_fraction >= 0.0 && attack.victim_fraction <= 1.0))
            throw config_error("attacks.victim_fraction", "must lie in [0,1]");
        for (const auto& [id, p] : node_attacks) {
            if (id >= n_nodes) throw config_error("attacks.node." + std::to_string(id), "node id out of range");
            attack::validate(p);
        }
        social.mix.validate("social.mix");
        social.adversarial_mix.validate("social.adversarial_mix");
        if (trace.rounds < 1) throw config_error("trace.rounds", "must be >= 1");
        if (trace.receivers < 1) throw config_error("trace.receivers", "must be >= 1");
        if (!(trace.spacing >= 0.0)) throw config_error("trace.spacing", "must be >= 0");
    }
};

namespace config {

using boost::property_tree::ptree;

namespace detail {

template <typename T>
T parse_value(const std::string& field, const std::string& text) {
    std::istringstream is(text);
    T v{};
    if constexpr (std::is_same_v<T, bool>) {
        std::string s;
        is >> s;
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw config_error(field, "expected a boolean, got '" + text + "'");
    } else {
        is >> v;
        if (!is || !(is >> std::ws).eof()) throw config_error(field, "cannot parse '" + text + "'");
        if constexpr (std::is_unsigned_v<T>) {
            if (text.find('-') != std::string::npos) throw config_error(field, "must be non-negative");
        }
    }
    return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& field, const std::string& text) {
    std::vector<T> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(parse_value<T>(field, item));
    }
    return out;
}

template <std::size_t N>
std::array<double, N> parse_array(const std::string& field, const std::string& text) {
    auto v = parse_list<double>(field, text);
    if (v.size() != N) throw config_error(field, "expected " + std::to_string(N) + " comma-separated values");
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

// Reads section keys through a table of setters and rejects the rest.
class SectionReader {
public:
    SectionReader(const ptree& root, std::string section) : section_(std::move(section)) {
        if (auto child = root.get_child_optional(section_)) node_ = &*child;
    }

    template <typename T>
    void read(const std::string& key, T& target) {
        known_.insert(key);
        if (auto v = value(key)) target = parse_value<T>(field(key), *v);
    }

    template <typename T>
    void read(const std::string& key, std::optional<T>& target) {
        known_.insert(key);
        if (auto v = value(key)) target = parse_value<T>(field(key), *v);
    }

    template <typename F>
    void read_with(const std::string& key, F&& f) {
        known_.insert(key);
        if (auto v = value(key)) f(field(key), *v);
    }

    /// Keys starting with `prefix` (e.g. "node.") handed to f(suffix, value).
    template <typename F>
    void read_prefixed(const std::string& prefix, F&& f) {
        if (!node_) return;
        for (const auto& [k, v] : *node_)
            if (k.rfind(prefix, 0) == 0) {
                known_.insert(k);
                f(field(k), k.substr(prefix.size()), v.data());
            }
    }

    void reject_unknown() const {
        if (!node_) return;
        for (const auto& [k, v] : *node_)
            if (!known_.contains(k)) throw config_error(field(k), "unknown key");
    }

private:
    std::optional<std::string> value(const std::string& key) const {
        if (!node_) return std::nullopt;
        auto v = node_->get_optional<std::string>(ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return *v;
    }
    std::string field(const std::string& key) const { return section_ + "." + key; }

    std::string section_;
    const ptree* node_ = nullptr;
    std::set<std::string> known_;
};

inline attack::Phase parse_phase(const std::string& field, const std::string& s) {
    if (s == "initial") return attack::Phase::initial;
    if (s == "final") return attack::Phase::final;
    throw config_error(field, "expected 'initial' or 'final'");
}

// "honest" | "consecutive:<rate>:<initial|final>[:horizon]" | "irregular:<rate>[:seed[:horizon]]"
// | "periodic[:period]" | "selective:<victim>[;<victim>...]"
inline attack::AttackProfile parse_node_attack(const std::string& field, std::uint32_t node_id, const std::string& spec,
                                               std::uint32_t default_horizon, std::uint64_t default_seed) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(spec);
    while (std::getline(is, part, ':')) parts.push_back(part);
    if (parts.empty()) throw config_error(field, "empty attack spec");
    attack::AttackProfile p{node(node_id), attack::Honest{}};
    const auto& k = parts[0];
    auto arg = [&](std::size_t i) -> const std::string& {
        if (i >= parts.size()) throw config_error(field, "missing argument " + std::to_string(i) + " for " + k);
        return parts[i];
    };
    if (k == "honest") {
        return p;
    } else if (k == "consecutive") {
        attack::OnOffConsecutive c;
        c.rate = parse_value<double>(field, arg(1));
        c.phase = parse_phase(field, arg(2));
        c.horizon = parts.size() > 3 ? parse_value<std::uint32_t>(field, parts[3]) : default_horizon;
        p.kind = c;
    } else if (k == "irregular") {
        double rate = parse_value<double>(field, arg(1));
        std::uint64_t seed = parts.size() > 2 ? parse_value<std::uint64_t>(field, parts[2]) : default_seed;
        std::uint32_t horizon = parts.size() > 3 ? parse_value<std::uint32_t>(field, parts[3]) : default_horizon;
        p.kind = attack::OnOffIrregular(seed, rate, horizon);
    } else if (k == "periodic") {
        p.kind = attack::OnOffPeriodic{parts.size() > 1 ? parse_value<std::uint32_t>(field, parts[1]) : 10u};
    } else if (k == "selective") {
        attack::ReceiverSelective s;
        for (auto v : parse_list<std::uint32_t>(field, [&] {
                 std::string l = arg(1);
                 std::replace(l.begin(), l.end(), ';', ',');
                 return l;
             }()))
            s.victims.push_back(node(v));
        std::sort(s.victims.begin(), s.victims.end());
        p.kind = s;
    } else {
        throw config_error(field, "unknown attack kind '" + k + "'");
    }
    attack::validate(p);
    return p;
}

} // namespace detail

/// Builds a scenario from a parsed INI tree; defaults fill absent keys.
inline Scenario from_ptree(const ptree& root) {
    static const std::set<std::string> sections{"scenario", "seeds", "weights", "radio", "attacks", "social", "crypto", "trace"};
    for (const auto& [name, child] : root) {
        if (!sections.contains(name)) throw config_error(name, "unknown section");
    }

    Scenario sc;
    using detail::SectionReader;
    {
        SectionReader r(root, "scenario");
        r.read("n_nodes", sc.n_nodes);
        r.read("side", sc.side);
        r.read("malicious_fraction", sc.malicious_fraction);
        r.read("frames", sc.frames);
        r.read("file_kbits", sc.file_kbits);
        r.read_with("variant", [&](const std::string&, const std::string& v) { sc.variant = parse_variant(v); });
        r.read_with("experiment", [&](const std::string&, const std::string& v) { sc.experiment = parse_experiment(v); });
        r.read("payload_bytes", sc.payload_bytes);
        r.read("transcript", sc.transcript);
        r.reject_unknown();
    }
    {
        SectionReader r(root, "seeds");
        r.read("seed", sc.seeds.master);
        r.read("layout", sc.seeds.layout);
        r.read("channel", sc.seeds.channel);
        r.read("social", sc.seeds.social);
        r.read("attacks", sc.seeds.attacks);
        r.read("crypto", sc.seeds.crypto);
        r.reject_unknown();
    }
    {
        auto& w = sc.weights;
        SectionReader r(root, "weights");
        r.read("beta1", w.beta1);
        r.read("beta2", w.beta2);
        r.read("gamma", w.gamma);
        r.read("epsilon", w.epsilon);
        r.read("zeta", w.zeta);
        r.read("theta", w.theta);
        r.read("mu", w.mu);
        r.read("nu", w.nu);
        r.read("chi", w.chi);
        r.read("psi", w.psi);
        r.read("sigma", w.sigma);
        r.read("long_window", w.long_window);
        r.read("recent_window", w.recent_window);
        r.read("threshold", w.threshold);
        r.read("reputation_default", w.reputation_default);
        r.reject_unknown();
    }
    {
        auto& c = sc.channel;
        auto& p = sc.plan;
        SectionReader r(root, "radio");
        r.read_with("mode", [&](const std::string& f, const std::string& v) {
            if (v == "shadowed") c.mode = radio::ChannelMode::shadowed;
            else if (v == "banded") c.mode = radio::ChannelMode::banded;
            else throw config_error(f, "expected 'shadowed' or 'banded'");
        });
        r.read("cellular_snr_ref_db", c.cellular_snr_ref_db);
        r.read("cellular_exponent", c.cellular_exponent);
        r.read("cellular_shadowing_db", c.cellular_shadowing_db);
        r.read("d2d_snr_ref_db", c.d2d_snr_ref_db);
        r.read("d2d_exponent", c.d2d_exponent);
        r.read("d2d_shadowing_db", c.d2d_shadowing_db);
        r.read("max_d2d_range", c.max_d2d_range_m);
        r.read("cellular_band", c.cellular_band_m);
        r.read("time_varying", c.time_varying);
        r.read("slots", p.slots);
        r.read("dl_slots", p.dl_slots);
        r.read("ul_slots", p.ul_slots);
        r.read("special_slots", p.special_slots);
        r.read("bandwidth_rbs", p.bandwidth_rbs);
        r.reject_unknown();
    }
    {
        auto& a = sc.attack;
        SectionReader r(root, "attacks");
        r.read("kind", a.kind);
        r.read("rate", a.rate);
        r.read_with("phase", [&](const std::string& f, const std::string& v) { a.phase = detail::parse_phase(f, v); });
        r.read("horizon", a.horizon);
        r.read("period", a.period);
        r.read("victim_fraction", a.victim_fraction);
        r.read("tamper_ciphertext", a.tamper_ciphertext);
        r.read_prefixed("node.", [&](const std::string& f, const std::string& id, const std::string& v) {
            auto n = detail::parse_value<std::uint32_t>(f, id);
            std::uint32_t horizon = a.horizon ? a.horizon : sc.frames;
            sc.node_attacks[n] = detail::parse_node_attack(f, n, v, horizon, hash_combine(sc.seeds.attacks_seed(), n));
        });
        r.reject_unknown();
    }
    {
        auto& s = sc.social;
        SectionReader r(root, "social");
        r.read_with("mix", [&](const std::string& f, const std::string& v) { s.mix.p = detail::parse_array<6>(f, v); });
        r.read_with("intelligence", [&](const std::string& f, const std::string& v) { s.intelligence.p = detail::parse_array<3>(f, v); });
        r.read("correlate", s.correlate);
        r.read_with("adversarial_mix", [&](const std::string& f, const std::string& v) { s.adversarial_mix.p = detail::parse_array<6>(f, v); });
        r.read_with("adversarial_intelligence",
                    [&](const std::string& f, const std::string& v) { s.adversarial_intelligence.p = detail::parse_array<3>(f, v); });
        r.reject_unknown();
    }
    {
        SectionReader r(root, "crypto");
        r.read_with("suite", [&](const std::string&, const std::string& v) { sc.suite = crypto::parse_suite(v); });
        r.reject_unknown();
    }
    {
        auto& t = sc.trace;
        SectionReader r(root, "trace");
        r.read("rounds", t.rounds);
        r.read("receivers", t.receivers);
        r.read("spacing", t.spacing);
        r.read("relationship", t.relationship);
        r.read("centrality", t.centrality);
        r.read("intelligence", t.intelligence);
        r.read_with("rates", [&](const std::string& f, const std::string& v) { t.rates = detail::parse_list<double>(f, v); });
        r.read_with("beta2_values", [&](const std::string& f, const std::string& v) { t.beta2_values = detail::parse_list<double>(f, v); });
        r.reject_unknown();
    }
    sc.validate();
    return sc;
}

inline ptree read_ini(std::istream& is) {
    ptree root;
    try {
        boost::property_tree::ini_parser::read_ini(is, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error("line " + std::to_string(e.line()), e.message());
    }
    return root;
}

inline ptree read_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config", "cannot open '" + path + "'");
    return read_ini(in);
}

inline Scenario parse(std::string_view text) {
    std::istringstream is{std::string(text)};
    return from_ptree(read_ini(is));
}

/// Sets "section.key" in the tree (used by --seed and sweeps).
inline void set(ptree& root, const std::string& dotted, const std::string& value) {
    auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw config_error(dotted, "parameter must be written as section.key");
    ptree::path_type section(dotted.substr(0, dot), '\0');
    if (!root.get_child_optional(section)) root.add_child(section, ptree{});
    root.get_child(section).put(ptree::path_type(dotted.substr(dot + 1), '\0'), value);
}

} // namespace config

} // namespace setd2d
