#pragma once

// gNB-mediated secure relay round. The gNB is the trusted third party: it
// holds every UE's session key, relays the DH public values under MAC, signs
// the multicast data, and judges breach reports to produce the gtf verdict.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "crypto.hpp"

namespace setd2d::protocol {

using crypto::ByteView;
using crypto::CryptoSuite;
using crypto::DeterministicRng;
using crypto::KeyPair;

// --- identities ---

inline constexpr std::string_view home_mcc = "001";
inline constexpr std::string_view home_mnc = "01";

/// "imsi-<mcc><mnc><10-digit msin>"
inline std::string make_supi(std::uint64_t msin) {
    std::string digits = std::to_string(msin % 10000000000ULL);
    return "imsi-" + std::string(home_mcc) + std::string(home_mnc) + std::string(10 - digits.size(), '0') + digits;
}

struct Concealed {
    std::string suci;
    Bytes shared_secret;  // ECIES shared value; the registration stub derives the session key from it
};

/// ECIES-style concealment over the suite's DH: only MCC/MNC stay in clear.
inline Concealed conceal(const CryptoSuite& suite, std::string_view supi, ByteView home_public,
                         DeterministicRng& rng) {
    constexpr std::size_t prefix = 5 + 3 + 2;  // "imsi-" + mcc + mnc
    if (supi.size() <= prefix || supi.substr(0, 5) != "imsi-") throw std::invalid_argument("malformed SUPI");
    auto eph = suite.dh_generate(rng);
    auto z = suite.dh_shared(eph.secret, home_public);
    auto key = suite.kdf(z, "suci");
    auto ct = suite.seal(key, rng, crypto::to_bytes(supi.substr(prefix)));
    Concealed c;
    c.suci = "suci-" + std::string(supi.substr(5, 3)) + "-" + std::string(supi.substr(8, 2)) + "-" +
             std::to_string(suite.scheme_id()) + "-" + crypto::to_hex(crypto::concat({eph.public_key, ct}));
    c.shared_secret = std::move(z);
    return c;
}

struct Deconcealed {
    std::string supi;
    Bytes shared_secret;
};

/// nullopt for malformed input or the wrong home-network key.
inline std::optional<Deconcealed> deconceal_full(const CryptoSuite& suite, std::string_view suci,
                                                 ByteView home_secret) {
    // suci-<mcc>-<mnc>-<scheme>-<hex>
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = suci.find('-', start)) != std::string_view::npos; start = pos + 1)
        parts.push_back(suci.substr(start, pos - start));
    parts.push_back(suci.substr(start));
    if (parts.size() != 5 || parts[0] != "suci" || parts[3] != std::to_string(suite.scheme_id())) return std::nullopt;
    auto blob = crypto::from_hex(parts[4]);
    if (!blob || blob->size() < suite.dh_public_size()) return std::nullopt;
    ByteView view(*blob);
    Bytes z;
    try {
        z = suite.dh_shared(home_secret, view.first(suite.dh_public_size()));
    } catch (const crypto::crypto_error&) {
        return std::nullopt;
    }
    auto msin = suite.open(suite.kdf(z, "suci"), view.subspan(suite.dh_public_size()));
    if (!msin) return std::nullopt;
    return Deconcealed{"imsi-" + std::string(parts[1]) + std::string(parts[2]) + std::string(msin->begin(), msin->end()),
                       std::move(z)};
}

inline std::optional<std::string> deconceal(const CryptoSuite& suite, std::string_view suci, ByteView home_secret) {
    auto d = deconceal_full(suite, suci, home_secret);
    if (!d) return std::nullopt;
    return std::move(d->supi);
}

// --- key agreement ---

/// One side of a DH exchange; enforces that the peer value arrives before derivation.
class KeyAgreement {
public:
    KeyAgreement(const CryptoSuite& suite, DeterministicRng& rng) : suite_(&suite), own_(suite.dh_generate(rng)) {}

    const Bytes& public_value() const { return own_.public_key; }
    void set_peer(Bytes peer) { peer_ = std::move(peer); }
    bool has_peer() const { return peer_.has_value(); }

    /// KDF(g^ab); throws protocol_error if the peer value is missing.
    Bytes derive(std::string_view info = "d2d") const {
        if (!peer_) throw protocol_error("DH derive before peer public value");
        return suite_->kdf(suite_->dh_shared(own_.secret, *peer_), info);
    }

private:
    const CryptoSuite* suite_;
    KeyPair own_;
    std::optional<Bytes> peer_;
};

// --- messages and transcript ---

enum class MessageKind {
    ServiceNotify,
    Register,
    CqiReport,
    TrustParams,
    D2DInit,
    PairAnnounce,
    SignedMulticastData,
    EncryptedRelayData,
    KeyRequest,
    KeyResponse,
    Report,
};

constexpr std::string_view to_string(MessageKind k) {
    switch (k) {
    case MessageKind::ServiceNotify: return "ServiceNotify";
    case MessageKind::Register: return "Register";
    case MessageKind::CqiReport: return "CqiReport";
    case MessageKind::TrustParams: return "TrustParams";
    case MessageKind::D2DInit: return "D2DInit";
    case MessageKind::PairAnnounce: return "PairAnnounce";
    case MessageKind::SignedMulticastData: return "SignedMulticastData";
    case MessageKind::EncryptedRelayData: return "EncryptedRelayData";
    case MessageKind::KeyRequest: return "KeyRequest";
    case MessageKind::KeyResponse: return "KeyResponse";
    case MessageKind::Report: return "Report";
    }
    return "?";
}

inline constexpr std::string_view gnb_name = "gnb";

struct Message {
    MessageKind kind{};
    std::string sender;    // SUCI, or "gnb"
    std::string receiver;  // SUCI, "gnb", or "*" for broadcast
    Bytes payload;
    Bytes mac;             // UE <-> gNB control messages only
    Bytes signature;       // origin signature, data messages only
};

/// Length-prefixed field packing for message payloads.
inline Bytes pack(std::initializer_list<ByteView> fields) {
    Bytes out;
    for (auto f : fields) {
        auto n = static_cast<std::uint32_t>(f.size());
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

inline std::optional<std::vector<Bytes>> unpack(ByteView data, std::size_t expected) {
    std::vector<Bytes> out;
    std::size_t off = 0;
    while (off < data.size()) {
        if (data.size() - off < 4) return std::nullopt;
        std::uint32_t n = 0;
        for (int i = 0; i < 4; ++i) n = n << 8 | data[off + i];
        off += 4;
        if (data.size() - off < n) return std::nullopt;
        out.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(off),
                         data.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
    }
    if (out.size() != expected) return std::nullopt;
    return out;
}

enum class Check { none, ok, fail };

constexpr std::string_view to_string(Check c) {
    return c == Check::ok ? "ok" : c == Check::fail ? "fail" : "none";
}

struct TranscriptEntry {
    std::uint32_t frame = 0;
    std::uint32_t step = 0;
    MessageKind kind{};
    std::string sender;
    std::string receiver;
    std::size_t payload_bytes = 0;
    std::size_t signature_bytes = 0;
    Check mac = Check::none;
    Check signature = Check::none;
    std::string digest;  // truncated payload hash; payloads themselves are never logged
};

class Transcript {
public:
    void add(TranscriptEntry e) { entries_.push_back(std::move(e)); }
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

    void write_jsonl(std::ostream& os) const {
        for (const auto& e : entries_) {
            nlohmann::ordered_json j;
            j["frame"] = e.frame;
            j["step"] = e.step;
            j["kind"] = to_string(e.kind);
            j["from"] = e.sender;
            j["to"] = e.receiver;
            j["bytes"] = e.payload_bytes;
            j["sig_bytes"] = e.signature_bytes;
            j["mac"] = to_string(e.mac);
            j["sig"] = to_string(e.signature);
            j["digest"] = e.digest;
            os << j.dump() << '\n';
        }
    }

private:
    std::vector<TranscriptEntry> entries_;
};

// --- relay round ---

enum class RelayAction {
    honest,
    tamper_payload,     // alter D before encryption (signature sigma_1 no longer matches)
    tamper_ciphertext,  // flip one bit of D' after encryption, then sign the altered D'
};

struct RoundOptions {
    RelayAction action = RelayAction::honest;
    std::optional<std::size_t> tamper_bit;  // which bit to flip; drawn from the round RNG if unset
    bool receiver_reports = true;           // false: receiver stays silent past the waiting period
    bool false_report = false;              // receiver claims a breach after a clean delivery
};

enum class RoundOutcome {
    delivered,              // receiver verified sigma_1; gtf 1
    breach_confirmed,       // gNB reproduced the failure on the evidence; gtf 0
    breach_unattributable,  // evidence not signed by the relay; gtf 0
    false_report,           // breach claimed, evidence checks out; gtf 1
    no_report,              // waiting period expired; gtf 0
    rejected_unregistered,  // D2DInit from an unknown identity; no round
    mac_failure,            // a control message failed its MAC (e.g. MITM); round aborted
};

constexpr std::string_view to_string(RoundOutcome o) {
    switch (o) {
    case RoundOutcome::delivered: return "delivered";
    case RoundOutcome::breach_confirmed: return "breach_confirmed";
    case RoundOutcome::breach_unattributable: return "breach_unattributable";
    case RoundOutcome::false_report: return "false_report";
    case RoundOutcome::no_report: return "no_report";
    case RoundOutcome::rejected_unregistered: return "rejected_unregistered";
    case RoundOutcome::mac_failure: return "mac_failure";
    }
    return "?";
}

struct RoundResult {
    RoundOutcome outcome = RoundOutcome::no_report;
    std::optional<bool> gtf;           // nullopt when no transaction took place
    std::optional<Bytes> delivered;    // D as recovered by the receiver, if it decrypted
    bool receiver_verified = false;    // receiver's sigma_1 check passed
};

/// Multicast block of one frame, signed by the gNB.
struct MulticastData {
    std::uint32_t frame = 0;
    Bytes data;
    Bytes signature;  // sigma_1
};

/// Called on every over-the-air message; may modify it in place.
using Interceptor = std::function<void(Message&)>;

struct UeState {
    NodeId node{};
    std::string supi;
    std::string suci;
    Bytes session_key;
    KeyPair signing;
    bool registered = false;
};

/// The cell's security plane: gNB state plus the UE-side credentials.
class SecureCell {
public:
    SecureCell(const CryptoSuite& suite, std::uint64_t seed) : suite_(&suite), seed_(seed) {
        DeterministicRng rng(hash_combine(seed, 0x6e62));
        home_ = suite.dh_generate(rng);
        gnb_signing_ = suite.signing_keypair(rng);
    }

    const CryptoSuite& suite() const { return *suite_; }
    const Bytes& gnb_public_key() const { return gnb_signing_.public_key; }
    const Bytes& home_public_key() const { return home_.public_key; }
    const Bytes& home_secret_key() const { return home_.secret; }

    void set_transcript(Transcript* t) { transcript_ = t; }
    void set_interceptor(Interceptor f) { interceptor_ = std::move(f); }

    /// Registration stub: the UE sends its SUCI and signing key; the gNB
    /// deconceals and binds a session key derived from the concealment secret.
    const UeState& register_ue(NodeId n, std::uint32_t frame = 0) {
        auto& ue = provision(n);
        Message m{MessageKind::Register, ue.suci, std::string(gnb_name), pack({ue.signing.public_key}), {}, {}};
        m.mac = mac_for(ue.session_key, m);
        transmit(m);
        std::uint32_t step = 0;
        Check mac = Check::fail;
        if (auto d = deconceal_full(*suite_, m.sender, home_.secret)) {
            Bytes key = suite_->kdf(d->shared_secret, "session");
            if (suite_->verify_mac(key, body(m), m.mac)) {
                mac = Check::ok;
                auto fields = unpack(m.payload, 1);
                if (fields) {
                    registry_[m.sender] = Registration{n, std::move(key), (*fields)[0]};
                    ue.registered = true;
                }
            }
        }
        log(frame, step, m, mac, Check::none);
        return ue;
    }

    bool registered(NodeId n) const {
        auto it = ues_.find(n);
        return it != ues_.end() && registry_.contains(it->second.suci);
    }

    const UeState& ue(NodeId n) { return provision(n); }

    /// gNB -> all: service notification for the frame.
    void notify(std::uint32_t frame, ByteView service_info) {
        Message m{MessageKind::ServiceNotify, std::string(gnb_name), "*", Bytes(service_info.begin(), service_info.end()), {}, {}};
        m.signature = suite_->sign(gnb_signing_.secret, m.payload);
        transmit(m);
        log(frame, 0, m, Check::none, Check::none);
    }

    /// UE -> gNB MAC-protected control upload (CQI values, trust parameters).
    bool control(std::uint32_t frame, NodeId n, MessageKind kind, ByteView payload) {
        auto& ue = provision(n);
        Message m{kind, ue.suci, std::string(gnb_name), Bytes(payload.begin(), payload.end()), {}, {}};
        m.mac = mac_for(ue.session_key, m);
        transmit(m);
        bool ok = gnb_verify(m);
        log(frame, 0, m, ok ? Check::ok : Check::fail, Check::none);
        return ok;
    }

    MulticastData multicast(std::uint32_t frame, Bytes data) {
        MulticastData md{frame, std::move(data), {}};
        md.signature = suite_->sign(gnb_signing_.secret, md.data);
        return md;
    }

    /// Fixed-size multicast block for a frame, deterministic in (seed, frame).
    MulticastData multicast(std::uint32_t frame, std::size_t bytes) {
        DeterministicRng rng(hash_combine(seed_, 0x6d63, frame));
        return multicast(frame, rng.bytes(bytes));
    }

    RoundResult run_relay_round(NodeId relay, NodeId receiver, const MulticastData& md,
                                const RoundOptions& opt = {}) {
        DeterministicRng rng(hash_combine(seed_, 0x7272, md.frame, index_of(receiver), index_of(relay)));
        auto& ui = provision(receiver);
        auto& uj = provision(relay);
        const std::uint32_t frame = md.frame;
        std::uint32_t step = 0;
        RoundResult res;
        auto abort_mac = [&] {
            res.outcome = RoundOutcome::mac_failure;
            return res;
        };

        // i -> gNB: D2DInit {peer SUCI, A}
        KeyAgreement ka_i(*suite_, rng);
        Message init{MessageKind::D2DInit, ui.suci, std::string(gnb_name),
                     pack({crypto::to_bytes(uj.suci), ka_i.public_value()}), {}, {}};
        init.mac = mac_for(ui.session_key, init);
        transmit(init);
        auto reg_i = registry_.find(init.sender);
        if (reg_i == registry_.end()) {
            log(frame, ++step, init, Check::fail, Check::none);
            res.outcome = RoundOutcome::rejected_unregistered;
            return res;
        }
        bool init_ok = gnb_verify(init);
        log(frame, ++step, init, init_ok ? Check::ok : Check::fail, Check::none);
        if (!init_ok) return abort_mac();
        auto init_fields = unpack(init.payload, 2);
        if (!init_fields) return abort_mac();
        std::string peer_suci((*init_fields)[0].begin(), (*init_fields)[0].end());
        auto reg_j = registry_.find(peer_suci);
        if (reg_j == registry_.end()) {
            res.outcome = RoundOutcome::rejected_unregistered;
            return res;
        }
        const Bytes A = (*init_fields)[1];

        // gNB -> j: PairAnnounce {SUCI_i, A, pk_i}; gNB -> i: PairAnnounce {SUCI_j, pk_j}
        Message ann_j{MessageKind::PairAnnounce, std::string(gnb_name), uj.suci,
                      pack({crypto::to_bytes(ui.suci), A, reg_i->second.signing_public}), {}, {}};
        ann_j.mac = mac_for(reg_j->second.session_key, ann_j);
        transmit(ann_j);
        bool ann_j_ok = suite_->verify_mac(uj.session_key, body(ann_j), ann_j.mac);
        log(frame, ++step, ann_j, ann_j_ok ? Check::ok : Check::fail, Check::none);
        if (!ann_j_ok) return abort_mac();
        auto ann_j_fields = unpack(ann_j.payload, 3);
        if (!ann_j_fields) return abort_mac();

        Message ann_i{MessageKind::PairAnnounce, std::string(gnb_name), ui.suci,
                      pack({crypto::to_bytes(uj.suci), reg_j->second.signing_public}), {}, {}};
        ann_i.mac = mac_for(reg_i->second.session_key, ann_i);
        transmit(ann_i);
        bool ann_i_ok = suite_->verify_mac(ui.session_key, body(ann_i), ann_i.mac);
        log(frame, ++step, ann_i, ann_i_ok ? Check::ok : Check::fail, Check::none);
        if (!ann_i_ok) return abort_mac();
        auto ann_i_fields = unpack(ann_i.payload, 2);
        if (!ann_i_fields) return abort_mac();
        const Bytes pk_j_at_i = (*ann_i_fields)[1];

        // gNB -> j: SignedMulticastData {D, sigma_1}
        Message mc{MessageKind::SignedMulticastData, std::string(gnb_name), uj.suci, md.data, {}, md.signature};
        transmit(mc);
        bool sigma1_at_j = suite_->verify(gnb_signing_.public_key, mc.payload, mc.signature);
        log(frame, ++step, mc, Check::none, sigma1_at_j ? Check::ok : Check::fail);

        // j: B, key, D' = E_K(D || sigma_1), sigma_j over D'
        KeyAgreement ka_j(*suite_, rng);
        ka_j.set_peer((*ann_j_fields)[1]);
        Message kr_j{MessageKind::KeyResponse, uj.suci, std::string(gnb_name),
                     pack({crypto::to_bytes(ui.suci), ka_j.public_value()}), {}, {}};
        kr_j.mac = mac_for(uj.session_key, kr_j);
        transmit(kr_j);
        bool kr_j_ok = gnb_verify(kr_j);
        log(frame, ++step, kr_j, kr_j_ok ? Check::ok : Check::fail, Check::none);
        if (!kr_j_ok) return abort_mac();
        auto kr_j_fields = unpack(kr_j.payload, 2);
        if (!kr_j_fields) return abort_mac();
        const Bytes B = (*kr_j_fields)[1];

        Bytes key_j;
        try {
            key_j = ka_j.derive();
        } catch (const crypto::crypto_error&) {
            return abort_mac();
        }
        Bytes data = mc.payload;
        if (opt.action == RelayAction::tamper_payload) {
            if (data.empty()) data.push_back(0);
            std::size_t bit = opt.tamper_bit.value_or(rng.uniform(0, data.size() * 8 - 1)) % (data.size() * 8);
            data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        }
        Bytes sealed = suite_->seal(key_j, rng, pack({data, mc.signature}));
        if (opt.action == RelayAction::tamper_ciphertext) {
            std::size_t bit = opt.tamper_bit.value_or(rng.uniform(0, sealed.size() * 8 - 1)) % (sealed.size() * 8);
            sealed[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        }
        Message relay_msg{MessageKind::EncryptedRelayData, uj.suci, ui.suci, sealed, {}, {}};
        relay_msg.signature = suite_->sign(uj.signing.secret, relay_msg.payload);
        transmit(relay_msg);
        bool sigma_j_at_i = suite_->verify(pk_j_at_i, relay_msg.payload, relay_msg.signature);
        log(frame, ++step, relay_msg, Check::none, sigma_j_at_i ? Check::ok : Check::fail);

        // i -> gNB: KeyRequest; gNB -> i: KeyResponse {B}
        Message kq{MessageKind::KeyRequest, ui.suci, std::string(gnb_name), pack({crypto::to_bytes(uj.suci)}), {}, {}};
        kq.mac = mac_for(ui.session_key, kq);
        transmit(kq);
        bool kq_ok = gnb_verify(kq);
        log(frame, ++step, kq, kq_ok ? Check::ok : Check::fail, Check::none);
        if (!kq_ok) return abort_mac();

        Message kr_i{MessageKind::KeyResponse, std::string(gnb_name), ui.suci, pack({crypto::to_bytes(uj.suci), B}), {}, {}};
        kr_i.mac = mac_for(reg_i->second.session_key, kr_i);
        transmit(kr_i);
        bool kr_i_ok = suite_->verify_mac(ui.session_key, body(kr_i), kr_i.mac);
        log(frame, ++step, kr_i, kr_i_ok ? Check::ok : Check::fail, Check::none);
        if (!kr_i_ok) return abort_mac();
        auto kr_i_fields = unpack(kr_i.payload, 2);
        if (!kr_i_fields) return abort_mac();

        ka_i.set_peer((*kr_i_fields)[1]);
        Bytes key_i;
        try {
            key_i = ka_i.derive();
        } catch (const crypto::crypto_error&) {
            return abort_mac();
        }

        // i: decrypt and verify sigma_1
        bool clean = false;
        if (sigma_j_at_i) {
            if (auto pt = suite_->open(key_i, relay_msg.payload)) {
                if (auto inner = unpack(*pt, 2)) {
                    res.delivered = (*inner)[0];
                    clean = suite_->verify(gnb_signing_.public_key, (*inner)[0], (*inner)[1]);
                }
            }
        }
        res.receiver_verified = clean;

        if (!opt.receiver_reports) {
            res.outcome = RoundOutcome::no_report;
            res.gtf = false;
            return res;
        }

        // i -> gNB: Report {status, D', sigma_j, E_Ki(K)}
        std::uint8_t status = (clean && !opt.false_report) ? 1 : 0;
        Message rep{MessageKind::Report, ui.suci, std::string(gnb_name),
                    pack({Bytes{status}, relay_msg.payload, relay_msg.signature,
                          suite_->seal(ui.session_key, rng, key_i)}),
                    {}, {}};
        rep.mac = mac_for(ui.session_key, rep);
        transmit(rep);
        bool rep_ok = gnb_verify(rep);
        log(frame, ++step, rep, rep_ok ? Check::ok : Check::fail, Check::none);
        if (!rep_ok) return abort_mac();
        auto rep_fields = unpack(rep.payload, 4);
        if (!rep_fields) return abort_mac();

        res.outcome = judge(*rep_fields, reg_i->second, reg_j->second, md);
        res.gtf = res.outcome == RoundOutcome::delivered || res.outcome == RoundOutcome::false_report;
        return res;
    }

private:
    struct Registration {
        NodeId node{};
        Bytes session_key;
        Bytes signing_public;
    };

    // gNB verdict on a report. An OK report is accepted as is; a breach report
    // is checked against the evidence.
    RoundOutcome judge(const std::vector<Bytes>& f, const Registration& ri, const Registration& rj,
                       const MulticastData& md) const {
        if (f[0].size() == 1 && f[0][0] == 1) return RoundOutcome::delivered;
        const Bytes& evidence = f[1];
        if (!suite_->verify(rj.signing_public, evidence, f[2])) return RoundOutcome::breach_unattributable;
        auto key = suite_->open(ri.session_key, f[3]);
        if (!key) return RoundOutcome::breach_confirmed;
        auto pt = suite_->open(*key, evidence);
        if (!pt) return RoundOutcome::breach_confirmed;
        auto inner = unpack(*pt, 2);
        if (!inner || (*inner)[0] != md.data || (*inner)[1] != md.signature) return RoundOutcome::breach_confirmed;
        return RoundOutcome::false_report;
    }

    UeState& provision(NodeId n) {
        auto it = ues_.find(n);
        if (it != ues_.end()) return it->second;
        DeterministicRng rng(hash_combine(seed_, 0x7565, index_of(n)));
        UeState ue;
        ue.node = n;
        ue.supi = make_supi(1000000 + index_of(n));
        auto c = conceal(*suite_, ue.supi, home_.public_key, rng);
        ue.suci = std::move(c.suci);
        ue.session_key = suite_->kdf(c.shared_secret, "session");
        ue.signing = suite_->signing_keypair(rng);
        return ues_.emplace(n, std::move(ue)).first->second;
    }

    static Bytes body(const Message& m) {
        Bytes b{static_cast<std::uint8_t>(m.kind)};
        auto add = [&](ByteView v) { b.insert(b.end(), v.begin(), v.end()); };
        Bytes packed = pack({crypto::to_bytes(m.sender), crypto::to_bytes(m.receiver), m.payload});
        add(packed);
        return b;
    }

    Bytes mac_for(const Bytes& key, const Message& m) const { return suite_->mac(key, body(m)); }

    bool gnb_verify(const Message& m) const {
        auto it = registry_.find(m.sender);
        return it != registry_.end() && suite_->verify_mac(it->second.session_key, body(m), m.mac);
    }

    void transmit(Message& m) {
        if (interceptor_) interceptor_(m);
    }

    void log(std::uint32_t frame, std::uint32_t step, const Message& m, Check mac, Check sig) {
        if (!transcript_) return;
        auto h = suite_->hash(m.payload);
        h.resize(8);
        transcript_->add({frame, step, m.kind, m.sender, m.receiver, m.payload.size(), m.signature.size(), mac, sig,
                          crypto::to_hex(h)});
    }

    const CryptoSuite* suite_;
    std::uint64_t seed_;
    KeyPair home_;
    KeyPair gnb_signing_;
    std::map<NodeId, UeState> ues_;
    std::unordered_map<std::string, Registration> registry_;
    Transcript* transcript_ = nullptr;
    Interceptor interceptor_;
};

} // namespace setd2d::protocol
