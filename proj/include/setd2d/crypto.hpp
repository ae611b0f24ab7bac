#pragma once

// Pluggable primitive suites behind one interface:
//  - StandardSuite: SHA-256, HMAC-SHA256, 2048-bit MODP DH (RFC 3526 group 14),
//    ChaCha20-Poly1305, Ed25519 (all via OpenSSL libcrypto).
//  - ToySuite: DH in the order-1019 subgroup mod 2039, SHA-256 keystream cipher
//    with a truncated HMAC tag, and hash-then-RSA signatures with a ~62-bit
//    modulus. Small enough to brute force; used for fast sweeps and tests.
// All randomness comes from a caller-provided DeterministicRng.

#include <openssl/bn.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "core.hpp"

namespace setd2d::crypto {

using ByteView = std::span<const std::uint8_t>;

class crypto_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [lo, hi].
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        for (std::size_t i = 0; i < n; i += 8) {
            std::uint64_t v = engine_();
            for (std::size_t k = 0; k < 8 && i + k < n; ++k) out[i + k] = static_cast<std::uint8_t>(v >> (8 * k));
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline Bytes concat(std::initializer_list<ByteView> parts) {
    Bytes out;
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline std::string to_hex(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (auto v : b) {
        s.push_back(digits[v >> 4]);
        s.push_back(digits[v & 15]);
    }
    return s;
}

inline std::optional<Bytes> from_hex(std::string_view s) {
    if (s.size() % 2) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(s[2 * i]), lo = nibble(s[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

inline bool equal_ct(ByteView a, ByteView b) {
    return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

inline Bytes sha256(ByteView data) {
    Bytes out(32);
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr))
        throw crypto_error("SHA-256 failed");
    return out;
}

inline Bytes hmac_sha256(ByteView key, ByteView data) {
    Bytes out(32);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len))
        throw crypto_error("HMAC-SHA256 failed");
    return out;
}

// --- 64-bit modular arithmetic (toy suite and small-group checks) ---

constexpr std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

constexpr std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = mod_pow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::optional<std::uint64_t> mod_inverse(std::uint64_t a, std::uint64_t m) {
    __int128 t = 0, new_t = 1;
    __int128 r = m, new_r = a % m;
    while (new_r != 0) {
        __int128 q = r / new_r;
        t -= q * new_t;
        std::swap(t, new_t);
        r -= q * new_r;
        std::swap(r, new_r);
    }
    if (r != 1) return std::nullopt;
    if (t < 0) t += m;
    return static_cast<std::uint64_t>(t);
}

inline void put_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64(ByteView b, std::size_t off = 0) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = v << 8 | b[off + i];
    return v;
}

// --- suite interface ---

struct KeyPair {
    Bytes secret;
    Bytes public_key;
};

class CryptoSuite {
public:
    virtual ~CryptoSuite() = default;

    virtual std::string_view name() const = 0;
    /// Protection scheme id used in SUCI strings.
    virtual int scheme_id() const = 0;

    virtual Bytes hash(ByteView data) const = 0;
    virtual Bytes mac(ByteView key, ByteView data) const = 0;
    bool verify_mac(ByteView key, ByteView data, ByteView tag) const { return equal_ct(mac(key, data), tag); }

    virtual std::size_t dh_public_size() const = 0;
    virtual KeyPair dh_generate(DeterministicRng& rng) const = 0;
    /// Shared secret; throws crypto_error on a malformed or out-of-group peer value.
    virtual Bytes dh_shared(ByteView secret, ByteView peer_public) const = 0;

    static constexpr std::size_t key_size = 32;
    static constexpr std::size_t nonce_size = 12;
    /// nonce || ciphertext || tag.
    virtual Bytes seal(ByteView key, ByteView nonce, ByteView plaintext) const = 0;
    /// nullopt when authentication fails.
    virtual std::optional<Bytes> open(ByteView key, ByteView sealed) const = 0;

    virtual KeyPair signing_keypair(DeterministicRng& rng) const = 0;
    virtual Bytes sign(ByteView secret, ByteView data) const = 0;
    virtual bool verify(ByteView public_key, ByteView data, ByteView signature) const = 0;

    Bytes seal(ByteView key, DeterministicRng& rng, ByteView plaintext) const {
        return seal(key, rng.bytes(nonce_size), plaintext);
    }

    /// X9.63-style KDF: H(Z || counter || info) blocks.
    Bytes kdf(ByteView shared, std::string_view info, std::size_t length = key_size) const {
        Bytes out;
        for (std::uint32_t counter = 1; out.size() < length; ++counter) {
            Bytes block(shared.begin(), shared.end());
            for (int i = 3; i >= 0; --i) block.push_back(static_cast<std::uint8_t>(counter >> (8 * i)));
            block.insert(block.end(), info.begin(), info.end());
            auto h = hash(block);
            out.insert(out.end(), h.begin(), h.end());
        }
        out.resize(length);
        return out;
    }
};

// --- toy suite ---

class ToySuite final : public CryptoSuite {
public:
    static constexpr std::uint64_t p = 2039;  // safe prime, p = 2q + 1
    static constexpr std::uint64_t q = 1019;
    static constexpr std::uint64_t g = 4;     // generates the order-q subgroup
    static constexpr std::size_t tag_size = 16;

    std::string_view name() const override { return "toy"; }
    int scheme_id() const override { return 9; }

    Bytes hash(ByteView data) const override { return sha256(data); }
    Bytes mac(ByteView key, ByteView data) const override {
        auto t = hmac_sha256(key, data);
        t.resize(tag_size);
        return t;
    }

    std::size_t dh_public_size() const override { return 2; }

    KeyPair dh_generate(DeterministicRng& rng) const override {
        std::uint64_t x = rng.uniform(1, q - 1);
        return {encode16(x), encode16(mod_pow(g, x, p))};
    }

    Bytes dh_shared(ByteView secret, ByteView peer_public) const override {
        if (secret.size() != 2 || peer_public.size() != 2) throw crypto_error("toy DH: bad encoding");
        std::uint64_t y = decode16(peer_public);
        if (y < 2 || y > p - 2 || mod_pow(y, q, p) != 1) throw crypto_error("toy DH: peer value outside subgroup");
        return encode16(mod_pow(y, decode16(secret), p));
    }

    Bytes seal(ByteView key, ByteView nonce, ByteView plaintext) const override {
        Bytes out(nonce.begin(), nonce.end());
        auto ks = keystream(key, nonce, plaintext.size());
        for (std::size_t i = 0; i < plaintext.size(); ++i) out.push_back(plaintext[i] ^ ks[i]);
        auto tag = mac(key, out);
        out.insert(out.end(), tag.begin(), tag.end());
        return out;
    }
    using CryptoSuite::seal;

    std::optional<Bytes> open(ByteView key, ByteView sealed) const override {
        if (sealed.size() < nonce_size + tag_size) return std::nullopt;
        auto body = sealed.first(sealed.size() - tag_size);
        if (!verify_mac(key, body, sealed.last(tag_size))) return std::nullopt;
        auto nonce = body.first(nonce_size);
        auto ct = body.subspan(nonce_size);
        auto ks = keystream(key, nonce, ct.size());
        Bytes pt(ct.size());
        for (std::size_t i = 0; i < ct.size(); ++i) pt[i] = ct[i] ^ ks[i];
        return pt;
    }

    // Textbook RSA over a truncated digest: secret = n || d, public = n || e.
    KeyPair signing_keypair(DeterministicRng& rng) const override {
        constexpr std::uint64_t e = 65537;
        for (;;) {
            std::uint64_t a = random_prime(rng), b = random_prime(rng);
            if (a == b) continue;
            std::uint64_t lambda = std::lcm(a - 1, b - 1);
            auto d = mod_inverse(e, lambda);
            if (!d) continue;
            KeyPair kp;
            put_u64(kp.secret, a * b);
            put_u64(kp.secret, *d);
            put_u64(kp.public_key, a * b);
            put_u64(kp.public_key, e);
            return kp;
        }
    }

    Bytes sign(ByteView secret, ByteView data) const override {
        if (secret.size() != 16) throw crypto_error("toy signature: bad key");
        std::uint64_t n = get_u64(secret, 0), d = get_u64(secret, 8);
        Bytes sig;
        put_u64(sig, mod_pow(digest(data, n), d, n));
        return sig;
    }

    bool verify(ByteView public_key, ByteView data, ByteView signature) const override {
        if (public_key.size() != 16 || signature.size() != 8) return false;
        std::uint64_t n = get_u64(public_key, 0), e = get_u64(public_key, 8);
        std::uint64_t s = get_u64(signature);
        if (n < 2 || s >= n) return false;
        return mod_pow(s, e, n) == digest(data, n);
    }

private:
    static Bytes encode16(std::uint64_t v) { return {static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)}; }
    static std::uint64_t decode16(ByteView b) { return static_cast<std::uint64_t>(b[0]) << 8 | b[1]; }

    static std::uint64_t digest(ByteView data, std::uint64_t n) { return get_u64(sha256(data)) % n; }

    static std::uint64_t random_prime(DeterministicRng& rng) {
        for (;;) {
            std::uint64_t c = rng.uniform(1ULL << 30, (1ULL << 31) - 1) | 1;
            if (is_prime(c)) return c;
        }
    }

    Bytes keystream(ByteView key, ByteView nonce, std::size_t n) const {
        Bytes ks;
        for (std::uint64_t ctr = 0; ks.size() < n; ++ctr) {
            Bytes block = concat({key, nonce});
            put_u64(block, ctr);
            auto h = sha256(block);
            ks.insert(ks.end(), h.begin(), h.end());
        }
        ks.resize(n);
        return ks;
    }
};

// --- standard suite (OpenSSL) ---

namespace detail {
struct BnFree {
    void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct BnCtxFree {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct PkeyFree {
    void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct MdCtxFree {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct CipherCtxFree {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using Bn = std::unique_ptr<BIGNUM, BnFree>;
using BnCtx = std::unique_ptr<BN_CTX, BnCtxFree>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyFree>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;

inline void check(int ok, const char* what) {
    if (ok != 1) throw crypto_error(what);
}
} // namespace detail

class StandardSuite final : public CryptoSuite {
public:
    static constexpr std::size_t modulus_bytes = 256;
    static constexpr std::size_t exponent_bytes = 32;
    static constexpr std::size_t tag_size = 16;

    StandardSuite() : p_(BN_get_rfc3526_prime_2048(nullptr)), g_(BN_new()), ctx_(BN_CTX_new()) {
        if (!p_ || !g_ || !ctx_) throw crypto_error("OpenSSL allocation failed");
        detail::check(BN_set_word(g_.get(), 2), "BN_set_word");
    }

    std::string_view name() const override { return "standard"; }
    int scheme_id() const override { return 1; }

    Bytes hash(ByteView data) const override { return sha256(data); }
    Bytes mac(ByteView key, ByteView data) const override { return hmac_sha256(key, data); }

    std::size_t dh_public_size() const override { return modulus_bytes; }

    KeyPair dh_generate(DeterministicRng& rng) const override {
        Bytes secret = rng.bytes(exponent_bytes);
        secret[0] |= 0x80;  // full-length exponent
        detail::Bn x(BN_bin2bn(secret.data(), static_cast<int>(secret.size()), nullptr));
        detail::Bn y(BN_new());
        detail::check(BN_mod_exp(y.get(), g_.get(), x.get(), p_.get(), ctx_.get()), "BN_mod_exp");
        return {std::move(secret), pad(y.get())};
    }

    Bytes dh_shared(ByteView secret, ByteView peer_public) const override {
        if (secret.size() != exponent_bytes || peer_public.size() != modulus_bytes)
            throw crypto_error("DH: bad encoding");
        detail::Bn x(BN_bin2bn(secret.data(), static_cast<int>(secret.size()), nullptr));
        detail::Bn y(BN_bin2bn(peer_public.data(), static_cast<int>(peer_public.size()), nullptr));
        detail::Bn upper(BN_dup(p_.get()));
        detail::check(BN_sub_word(upper.get(), 1), "BN_sub_word");
        if (BN_cmp(y.get(), BN_value_one()) <= 0 || BN_cmp(y.get(), upper.get()) >= 0)
            throw crypto_error("DH: peer value out of range");
        detail::Bn z(BN_new());
        detail::check(BN_mod_exp(z.get(), y.get(), x.get(), p_.get(), ctx_.get()), "BN_mod_exp");
        return pad(z.get());
    }

    Bytes seal(ByteView key, ByteView nonce, ByteView plaintext) const override {
        if (key.size() != key_size || nonce.size() != nonce_size) throw crypto_error("AEAD: bad key or nonce");
        detail::CipherCtx c(EVP_CIPHER_CTX_new());
        detail::check(EVP_EncryptInit_ex(c.get(), EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data()),
                      "EncryptInit");
        Bytes out(nonce.begin(), nonce.end());
        out.resize(nonce_size + plaintext.size() + tag_size);
        int len = 0;
        if (!plaintext.empty())
            detail::check(EVP_EncryptUpdate(c.get(), out.data() + nonce_size, &len, plaintext.data(),
                                            static_cast<int>(plaintext.size())),
                          "EncryptUpdate");
        int fin = 0;
        detail::check(EVP_EncryptFinal_ex(c.get(), out.data() + nonce_size + len, &fin), "EncryptFinal");
        detail::check(EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_GET_TAG, static_cast<int>(tag_size),
                                          out.data() + nonce_size + plaintext.size()),
                      "GET_TAG");
        return out;
    }
    using CryptoSuite::seal;

    std::optional<Bytes> open(ByteView key, ByteView sealed) const override {
        if (key.size() != key_size || sealed.size() < nonce_size + tag_size) return std::nullopt;
        auto ct = sealed.subspan(nonce_size, sealed.size() - nonce_size - tag_size);
        Bytes tag(sealed.end() - static_cast<std::ptrdiff_t>(tag_size), sealed.end());
        detail::CipherCtx c(EVP_CIPHER_CTX_new());
        detail::check(EVP_DecryptInit_ex(c.get(), EVP_chacha20_poly1305(), nullptr, key.data(), sealed.data()),
                      "DecryptInit");
        Bytes pt(ct.size());
        int len = 0;
        if (!ct.empty() &&
            EVP_DecryptUpdate(c.get(), pt.data(), &len, ct.data(), static_cast<int>(ct.size())) != 1)
            return std::nullopt;
        detail::check(EVP_CIPHER_CTX_ctrl(c.get(), EVP_CTRL_AEAD_SET_TAG, static_cast<int>(tag_size), tag.data()),
                      "SET_TAG");
        int fin = 0;
        if (EVP_DecryptFinal_ex(c.get(), pt.data() + len, &fin) != 1) return std::nullopt;
        return pt;
    }

    // Ed25519, keys derived from 32 seeded bytes.
    KeyPair signing_keypair(DeterministicRng& rng) const override {
        Bytes seed = rng.bytes(32);
        detail::Pkey k(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
        if (!k) throw crypto_error("Ed25519 key generation failed");
        Bytes pub(32);
        std::size_t len = pub.size();
        detail::check(EVP_PKEY_get_raw_public_key(k.get(), pub.data(), &len), "get_raw_public_key");
        return {std::move(seed), std::move(pub)};
    }

    Bytes sign(ByteView secret, ByteView data) const override {
        detail::Pkey k(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret.data(), secret.size()));
        if (!k) throw crypto_error("Ed25519: bad private key");
        detail::MdCtx md(EVP_MD_CTX_new());
        detail::check(EVP_DigestSignInit(md.get(), nullptr, nullptr, nullptr, k.get()), "DigestSignInit");
        Bytes sig(64);
        std::size_t len = sig.size();
        detail::check(EVP_DigestSign(md.get(), sig.data(), &len, data.data(), data.size()), "DigestSign");
        sig.resize(len);
        return sig;
    }

    bool verify(ByteView public_key, ByteView data, ByteView signature) const override {
        detail::Pkey k(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(), public_key.size()));
        if (!k) return false;
        detail::MdCtx md(EVP_MD_CTX_new());
        if (EVP_DigestVerifyInit(md.get(), nullptr, nullptr, nullptr, k.get()) != 1) return false;
        return EVP_DigestVerify(md.get(), signature.data(), signature.size(), data.data(), data.size()) == 1;
    }

private:
    static Bytes pad(const BIGNUM* v) {
        Bytes out(modulus_bytes);
        if (BN_bn2binpad(v, out.data(), static_cast<int>(out.size())) < 0) throw crypto_error("BN_bn2binpad");
        return out;
    }

    detail::Bn p_;
    detail::Bn g_;
    detail::BnCtx ctx_;
};

enum class SuiteKind { toy, standard };

inline std::unique_ptr<CryptoSuite> make_suite(SuiteKind kind) {
    if (kind == SuiteKind::toy) return std::make_unique<ToySuite>();
    return std::make_unique<StandardSuite>();
}

inline SuiteKind parse_suite(std::string_view s) {
    if (s == "toy") return SuiteKind::toy;
    if (s == "standard") return SuiteKind::standard;
    throw config_error("crypto.suite", "expected 'toy' or 'standard'");
}

} // namespace setd2d::crypto
