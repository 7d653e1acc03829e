#pragma once
// Shared plumbing: deterministic RNG, SHA-256 digests, little-endian byte IO.
//
// The RNG is a counter-based splitmix64 variant.  We avoid std::mt19937 +
// std::uniform_int_distribution on purpose: distribution output is not
// specified bit-for-bit across standard library implementations, and several
// artifacts here (corruption patterns, Las Vegas retries, random moduli) are
// expected to reproduce exactly from a seed on any platform.

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsc {

// ---------------------------------------------------------------------------
// RNG

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed = 0) : key_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)), ctr_(0) {}

    uint64_t next_u64() {
        uint64_t v = splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++ctr_);
        return splitmix64(v ^ key_);
    }

    // Unbiased value in [0, n).  Lemire-style rejection, loop is rarely taken.
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        unsigned __int128 m = (unsigned __int128)next_u64() * n;
        uint64_t lo = (uint64_t)m;
        if (lo < n) {
            uint64_t floor = (0 - n) % n;
            while (lo < floor) {
                m = (unsigned __int128)next_u64() * n;
                lo = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    uint32_t below_u32(uint32_t n) { return (uint32_t)below(n); }

    bool coin() { return next_u64() & 1; }

    // Independent child stream; children with distinct tags never collide.
    Rng split(uint64_t tag) const {
        Rng r;
        r.key_ = splitmix64(key_ ^ splitmix64(tag ^ 0xa0761d6478bd642fULL));
        r.ctr_ = 0;
        return r;
    }

    // Distinct indices in [0, n), order-stable for a given seed.
    std::vector<uint64_t> sample_distinct(uint64_t n, uint64_t k);

private:
    uint64_t key_;
    uint64_t ctr_;
};

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4).  Small and dependency-free; used for place-list
// digests in table files, not for anything security sensitive.

class Sha256 {
public:
    Sha256() { reset(); }
    void reset();
    void update(const uint8_t* data, size_t len);
    void update(const std::vector<uint8_t>& v) { update(v.data(), v.size()); }
    std::array<uint8_t, 32> finish();

    static std::array<uint8_t, 32> digest(const uint8_t* data, size_t len) {
        Sha256 h;
        h.update(data, len);
        return h.finish();
    }

private:
    void compress(const uint8_t* block);
    uint32_t h_[8];
    uint64_t total_;
    uint8_t buf_[64];
    size_t buflen_;
};

std::string hex_string(const uint8_t* data, size_t len);
inline std::string hex_string(const std::array<uint8_t, 32>& d) { return hex_string(d.data(), d.size()); }

// Stored data fails its digest or no longer matches what it claims to
// describe; distinct from usage errors so callers can map it to a dedicated
// exit status.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Byte IO, little endian throughout.

class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back((uint8_t)(v & 0xff));
        buf_.push_back((uint8_t)(v >> 8));
    }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; i++) buf_.push_back((uint8_t)(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; i++) buf_.push_back((uint8_t)(v >> (8 * i)));
    }
    void bytes(const uint8_t* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void bytes(const std::vector<uint8_t>& v) { bytes(v.data(), v.size()); }
    void tag(const char (&t)[5]) { bytes((const uint8_t*)t, 4); }
    void u16_vec(const std::vector<uint16_t>& v) {
        u32((uint32_t)v.size());
        for (uint16_t x : v) u16(x);
    }
    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(const uint8_t* p, size_t n) : p_(p), end_(p + n) {}
    explicit ByteReader(const std::vector<uint8_t>& v) : ByteReader(v.data(), v.size()) {}

    uint8_t u8() {
        need(1);
        return *p_++;
    }
    uint16_t u16() {
        need(2);
        uint16_t v = (uint16_t)(p_[0] | (p_[1] << 8));
        p_ += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; i++) v |= (uint32_t)p_[i] << (8 * i);
        p_ += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; i++) v |= (uint64_t)p_[i] << (8 * i);
        p_ += 8;
        return v;
    }
    void bytes(uint8_t* out, size_t n) {
        need(n);
        std::memcpy(out, p_, n);
        p_ += n;
    }
    void expect_tag(const char (&t)[5]) {
        uint8_t got[4];
        bytes(got, 4);
        if (std::memcmp(got, t, 4) != 0)
            throw std::runtime_error(std::string("bad section tag, expected '") + t + "'");
    }
    std::vector<uint16_t> u16_vec() {
        uint32_t n = u32();
        std::vector<uint16_t> v(n);
        for (auto& x : v) x = u16();
        return v;
    }
    size_t remaining() const { return (size_t)(end_ - p_); }
    bool at_end() const { return p_ == end_; }

private:
    void need(size_t n) {
        if ((size_t)(end_ - p_) < n) throw std::runtime_error("byte stream truncated");
    }
    const uint8_t* p_;
    const uint8_t* end_;
};

// ---------------------------------------------------------------------------
// Tagged section container: a sequence of (4-char tag, body) sections plus a
// trailing SHA-256 over everything before it, so any byte flip anywhere in
// the file is caught before a single section byte is interpreted.  Table
// files use this so later tooling can attach extra sections (e.g. decoder
// precomputations) without disturbing existing ones.

struct SectionFile {
    std::vector<std::pair<std::string, std::vector<uint8_t>>> sections;

    // nullptr when absent; first match wins
    const std::vector<uint8_t>* find(const std::string& tag) const;
    // replaces the first section with this tag, or appends one
    void put(const std::string& tag, std::vector<uint8_t> body);

    std::vector<uint8_t> serialize() const;
    // Throws IntegrityError on a bad digest or malformed framing.
    static SectionFile deserialize(const std::vector<uint8_t>& bytes);
};

// File helpers.
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& data);

// Codeword/message files are flat streams of 2-byte little-endian symbols.
std::vector<uint16_t> read_symbol_file(const std::string& path);
void write_symbol_file(const std::string& path, const std::vector<uint16_t>& symbols);

}  // namespace gsc
