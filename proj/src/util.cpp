#include "gsc/util.hpp"

#include <fstream>

namespace gsc {

std::vector<uint64_t> Rng::sample_distinct(uint64_t n, uint64_t k) {
    if (k > n) throw std::invalid_argument("sample_distinct: k exceeds population");
    // Partial Fisher-Yates over an index map; O(k) memory.
    std::vector<uint64_t> out;
    out.reserve(k);
    std::vector<std::pair<uint64_t, uint64_t>> moved;  // sparse "swapped to" map
    auto lookup = [&](uint64_t i) {
        for (auto& [a, b] : moved)
            if (a == i) return b;
        return i;
    };
    for (uint64_t i = 0; i < k; i++) {
        uint64_t j = i + below(n - i);
        uint64_t vi = lookup(i), vj = lookup(j);
        out.push_back(vj);
        // record swap: position j now holds vi
        bool found = false;
        for (auto& [a, b] : moved)
            if (a == j) {
                b = vi;
                found = true;
                break;
            }
        if (!found) moved.emplace_back(j, vi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// SHA-256

namespace {
constexpr uint32_t K256[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }
}  // namespace

void Sha256::reset() {
    static constexpr uint32_t init[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                         0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    for (int i = 0; i < 8; i++) h_[i] = init[i];
    total_ = 0;
    buflen_ = 0;
}

void Sha256::compress(const uint8_t* p) {
    uint32_t w[64];
    for (int i = 0; i < 16; i++)
        w[i] = ((uint32_t)p[4 * i] << 24) | ((uint32_t)p[4 * i + 1] << 16) |
               ((uint32_t)p[4 * i + 2] << 8) | p[4 * i + 3];
    for (int i = 16; i < 64; i++) {
        uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3];
    uint32_t e = h_[4], f = h_[5], g = h_[6], h = h_[7];
    for (int i = 0; i < 64; i++) {
        uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        uint32_t ch = (e & f) ^ (~e & g);
        uint32_t t1 = h + S1 + ch + K256[i] + w[i];
        uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        uint32_t t2 = S0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    h_[0] += a;
    h_[1] += b;
    h_[2] += c;
    h_[3] += d;
    h_[4] += e;
    h_[5] += f;
    h_[6] += g;
    h_[7] += h;
}

void Sha256::update(const uint8_t* data, size_t len) {
    total_ += len;
    while (len > 0) {
        size_t take = std::min(len, (size_t)64 - buflen_);
        std::memcpy(buf_ + buflen_, data, take);
        buflen_ += take;
        data += take;
        len -= take;
        if (buflen_ == 64) {
            compress(buf_);
            buflen_ = 0;
        }
    }
}

std::array<uint8_t, 32> Sha256::finish() {
    uint64_t bitlen = total_ * 8;
    uint8_t pad = 0x80;
    update(&pad, 1);
    uint8_t zero = 0;
    while (buflen_ != 56) update(&zero, 1);
    uint8_t lenbuf[8];
    for (int i = 0; i < 8; i++) lenbuf[i] = (uint8_t)(bitlen >> (56 - 8 * i));
    update(lenbuf, 8);
    std::array<uint8_t, 32> out;
    for (int i = 0; i < 8; i++)
        for (int j = 0; j < 4; j++) out[4 * i + j] = (uint8_t)(h_[i] >> (24 - 8 * j));
    reset();
    return out;
}

std::string hex_string(const uint8_t* data, size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (size_t i = 0; i < len; i++) {
        s.push_back(digits[data[i] >> 4]);
        s.push_back(digits[data[i] & 0xf]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Files

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file for reading: " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return data;
}

const std::vector<uint8_t>* SectionFile::find(const std::string& tag) const {
    for (const auto& [t, body] : sections)
        if (t == tag) return &body;
    return nullptr;
}

void SectionFile::put(const std::string& tag, std::vector<uint8_t> body) {
    for (auto& [t, b] : sections)
        if (t == tag) {
            b = std::move(body);
            return;
        }
    sections.emplace_back(tag, std::move(body));
}

std::vector<uint8_t> SectionFile::serialize() const {
    ByteWriter w;
    w.tag("GSCF");
    w.u32(1);
    w.u32((uint32_t)sections.size());
    for (const auto& [t, body] : sections) {
        if (t.size() != 4) throw std::invalid_argument("section tag must be 4 characters");
        w.bytes((const uint8_t*)t.data(), 4);
        w.u64(body.size());
        w.bytes(body);
    }
    std::array<uint8_t, 32> d = Sha256::digest(w.data().data(), w.data().size());
    w.tag("DGST");
    w.bytes(d.data(), d.size());
    return w.take();
}

SectionFile SectionFile::deserialize(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 48) throw IntegrityError("section file truncated");
    size_t body = bytes.size() - 36;
    if (std::memcmp(bytes.data() + body, "DGST", 4) != 0)
        throw IntegrityError("section file missing trailing digest");
    std::array<uint8_t, 32> want = Sha256::digest(bytes.data(), body);
    if (std::memcmp(bytes.data() + body + 4, want.data(), 32) != 0)
        throw IntegrityError("section file digest mismatch");
    SectionFile f;
    try {
        ByteReader r(bytes.data(), body);
        r.expect_tag("GSCF");
        if (r.u32() != 1) throw std::runtime_error("unsupported section file version");
        uint32_t n = r.u32();
        for (uint32_t i = 0; i < n; i++) {
            uint8_t tag[4];
            r.bytes(tag, 4);
            uint64_t len = r.u64();
            if (len > r.remaining()) throw std::runtime_error("section length exceeds file");
            std::vector<uint8_t> b(len);
            r.bytes(b.data(), len);
            f.sections.emplace_back(std::string((const char*)tag, 4), std::move(b));
        }
        if (!r.at_end()) throw std::runtime_error("trailing bytes after sections");
    } catch (const std::runtime_error& e) {
        // digest passed but the framing is wrong: written by something else
        throw IntegrityError(std::string("section file malformed: ") + e.what());
    }
    return f;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    f.write((const char*)data.data(), (std::streamsize)data.size());
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<uint16_t> read_symbol_file(const std::string& path) {
    auto raw = read_file(path);
    if (raw.size() % 2 != 0) throw std::runtime_error("symbol file has odd byte count: " + path);
    std::vector<uint16_t> out(raw.size() / 2);
    for (size_t i = 0; i < out.size(); i++) out[i] = (uint16_t)(raw[2 * i] | (raw[2 * i + 1] << 8));
    return out;
}

void write_symbol_file(const std::string& path, const std::vector<uint16_t>& symbols) {
    std::vector<uint8_t> raw(symbols.size() * 2);
    for (size_t i = 0; i < symbols.size(); i++) {
        raw[2 * i] = (uint8_t)(symbols[i] & 0xff);
        raw[2 * i + 1] = (uint8_t)(symbols[i] >> 8);
    }
    write_file(path, raw);
}

}  // namespace gsc
