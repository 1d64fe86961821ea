#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace zkadmit {

using Bytes = std::vector<uint8_t>;

/* Error taxonomy shared by all modules. Every failure mode raised by the
 * protocol maps to exactly one of these types. */
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ZKADMIT_ERROR(NAME)                                              \
    struct NAME : Error {                                                \
        explicit NAME(const std::string& msg = #NAME) : Error(msg) {}    \
    }

ZKADMIT_ERROR(DivisionByZero);
ZKADMIT_ERROR(ParamMismatch);
ZKADMIT_ERROR(InvalidParams);
ZKADMIT_ERROR(NotSatisfied);
ZKADMIT_ERROR(InconsistentCredential);
ZKADMIT_ERROR(DepthExceeded);
ZKADMIT_ERROR(NotAParticipant);
ZKADMIT_ERROR(IncompleteShares);
ZKADMIT_ERROR(ShareBindingError);
ZKADMIT_ERROR(NoiseBudgetExceeded);
ZKADMIT_ERROR(IncompleteContribution);
ZKADMIT_ERROR(StaleUpdate);
ZKADMIT_ERROR(Unauthorized);
ZKADMIT_ERROR(IntegrityError);
ZKADMIT_ERROR(SignerNotInRing);
ZKADMIT_ERROR(DuplicateRingKey);
ZKADMIT_ERROR(InvalidBatchSize);
ZKADMIT_ERROR(CtxBindingError);
ZKADMIT_ERROR(ProofRefused);

#undef ZKADMIT_ERROR

/* Canonical serialization: fixed-width little-endian integers, length-prefixed
 * byte strings. Every digest, content address and transcript hash in the
 * system is computed over this encoding (format version 1). */
inline constexpr uint32_t kEncodingVersion = 1;

inline void put_u16(Bytes& out, uint16_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
}

inline void put_u32(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; i++) out.push_back(uint8_t(v >> (8 * i)));
}

inline void put_u64(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; i++) out.push_back(uint8_t(v >> (8 * i)));
}

inline void put_bytes(Bytes& out, const Bytes& b) {
    put_u64(out, b.size());
    out.insert(out.end(), b.begin(), b.end());
}

inline void put_str(Bytes& out, const std::string& s) {
    put_u64(out, s.size());
    out.insert(out.end(), s.begin(), s.end());
}

inline void put_u64_vec(Bytes& out, const std::vector<uint64_t>& v) {
    put_u64(out, v.size());
    for (uint64_t x : v) put_u64(out, x);
}

/* Sequential reader over canonical bytes; throws IntegrityError on underrun. */
struct ByteReader {
    const Bytes& buf;
    size_t pos = 0;

    explicit ByteReader(const Bytes& b) : buf(b) {}

    void need(size_t n) const {
        if (pos + n > buf.size()) throw IntegrityError("truncated input");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(buf[pos]) | uint16_t(buf[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; i++) v |= uint32_t(buf[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; i++) v |= uint64_t(buf[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    Bytes bytes() {
        uint64_t n = u64();
        need(n);
        Bytes b(buf.begin() + pos, buf.begin() + pos + n);
        pos += n;
        return b;
    }
    std::string str() {
        Bytes b = bytes();
        return std::string(b.begin(), b.end());
    }
    std::vector<uint64_t> u64_vec() {
        uint64_t n = u64();
        std::vector<uint64_t> v(n);
        for (uint64_t i = 0; i < n; i++) v[i] = u64();
        return v;
    }
    bool done() const { return pos == buf.size(); }
};

inline std::string to_hex(const Bytes& b) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (uint8_t c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 15]);
    }
    return s;
}

inline Bytes from_hex(const std::string& s) {
    if (s.size() % 2) throw InvalidParams("odd hex length");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidParams("bad hex digit");
    };
    Bytes b(s.size() / 2);
    for (size_t i = 0; i < b.size(); i++)
        b[i] = uint8_t(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
    return b;
}

} // namespace zkadmit
