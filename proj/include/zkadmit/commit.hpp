#pragma once

#include "ring.hpp"

namespace zkadmit::commit {

using algebra::RingElement;
using algebra::RingParams;

/* Transparent-setup linear commitment over R_t:
 *   Com(pp, M, r) = G·r + H·M ∈ R_t^k
 * G, H are expanded deterministically from a public seed; distinct labels
 * (one per committed vector kind: E / W / T) yield independent matrices. */
struct CommitParams {
    std::string label;
    size_t k = 0, l = 0, m = 0; // rows, randomness length, message length
    RingParams rp;
    std::vector<RingElement> G; // k×l, row-major
    std::vector<RingElement> H; // k×m, row-major
    Digest params_digest{};
};

inline CommitParams gen_params(const RingParams& rp, const Bytes& seed,
                               const std::string& label, size_t k, size_t l, size_t m) {
    if (seed.empty()) throw InvalidParams("empty commitment seed");
    if (k == 0 || l == 0 || m == 0) throw InvalidParams("zero commitment dimension");
    CommitParams pp;
    pp.label = label;
    pp.k = k;
    pp.l = l;
    pp.m = m;
    pp.rp = rp;
    auto expand_matrix = [&](const char* which, size_t rows, size_t cols) {
        std::vector<RingElement> mat;
        mat.reserve(rows * cols);
        for (size_t r = 0; r < rows; r++)
            for (size_t c = 0; c < cols; c++) {
                RandomStream rs(seed, "commit-matrix/" + label + "/" + which + "/" +
                                          std::to_string(r) + "/" + std::to_string(c));
                RingElement e(rp.n);
                for (size_t i = 0; i < rp.n; i++) e[i] = rs.uniform(rp.t);
                mat.push_back(std::move(e));
            }
        return mat;
    };
    pp.G = expand_matrix("G", k, l);
    pp.H = expand_matrix("H", k, m);
    Bytes hdr;
    put_u32(hdr, kEncodingVersion);
    put_bytes(hdr, seed);
    put_str(hdr, label);
    put_u64(hdr, k);
    put_u64(hdr, l);
    put_u64(hdr, m);
    put_u64(hdr, rp.t);
    put_u64(hdr, rp.n);
    pp.params_digest = hash_tagged("commit-params", hdr);
    return pp;
}

struct Commitment {
    std::string label;
    Digest params_digest{};
    std::vector<RingElement> value; // k rows

    bool operator==(const Commitment& o) const {
        return label == o.label && params_digest == o.params_digest && value == o.value;
    }
    bool operator!=(const Commitment& o) const { return !(*this == o); }
};

inline void put_commitment(Bytes& out, const Commitment& c) {
    put_str(out, c.label);
    put_digest(out, c.params_digest);
    put_u64(out, c.value.size());
    for (const auto& row : c.value) algebra::put_ring(out, row);
}

inline Bytes commitment_bytes(const Commitment& c) {
    Bytes b;
    put_commitment(b, c);
    return b;
}

inline Commitment read_commitment(ByteReader& r, const RingParams& rp) {
    Commitment c;
    c.label = r.str();
    c.params_digest = read_digest(r);
    uint64_t k = r.u64();
    c.value.reserve(k);
    for (uint64_t i = 0; i < k; i++) c.value.push_back(algebra::read_ring(r, rp));
    return c;
}

inline Commitment commit(const CommitParams& pp, const std::vector<RingElement>& M,
                         const std::vector<RingElement>& r) {
    if (M.size() != pp.m || r.size() != pp.l) throw ParamMismatch("commit operand size");
    Commitment c;
    c.label = pp.label;
    c.params_digest = pp.params_digest;
    c.value.reserve(pp.k);
    for (size_t row = 0; row < pp.k; row++) {
        RingElement acc = algebra::ring_zero(pp.rp);
        for (size_t j = 0; j < pp.l; j++)
            acc = algebra::ring_add(pp.rp, acc, algebra::ring_mul(pp.rp, pp.G[row * pp.l + j], r[j]));
        for (size_t j = 0; j < pp.m; j++)
            acc = algebra::ring_add(pp.rp, acc, algebra::ring_mul(pp.rp, pp.H[row * pp.m + j], M[j]));
        c.value.push_back(std::move(acc));
    }
    return c;
}

/* Commit to vectors over F_p via the canonical constant-coefficient lift. */
inline Commitment commit_fields(const CommitParams& pp, const std::vector<uint64_t>& M,
                                const std::vector<uint64_t>& r) {
    std::vector<RingElement> Me, re;
    Me.reserve(M.size());
    re.reserve(r.size());
    for (uint64_t v : M) Me.push_back(algebra::embed(pp.rp, v));
    for (uint64_t v : r) re.push_back(algebra::embed(pp.rp, v));
    return commit(pp, Me, re);
}

inline Commitment zero_commitment(const CommitParams& pp) {
    return commit(pp, std::vector<RingElement>(pp.m, algebra::ring_zero(pp.rp)),
                  std::vector<RingElement>(pp.l, algebra::ring_zero(pp.rp)));
}

/* c1 + v^power · c2, the commitment-side fold rule (power ∈ {1, 2}). The
 * challenge power is taken in F_p first, then acts through the canonical
 * lift, mirroring the field-side fold exactly. */
inline Commitment fold_commitments(const RingParams& rp, const algebra::Field& fp,
                                   const Commitment& c1, const Commitment& c2,
                                   uint64_t v, int power) {
    if (c1.label != c2.label || c1.params_digest != c2.params_digest)
        throw ParamMismatch("commitment label/params mismatch");
    if (c1.value.size() != c2.value.size()) throw ParamMismatch("commitment rows");
    if (power != 1 && power != 2) throw InvalidParams("fold power must be 1 or 2");
    uint64_t scale = power == 2 ? fp.mul(v, v) : v;
    scale %= rp.t;
    Commitment out;
    out.label = c1.label;
    out.params_digest = c1.params_digest;
    out.value.reserve(c1.value.size());
    for (size_t i = 0; i < c1.value.size(); i++)
        out.value.push_back(algebra::ring_add(
            rp, c1.value[i], algebra::ring_scalar_mul(rp, scale, c2.value[i])));
    return out;
}

} // namespace zkadmit::commit
