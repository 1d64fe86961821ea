#pragma once

#include <algorithm>
#include <iosfwd>
#include <sstream>

#include "field.hpp"

namespace zkadmit::relation {

using algebra::Field;
using algebra::FieldVec;

struct SparseMatrix {
    struct Entry {
        uint32_t row;
        uint32_t col;
        uint64_t val;
        bool operator==(const Entry&) const = default;
    };
    size_t rows = 0, cols = 0;
    std::vector<Entry> entries; // sorted by (row, col)

    bool operator==(const SparseMatrix&) const = default;

    void sort() {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
    }

    FieldVec mat_vec(const Field& f, const FieldVec& z) const {
        if (z.size() != cols) throw ParamMismatch("matrix-vector dimension");
        FieldVec out(rows, 0);
        for (const Entry& e : entries)
            out[e.row] = f.add(out[e.row], f.mul(e.val, z[e.col]));
        return out;
    }
};

/* Constraint system (AZ)∘(BZ) = u·(CZ) + E with Z = (W, x, u):
 * indices [0, |W|) are witness slots, [|W|, |W|+|x|) public-input slots,
 * and the last slot holds the relaxation scalar u (1 for standard R1CS). */
struct R1CSShape {
    size_t m_c = 0;        // constraint count
    size_t num_witness = 0;
    size_t num_public = 0;
    SparseMatrix A, B, C;

    size_t l_z() const { return num_witness + num_public + 1; }
    size_t u_index() const { return num_witness + num_public; }

    bool operator==(const R1CSShape&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, m_c);
        put_u64(b, num_witness);
        put_u64(b, num_public);
        for (const SparseMatrix* m : {&A, &B, &C}) {
            put_u64(b, m->entries.size());
            for (const auto& e : m->entries) {
                put_u32(b, e.row);
                put_u32(b, e.col);
                put_u64(b, e.val);
            }
        }
        return b;
    }

    Digest digest() const { return hash_tagged("r1cs-shape", serialize()); }
};

inline FieldVec build_z(const R1CSShape& s, const FieldVec& W, const FieldVec& x, uint64_t u) {
    if (W.size() != s.num_witness || x.size() != s.num_public)
        throw ParamMismatch("assignment length");
    FieldVec z;
    z.reserve(s.l_z());
    z.insert(z.end(), W.begin(), W.end());
    z.insert(z.end(), x.begin(), x.end());
    z.push_back(u);
    return z;
}

/* (AZ)∘(BZ) − u·(CZ): zero exactly when the relaxed relation holds with E=0;
 * equals the error vector E a satisfying relaxed pair must carry. */
inline FieldVec relaxed_residual(const Field& f, const R1CSShape& s, const FieldVec& x,
                                 uint64_t u, const FieldVec& W) {
    FieldVec z = build_z(s, W, x, u);
    FieldVec az = s.A.mat_vec(f, z);
    FieldVec bz = s.B.mat_vec(f, z);
    FieldVec cz = s.C.mat_vec(f, z);
    FieldVec r(s.m_c);
    for (size_t i = 0; i < s.m_c; i++)
        r[i] = f.sub(f.mul(az[i], bz[i]), f.mul(u, cz[i]));
    return r;
}

inline bool check_r1cs(const Field& f, const R1CSShape& s, const FieldVec& x, const FieldVec& W) {
    FieldVec r = relaxed_residual(f, s, x, 1, W);
    return std::all_of(r.begin(), r.end(), [](uint64_t v) { return v == 0; });
}

inline bool check_relaxed(const Field& f, const R1CSShape& s, const FieldVec& x, uint64_t u,
                          const FieldVec& W, const FieldVec& E) {
    if (E.size() != s.m_c) throw ParamMismatch("error vector length");
    FieldVec r = relaxed_residual(f, s, x, u, W);
    for (size_t i = 0; i < s.m_c; i++)
        if (r[i] != E[i]) return false;
    return true;
}

/* Shape text interchange: a header line, then three sections A/B/C with one
 * "row col value" triplet per line. */
inline std::string export_shape(const R1CSShape& s) {
    std::ostringstream out;
    out << "r1cs-triplets 1 " << s.m_c << " " << s.num_witness << " " << s.num_public << "\n";
    const char* names[3] = {"A", "B", "C"};
    const SparseMatrix* mats[3] = {&s.A, &s.B, &s.C};
    for (int i = 0; i < 3; i++) {
        out << names[i] << "\n";
        for (const auto& e : mats[i]->entries)
            out << e.row << " " << e.col << " " << e.val << "\n";
    }
    return out.str();
}

inline R1CSShape import_shape(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    int version = 0;
    R1CSShape s;
    in >> magic >> version >> s.m_c >> s.num_witness >> s.num_public;
    if (magic != "r1cs-triplets" || version != 1 || !in)
        throw IntegrityError("bad shape header");
    SparseMatrix* mats[3] = {&s.A, &s.B, &s.C};
    std::string line;
    std::getline(in, line);
    int section = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "A" || line == "B" || line == "C") {
            section = line[0] - 'A';
            continue;
        }
        if (section < 0) throw IntegrityError("triplet before section header");
        std::istringstream ls(line);
        SparseMatrix::Entry e{};
        if (!(ls >> e.row >> e.col >> e.val)) throw IntegrityError("bad triplet line");
        mats[section]->entries.push_back(e);
    }
    for (SparseMatrix* m : mats) {
        m->rows = s.m_c;
        m->cols = s.l_z();
        for (const auto& e : m->entries)
            if (e.row >= m->rows || e.col >= m->cols)
                throw IntegrityError("triplet out of range");
        m->sort();
    }
    return s;
}

} // namespace zkadmit::relation
