#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "util.hpp"

namespace spheremc {

struct integrity_error : std::runtime_error {
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

// Finite set of unit vectors in R^d, stored row-major. min_dist is the
// smallest pairwise distance; builders fill it from an exact self-check,
// loaders leave it empty until someone asks.
struct PointSet {
    int dim = 0;
    std::string name;
    std::size_t n = 0;
    std::vector<double> coords;
    std::optional<double> min_dist;
    bool centrally_symmetric = false;

    std::size_t size() const { return n; }
    const double* vec(std::size_t i) const { return coords.data() + static_cast<std::size_t>(dim) * i; }
    double* vec(std::size_t i) { return coords.data() + static_cast<std::size_t>(dim) * i; }
};

enum class LatticeFamily { zd, ad, dd, e6, e7, e8, bw16, leech };

inline std::string to_string(LatticeFamily f) {
    switch (f) {
        case LatticeFamily::zd: return "zd";
        case LatticeFamily::ad: return "ad";
        case LatticeFamily::dd: return "dd";
        case LatticeFamily::e6: return "e6";
        case LatticeFamily::e7: return "e7";
        case LatticeFamily::e8: return "e8";
        case LatticeFamily::bw16: return "bw16";
        case LatticeFamily::leech: return "leech";
    }
    return "?";
}

inline LatticeFamily parse_family(const std::string& s) {
    if (s == "zd") return LatticeFamily::zd;
    if (s == "ad") return LatticeFamily::ad;
    if (s == "dd") return LatticeFamily::dd;
    if (s == "e6") return LatticeFamily::e6;
    if (s == "e7") return LatticeFamily::e7;
    if (s == "e8") return LatticeFamily::e8;
    if (s == "bw16") return LatticeFamily::bw16;
    if (s == "leech") return LatticeFamily::leech;
    throw std::invalid_argument("unknown lattice family '" + s + "'");
}

/// Family used by default at dimension d (the point count / design strength
/// sweet spot per dimension).
inline LatticeFamily table_family(int d) {
    switch (d) {
        case 1: return LatticeFamily::zd;
        case 2:
        case 3: return LatticeFamily::ad;
        case 4:
        case 5: return LatticeFamily::dd;
        case 6: return LatticeFamily::e6;
        case 7: return LatticeFamily::e7;
        case 8: return LatticeFamily::e8;
        case 16: return LatticeFamily::bw16;
        case 24: return LatticeFamily::leech;
        default: return d >= 3 ? LatticeFamily::dd : LatticeFamily::zd;
    }
}

/// Exact spherical design strength of the family's shortest-vector set.
inline int design_strength(LatticeFamily f, int d) {
    switch (f) {
        case LatticeFamily::zd: return 3;
        case LatticeFamily::ad: return d == 2 ? 5 : 3;
        case LatticeFamily::dd: return d == 4 ? 5 : 3;
        case LatticeFamily::e6: return 5;
        case LatticeFamily::e7: return 5;
        case LatticeFamily::e8: return 7;
        case LatticeFamily::bw16: return 7;
        case LatticeFamily::leech: return 11;
    }
    return 0;
}

namespace detail {

// ---- pairwise scans -------------------------------------------------------

inline double min_distance_scan(const PointSet& ps, int threads) {
    std::size_t n = ps.size();
    int d = ps.dim;
    if (n < 2) return std::numeric_limits<double>::infinity();
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    parallel_for(n - 1, threads, [&](std::size_t i) {
        const double* vi = ps.vec(i);
        double b = best[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* vj = ps.vec(j);
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                double diff = vi[k] - vj[k];
                s += diff * diff;
            }
            b = std::min(b, s);
        }
        best[i] = b;
    });
    double m = *std::min_element(best.begin(), best.end());
    return std::sqrt(m);
}

// Maximum inner product over distinct pairs of integer vectors (row-major,
// padded stride). Exact; used for the big constructions where the O(n^2)
// double scan would be needlessly slow.
inline int max_pair_ip_int(const std::vector<std::int16_t>& a, std::size_t n, int d, int stride,
                           int threads) {
    std::vector<int> best(n, std::numeric_limits<int>::min());
    parallel_for(n - 1, threads, [&](std::size_t i) {
        const std::int16_t* vi = a.data() + i * stride;
        int b = best[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int16_t* vj = a.data() + j * stride;
            int s = 0;
            for (int k = 0; k < d; ++k) s += static_cast<int>(vi[k]) * vj[k];
            b = std::max(b, s);
        }
        best[i] = b;
    });
    return *std::max_element(best.begin(), best.end());
}

// ---- antipodal structure --------------------------------------------------

inline constexpr double kMatchTol = 1e-9;

inline bool lex_less_eps(const double* u, const double* v, int d) {
    for (int k = 0; k < d; ++k) {
        if (u[k] < v[k] - kMatchTol) return true;
        if (u[k] > v[k] + kMatchTol) return false;
    }
    return false;
}

inline bool close_all(const double* u, const double* v, int d) {
    for (int k = 0; k < d; ++k)
        if (std::abs(u[k] - v[k]) > kMatchTol) return false;
    return true;
}

// Index of the point equal to q (within tolerance), or npos.
class PointIndex {
public:
    explicit PointIndex(const PointSet& ps) : ps_(&ps), order_(ps.size()) {
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        const PointSet& p = ps;
        std::sort(order_.begin(), order_.end(), [&p](std::size_t a, std::size_t b) {
            return lex_less_eps(p.vec(a), p.vec(b), p.dim);
        });
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t find(const double* q) const {
        const PointSet& p = *ps_;
        auto it = std::lower_bound(order_.begin(), order_.end(), q,
                                   [&p](std::size_t a, const double* key) {
                                       return lex_less_eps(p.vec(a), key, p.dim);
                                   });
        for (; it != order_.end(); ++it) {
            if (lex_less_eps(q, p.vec(*it), p.dim)) break;
            if (close_all(p.vec(*it), q, p.dim)) return *it;
        }
        return npos;
    }

private:
    const PointSet* ps_;
    std::vector<std::size_t> order_;
};

inline bool check_central_symmetry(const PointSet& ps) {
    if (ps.size() % 2 != 0) return false;
    PointIndex idx(ps);
    Vector neg(ps.dim);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double* v = ps.vec(i);
        for (int k = 0; k < ps.dim; ++k) neg[k] = -v[k];
        std::size_t j = idx.find(neg.data());
        if (j == PointIndex::npos || j == i) return false;
    }
    return true;
}

inline int leading_sign(const double* v, int d) {
    for (int k = 0; k < d; ++k) {
        if (v[k] > kMatchTol) return 1;
        if (v[k] < -kMatchTol) return -1;
    }
    return 0;
}

// (positive index, negative index) per antipodal pair, ordered by the
// positive representative's position in the set.
inline std::vector<std::pair<std::size_t, std::size_t>> antipodal_pairs(const PointSet& ps) {
    PointIndex idx(ps);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(ps.size() / 2);
    Vector neg(ps.dim);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double* v = ps.vec(i);
        if (leading_sign(v, ps.dim) <= 0) continue;
        for (int k = 0; k < ps.dim; ++k) neg[k] = -v[k];
        std::size_t j = idx.find(neg.data());
        if (j == PointIndex::npos)
            throw integrity_error("point set is not centrally symmetric (unmatched point "
                                  + std::to_string(i) + ")");
        pairs.emplace_back(i, j);
    }
    if (pairs.size() * 2 != ps.size())
        throw integrity_error("point set is not centrally symmetric (pair count mismatch)");
    return pairs;
}

// ---- binary codes ---------------------------------------------------------

// Extended binary Golay code [24,12,8]: the cyclic [23,12] quadratic-residue
// code generated by x^11+x^10+x^6+x^5+x^4+x^2+1, plus an overall parity bit.
inline const std::vector<std::uint32_t>& golay_codewords() {
    static const std::vector<std::uint32_t> words = [] {
        constexpr std::uint32_t g = 0xC75;
        std::vector<std::uint32_t> w(4096);
        for (std::uint32_t m = 0; m < 4096; ++m) {
            std::uint32_t c = 0;
            for (int i = 0; i < 12; ++i)
                if (m >> i & 1u) c ^= g << i;
            c |= static_cast<std::uint32_t>(std::popcount(c) & 1u) << 23;
            w[m] = c;
        }
        int hist[25] = {};
        for (std::uint32_t c : w) ++hist[std::popcount(c)];
        if (hist[0] != 1 || hist[8] != 759 || hist[12] != 2576 || hist[16] != 759 || hist[24] != 1)
            throw integrity_error("golay code weight profile is wrong");
        return w;
    }();
    return words;
}

// First-order Reed-Muller code RM(1,4): affine functions b + a.x on F_2^4.
inline std::vector<std::uint16_t> rm14_codewords() {
    std::vector<std::uint16_t> w;
    w.reserve(32);
    for (unsigned a = 0; a < 16; ++a)
        for (unsigned b = 0; b < 2; ++b) {
            std::uint16_t c = 0;
            for (unsigned x = 0; x < 16; ++x)
                c |= static_cast<std::uint16_t>((std::popcount(a & x) + b) & 1u) << x;
            w.push_back(c);
        }
    int hist[17] = {};
    for (std::uint16_t c : w) ++hist[std::popcount(static_cast<unsigned>(c))];
    if (hist[0] != 1 || hist[8] != 30 || hist[16] != 1)
        throw integrity_error("rm(1,4) weight profile is wrong");
    return w;
}

// ---- raw shortest-vector enumerations -------------------------------------

struct RawSet {
    int dim;                         // ambient dimension of the raw coordinates
    std::vector<double> coords;      // row-major, common squared norm `norm2i`
    double norm2i;
    std::vector<std::int16_t> icoords;  // optional exact integer copy (same order)
    std::size_t count() const { return coords.size() / static_cast<std::size_t>(dim); }
};

inline void push_row(RawSet& r, const double* v) {
    r.coords.insert(r.coords.end(), v, v + r.dim);
}

inline RawSet raw_zd(int d) {
    RawSet r{d, {}, 1.0, {}};
    Vector v(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (double s : {1.0, -1.0}) {
            v[i] = s;
            push_row(r, v.data());
            v[i] = 0.0;
        }
    return r;
}

// Roots e_i - e_j of the hyperplane sum(x) = 0 in R^{d+1}.
inline RawSet raw_ad(int d) {
    RawSet r{d + 1, {}, 2.0, {}};
    Vector v(d + 1, 0.0);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            if (i == j) continue;
            v[i] = 1.0;
            v[j] = -1.0;
            push_row(r, v.data());
            v[i] = v[j] = 0.0;
        }
    return r;
}

inline RawSet raw_dd(int d) {
    RawSet r{d, {}, 2.0, {}};
    Vector v(d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (double si : {1.0, -1.0})
                for (double sj : {1.0, -1.0}) {
                    v[i] = si;
                    v[j] = sj;
                    push_row(r, v.data());
                    v[i] = v[j] = 0.0;
                }
    return r;
}

inline RawSet raw_e8() {
    RawSet r{8, {}, 2.0, {}};
    Vector v(8, 0.0);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            for (double si : {1.0, -1.0})
                for (double sj : {1.0, -1.0}) {
                    v[i] = si;
                    v[j] = sj;
                    push_row(r, v.data());
                    v[i] = v[j] = 0.0;
                }
    for (unsigned mask = 0; mask < 256; ++mask) {
        if (std::popcount(mask) % 2 != 0) continue;
        for (int k = 0; k < 8; ++k) v[k] = (mask >> k & 1u) ? -0.5 : 0.5;
        push_row(r, v.data());
    }
    return r;
}

// Members of the e8 root system orthogonal to each vector in `perp`
// (inner products are exact multiples of 1/2, so == 0 is safe).
inline RawSet raw_e8_subsystem(const std::vector<Vector>& perp) {
    RawSet e8 = raw_e8();
    RawSet r{8, {}, 2.0, {}};
    for (std::size_t i = 0; i < e8.count(); ++i) {
        const double* v = e8.coords.data() + 8 * i;
        bool ok = true;
        for (const Vector& a : perp)
            if (dot(v, a.data(), 8) != 0.0) ok = false;
        if (ok) push_row(r, v);
    }
    return r;
}

// Barnes-Wall: Lambda_16 = {x in Z^16 : x mod 2 in RM(1,4), sum(x) = 0 mod 4}.
// Shortest vectors have squared norm 8: 480 of shape (+-2)^2 and 3840 of
// shape (+-1)^8 (even sign count) on the weight-8 RM(1,4) codewords.
inline RawSet raw_bw16() {
    RawSet r{16, {}, 8.0, {}};
    r.icoords.reserve(4320 * 16);
    std::int16_t iv[16] = {};
    auto push = [&r, &iv] {
        double dv[16];
        for (int k = 0; k < 16; ++k) dv[k] = iv[k];
        push_row(r, dv);
        r.icoords.insert(r.icoords.end(), iv, iv + 16);
    };
    for (int i = 0; i < 16; ++i)
        for (int j = i + 1; j < 16; ++j)
            for (int si : {2, -2})
                for (int sj : {2, -2}) {
                    iv[i] = static_cast<std::int16_t>(si);
                    iv[j] = static_cast<std::int16_t>(sj);
                    push();
                    iv[i] = iv[j] = 0;
                }
    for (std::uint16_t c : rm14_codewords()) {
        if (std::popcount(static_cast<unsigned>(c)) != 8) continue;
        int pos[8], np = 0;
        for (int k = 0; k < 16; ++k)
            if (c >> k & 1u) pos[np++] = k;
        for (unsigned mask = 0; mask < 256; ++mask) {
            if (std::popcount(mask) % 2 != 0) continue;
            for (int k = 0; k < 8; ++k) iv[pos[k]] = (mask >> k & 1u) ? -1 : 1;
            push();
            for (int k = 0; k < 8; ++k) iv[pos[k]] = 0;
        }
    }
    return r;
}

// Leech shortest vectors (squared norm 32), built on the Golay code:
//   1104   of shape (+-4)^2,
//   97152  of shape (+-2)^8 on an octad, even sign count,
//   98304  of shape (+-3, +-1^23): start from 1-2c and add -4*sign at one slot.
inline RawSet raw_leech() {
    const auto& golay = golay_codewords();
    RawSet r{24, {}, 32.0, {}};
    r.coords.reserve(196560u * 24u);
    r.icoords.reserve(196560u * 24u);
    std::int16_t iv[24] = {};
    auto push = [&r, &iv] {
        double dv[24];
        for (int k = 0; k < 24; ++k) dv[k] = iv[k];
        push_row(r, dv);
        r.icoords.insert(r.icoords.end(), iv, iv + 24);
    };
    for (int i = 0; i < 24; ++i)
        for (int j = i + 1; j < 24; ++j)
            for (int si : {4, -4})
                for (int sj : {4, -4}) {
                    iv[i] = static_cast<std::int16_t>(si);
                    iv[j] = static_cast<std::int16_t>(sj);
                    push();
                    iv[i] = iv[j] = 0;
                }
    for (std::uint32_t c : golay) {
        if (std::popcount(c) != 8) continue;
        int pos[8], np = 0;
        for (int k = 0; k < 24; ++k)
            if (c >> k & 1u) pos[np++] = k;
        for (unsigned mask = 0; mask < 256; ++mask) {
            if (std::popcount(mask) % 2 != 0) continue;
            for (int k = 0; k < 8; ++k) iv[pos[k]] = (mask >> k & 1u) ? -2 : 2;
            push();
            for (int k = 0; k < 8; ++k) iv[pos[k]] = 0;
        }
    }
    for (std::uint32_t c : golay)
        for (int j = 0; j < 24; ++j) {
            for (int k = 0; k < 24; ++k) iv[k] = (c >> k & 1u) ? -1 : 1;
            iv[j] = static_cast<std::int16_t>(c >> j & 1u ? 3 : -3);
            push();
        }
    for (int k = 0; k < 24; ++k) iv[k] = 0;
    return r;
}

// Orthonormal basis (as rows) of the orthogonal complement of span(subspace)
// in R^n, via re-orthogonalized Gram-Schmidt over the standard basis.
inline std::vector<Vector> orthonormal_complement(const std::vector<Vector>& subspace, int n) {
    std::vector<Vector> basis;
    auto absorb = [&basis, n](Vector v) -> bool {
        for (int pass = 0; pass < 2; ++pass)
            for (const Vector& q : basis) {
                double proj = dot(v.data(), q.data(), n);
                for (int i = 0; i < n; ++i) v[i] -= proj * q[i];
            }
        double nrm = norm2(v.data(), n);
        if (nrm < 1e-10) return false;
        for (int i = 0; i < n; ++i) v[i] /= nrm;
        basis.push_back(std::move(v));
        return true;
    };
    std::size_t k = 0;
    for (const Vector& s : subspace)
        if (absorb(s)) ++k;
    for (int j = 0; j < n && basis.size() < static_cast<std::size_t>(n); ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        absorb(e);
    }
    if (basis.size() != static_cast<std::size_t>(n))
        throw integrity_error("orthonormal_complement: basis completion failed");
    return {basis.begin() + static_cast<std::ptrdiff_t>(k), basis.end()};
}

// Express raw vectors (living in a known subspace of R^{raw.dim}) in the
// orthonormal basis `frame`; lengths are preserved.
inline PointSet project_to_frame(const RawSet& raw, const std::vector<Vector>& frame) {
    PointSet ps;
    ps.dim = static_cast<int>(frame.size());
    ps.n = raw.count();
    ps.coords.resize(ps.n * frame.size());
    double inv = 1.0 / std::sqrt(raw.norm2i);
    for (std::size_t i = 0; i < ps.n; ++i) {
        const double* v = raw.coords.data() + static_cast<std::size_t>(raw.dim) * i;
        double* out = ps.vec(i);
        for (std::size_t k = 0; k < frame.size(); ++k)
            out[k] = dot(frame[k].data(), v, raw.dim) * inv;
    }
    return ps;
}

inline PointSet normalize_in_place(const RawSet& raw) {
    PointSet ps;
    ps.dim = raw.dim;
    ps.n = raw.count();
    ps.coords = raw.coords;
    double inv = 1.0 / std::sqrt(raw.norm2i);
    for (double& x : ps.coords) x = x * inv + 0.0;  // + 0.0 canonicalizes -0
    return ps;
}

struct FamilySpec {
    std::size_t cardinality;
    double min_dist;
};

inline FamilySpec family_spec(LatticeFamily f, int d) {
    std::size_t ud = static_cast<std::size_t>(d);
    switch (f) {
        case LatticeFamily::zd: return {2 * ud, d >= 2 ? std::sqrt(2.0) : 2.0};
        case LatticeFamily::ad:
            return {ud * (ud + 1), d >= 2 ? 1.0 : 2.0};
        case LatticeFamily::dd:
            return {2 * ud * (ud - 1), d >= 3 ? 1.0 : std::sqrt(2.0)};
        case LatticeFamily::e6: return {72, 1.0};
        case LatticeFamily::e7: return {126, 1.0};
        case LatticeFamily::e8: return {240, 1.0};
        case LatticeFamily::bw16: return {4320, 1.0};
        case LatticeFamily::leech: return {196560, 1.0};
    }
    return {0, 0.0};
}

}  // namespace detail

/// Smallest pairwise distance. Uses the value cached at construction when
/// available; otherwise runs the O(n^2) scan (without caching, so shared
/// read access stays safe).
inline double min_distance(const PointSet& ps, int threads = default_thread_count()) {
    if (ps.min_dist) return *ps.min_dist;
    return detail::min_distance_scan(ps, threads);
}

/// Shortest-vector set of the family at dimension d, normalized to the unit
/// sphere. Construction self-checks (cardinality, unit norms, the known
/// minimal pairwise distance, central symmetry) throw integrity_error.
inline PointSet build_pointset(LatticeFamily family, int d, int threads = default_thread_count()) {
    using detail::RawSet;
    const char* fixed_msg = "build_pointset: family has a fixed dimension";
    PointSet ps;
    RawSet raw;
    switch (family) {
        case LatticeFamily::zd:
            if (d < 1) throw std::invalid_argument("build_pointset: zd needs d >= 1");
            raw = detail::raw_zd(d);
            ps = detail::normalize_in_place(raw);
            ps.name = "z" + std::to_string(d);
            break;
        case LatticeFamily::ad: {
            if (d < 1) throw std::invalid_argument("build_pointset: ad needs d >= 1");
            raw = detail::raw_ad(d);
            // The roots live in the hyperplane sum(x) = 0, the complement of
            // the all-ones direction in R^{d+1}.
            std::vector<Vector> ones{Vector(d + 1, 1.0)};
            ps = detail::project_to_frame(raw, detail::orthonormal_complement(ones, d + 1));
            ps.name = "a" + std::to_string(d);
            break;
        }
        case LatticeFamily::dd:
            if (d < 2) throw std::invalid_argument("build_pointset: dd needs d >= 2");
            raw = detail::raw_dd(d);
            ps = detail::normalize_in_place(raw);
            ps.name = "d" + std::to_string(d);
            break;
        case LatticeFamily::e8:
            if (d != 8) throw std::invalid_argument(fixed_msg);
            raw = detail::raw_e8();
            ps = detail::normalize_in_place(raw);
            ps.name = "e8";
            break;
        case LatticeFamily::e7: {
            if (d != 7) throw std::invalid_argument(fixed_msg);
            Vector a(8, 0.0);
            a[0] = 1.0;
            a[1] = -1.0;
            raw = detail::raw_e8_subsystem({a});
            ps = detail::project_to_frame(raw, detail::orthonormal_complement({a}, 8));
            ps.name = "e7";
            break;
        }
        case LatticeFamily::e6: {
            if (d != 6) throw std::invalid_argument(fixed_msg);
            Vector a(8, 0.0), b(8, 0.0);
            a[0] = 1.0;
            a[1] = -1.0;
            b[1] = 1.0;
            b[2] = -1.0;
            raw = detail::raw_e8_subsystem({a, b});
            ps = detail::project_to_frame(raw, detail::orthonormal_complement({a, b}, 8));
            ps.name = "e6";
            break;
        }
        case LatticeFamily::bw16:
            if (d != 16) throw std::invalid_argument(fixed_msg);
            raw = detail::raw_bw16();
            ps = detail::normalize_in_place(raw);
            ps.name = "bw16";
            break;
        case LatticeFamily::leech:
            if (d != 24) throw std::invalid_argument(fixed_msg);
            raw = detail::raw_leech();
            ps = detail::normalize_in_place(raw);
            ps.name = "leech";
            break;
    }
    for (double& x : ps.coords) x += 0.0;  // -0 -> +0 everywhere

    detail::FamilySpec spec = detail::family_spec(family, d);
    if (ps.size() != spec.cardinality)
        throw integrity_error("build_pointset: " + ps.name + " cardinality "
                              + std::to_string(ps.size()) + " != " + std::to_string(spec.cardinality));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double nrm = norm2(ps.vec(i), ps.dim);
        if (std::abs(nrm - 1.0) > 1e-12)
            throw integrity_error("build_pointset: " + ps.name + " point " + std::to_string(i)
                                  + " has norm " + format_double(nrm));
    }
    double dmin;
    if (!raw.icoords.empty()) {
        int stride = raw.dim;
        int ipmax = detail::max_pair_ip_int(raw.icoords, ps.size(), raw.dim, stride, threads);
        dmin = std::sqrt(2.0 - 2.0 * ipmax / raw.norm2i);
    } else {
        dmin = detail::min_distance_scan(ps, threads);
    }
    if (std::abs(dmin - spec.min_dist) > 1e-9)
        throw integrity_error("build_pointset: " + ps.name + " min distance " + format_double(dmin)
                              + " != " + format_double(spec.min_dist));
    ps.min_dist = dmin;
    if (!detail::check_central_symmetry(ps))
        throw integrity_error("build_pointset: " + ps.name + " is not centrally symmetric");
    ps.centrally_symmetric = true;
    return ps;
}

/// Half set V+ holding one point per antipodal pair (the representative whose
/// first nonzero coordinate is positive), in the original order.
inline PointSet positive_half(const PointSet& ps) {
    auto pairs = detail::antipodal_pairs(ps);
    PointSet half;
    half.dim = ps.dim;
    half.name = ps.name + "+";
    half.n = pairs.size();
    half.coords.reserve(half.n * ps.dim);
    for (const auto& pr : pairs) {
        const double* v = ps.vec(pr.first);
        half.coords.insert(half.coords.end(), v, v + ps.dim);
    }
    half.centrally_symmetric = false;
    return half;
}

// ---- spherical design verification ----------------------------------------

namespace detail {

inline double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline void enum_monomials_rec(int d, int pos, int remaining, MultiIndex& cur,
                               std::vector<MultiIndex>& out) {
    if (pos == d - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        enum_monomials_rec(d, pos + 1, remaining - e, cur, out);
    }
}

}  // namespace detail

/// Every monomial multi-index of total degree 1..t in d variables. Guarded
/// against combinatorial blow-up; use default_design_monomials for large d.
inline std::vector<MultiIndex> monomials_up_to_degree(int d, int t) {
    if (d < 1 || t < 0) throw std::invalid_argument("monomials_up_to_degree: bad arguments");
    double total = 0.0;
    for (int k = 1; k <= t; ++k) total += detail::binom(k + d - 1, d - 1);
    if (total > 5e6)
        throw std::invalid_argument("monomials_up_to_degree: list would have "
                                    + std::to_string(static_cast<long long>(total))
                                    + " entries; pass an explicit list instead");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(total));
    MultiIndex cur(d, 0);
    for (int k = 1; k <= t; ++k) detail::enum_monomials_rec(d, 0, k, cur, out);
    return out;
}

/// Monomial list used to verify design strength t. Full enumeration when that
/// stays small; otherwise (the 16- and 24-dimensional sets) all monomials of
/// degree <= 4 plus a fixed seeded sample of 400 per degree 5..t. The reduced
/// list is deterministic: the same (d, t) always yields the same monomials.
inline std::vector<MultiIndex> default_design_monomials(int d, int t);

/// Max absolute deviation of set averages from exact sphere moments over the
/// given monomials. Zero (within accumulation error) certifies the design
/// property on that list.
inline double verify_t_design(const PointSet& ps, const std::vector<MultiIndex>& monomials,
                              int threads = default_thread_count()) {
    std::size_t n = ps.size();
    if (n == 0) throw std::invalid_argument("verify_t_design: empty point set");
    int d = ps.dim;
    if (d > 32) throw std::invalid_argument("verify_t_design: dimension above 32 unsupported");
    for (const MultiIndex& alpha : monomials) {
        if (alpha.size() != static_cast<std::size_t>(d))
            throw std::invalid_argument("verify_t_design: monomial arity mismatch");
        for (int e : alpha)
            if (e < 0) throw std::invalid_argument("verify_t_design: negative exponent");
    }
    std::vector<double> dev(monomials.size());
    parallel_for(monomials.size(), threads, [&](std::size_t m) {
        const MultiIndex& alpha = monomials[m];
        // sparse view: (coordinate, exponent)
        int pos[32], exp[32], nnz = 0;
        for (int k = 0; k < d; ++k)
            if (alpha[k] > 0) {
                pos[nnz] = k;
                exp[nnz] = alpha[k];
                ++nnz;
            }
        KahanSum acc;
        for (std::size_t i = 0; i < n; ++i) {
            const double* v = ps.vec(i);
            double prod = 1.0;
            for (int k = 0; k < nnz; ++k) {
                double base = v[pos[k]];
                for (int e = 0; e < exp[k]; ++e) prod *= base;
            }
            acc.add(prod);
        }
        dev[m] = std::abs(acc.value() / static_cast<double>(n) - sphere_moment(alpha, d));
    });
    double worst = 0.0;
    for (double x : dev) worst = std::max(worst, x);
    return worst;
}

inline double verify_t_design(const PointSet& ps, int t, int threads = default_thread_count()) {
    return verify_t_design(ps, default_design_monomials(ps.dim, t), threads);
}

inline std::vector<MultiIndex> default_design_monomials(int d, int t) {
    if (d < 1 || t < 0) throw std::invalid_argument("default_design_monomials: bad arguments");
    double total = 0.0;
    for (int k = 1; k <= t; ++k) total += detail::binom(k + d - 1, d - 1);
    if (total <= 260000.0) return monomials_up_to_degree(d, t);

    std::vector<MultiIndex> out;
    MultiIndex cur(d, 0);
    for (int k = 1; k <= std::min(4, t); ++k) detail::enum_monomials_rec(d, 0, k, cur, out);
    // Seeded fixed sample for the high degrees.
    RandomStream pick(0x5348454d43ull, static_cast<std::uint64_t>(d) * 100 + t);
    for (int k = 5; k <= t; ++k) {
        std::vector<MultiIndex> batch;
        for (int s = 0; s < 400; ++s) {
            MultiIndex alpha(d, 0);
            for (int u = 0; u < k; ++u)
                ++alpha[static_cast<int>(pick.uniform() * d) % d];
            batch.push_back(std::move(alpha));
        }
        std::sort(batch.begin(), batch.end());
        batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
        out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
}

// ---- variance bound helpers ------------------------------------------------

/// Upper bound N pi/|V| - pi^2 on the variance of the rotated-set cap
/// estimator, valid whenever the target set splits into N pieces of diameter
/// below the set's minimal distance.
inline double variance_upper_bound(double pi_a, std::size_t n_parts, std::size_t card_v) {
    if (!(pi_a >= 0.0 && pi_a <= 1.0)) throw std::invalid_argument("variance_upper_bound: pi outside [0,1]");
    if (card_v == 0) throw std::invalid_argument("variance_upper_bound: empty point set");
    if (n_parts == 0) throw std::invalid_argument("variance_upper_bound: need at least one part");
    return static_cast<double>(n_parts) * pi_a / static_cast<double>(card_v) - pi_a * pi_a;
}

/// Count of pieces in an explicit decomposition of the cap of angle theta into
/// hyperspherical-coordinate boxes of diameter < dmin. Valid but not minimal.
inline std::size_t cap_cover_count(int d, double theta, double dmin) {
    if (d < 2) throw std::invalid_argument("cap_cover_count: d must be >= 2");
    if (!(theta > 0.0) || theta > M_PI) throw std::invalid_argument("cap_cover_count: theta outside (0, pi]");
    if (!(dmin > 0.0)) throw std::invalid_argument("cap_cover_count: dmin must be positive");
    if (d == 2) {
        // the cap is an arc of length 2 theta; a piece of angle phi has
        // diameter 2 sin(phi/2), so use strictly more pieces than 2 theta / phi
        double phi = 2.0 * std::asin(std::min(1.0, 0.5 * dmin));
        return static_cast<std::size_t>(std::floor(2.0 * theta / phi)) + 1;
    }
    // Hyperspherical box of angular half-widths delta_k has diameter at most
    // the sum of the angular ranges; split the budget evenly.
    double step = dmin / (d - 1) * (1.0 - 1e-12);
    double n = std::ceil(theta / step) * std::ceil(2.0 * M_PI / step);
    for (int k = 0; k < d - 3; ++k) n *= std::ceil(M_PI / step);
    if (n > 9e18) throw std::invalid_argument("cap_cover_count: decomposition count overflows");
    return static_cast<std::size_t>(n);
}

// ---- persistence ------------------------------------------------------------

/// Writes "d m" then one point per line, 17 significant digits.
inline void save_pointset(const PointSet& ps, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_pointset: cannot open '" + path + "' for writing");
    f << ps.dim << " " << ps.size() << "\n";
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double* v = ps.vec(i);
        for (int k = 0; k < ps.dim; ++k) {
            if (k) f << " ";
            f << format_double(v[k]);
        }
        f << "\n";
    }
    if (!f) throw std::runtime_error("save_pointset: write to '" + path + "' failed");
}

/// Reads the save_pointset format. Points must be unit length within 1e-9
/// (they are renormalized exactly); the pairwise-distance cache is left empty.
inline PointSet load_pointset(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_pointset: cannot open '" + path + "'");
    PointSet ps;
    long long d = 0, m = 0;
    if (!(f >> d >> m) || d < 1 || m < 1)
        throw std::runtime_error("load_pointset: bad header in '" + path + "'");
    if (d > 1024 || m > 50000000)
        throw std::runtime_error("load_pointset: implausible header in '" + path + "'");
    ps.dim = static_cast<int>(d);
    ps.n = static_cast<std::size_t>(m);
    ps.coords.resize(ps.n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < ps.coords.size(); ++i) {
        if (!(f >> ps.coords[i]))
            throw std::runtime_error("load_pointset: truncated data in '" + path + "'");
        if (!std::isfinite(ps.coords[i]))
            throw std::runtime_error("load_pointset: non-finite coordinate in '" + path + "'");
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double* v = ps.vec(i);
        double nrm = norm2(v, ps.dim);
        if (std::abs(nrm - 1.0) > 1e-9)
            throw std::runtime_error("load_pointset: point " + std::to_string(i)
                                     + " is not unit length (norm " + format_double(nrm) + ")");
        for (int k = 0; k < ps.dim; ++k) v[k] = v[k] / nrm + 0.0;
    }
    std::string base = path;
    std::size_t slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    ps.name = base;
    ps.centrally_symmetric = detail::check_central_symmetry(ps);
    return ps;
}

}  // namespace spheremc
