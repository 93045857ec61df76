#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "linalg.hpp"
#include "util.hpp"

namespace spheremc {

// Deterministic random stream keyed by (seed, stream_id): xoshiro256++ whose
// state is expanded from the key with splitmix64. Equal keys give equal
// sequences on every platform; distinct stream ids give independent streams
// without jump-ahead bookkeeping. substream(i) derives a child key, so
// replicate i of a simulation always sees the same draws no matter how the
// replicates are scheduled across threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t k = mix64(seed) ^ mix64(stream_id ^ 0x5851f42d4c957f2dull);
        for (auto& w : s_) {
            k = mix64(k);
            w = k;
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    static constexpr const char* generator_name = "xoshiro256++/splitmix64";

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    RandomStream substream(std::uint64_t index) const {
        return RandomStream(seed_, mix64(stream_id_ + 0x9e3779b97f4a7c15ull * (index + 1)));
    }

    std::uint64_t next_u64() {
        std::uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return r;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second deviate of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
        double a = 2.0 * M_PI * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Chi-distributed radius with d degrees of freedom: sqrt(2 G), where
    // G ~ Gamma(d/2) is drawn with Marsaglia-Tsang (boosted for shape < 1).
    double chi(int d) {
        if (d < 1) throw std::invalid_argument("chi: d must be >= 1");
        double a = 0.5 * d;
        double g;
        if (a < 1.0) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            g = gamma_mt(a + 1.0) * std::pow(u, 1.0 / a);
        } else {
            g = gamma_mt(a);
        }
        return std::sqrt(2.0 * g);
    }

    // Uniform direction on the unit sphere in R^d.
    void sphere(int d, double* out) {
        if (d < 1) throw std::invalid_argument("sphere: d must be >= 1");
        for (;;) {
            double nrm2 = 0.0;
            for (int i = 0; i < d; ++i) {
                out[i] = normal();
                nrm2 += out[i] * out[i];
            }
            if (nrm2 > 1e-24) {
                double inv = 1.0 / std::sqrt(nrm2);
                for (int i = 0; i < d; ++i) out[i] *= inv;
                return;
            }
        }
    }

    Vector sphere(int d) {
        Vector v(static_cast<std::size_t>(d));
        sphere(d, v.data());
        return v;
    }

    // Haar-distributed orthogonal matrix: d^2 standard normals filled row by
    // row, then modified Gram-Schmidt (with one re-orthogonalization pass) on
    // the columns. The GS normalization makes every pivot positive, which
    // fixes the factor uniquely, and the Gaussian start makes the result
    // Haar on the orthogonal group.
    void haar_orthogonal(int d, Matrix& t) {
        if (d < 1) throw std::invalid_argument("haar_orthogonal: d must be >= 1");
        std::size_t n = static_cast<std::size_t>(d);
        if (t.rows() != n || t.cols() != n) t = Matrix(n, n);
        for (;;) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) t(i, j) = normal();
            if (gs_inplace(t)) return;
        }
    }

    Matrix haar_orthogonal(int d) {
        Matrix t;
        haar_orthogonal(d, t);
        return t;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    // Marsaglia-Tsang for shape a >= 1.
    double gamma_mt(double a) {
        double d = a - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Column-wise MGS with re-orthogonalization; false when a column collapses
    // (caller resamples). Positive diagonal comes from normalizing by the norm.
    static bool gs_inplace(Matrix& q) {
        std::size_t n = q.rows();
        for (std::size_t j = 0; j < n; ++j) {
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t p = 0; p < j; ++p) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * q(i, p);
                    for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, p);
                }
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
            if (!(nrm > 1e-20)) return false;
            double inv = 1.0 / std::sqrt(nrm);
            for (std::size_t i = 0; i < n; ++i) q(i, j) *= inv;
        }
        return true;
    }

    std::uint64_t s_[4];
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace spheremc
