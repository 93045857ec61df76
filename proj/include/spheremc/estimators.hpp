#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "pointset.hpp"
#include "region.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace spheremc {

enum class EstimatorKind { crude, crude_at, spherical, spherical_at, spherical_star };

inline std::string to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::crude: return "crude";
        case EstimatorKind::crude_at: return "crude-at";
        case EstimatorKind::spherical: return "sph";
        case EstimatorKind::spherical_at: return "sph-at";
        case EstimatorKind::spherical_star: return "sph-star";
    }
    return "?";
}

inline EstimatorKind parse_estimator(const std::string& s) {
    if (s == "crude") return EstimatorKind::crude;
    if (s == "crude-at") return EstimatorKind::crude_at;
    if (s == "sph") return EstimatorKind::spherical;
    if (s == "sph-at") return EstimatorKind::spherical_at;
    if (s == "sph-star") return EstimatorKind::spherical_star;
    throw std::invalid_argument("unknown estimator '" + s + "'");
}

inline bool needs_pointset(EstimatorKind k) {
    return k == EstimatorKind::spherical || k == EstimatorKind::spherical_at
        || k == EstimatorKind::spherical_star;
}

// P{X in A} target: X ~ N(mu, sigma), gamma the lower Cholesky factor.
struct Problem {
    int dim = 0;
    Vector mu;
    Matrix sigma;
    Matrix gamma;
    Region region = Region::box({0.0}, {1.0});
};

inline Problem make_problem(Vector mu, Matrix sigma, Region region) {
    Problem p;
    p.dim = region.dim();
    if (mu.size() != static_cast<std::size_t>(p.dim))
        throw std::invalid_argument("make_problem: mu length != region dimension");
    if (sigma.rows() != mu.size() || sigma.cols() != mu.size())
        throw std::invalid_argument("make_problem: sigma shape != region dimension");
    p.mu = std::move(mu);
    p.gamma = cholesky(sigma);
    p.sigma = std::move(sigma);
    p.region = std::move(region);
    return p;
}

inline Problem make_problem(const CovarianceModel& cov, Region region) {
    int d = region.dim();
    return make_problem(Vector(d, 0.0), build_covariance(cov, d), std::move(region));
}

struct EstimateResult {
    double estimate = 0.0;
    double sample_variance = 0.0;        // across replicate values, M-1 denominator
    double fourth_central_moment = 0.0;  // across replicate values
    double min_value = 0.0;              // smallest replicate value
    double max_value = 0.0;              // largest replicate value
    std::size_t replicates = 0;
    std::size_t cost_per_replicate = 0;
    bool zero_variance = false;
    bool cost_excludes_cdf = false;      // radial-integral estimator: CDF work not counted
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::string generator;
    double wall_seconds = 0.0;
};

/// Normal-draw-equivalent cost of one replicate: d per crude replicate; a
/// rotation costs (d+2)(d-1)/2 and each radius one draw, shared by a pair for
/// the antithetic kind. The radial-integral kind pays the rotation only.
inline std::size_t replicate_cost(EstimatorKind k, int d, std::size_t card_v) {
    if (d < 1) throw std::invalid_argument("replicate_cost: d must be >= 1");
    std::size_t rot = static_cast<std::size_t>(d + 2) * (d - 1) / 2;
    switch (k) {
        case EstimatorKind::crude:
        case EstimatorKind::crude_at: return static_cast<std::size_t>(d);
        case EstimatorKind::spherical: return rot + card_v;
        case EstimatorKind::spherical_at: return rot + card_v / 2;
        case EstimatorKind::spherical_star: return rot;
    }
    return 0;
}

inline double standard_error(const EstimateResult& r) {
    return std::sqrt(r.sample_variance / static_cast<double>(r.replicates));
}

/// Standard error of the sample variance itself, from the fourth central
/// moment: sqrt((m4 - s^4 (M-3)/(M-1)) / M).
inline double variance_standard_error(const EstimateResult& r) {
    double m = static_cast<double>(r.replicates);
    double s2 = r.sample_variance;
    double v = (r.fourth_central_moment - s2 * s2 * (m - 3.0) / (m - 1.0)) / m;
    return std::sqrt(std::max(v, 0.0));
}

/// Variance of `baseline` over variance of `target`; +infinity when the
/// target variance collapsed to zero (see EstimateResult::zero_variance).
inline double variance_ratio(const EstimateResult& target, const EstimateResult& baseline) {
    if (target.sample_variance <= 0.0) return std::numeric_limits<double>::infinity();
    return baseline.sample_variance / target.sample_variance;
}

/// Variance ratio weighted by per-replicate cost:
/// (var_b * cost_b) / (var_t * cost_t).
inline double penalized_variance_ratio(const EstimateResult& target, const EstimateResult& baseline) {
    double vr = variance_ratio(target, baseline);
    return vr * static_cast<double>(baseline.cost_per_replicate)
              / static_cast<double>(target.cost_per_replicate);
}

namespace detail {

// Reduces per-replicate values into an EstimateResult; replicate values are
// position-addressed, so the summary is independent of scheduling.
inline EstimateResult reduce_replicates(const std::vector<double>& ys) {
    EstimateResult r;
    r.replicates = ys.size();
    KahanSum mean_acc;
    double lo = ys[0], hi = ys[0];
    for (double y : ys) {
        mean_acc.add(y);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    double mean = mean_acc.value() / static_cast<double>(ys.size());
    KahanSum v2, v4;
    for (double y : ys) {
        double c = y - mean;
        double c2 = c * c;
        v2.add(c2);
        v4.add(c2 * c2);
    }
    r.estimate = mean;
    r.sample_variance = v2.value() / static_cast<double>(ys.size() - 1);
    r.fourth_central_moment = v4.value() / static_cast<double>(ys.size());
    r.min_value = lo;
    r.max_value = hi;
    if (hi - lo <= 1e-14) {
        r.sample_variance = 0.0;
        r.zero_variance = true;
    }
    return r;
}

template <typename ReplicateFn>
EstimateResult run_replicates(std::size_t m, const RandomStream& stream, int threads,
                              ReplicateFn&& per_chunk) {
    if (m < 2) throw std::invalid_argument("estimate: need at least 2 replicates");
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ys(m);
    if (threads < 1) threads = 1;
    std::size_t nt = std::min<std::size_t>(threads, m);
    std::size_t chunk = (m + nt - 1) / nt;
    parallel_for(nt, static_cast<int>(nt), [&](std::size_t w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(m, lo + chunk);
        if (lo < hi) per_chunk(lo, hi, ys);
    });
    EstimateResult r = reduce_replicates(ys);
    r.seed = stream.seed();
    r.stream_id = stream.stream_id();
    r.generator = RandomStream::generator_name;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline void add_mu(const Vector& mu, double* x, int d) {
    for (int k = 0; k < d; ++k) x[k] += mu[k];
}

}  // namespace detail

/// Crude Monte Carlo: mean of indicator(mu + gamma Z) over M standard normal
/// draws Z.
inline EstimateResult estimate_crude(const Problem& p, std::size_t m, const RandomStream& stream,
                                     int threads = default_thread_count()) {
    int d = p.dim;
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Vector z(d), x(d);
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                for (int k = 0; k < d; ++k) z[k] = s.normal();
                lower_tri_matvec(p.gamma, z.data(), x.data());
                detail::add_mu(p.mu, x.data(), d);
                ys[i] = contains(p.region, x.data()) ? 1.0 : 0.0;
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::crude, d, 0);
    return r;
}

/// Antithetic crude Monte Carlo: each replicate averages the indicator at
/// mu + gamma Z and mu - gamma Z.
inline EstimateResult estimate_crude_antithetic(const Problem& p, std::size_t m,
                                                const RandomStream& stream,
                                                int threads = default_thread_count()) {
    int d = p.dim;
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Vector z(d), x(d);
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                for (int k = 0; k < d; ++k) z[k] = s.normal();
                lower_tri_matvec(p.gamma, z.data(), x.data());
                double hits = 0.0;
                for (int k = 0; k < d; ++k) x[k] = p.mu[k] + x[k];
                if (contains(p.region, x.data())) hits += 1.0;
                lower_tri_matvec(p.gamma, z.data(), x.data());
                for (int k = 0; k < d; ++k) x[k] = p.mu[k] - x[k];
                if (contains(p.region, x.data())) hits += 1.0;
                ys[i] = 0.5 * hits;
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::crude_at, d, 0);
    return r;
}

namespace detail {

inline void check_pointset(const Problem& p, const PointSet& v) {
    if (v.dim != p.dim) throw std::invalid_argument("estimate: point set dimension mismatch");
    if (v.size() == 0) throw std::invalid_argument("estimate: empty point set");
}

}  // namespace detail

/// Rotated-set estimator: one Haar rotation T per replicate, one chi radius
/// per point, averaging indicator(mu + r_j gamma T v_j) over the set.
inline EstimateResult estimate_spherical(const Problem& p, const PointSet& v, std::size_t m,
                                         const RandomStream& stream,
                                         int threads = default_thread_count()) {
    detail::check_pointset(p, v);
    int d = p.dim;
    std::size_t nv = v.size();
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Matrix t(d, d), w(d, d);
            Vector wv(d), x(d);
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                s.haar_orthogonal(d, t);
                matmul(p.gamma, t, w);
                double hits = 0.0;
                for (std::size_t j = 0; j < nv; ++j) {
                    double radius = s.chi(d);
                    matvec(w, v.vec(j), wv.data());
                    for (int k = 0; k < d; ++k) x[k] = p.mu[k] + radius * wv[k];
                    if (contains(p.region, x.data())) hits += 1.0;
                }
                ys[i] = hits / static_cast<double>(nv);
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::spherical, d, nv);
    return r;
}

/// Antithetic rotated-set estimator for centrally symmetric sets: antipodal
/// pairs share one radius; the replicate averages indicators over the whole
/// set. Radii are drawn in the order of the pairs' positive representatives.
inline EstimateResult estimate_spherical_antithetic(const Problem& p, const PointSet& v,
                                                    std::size_t m, const RandomStream& stream,
                                                    int threads = default_thread_count()) {
    detail::check_pointset(p, v);
    auto pairs = detail::antipodal_pairs(v);  // throws unless centrally symmetric
    std::vector<std::size_t> reps;
    reps.reserve(pairs.size());
    for (const auto& pr : pairs) reps.push_back(pr.first);
    int d = p.dim;
    std::size_t nv = v.size();
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Matrix t(d, d), w(d, d);
            Vector wv(d), x(d);
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                s.haar_orthogonal(d, t);
                matmul(p.gamma, t, w);
                double hits = 0.0;
                for (std::size_t jp : reps) {
                    double radius = s.chi(d);
                    matvec(w, v.vec(jp), wv.data());
                    for (int k = 0; k < d; ++k) x[k] = p.mu[k] + radius * wv[k];
                    if (contains(p.region, x.data())) hits += 1.0;
                    for (int k = 0; k < d; ++k) x[k] = p.mu[k] - radius * wv[k];
                    if (contains(p.region, x.data())) hits += 1.0;
                }
                ys[i] = hits / static_cast<double>(nv);
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::spherical_at, d, nv);
    return r;
}

/// Radial-integral estimator: the chi radius is integrated out exactly along
/// each rotated direction, leaving one Haar rotation per replicate.
inline EstimateResult estimate_spherical_star(const Problem& p, const PointSet& v, std::size_t m,
                                              const RandomStream& stream,
                                              int threads = default_thread_count()) {
    detail::check_pointset(p, v);
    if (p.region.kind() == RegionKind::custom)
        throw unsupported_region("estimate: radial integrals need a geometric region");
    int d = p.dim;
    std::size_t nv = v.size();
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Matrix t(d, d), w(d, d);
            Vector wv(d);
            IntervalList scratch;
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                s.haar_orthogonal(d, t);
                matmul(p.gamma, t, w);
                KahanSum acc;
                for (std::size_t j = 0; j < nv; ++j) {
                    matvec(w, v.vec(j), wv.data());
                    acc.add(radial_integral_dir(p.region, p.mu.data(), wv.data(), scratch));
                }
                ys[i] = acc.value() / static_cast<double>(nv);
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::spherical_star, d, nv);
    r.cost_excludes_cdf = true;
    return r;
}

/// Dispatch by kind; v may be null for the crude kinds.
inline EstimateResult estimate(EstimatorKind kind, const Problem& p, const PointSet* v,
                               std::size_t m, const RandomStream& stream,
                               int threads = default_thread_count()) {
    if (needs_pointset(kind) && v == nullptr)
        throw std::invalid_argument("estimate: this estimator needs a point set");
    switch (kind) {
        case EstimatorKind::crude: return estimate_crude(p, m, stream, threads);
        case EstimatorKind::crude_at: return estimate_crude_antithetic(p, m, stream, threads);
        case EstimatorKind::spherical: return estimate_spherical(p, *v, m, stream, threads);
        case EstimatorKind::spherical_at: return estimate_spherical_antithetic(p, *v, m, stream, threads);
        case EstimatorKind::spherical_star: return estimate_spherical_star(p, *v, m, stream, threads);
    }
    throw std::invalid_argument("estimate: unknown kind");
}

/// Fraction of the rotated set inside the cap {u . axis >= cos(theta)}, one
/// Haar rotation per replicate. The per-replicate values sit in {0, 1/|V|, ...};
/// in the single-point regime (cap diameter below the set's minimal distance)
/// they never exceed 1/|V|.
inline EstimateResult estimate_cap_rotation(const PointSet& v, const Vector& axis, double theta,
                                            std::size_t m, const RandomStream& stream,
                                            int threads = default_thread_count()) {
    int d = v.dim;
    if (axis.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("estimate_cap_rotation: axis dimension mismatch");
    if (!(theta > 0.0) || theta > M_PI)
        throw std::invalid_argument("estimate_cap_rotation: theta outside (0, pi]");
    double anorm = norm2(axis.data(), axis.size());
    if (!(anorm > 0.0)) throw std::invalid_argument("estimate_cap_rotation: zero axis");
    Vector a(axis);
    for (double& c : a) c /= anorm;
    double cos_theta = std::cos(theta);
    std::size_t nv = v.size();
    EstimateResult r = detail::run_replicates(m, stream, threads,
        [&](std::size_t lo, std::size_t hi, std::vector<double>& ys) {
            Matrix t(d, d);
            Vector ta(d);
            for (std::size_t i = lo; i < hi; ++i) {
                RandomStream s = stream.substream(i);
                s.haar_orthogonal(d, t);
                // (T v) . a == v . (T' a): rotate the axis once instead of every point
                for (int k = 0; k < d; ++k) {
                    double acc = 0.0;
                    for (int row = 0; row < d; ++row) acc += t(row, k) * a[row];
                    ta[k] = acc;
                }
                double hits = 0.0;
                for (std::size_t j = 0; j < nv; ++j)
                    if (dot(v.vec(j), ta.data(), d) >= cos_theta) hits += 1.0;
                ys[i] = hits / static_cast<double>(nv);
            }
        });
    r.cost_per_replicate = replicate_cost(EstimatorKind::spherical_star, d, nv);
    return r;
}

}  // namespace spheremc
