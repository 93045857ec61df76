#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "specfun.hpp"

namespace spheremc {

struct unsupported_region : std::runtime_error {
    explicit unsupported_region(const std::string& what) : std::runtime_error(what) {}
};

struct region_parse_error : std::invalid_argument {
    explicit region_parse_error(const std::string& what) : std::invalid_argument(what) {}
};

// Closed axis-aligned box; bounds may be +-infinity.
struct Box {
    Vector lo, hi;
};

enum class RegionKind { box, ellipsoid, box_union, custom };

// Integration region in R^d: a box, a closed ball, a finite union of boxes,
// or an arbitrary indicator function. Indicator regions support membership
// tests only; the ray/antisymmetry machinery needs a geometric description.
class Region {
public:
    static Region box(Vector lo, Vector hi) {
        Region r;
        r.kind_ = RegionKind::box;
        r.dim_ = static_cast<int>(lo.size());
        r.boxes_.push_back({std::move(lo), std::move(hi)});
        r.validate();
        return r;
    }

    static Region ellipsoid(Vector center, double radius) {
        Region r;
        r.kind_ = RegionKind::ellipsoid;
        r.dim_ = static_cast<int>(center.size());
        r.center_ = std::move(center);
        r.radius_ = radius;
        r.validate();
        return r;
    }

    static Region box_union(std::vector<Box> boxes) {
        Region r;
        r.kind_ = RegionKind::box_union;
        if (boxes.empty()) throw std::invalid_argument("region: union needs at least one box");
        r.dim_ = static_cast<int>(boxes.front().lo.size());
        r.boxes_ = std::move(boxes);
        r.validate();
        return r;
    }

    static Region custom(std::function<bool(const double*, int)> indicator, int dim) {
        Region r;
        r.kind_ = RegionKind::custom;
        if (dim < 1) throw std::invalid_argument("region: dimension must be >= 1");
        if (!indicator) throw std::invalid_argument("region: null indicator");
        r.dim_ = dim;
        r.fn_ = std::move(indicator);
        return r;
    }

    RegionKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    const Vector& center() const { return center_; }
    double radius() const { return radius_; }
    const std::function<bool(const double*, int)>& indicator() const { return fn_; }
    const std::string& label() const { return label_; }
    void set_label(std::string l) { label_ = std::move(l); }

private:
    void validate() const {
        if (dim_ < 1) throw std::invalid_argument("region: dimension must be >= 1");
        for (const Box& b : boxes_) {
            if (b.lo.size() != static_cast<std::size_t>(dim_) || b.hi.size() != b.lo.size())
                throw std::invalid_argument("region: box bound length mismatch");
            for (int j = 0; j < dim_; ++j) {
                double lo = b.lo[j], hi = b.hi[j];
                if (std::isnan(lo) || std::isnan(hi) || !(lo <= hi))
                    throw std::invalid_argument("region: box needs lo <= hi on every axis");
                if (lo == std::numeric_limits<double>::infinity()
                    || hi == -std::numeric_limits<double>::infinity())
                    throw std::invalid_argument("region: empty box bound");
            }
        }
        if (kind_ == RegionKind::ellipsoid) {
            if (!(radius_ > 0.0) || !std::isfinite(radius_))
                throw std::invalid_argument("region: ball radius must be positive and finite");
            for (double c : center_)
                if (!std::isfinite(c)) throw std::invalid_argument("region: ball center must be finite");
        }
    }

    RegionKind kind_ = RegionKind::box;
    int dim_ = 0;
    std::vector<Box> boxes_;
    Vector center_;
    double radius_ = 0.0;
    std::function<bool(const double*, int)> fn_;
    std::string label_;
};

namespace detail {

inline bool box_contains(const Box& b, const double* x, int d) {
    for (int j = 0; j < d; ++j)
        if (x[j] < b.lo[j] || x[j] > b.hi[j]) return false;
    return true;
}

}  // namespace detail

inline bool contains(const Region& r, const double* x) {
    switch (r.kind()) {
        case RegionKind::box:
            return detail::box_contains(r.boxes().front(), x, r.dim());
        case RegionKind::ellipsoid: {
            double s = 0.0;
            for (int j = 0; j < r.dim(); ++j) {
                double dj = x[j] - r.center()[j];
                s += dj * dj;
            }
            return s <= r.radius() * r.radius();
        }
        case RegionKind::box_union:
            for (const Box& b : r.boxes())
                if (detail::box_contains(b, x, r.dim())) return true;
            return false;
        case RegionKind::custom:
            return r.indicator()(x, r.dim());
    }
    return false;
}

inline bool contains(const Region& r, const Vector& x) {
    if (x.size() != static_cast<std::size_t>(r.dim()))
        throw std::invalid_argument("contains: point dimension mismatch");
    return contains(r, x.data());
}

// Half-open description of {r >= 0 : mu + r w in A}: disjoint closed intervals
// sorted increasingly with positive length.
struct Interval {
    double lo, hi;
};
using IntervalList = std::vector<Interval>;

namespace detail {

// Intersection of the ray with one box, appended to out (at most one interval).
inline void box_ray(const Box& b, const double* mu, const double* w, int d, IntervalList& out) {
    double rlo = 0.0;
    double rhi = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
        if (w[j] == 0.0) {
            if (mu[j] < b.lo[j] || mu[j] > b.hi[j]) return;
            continue;
        }
        double t1 = (b.lo[j] - mu[j]) / w[j];
        double t2 = (b.hi[j] - mu[j]) / w[j];
        if (w[j] < 0.0) std::swap(t1, t2);
        if (std::isnan(t1)) t1 = -std::numeric_limits<double>::infinity();
        if (std::isnan(t2)) t2 = std::numeric_limits<double>::infinity();
        rlo = std::max(rlo, t1);
        rhi = std::min(rhi, t2);
        if (!(rlo < rhi)) return;
    }
    if (rlo < rhi) out.push_back({rlo, rhi});
}

inline void merge_intervals(IntervalList& v) {
    if (v.size() <= 1) return;
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::size_t k = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].lo <= v[k].hi) {
            v[k].hi = std::max(v[k].hi, v[i].hi);
        } else {
            v[++k] = v[i];
        }
    }
    v.resize(k + 1);
}

}  // namespace detail

/// Intervals of r >= 0 with mu + r w inside the region, for a fixed direction
/// w (not necessarily unit length). Appends nothing when the ray misses.
inline void ray_intervals_into(const Region& reg, const double* mu, const double* w, IntervalList& out) {
    out.clear();
    int d = reg.dim();
    switch (reg.kind()) {
        case RegionKind::box:
            detail::box_ray(reg.boxes().front(), mu, w, d, out);
            return;
        case RegionKind::box_union:
            for (const Box& b : reg.boxes()) detail::box_ray(b, mu, w, d, out);
            detail::merge_intervals(out);
            return;
        case RegionKind::ellipsoid: {
            // || mu + r w - c ||^2 <= radius^2, quadratic in r.
            double a = 0.0, bq = 0.0, cq = -reg.radius() * reg.radius();
            for (int j = 0; j < d; ++j) {
                double diff = mu[j] - reg.center()[j];
                a += w[j] * w[j];
                bq += 2.0 * w[j] * diff;
                cq += diff * diff;
            }
            if (a == 0.0) {
                if (cq <= 0.0) out.push_back({0.0, std::numeric_limits<double>::infinity()});
                return;
            }
            double disc = bq * bq - 4.0 * a * cq;
            if (disc <= 0.0) return;
            double sq = std::sqrt(disc);
            double r1 = (-bq - sq) / (2.0 * a);
            double r2 = (-bq + sq) / (2.0 * a);
            r1 = std::max(r1, 0.0);
            if (r1 < r2) out.push_back({r1, r2});
            return;
        }
        case RegionKind::custom:
            throw unsupported_region("ray_intervals: indicator regions have no ray description");
    }
}

inline IntervalList ray_intervals(const Region& reg, const Vector& mu, const Vector& w) {
    if (mu.size() != static_cast<std::size_t>(reg.dim()) || w.size() != mu.size())
        throw std::invalid_argument("ray_intervals: dimension mismatch");
    IntervalList out;
    ray_intervals_into(reg, mu.data(), w.data(), out);
    return out;
}

/// P{mu + R w in A} for R chi-distributed with d degrees of freedom: the sum
/// of chi CDF differences over the ray intervals.
inline double radial_integral_dir(const Region& reg, const double* mu, const double* w,
                                  IntervalList& scratch) {
    ray_intervals_into(reg, mu, w, scratch);
    double f = 0.0;
    int d = reg.dim();
    for (const Interval& iv : scratch) f += chi_cdf(iv.hi, d) - chi_cdf(iv.lo, d);
    return std::clamp(f, 0.0, 1.0);
}

/// Radial integral along the image direction w = gamma u of a unit vector u in
/// the standardized space.
inline double radial_integral(const Region& reg, const Vector& mu, const Matrix& gamma,
                              const Vector& u) {
    if (mu.size() != static_cast<std::size_t>(reg.dim()) || u.size() != mu.size()
        || gamma.rows() != mu.size() || gamma.cols() != mu.size())
        throw std::invalid_argument("radial_integral: dimension mismatch");
    Vector w(mu.size());
    matvec(gamma, u.data(), w.data());
    IntervalList scratch;
    return radial_integral_dir(reg, mu.data(), w.data(), scratch);
}

namespace detail {

// Open-interval overlap of (lo1,hi1) with (lo2,hi2).
inline bool open_overlap(double lo1, double hi1, double lo2, double hi2) {
    return std::max(lo1, lo2) < std::min(hi1, hi2);
}

// Interiors of box a and the reflection -b meet iff every axis overlaps openly.
inline bool box_reflection_overlap(const Box& a, const Box& b, int d) {
    for (int j = 0; j < d; ++j)
        if (!open_overlap(a.lo[j], a.hi[j], -b.hi[j], -b.lo[j])) return false;
    return true;
}

}  // namespace detail

/// True when the interiors of A and -A are disjoint, i.e. A meets its own
/// reflection through the origin in at most a measure-zero set. Indicator
/// regions carry no geometry to decide this and are rejected.
inline bool is_centrally_antisymmetric(const Region& reg) {
    switch (reg.kind()) {
        case RegionKind::box:
        case RegionKind::box_union: {
            for (const Box& a : reg.boxes())
                for (const Box& b : reg.boxes())
                    if (detail::box_reflection_overlap(a, b, reg.dim())) return false;
            return true;
        }
        case RegionKind::ellipsoid: {
            double c = norm2(reg.center().data(), reg.center().size());
            return c >= reg.radius() * (1.0 - 1e-12);
        }
        case RegionKind::custom:
            throw unsupported_region("is_centrally_antisymmetric: indicator regions are undecidable");
    }
    return false;
}

/// Samples n random directions and counts those where some radius r lands in
/// the region along both +w and -w, i.e. r w and -r w both lie in A with
/// positive overlap length: a nonzero count certifies that A and -A share
/// interior in the sampled frame.
template <typename Stream>
std::size_t ray_antisymmetry_violations(const Region& reg, const Vector& mu, const Matrix& gamma,
                                        std::size_t n, Stream& stream) {
    int d = reg.dim();
    Vector u(d), w(d), wn(d);
    IntervalList a, b;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
        stream.sphere(d, u.data());
        matvec(gamma, u.data(), w.data());
        for (int j = 0; j < d; ++j) wn[j] = -w[j];
        ray_intervals_into(reg, mu.data(), w.data(), a);
        ray_intervals_into(reg, mu.data(), wn.data(), b);
        bool overlap = false;
        for (const Interval& ia : a)
            for (const Interval& ib : b)
                overlap = overlap || detail::open_overlap(ia.lo, ia.hi, ib.lo, ib.hi);
        if (overlap) ++bad;
    }
    return bad;
}

/// Named study regions at dimension d. Labels: E1 E2 E3 (unit balls centred at
/// (1,0,..), (0.5,0,..), (1,..,1)), O1 O2 O3 (orthants x <= 0, x <= 1, x <= -1),
/// R1 R2 R3 (cubes [-1,1]^d, [0,2]^d, [0.5,1.5]^d), and S (the two-slab union
/// [-1,-0.5] x [-1,1]^{d-1} and [0,0.5] x [-1,1]^{d-1}, d >= 2).
inline Region standard_region(const std::string& label, int d) {
    if (d < 1) throw std::invalid_argument("standard_region: dimension must be >= 1");
    const double inf = std::numeric_limits<double>::infinity();
    auto ball = [d](double first, double rest) {
        Vector c(d, rest);
        c[0] = first;
        return Region::ellipsoid(std::move(c), 1.0);
    };
    auto cube = [d](double lo, double hi) {
        return Region::box(Vector(d, lo), Vector(d, hi));
    };
    Region r = [&]() -> Region {
        if (label == "E1") return ball(1.0, 0.0);
        if (label == "E2") return ball(0.5, 0.0);
        if (label == "E3") return ball(1.0, 1.0);
        if (label == "O1") return cube(-inf, 0.0);
        if (label == "O2") return cube(-inf, 1.0);
        if (label == "O3") return cube(-inf, -1.0);
        if (label == "R1") return cube(-1.0, 1.0);
        if (label == "R2") return cube(0.0, 2.0);
        if (label == "R3") return cube(0.5, 1.5);
        if (label == "S") {
            if (d < 2) throw std::invalid_argument("standard_region: S needs d >= 2");
            Box left{Vector(d, -1.0), Vector(d, 1.0)};
            left.lo[0] = -1.0;
            left.hi[0] = -0.5;
            Box right{Vector(d, -1.0), Vector(d, 1.0)};
            right.lo[0] = 0.0;
            right.hi[0] = 0.5;
            return Region::box_union({left, right});
        }
        throw std::invalid_argument("standard_region: unknown label '" + label + "'");
    }();
    r.set_label(label);
    return r;
}

namespace detail {

inline double parse_bound(const std::string& tok) {
    std::string t = tok;
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw region_parse_error("region: bad number '" + tok + "'");
    }
    if (pos != t.size()) throw region_parse_error("region: bad number '" + tok + "'");
    return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline Box parse_box_body(const std::string& body, int d) {
    auto axes = split(body, ';');
    if (static_cast<int>(axes.size()) != d)
        throw region_parse_error("region: box needs one 'lo,hi' pair per axis ("
                                 + std::to_string(d) + " expected, " + std::to_string(axes.size())
                                 + " given)");
    Box b{Vector(d), Vector(d)};
    for (int j = 0; j < d; ++j) {
        auto pair = split(axes[j], ',');
        if (pair.size() != 2) throw region_parse_error("region: axis spec '" + axes[j] + "' is not 'lo,hi'");
        b.lo[j] = parse_bound(pair[0]);
        b.hi[j] = parse_bound(pair[1]);
    }
    return b;
}

}  // namespace detail

/// Region text forms:
///   standard labels         E1 E2 E3 O1 O2 O3 R1 R2 R3 S
///   box:lo,hi;lo,hi;...     one pair per axis, bounds may be inf/-inf
///   ell:c1,...,cd;radius    closed ball
///   union:box:...|box:...   finite union of boxes
/// Everything wrong with the text surfaces as region_parse_error.
inline Region parse_region(const std::string& text, int d) {
    try {
        if (text.rfind("box:", 0) == 0) {
            Box b = detail::parse_box_body(text.substr(4), d);
            Region r = Region::box(std::move(b.lo), std::move(b.hi));
            r.set_label(text);
            return r;
        }
        if (text.rfind("ell:", 0) == 0) {
            auto parts = detail::split(text.substr(4), ';');
            if (parts.size() != 2) throw region_parse_error("region: ball spec is 'ell:c1,...,cd;radius'");
            auto cs = detail::split(parts[0], ',');
            if (static_cast<int>(cs.size()) != d)
                throw region_parse_error("region: ball centre needs " + std::to_string(d) + " coordinates");
            Vector c(d);
            for (int j = 0; j < d; ++j) c[j] = detail::parse_bound(cs[j]);
            Region r = Region::ellipsoid(std::move(c), detail::parse_bound(parts[1]));
            r.set_label(text);
            return r;
        }
        if (text.rfind("union:", 0) == 0) {
            auto members = detail::split(text.substr(6), '|');
            std::vector<Box> boxes;
            for (const auto& m : members) {
                if (m.rfind("box:", 0) != 0)
                    throw region_parse_error("region: union members must be box specs");
                boxes.push_back(detail::parse_box_body(m.substr(4), d));
            }
            Region r = Region::box_union(std::move(boxes));
            r.set_label(text);
            return r;
        }
        return standard_region(text, d);
    } catch (const region_parse_error&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw region_parse_error(e.what());
    }
}

}  // namespace spheremc
