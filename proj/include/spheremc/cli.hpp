#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bench.hpp"
#include "estimators.hpp"
#include "pointset.hpp"
#include "region.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "util.hpp"

namespace spheremc {

namespace detail {

// Family name or file path; fixed-dimension families ignore requested_dim.
inline PointSet resolve_lattice(const std::string& entry, int requested_dim, int threads) {
    if (entry == "auto") {
        if (requested_dim < 1) throw std::invalid_argument("lattice 'auto' needs --dim");
        return build_pointset(table_family(requested_dim), requested_dim, threads);
    }
    if (looks_like_family(entry)) {
        LatticeFamily fam = parse_family(entry);
        int d = requested_dim;
        if (fam == LatticeFamily::e6) d = 6;
        if (fam == LatticeFamily::e7) d = 7;
        if (fam == LatticeFamily::e8) d = 8;
        if (fam == LatticeFamily::bw16) d = 16;
        if (fam == LatticeFamily::leech) d = 24;
        if (d < 1) throw std::invalid_argument("lattice family '" + entry + "' needs --dim");
        return build_pointset(fam, d, threads);
    }
    return load_pointset(entry);
}

inline void print_kv(std::ostream& out, const char* key, const std::string& value) {
    out << key << " = " << value << "\n";
}

}  // namespace detail

/// Entry point behind the binary: args excludes the program name. Returns the
/// process exit code: 0 success, 1 usage error, 2 data/numerical error (which
/// includes failed verifications).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spherical Monte Carlo estimation of multivariate normal probabilities"};
    app.require_subcommand(1);

    // ---- lattice-build ----
    auto* build = app.add_subcommand("lattice-build",
                                     "Construct a lattice shortest-vector set and write it to a file");
    std::string b_family;
    int b_dim = 0;
    std::string b_out;
    int b_threads = default_thread_count();
    build->add_option("--family", b_family, "zd, ad, dd, e6, e7, e8, bw16 or leech")->required();
    build->add_option("--dim", b_dim, "dimension (zd/ad/dd only; fixed for the rest)");
    build->add_option("--out", b_out, "output file")->required();
    build->add_option("--threads", b_threads, "worker threads for the self-check scans");

    // ---- lattice-verify ----
    auto* verify = app.add_subcommand("lattice-verify",
                                      "Check cardinality, symmetry, minimal distance and design strength");
    std::string v_in, v_family;
    int v_dim = 0, v_t = -1, v_threads = default_thread_count();
    double v_tol = 1e-10;
    verify->add_option("--in", v_in, "point-set file to verify");
    verify->add_option("--family", v_family, "verify a built-in family instead of a file");
    verify->add_option("--dim", v_dim, "dimension (with --family zd/ad/dd)");
    verify->add_option("--t", v_t, "design strength to test (default: the family's known strength)");
    verify->add_option("--tol", v_tol, "max allowed moment deviation")->capture_default_str();
    verify->add_option("--threads", v_threads, "worker threads");

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "Estimate P{X in A} for X ~ N(0, Sigma)");
    std::string e_region, e_cov = "identity", e_estimator = "sph", e_lattice = "auto";
    int e_dim = 0, e_threads = default_thread_count();
    std::size_t e_samples = 10000;
    std::uint64_t e_seed = 0;
    est->add_option("--region", e_region,
                    "E1..E3, O1..O3, R1..R3, S, or box:/ell:/union: spec")->required();
    est->add_option("--dim", e_dim, "dimension")->required();
    est->add_option("--cov", e_cov, "identity, one-factor:rho or ar1:rho")->capture_default_str();
    est->add_option("--estimator", e_estimator, "crude, crude-at, sph, sph-at or sph-star")->capture_default_str();
    est->add_option("--lattice", e_lattice, "auto, a family name, or a point-set file")->capture_default_str();
    est->add_option("--samples", e_samples, "replicates")->capture_default_str();
    est->add_option("--seed", e_seed, "random seed")->capture_default_str();
    est->add_option("--threads", e_threads, "worker threads");

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Run a benchmark grid and emit one row per cell");
    std::string bn_config, bn_out, bn_format;
    std::uint64_t bn_seed = 0;
    bool bn_timing = false, bn_aggregate = false, bn_quiet = false;
    int bn_threads = 0;
    bench->add_option("--config", bn_config, "grid file (key = value lines); default grid when omitted");
    bench->add_option("--out", bn_out, "write rows here instead of standard output");
    bench->add_option("--format", bn_format, "csv or md (overrides the config)");
    CLI::Option* bn_seed_opt = bench->add_option("--seed", bn_seed, "override the config seed");
    bench->add_option("--threads", bn_threads, "override the config thread count");
    bench->add_flag("--timing", bn_timing, "append a wall_seconds column (not byte-reproducible)");
    bench->add_flag("--aggregate", bn_aggregate, "emit per-region-class averages to standard output");
    bench->add_flag("--quiet", bn_quiet, "suppress progress lines");

    // ---- cap-test ----
    auto* cap = app.add_subcommand("cap-test",
                                   "Empirical variance of the rotated-set cap estimator vs theory");
    std::string c_lattice;
    int c_dim = 0, c_threads = default_thread_count();
    double c_theta = 0.0;
    std::size_t c_samples = 100000, c_nparts = 0;
    std::uint64_t c_seed = 0;
    cap->add_option("--lattice", c_lattice, "family name or point-set file")->required();
    cap->add_option("--dim", c_dim, "dimension (zd/ad/dd families)");
    cap->add_option("--theta", c_theta, "cap angle in radians")->required();
    cap->add_option("--samples", c_samples, "rotations to draw")->capture_default_str();
    cap->add_option("--n-parts", c_nparts,
                    "pieces in a diameter-bounded decomposition of the cap (for the variance bound "
                    "outside the single-point regime; a built-in cover count is used when omitted)");
    cap->add_option("--seed", c_seed, "random seed")->capture_default_str();
    cap->add_option("--threads", c_threads, "worker threads");

    std::vector<const char*> argv;
    argv.push_back("spheremc");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) {
            PointSet ps = detail::resolve_lattice(b_family, b_dim, b_threads);
            save_pointset(ps, b_out);
            detail::print_kv(out, "lattice", ps.name);
            detail::print_kv(out, "dim", std::to_string(ps.dim));
            detail::print_kv(out, "card_v", std::to_string(ps.size()));
            detail::print_kv(out, "min_distance", format_double(min_distance(ps, b_threads)));
            detail::print_kv(out, "centrally_symmetric", ps.centrally_symmetric ? "1" : "0");
            detail::print_kv(out, "out", b_out);
            return 0;
        }

        if (verify->parsed()) {
            if (v_in.empty() == v_family.empty())
                throw std::invalid_argument("lattice-verify: pass exactly one of --in or --family");
            PointSet ps = v_in.empty() ? detail::resolve_lattice(v_family, v_dim, v_threads)
                                       : load_pointset(v_in);
            int t = v_t;
            if (t < 0) {
                if (!v_family.empty()) {
                    t = design_strength(parse_family(v_family), ps.dim);
                } else {
                    throw std::invalid_argument("lattice-verify: --t is required with --in");
                }
            }
            auto monomials = default_design_monomials(ps.dim, t);
            double dev = verify_t_design(ps, monomials, v_threads);
            double dmin = min_distance(ps, v_threads);
            bool pass = dev <= v_tol;
            detail::print_kv(out, "lattice", ps.name);
            detail::print_kv(out, "dim", std::to_string(ps.dim));
            detail::print_kv(out, "card_v", std::to_string(ps.size()));
            detail::print_kv(out, "centrally_symmetric", ps.centrally_symmetric ? "1" : "0");
            detail::print_kv(out, "min_distance", format_double(dmin));
            detail::print_kv(out, "t", std::to_string(t));
            detail::print_kv(out, "monomials_checked", std::to_string(monomials.size()));
            detail::print_kv(out, "max_moment_deviation", format_double(dev));
            detail::print_kv(out, "tolerance", format_double(v_tol));
            detail::print_kv(out, "verdict", pass ? "PASS" : "FAIL");
            return pass ? 0 : 2;
        }

        if (est->parsed()) {
            EstimatorKind kind = parse_estimator(e_estimator);
            Region region = parse_region(e_region, e_dim);
            Problem prob = make_problem(detail::parse_covariance(e_cov), std::move(region));
            PointSet ps;
            const PointSet* psp = nullptr;
            if (needs_pointset(kind)) {
                ps = detail::resolve_lattice(e_lattice, e_dim, e_threads);
                if (ps.dim != e_dim)
                    throw std::invalid_argument("lattice dimension " + std::to_string(ps.dim)
                                                + " does not match --dim " + std::to_string(e_dim));
                psp = &ps;
            }
            RandomStream stream(e_seed, 0);
            EstimateResult r = estimate(kind, prob, psp, e_samples, stream, e_threads);
            detail::print_kv(out, "estimate", format_double(r.estimate));
            detail::print_kv(out, "std_error", format_double(standard_error(r)));
            detail::print_kv(out, "variance", format_double(r.sample_variance));
            detail::print_kv(out, "replicates", std::to_string(r.replicates));
            detail::print_kv(out, "cost_per_replicate", std::to_string(r.cost_per_replicate));
            if (r.cost_excludes_cdf)
                detail::print_kv(out, "cost_note", "radial CDF evaluations are not counted");
            if (psp) {
                detail::print_kv(out, "lattice", ps.name);
                detail::print_kv(out, "card_v", std::to_string(ps.size()));
            }
            detail::print_kv(out, "zero_variance", r.zero_variance ? "1" : "0");
            detail::print_kv(out, "seed", std::to_string(r.seed));
            detail::print_kv(out, "stream_id", std::to_string(r.stream_id));
            detail::print_kv(out, "generator", r.generator);
            return 0;
        }

        if (bench->parsed()) {
            GridConfig cfg;
            if (bn_config.empty()) {
                cfg = default_grid();
            } else {
                std::ifstream f(bn_config);
                if (!f) throw std::runtime_error("bench: cannot open config '" + bn_config + "'");
                cfg = parse_config(f);
            }
            if (!bn_out.empty()) cfg.out_path = bn_out;
            if (!bn_format.empty()) {
                if (bn_format != "csv" && bn_format != "md")
                    throw std::invalid_argument("bench: format must be csv or md");
                cfg.format = bn_format;
            }
            if (bn_seed_opt->count() > 0) cfg.seed = bn_seed;
            if (bn_threads > 0) cfg.threads = bn_threads;
            if (bn_timing) cfg.timing = true;
            auto rows = run_grid(cfg, bn_quiet ? nullptr : &err);
            if (!cfg.out_path.empty()) {
                std::ofstream f(cfg.out_path);
                if (!f) throw std::runtime_error("bench: cannot open '" + cfg.out_path + "' for writing");
                emit_rows(rows, cfg.format, f, cfg.timing);
                if (!f) throw std::runtime_error("bench: write to '" + cfg.out_path + "' failed");
                err << "wrote " << rows.size() << " rows to " << cfg.out_path << "\n";
            } else if (!bn_aggregate) {
                emit_rows(rows, cfg.format, out, cfg.timing);
            }
            if (bn_aggregate) emit_aggregate(aggregate_by_region_class(rows), cfg.format, out);
            return 0;
        }

        if (cap->parsed()) {
            PointSet ps = detail::resolve_lattice(c_lattice, c_dim, c_threads);
            int d = ps.dim;
            double dmin = min_distance(ps, c_threads);
            double pi_a = cap_measure(c_theta, d);
            Vector axis(d, 0.0);
            axis[0] = 1.0;
            RandomStream stream(c_seed, 0);
            EstimateResult r = estimate_cap_rotation(ps, axis, c_theta, c_samples, stream, c_threads);
            double var_se = variance_standard_error(r);
            double cap_diam = 2.0 * std::sin(std::min(c_theta, 0.5 * M_PI));
            bool single_point = cap_diam < dmin;
            long long max_count = std::llround(r.max_value * static_cast<double>(ps.size()));
            detail::print_kv(out, "lattice", ps.name);
            detail::print_kv(out, "card_v", std::to_string(ps.size()));
            detail::print_kv(out, "min_distance", format_double(dmin));
            detail::print_kv(out, "theta", format_double(c_theta));
            detail::print_kv(out, "cap_measure", format_double(pi_a));
            detail::print_kv(out, "rotations", std::to_string(r.replicates));
            detail::print_kv(out, "estimate", format_double(r.estimate));
            detail::print_kv(out, "empirical_variance", format_double(r.sample_variance));
            detail::print_kv(out, "variance_std_error", format_double(var_se));
            detail::print_kv(out, "max_cap_hits", std::to_string(max_count));
            detail::print_kv(out, "regime", single_point ? "single-point" : "multi-point");
            if (single_point) {
                double exact = pi_a / static_cast<double>(ps.size()) - pi_a * pi_a;
                bool pass = std::abs(r.sample_variance - exact) <= 3.0 * var_se;
                detail::print_kv(out, "exact_variance", format_double(exact));
                detail::print_kv(out, "abs_difference", format_double(std::abs(r.sample_variance - exact)));
                detail::print_kv(out, "verdict", pass ? "PASS" : "FAIL");
                return pass ? 0 : 2;
            }
            err << "warning: cap diameter " << format_double(cap_diam) << " is not below min distance "
                << format_double(dmin) << "; checking the decomposition bound instead\n";
            std::size_t n_parts = c_nparts > 0 ? c_nparts : cap_cover_count(d, c_theta, dmin);
            double bound = variance_upper_bound(pi_a, n_parts, ps.size());
            bool pass = r.sample_variance <= bound + 3.0 * var_se;
            detail::print_kv(out, "n_parts", std::to_string(n_parts));
            detail::print_kv(out, "variance_bound", format_double(bound));
            detail::print_kv(out, "verdict", pass ? "PASS" : "FAIL");
            return pass ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace spheremc
