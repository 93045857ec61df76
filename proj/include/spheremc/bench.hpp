#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "linalg.hpp"
#include "pointset.hpp"
#include "region.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace spheremc {

struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Benchmark grid: the cross product of dimensions, estimators, covariance
// models, regions, and (for the rotated-set estimators) lattices.
struct GridConfig {
    std::vector<int> dims = {2, 3, 4, 5, 6, 7, 8};
    std::vector<EstimatorKind> estimators = {
        EstimatorKind::crude, EstimatorKind::crude_at, EstimatorKind::spherical,
        EstimatorKind::spherical_at, EstimatorKind::spherical_star};
    std::vector<CovarianceModel> covariances;  // default_grid() fills the standard nine
    std::vector<std::string> regions = {"E1", "E2", "E3", "O1", "O2", "O3", "R1", "R2", "R3"};
    std::vector<std::string> lattices = {"auto"};
    std::size_t samples = 10000;
    std::size_t macro_replications = 10;
    std::uint64_t seed = 0;
    int threads = default_thread_count();
    std::string format = "csv";
    std::string out_path;
    bool timing = false;
};

inline std::vector<CovarianceModel> standard_covariances() {
    std::vector<CovarianceModel> cs;
    cs.push_back(CovarianceModel::identity());
    for (double rho : {-0.1, 0.1, 0.2, 0.3}) cs.push_back(CovarianceModel::one_factor(rho));
    for (double rho : {-0.1, 0.1, 0.2, 0.3}) cs.push_back(CovarianceModel::ar1(rho));
    return cs;
}

inline GridConfig default_grid() {
    GridConfig g;
    g.covariances = standard_covariances();
    return g;
}

// One grid cell's summary. vr/pvr are means over macro-replications of the
// per-macro variance ratios against the crude baseline of the same cell
// coordinates; *_se are standard errors across macro-replications.
struct BenchRow {
    int dim = 0;
    std::string estimator;
    std::string cov;
    std::string region;
    std::string lattice = "-";
    std::size_t card_v = 0;
    std::size_t samples = 0;
    std::size_t macros = 0;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double vr = std::numeric_limits<double>::quiet_NaN();
    double vr_se = std::numeric_limits<double>::quiet_NaN();
    double pvr = std::numeric_limits<double>::quiet_NaN();
    double pvr_se = std::numeric_limits<double>::quiet_NaN();
    std::size_t cost = 0;
    int antisymmetric = -1;  // 1 / 0 / -1 unknown
    bool zero_variance = false;
    bool cost_excludes_cdf = false;
    bool antisym_mismatch = false;
    double wall_seconds = 0.0;
    std::string error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    std::vector<std::string> clean;
    for (auto& t : out)
        if (!t.empty()) clean.push_back(t);
    return clean;
}

inline CovarianceModel parse_covariance(const std::string& s) {
    if (s == "identity") return CovarianceModel::identity();
    auto colon = s.find(':');
    std::string head = colon == std::string::npos ? s : s.substr(0, colon);
    if (head != "one-factor" && head != "ar1")
        throw config_error("unknown covariance '" + s + "'");
    if (colon == std::string::npos)
        throw config_error("covariance '" + s + "' needs a rho, e.g. " + head + ":0.2");
    double rho;
    try {
        std::size_t pos = 0;
        rho = std::stod(s.substr(colon + 1), &pos);
        if (pos != s.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw config_error("bad rho in covariance '" + s + "'");
    }
    return head == "ar1" ? CovarianceModel::ar1(rho) : CovarianceModel::one_factor(rho);
}

inline std::vector<int> parse_dims(const std::string& v) {
    std::vector<int> dims;
    for (const std::string& tok : split_list(v)) {
        auto dots = tok.find("..");
        try {
            if (dots != std::string::npos) {
                int lo = std::stoi(tok.substr(0, dots));
                int hi = std::stoi(tok.substr(dots + 2));
                if (lo < 1 || hi < lo) throw std::invalid_argument("");
                for (int d = lo; d <= hi; ++d) dims.push_back(d);
            } else {
                int d = std::stoi(tok);
                if (d < 1) throw std::invalid_argument("");
                dims.push_back(d);
            }
        } catch (const std::exception&) {
            throw config_error("bad dimension token '" + tok + "'");
        }
    }
    if (dims.empty()) throw config_error("dims list is empty");
    return dims;
}

}  // namespace detail

/// Key-value grid file: one `key = value` per line, '#' comments. Keys:
/// dims (list or a..b ranges), estimators, covariances, regions, lattices,
/// samples, macro, seed, threads, format (csv|md), out, timing.
inline GridConfig parse_config(std::istream& in) {
    GridConfig g = default_grid();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (key == "dims") {
                g.dims = detail::parse_dims(val);
            } else if (key == "estimators") {
                g.estimators.clear();
                if (val == "all") {
                    g.estimators = default_grid().estimators;
                } else {
                    for (const auto& t : detail::split_list(val)) g.estimators.push_back(parse_estimator(t));
                }
            } else if (key == "covariances") {
                g.covariances.clear();
                if (val == "standard") {
                    g.covariances = standard_covariances();
                } else {
                    for (const auto& t : detail::split_list(val))
                        g.covariances.push_back(detail::parse_covariance(t));
                }
            } else if (key == "regions") {
                g.regions = detail::split_list(val);
            } else if (key == "lattices") {
                g.lattices = detail::split_list(val);
            } else if (key == "samples") {
                g.samples = std::stoull(val);
            } else if (key == "macro" || key == "macro_replications") {
                g.macro_replications = std::stoull(val);
            } else if (key == "seed") {
                g.seed = std::stoull(val);
            } else if (key == "threads") {
                g.threads = std::stoi(val);
            } else if (key == "format") {
                if (val != "csv" && val != "md") throw config_error("format must be csv or md");
                g.format = val;
            } else if (key == "out") {
                g.out_path = val;
            } else if (key == "timing") {
                g.timing = (val == "1" || val == "true" || val == "yes");
            } else {
                throw config_error("unknown config key '" + key + "'");
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception& e) {
            throw config_error("config line " + std::to_string(lineno) + " (" + key + "): " + e.what());
        }
    }
    if (g.estimators.empty()) throw config_error("estimators list is empty");
    if (g.covariances.empty()) throw config_error("covariances list is empty");
    if (g.regions.empty()) throw config_error("regions list is empty");
    if (g.lattices.empty()) throw config_error("lattices list is empty");
    if (g.samples < 2) throw config_error("samples must be at least 2");
    if (g.macro_replications < 1) throw config_error("macro must be at least 1");
    return g;
}

inline GridConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

namespace detail {

// Regions the study literature treats as centrally antisymmetric; rows where
// the exact verdict disagrees get flagged.
inline bool claimed_antisymmetric(const std::string& label) {
    return label == "R2" || label == "O1" || label == "O3" || label == "E2" || label == "S";
}

inline std::string cell_key(int d, const std::string& est, const std::string& cov,
                            const std::string& region, const std::string& lat, std::size_t macro) {
    return "d=" + std::to_string(d) + ";est=" + est + ";cov=" + cov + ";region=" + region
         + ";lat=" + lat + ";macro=" + std::to_string(macro);
}

struct LatticeSlot {
    std::shared_ptr<const PointSet> ps;
    std::string error;
};

inline bool looks_like_family(const std::string& s) {
    return s == "zd" || s == "ad" || s == "dd" || s == "e6" || s == "e7" || s == "e8"
        || s == "bw16" || s == "leech";
}

}  // namespace detail

/// Runs the whole grid; one row per cell, in deterministic nested order
/// (dims, estimators, covariances, regions, lattices). Cell failures land in
/// the row's error field and the run continues. Identical (cell, samples,
/// macro, seed) coordinates give identical rows regardless of which other
/// cells are in the grid and of the thread count.
inline std::vector<BenchRow> run_grid(const GridConfig& cfg, std::ostream* progress = nullptr) {
    if (cfg.samples < 2) throw config_error("run_grid: samples must be at least 2");
    if (cfg.macro_replications < 1) throw config_error("run_grid: macro must be at least 1");
    std::vector<BenchRow> rows;
    std::map<std::string, EstimateResult> crude_memo;
    std::map<std::string, detail::LatticeSlot> lattice_memo;

    auto baseline = [&](const Problem& p, int d, const std::string& cov, const std::string& region,
                        std::size_t macro) -> const EstimateResult& {
        std::string key = detail::cell_key(d, "crude", cov, region, "-", macro);
        auto it = crude_memo.find(key);
        if (it == crude_memo.end()) {
            RandomStream s(cfg.seed, fnv1a64(key));
            it = crude_memo.emplace(key, estimate_crude(p, cfg.samples, s, cfg.threads)).first;
        }
        return it->second;
    };

    auto lattice_for = [&](int d, const std::string& entry) -> const detail::LatticeSlot& {
        std::string key = std::to_string(d) + ":" + entry;
        auto it = lattice_memo.find(key);
        if (it != lattice_memo.end()) return it->second;
        detail::LatticeSlot slot;
        try {
            PointSet ps;
            if (entry == "auto") {
                ps = build_pointset(table_family(d), d, cfg.threads);
            } else if (detail::looks_like_family(entry)) {
                ps = build_pointset(parse_family(entry), d, cfg.threads);
            } else {
                ps = load_pointset(entry);
                if (ps.dim != d)
                    throw std::invalid_argument("lattice file has dimension "
                                                + std::to_string(ps.dim) + ", cell wants "
                                                + std::to_string(d));
            }
            slot.ps = std::make_shared<const PointSet>(std::move(ps));
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
        return lattice_memo.emplace(key, std::move(slot)).first->second;
    };

    std::size_t total = 0;
    for (EstimatorKind est : cfg.estimators)
        total += needs_pointset(est) ? cfg.lattices.size() : 1;
    total *= cfg.dims.size() * cfg.covariances.size() * cfg.regions.size();
    std::size_t done = 0;

    for (int d : cfg.dims)
        for (EstimatorKind est : cfg.estimators) {
            std::vector<std::string> lats =
                needs_pointset(est) ? cfg.lattices : std::vector<std::string>{"-"};
            for (const CovarianceModel& cov : cfg.covariances)
                for (const std::string& region_label : cfg.regions)
                    for (const std::string& lat_entry : lats) {
                        BenchRow row;
                        row.dim = d;
                        row.estimator = to_string(est);
                        row.cov = to_string(cov);
                        row.region = region_label;
                        row.samples = cfg.samples;
                        row.macros = cfg.macro_replications;
                        auto t0 = std::chrono::steady_clock::now();
                        try {
                            Region region = parse_region(region_label, d);
                            row.antisymmetric = is_centrally_antisymmetric(region) ? 1 : 0;
                            row.antisym_mismatch =
                                detail::claimed_antisymmetric(region_label) && row.antisymmetric == 0;
                            const PointSet* ps = nullptr;
                            if (needs_pointset(est)) {
                                const detail::LatticeSlot& slot = lattice_for(d, lat_entry);
                                if (!slot.error.empty()) throw std::runtime_error(slot.error);
                                ps = slot.ps.get();
                                row.lattice = ps->name;
                                row.card_v = ps->size();
                            }
                            Problem prob = make_problem(cov, std::move(region));
                            row.cost = replicate_cost(est, d, row.card_v);
                            KahanSum est_acc, var_acc;
                            std::vector<double> vrs, pvrs;
                            vrs.reserve(cfg.macro_replications);
                            for (std::size_t macro = 0; macro < cfg.macro_replications; ++macro) {
                                std::string key = detail::cell_key(d, row.estimator, row.cov,
                                                                   row.region, row.lattice, macro);
                                EstimateResult target;
                                if (est == EstimatorKind::crude) {
                                    target = baseline(prob, d, row.cov, row.region, macro);
                                } else {
                                    RandomStream s(cfg.seed, fnv1a64(key));
                                    target = estimate(est, prob, ps, cfg.samples, s, cfg.threads);
                                }
                                const EstimateResult& base =
                                    baseline(prob, d, row.cov, row.region, macro);
                                est_acc.add(target.estimate);
                                var_acc.add(target.sample_variance);
                                if (target.zero_variance) row.zero_variance = true;
                                row.cost_excludes_cdf = target.cost_excludes_cdf;
                                vrs.push_back(variance_ratio(target, base));
                                pvrs.push_back(penalized_variance_ratio(target, base));
                            }
                            double k = static_cast<double>(cfg.macro_replications);
                            row.estimate = est_acc.value() / k;
                            row.variance = var_acc.value() / k;
                            auto mean_se = [k](const std::vector<double>& xs, double& mean, double& se) {
                                KahanSum acc;
                                for (double x : xs) acc.add(x);
                                mean = acc.value() / k;
                                if (xs.size() < 2) {
                                    se = std::numeric_limits<double>::quiet_NaN();
                                    return;
                                }
                                KahanSum dev;
                                for (double x : xs) dev.add((x - mean) * (x - mean));
                                se = std::sqrt(dev.value() / (k - 1.0) / k);
                            };
                            mean_se(vrs, row.vr, row.vr_se);
                            if (est == EstimatorKind::spherical_star) {
                                // cost accounting skips the CDF evaluations, so a
                                // cost-weighted ratio would not be comparable
                                row.pvr = std::numeric_limits<double>::quiet_NaN();
                                row.pvr_se = std::numeric_limits<double>::quiet_NaN();
                            } else {
                                mean_se(pvrs, row.pvr, row.pvr_se);
                            }
                        } catch (const std::exception& e) {
                            std::string msg = e.what();
                            for (char& c : msg)
                                if (c == ',' || c == '\n' || c == '\r') c = ';';
                            row.error = msg;
                        }
                        row.wall_seconds =
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                        rows.push_back(std::move(row));
                        ++done;
                        if (progress)
                            (*progress) << "[" << done << "/" << total << "] d=" << d << " est="
                                        << rows.back().estimator << " cov=" << rows.back().cov
                                        << " region=" << rows.back().region << " lat="
                                        << rows.back().lattice
                                        << (rows.back().error.empty() ? "" : " ERROR") << "\n";
                    }
        }
    return rows;
}

// ---- emission ----------------------------------------------------------------

namespace detail {

inline std::string row_flags(const BenchRow& r) {
    std::string f;
    auto add = [&f](const char* tag) {
        if (!f.empty()) f += ';';
        f += tag;
    };
    if (r.zero_variance) add("zero-variance");
    if (r.cost_excludes_cdf) add("cost-excludes-cdf");
    if (r.antisym_mismatch) add("antisym-mismatch");
    return f;
}

inline const char* const kBenchColumns[] = {
    "d", "estimator", "cov", "region", "lattice", "card_v", "samples", "macros",
    "estimate", "variance", "vr", "vr_se", "pvr", "pvr_se", "cost",
    "antisymmetric", "flags", "error"};

inline std::vector<std::string> row_fields(const BenchRow& r) {
    return {std::to_string(r.dim), r.estimator, r.cov, r.region, r.lattice,
            std::to_string(r.card_v), std::to_string(r.samples), std::to_string(r.macros),
            format_double(r.estimate), format_double(r.variance), format_double(r.vr),
            format_double(r.vr_se), format_double(r.pvr), format_double(r.pvr_se),
            std::to_string(r.cost),
            r.antisymmetric < 0 ? "?" : (r.antisymmetric ? "1" : "0"),
            row_flags(r), r.error};
}

}  // namespace detail

/// CSV with a fixed header; numeric fields are written with 17 significant
/// digits and round-trip exactly. Timing is emitted only when asked, to keep
/// the default output byte-reproducible.
inline void emit_rows_csv(const std::vector<BenchRow>& rows, std::ostream& out, bool timing = false) {
    bool first = true;
    for (const char* c : detail::kBenchColumns) {
        if (!first) out << ",";
        out << c;
        first = false;
    }
    if (timing) out << ",wall_seconds";
    out << "\n";
    for (const BenchRow& r : rows) {
        auto fields = detail::row_fields(r);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ",";
            out << fields[i];
        }
        if (timing) out << "," << format_double(r.wall_seconds);
        out << "\n";
    }
}

inline void emit_rows_markdown(const std::vector<BenchRow>& rows, std::ostream& out,
                               bool timing = false) {
    std::size_t ncols = std::size(detail::kBenchColumns) + (timing ? 1 : 0);
    out << "|";
    for (const char* c : detail::kBenchColumns) out << " " << c << " |";
    if (timing) out << " wall_seconds |";
    out << "\n|";
    for (std::size_t i = 0; i < ncols; ++i) out << " --- |";
    out << "\n";
    for (const BenchRow& r : rows) {
        auto fields = detail::row_fields(r);
        out << "|";
        for (const auto& f : fields) out << " " << (f.empty() ? " " : f) << " |";
        if (timing) out << " " << format_double(r.wall_seconds) << " |";
        out << "\n";
    }
}

inline void emit_rows(const std::vector<BenchRow>& rows, const std::string& format,
                      std::ostream& out, bool timing = false) {
    if (format == "csv") {
        emit_rows_csv(rows, out, timing);
    } else if (format == "md") {
        emit_rows_markdown(rows, out, timing);
    } else {
        throw config_error("unknown output format '" + format + "'");
    }
}

/// Parses emit_rows_csv output back into rows (numeric fields only as written).
inline std::vector<BenchRow> parse_rows_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_rows_csv: empty input");
    auto split_csv = [](const std::string& s) {
        std::vector<std::string> f;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        f.push_back(cur);
        return f;
    };
    auto header = split_csv(detail::trim(line));
    std::size_t base_cols = std::size(detail::kBenchColumns);
    bool timing = header.size() == base_cols + 1 && header.back() == "wall_seconds";
    if (header.size() != base_cols && !timing)
        throw std::runtime_error("parse_rows_csv: unexpected header");
    for (std::size_t i = 0; i < base_cols; ++i)
        if (header[i] != detail::kBenchColumns[i])
            throw std::runtime_error("parse_rows_csv: unexpected column '" + header[i] + "'");
    std::vector<BenchRow> rows;
    std::size_t expect = base_cols + (timing ? 1 : 0);
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto f = split_csv(line);
        if (f.size() != expect) throw std::runtime_error("parse_rows_csv: row has "
                                                         + std::to_string(f.size()) + " fields, "
                                                         + std::to_string(expect) + " expected");
        BenchRow r;
        r.dim = std::stoi(f[0]);
        r.estimator = f[1];
        r.cov = f[2];
        r.region = f[3];
        r.lattice = f[4];
        r.card_v = std::stoull(f[5]);
        r.samples = std::stoull(f[6]);
        r.macros = std::stoull(f[7]);
        r.estimate = std::stod(f[8]);
        r.variance = std::stod(f[9]);
        r.vr = std::stod(f[10]);
        r.vr_se = std::stod(f[11]);
        r.pvr = std::stod(f[12]);
        r.pvr_se = std::stod(f[13]);
        r.cost = std::stoull(f[14]);
        r.antisymmetric = f[15] == "?" ? -1 : std::stoi(f[15]);
        std::string flags = f[16];
        r.zero_variance = flags.find("zero-variance") != std::string::npos;
        r.cost_excludes_cdf = flags.find("cost-excludes-cdf") != std::string::npos;
        r.antisym_mismatch = flags.find("antisym-mismatch") != std::string::npos;
        r.error = f[17];
        if (timing) r.wall_seconds = std::stod(f[18]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---- aggregation ---------------------------------------------------------------

struct AggregateRow {
    int dim = 0;
    std::string estimator;
    std::string region_class;
    double vr = std::numeric_limits<double>::quiet_NaN();
    double pvr = std::numeric_limits<double>::quiet_NaN();
    std::size_t cells = 0;
};

inline std::string region_class(const std::string& label) {
    if (label.size() == 2 && (label[0] == 'E' || label[0] == 'O' || label[0] == 'R')
        && label[1] >= '1' && label[1] <= '9')
        return std::string(1, label[0]);
    if (label == "S") return "S";
    return "custom";
}

/// Mean vr/pvr per (dim, estimator, region class), in first-seen order.
/// Rows with errors are skipped, and only finite ratios enter the means:
/// a non-finite vr is the flagged zero-variance signal, not an observation
/// of the ratio. A group with no finite contributor reports NaN.
inline std::vector<AggregateRow> aggregate_by_region_class(const std::vector<BenchRow>& rows) {
    std::vector<AggregateRow> out;
    std::map<std::string, std::size_t> index;
    std::vector<KahanSum> vr_sums, pvr_sums;
    std::vector<std::size_t> vr_counts, pvr_counts;
    for (const BenchRow& r : rows) {
        if (!r.error.empty()) continue;
        std::string cls = region_class(r.region);
        std::string key = std::to_string(r.dim) + "|" + r.estimator + "|" + cls;
        auto it = index.find(key);
        std::size_t slot;
        if (it == index.end()) {
            slot = out.size();
            index.emplace(key, slot);
            AggregateRow a;
            a.dim = r.dim;
            a.estimator = r.estimator;
            a.region_class = cls;
            out.push_back(a);
            vr_sums.emplace_back();
            pvr_sums.emplace_back();
            vr_counts.push_back(0);
            pvr_counts.push_back(0);
        } else {
            slot = it->second;
        }
        out[slot].cells += 1;
        if (std::isfinite(r.vr)) {
            vr_sums[slot].add(r.vr);
            vr_counts[slot] += 1;
        }
        if (std::isfinite(r.pvr)) {
            pvr_sums[slot].add(r.pvr);
            pvr_counts[slot] += 1;
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].vr = vr_counts[i] == 0
                        ? std::numeric_limits<double>::quiet_NaN()
                        : vr_sums[i].value() / static_cast<double>(vr_counts[i]);
        out[i].pvr = pvr_counts[i] == 0
                         ? std::numeric_limits<double>::quiet_NaN()
                         : pvr_sums[i].value() / static_cast<double>(pvr_counts[i]);
    }
    return out;
}

inline void emit_aggregate(const std::vector<AggregateRow>& rows, const std::string& format,
                           std::ostream& out) {
    if (format == "csv") {
        out << "d,estimator,region_class,vr,pvr,cells\n";
        for (const AggregateRow& r : rows)
            out << r.dim << "," << r.estimator << "," << r.region_class << ","
                << format_double(r.vr) << "," << format_double(r.pvr) << "," << r.cells << "\n";
    } else if (format == "md") {
        out << "| d | estimator | region_class | vr | pvr | cells |\n";
        out << "| --- | --- | --- | --- | --- | --- |\n";
        for (const AggregateRow& r : rows)
            out << "| " << r.dim << " | " << r.estimator << " | " << r.region_class << " | "
                << format_double(r.vr) << " | " << format_double(r.pvr) << " | " << r.cells
                << " |\n";
    } else {
        throw config_error("unknown output format '" + format + "'");
    }
}

}  // namespace spheremc
