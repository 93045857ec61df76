#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <spheremc/bench.hpp>

using namespace spheremc;

TEST_CASE("config files parse every key", "[bench]") {
    GridConfig g = parse_config_string(
        "# grid for the weekly run\n"
        "dims = 2..4, 6\n"
        "estimators = crude, sph\n"
        "covariances = identity, ar1:0.2, one-factor:-0.1\n"
        "regions = O1, R1\n"
        "lattices = auto, a2   # family names or point-set files\n"
        "samples = 500\n"
        "macro = 3\n"
        "seed = 99\n"
        "threads = 2\n"
        "format = md\n"
        "out = /tmp/grid.md\n"
        "timing = 1\n");
    CHECK(g.dims == std::vector<int>{2, 3, 4, 6});
    REQUIRE(g.estimators.size() == 2);
    CHECK(g.estimators[0] == EstimatorKind::crude);
    CHECK(g.estimators[1] == EstimatorKind::spherical);
    REQUIRE(g.covariances.size() == 3);
    CHECK(to_string(g.covariances[0]) == "identity");
    CHECK(to_string(g.covariances[1]) == "ar1:0.2");
    CHECK(to_string(g.covariances[2]) == "one-factor:-0.1");
    CHECK(g.regions == std::vector<std::string>{"O1", "R1"});
    CHECK(g.lattices == std::vector<std::string>{"auto", "a2"});
    CHECK(g.samples == 500);
    CHECK(g.macro_replications == 3);
    CHECK(g.seed == 99);
    CHECK(g.threads == 2);
    CHECK(g.format == "md");
    CHECK(g.out_path == "/tmp/grid.md");
    CHECK(g.timing);
}

TEST_CASE("config defaults and shorthand lists", "[bench]") {
    GridConfig g = parse_config_string("");
    CHECK(g.dims == std::vector<int>{2, 3, 4, 5, 6, 7, 8});
    CHECK(g.estimators.size() == 5);
    CHECK(g.covariances.size() == 9);
    CHECK(g.regions.size() == 9);
    CHECK(g.lattices == std::vector<std::string>{"auto"});
    CHECK(g.samples == 10000);
    CHECK(g.macro_replications == 10);
    CHECK_FALSE(g.timing);

    GridConfig all = parse_config_string("estimators = all\ncovariances = standard\n");
    CHECK(all.estimators.size() == 5);
    REQUIRE(all.covariances.size() == 9);
    CHECK(all.covariances[0].kind == CovarianceKind::identity);
}

TEST_CASE("config errors carry the offending key", "[bench]") {
    CHECK_THROWS_AS(parse_config_string("speed = 9\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("dims = 0\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("dims = 5..2\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("dims = two\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("estimators = sph2\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("covariances = one-factor\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("covariances = toeplitz:0.2\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("covariances = ar1:x\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("format = xml\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("samples = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("macro = 0\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("just a line\n"), config_error);
    CHECK_THROWS_AS(parse_config_string("regions =\n"), config_error);
    // config_error is an invalid_argument, so CLI layers catch one type
    CHECK_THROWS_AS(parse_config_string("speed = 9\n"), std::invalid_argument);
}

TEST_CASE("a one-cell crude grid reports the plain estimate", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = crude\ncovariances = identity\nregions = R1\n"
        "samples = 20000\nmacro = 5\nseed = 1\n");
    std::vector<BenchRow> rows = run_grid(g);
    REQUIRE(rows.size() == 1);
    const BenchRow& r = rows[0];
    CHECK(r.dim == 2);
    CHECK(r.estimator == "crude");
    CHECK(r.cov == "identity");
    CHECK(r.region == "R1");
    CHECK(r.lattice == "-");
    CHECK(r.card_v == 0);
    CHECK(r.samples == 20000);
    CHECK(r.macros == 5);
    CHECK(r.cost == 2);
    CHECK(r.error.empty());
    CHECK(std::abs(r.estimate - 0.46606494267439227) < 0.01);
    // crude against itself: every macro ratio is exactly one
    CHECK(r.vr == 1.0);
    CHECK(r.vr_se == 0.0);
    CHECK(r.pvr == 1.0);
    CHECK(r.antisymmetric == 0);
    CHECK_FALSE(r.antisym_mismatch);
}

TEST_CASE("cells do not depend on which other cells ran", "[bench]") {
    GridConfig big = parse_config_string(
        "dims = 2,3\nestimators = crude,sph\ncovariances = identity, ar1:0.2\n"
        "regions = O1,R2\nlattices = auto\nsamples = 400\nmacro = 2\nseed = 7\n");
    GridConfig small = parse_config_string(
        "dims = 3\nestimators = sph\ncovariances = ar1:0.2\nregions = R2\n"
        "lattices = auto\nsamples = 400\nmacro = 2\nseed = 7\n");
    std::vector<BenchRow> all = run_grid(big);
    std::vector<BenchRow> one = run_grid(small);
    REQUIRE(one.size() == 1);
    bool found = false;
    for (const BenchRow& r : all) {
        if (r.dim != 3 || r.estimator != "sph" || r.cov != "ar1:0.2" || r.region != "R2") continue;
        found = true;
        CHECK(r.estimate == one[0].estimate);
        CHECK(r.variance == one[0].variance);
        CHECK(r.vr == one[0].vr);
        CHECK(r.vr_se == one[0].vr_se);
        CHECK(r.pvr == one[0].pvr);
        CHECK(r.lattice == one[0].lattice);
        CHECK(r.card_v == one[0].card_v);
    }
    CHECK(found);
}

TEST_CASE("grid output is byte-identical across runs and thread counts", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = all\ncovariances = identity, one-factor:0.3\n"
        "regions = O1,E2,R3\nlattices = auto\nsamples = 300\nmacro = 2\nseed = 5\n");
    auto emit = [](const GridConfig& cfg) {
        std::ostringstream out;
        emit_rows_csv(run_grid(cfg), out);
        return out.str();
    };
    std::string first = emit(g);
    CHECK(first == emit(g));
    GridConfig threaded = g;
    threaded.threads = 3;
    CHECK(first == emit(threaded));
    // 5 estimators, 2 covariances, 3 regions, header line on top
    CHECK(std::count(first.begin(), first.end(), '\n') == 31);
}

TEST_CASE("rotated-set rows carry lattice metadata and flags", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 3\nestimators = sph,sph-star\ncovariances = identity\n"
        "regions = O1,E2\nlattices = auto\nsamples = 500\nmacro = 3\nseed = 2\n");
    std::vector<BenchRow> rows = run_grid(g);
    REQUIRE(rows.size() == 4);
    for (const BenchRow& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.lattice == "a3");
        CHECK(r.card_v == 12);
        if (r.estimator == "sph") {
            CHECK(r.cost == 5 + 12);
            CHECK_FALSE(std::isnan(r.pvr));
            CHECK_FALSE(r.cost_excludes_cdf);
        } else {
            CHECK(r.cost == 5);
            // the radial CDF work is not in the cost, so no honest cost-weighted ratio
            CHECK(std::isnan(r.pvr));
            CHECK(std::isnan(r.pvr_se));
            CHECK(r.cost_excludes_cdf);
        }
        if (r.region == "O1") {
            CHECK(r.antisymmetric == 1);
            CHECK_FALSE(r.antisym_mismatch);
        } else {
            // E2 touches the origin, so the exact verdict contradicts the books
            CHECK(r.antisymmetric == 0);
            CHECK(r.antisym_mismatch);
        }
    }
}

TEST_CASE("a scale-free cell collapses to zero variance and infinite vr", "[bench]") {
    // centered unit ball: every rotated direction integrates to the same value
    GridConfig g = parse_config_string(
        "dims = 1\nestimators = sph-star\ncovariances = identity\nregions = ell:0;1\n"
        "lattices = zd\nsamples = 50\nmacro = 2\nseed = 3\n");
    std::vector<BenchRow> rows = run_grid(g);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error.empty());
    CHECK(rows[0].zero_variance);
    CHECK(rows[0].variance == 0.0);
    CHECK(std::isinf(rows[0].vr));

    std::ostringstream out;
    emit_rows_csv(rows, out);
    CHECK(out.str().find("zero-variance") != std::string::npos);
    CHECK(out.str().find("inf") != std::string::npos);
    std::istringstream in(out.str());
    std::vector<BenchRow> back = parse_rows_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].zero_variance);
    CHECK(std::isinf(back[0].vr));
    CHECK(back[0].variance == 0.0);
}

TEST_CASE("cell failures land in the error column and the run continues", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = sph,crude\ncovariances = identity\nregions = O1\n"
        "lattices = /nonexistent/points.pts\nsamples = 100\nmacro = 2\nseed = 1\n");
    std::vector<BenchRow> rows = run_grid(g);
    REQUIRE(rows.size() == 2);
    const BenchRow* sph = nullptr;
    const BenchRow* crude = nullptr;
    for (const BenchRow& r : rows) (r.estimator == "sph" ? sph : crude) = &r;
    REQUIRE(sph != nullptr);
    REQUIRE(crude != nullptr);
    CHECK_FALSE(sph->error.empty());
    CHECK(std::isnan(sph->estimate));
    CHECK(crude->error.empty());  // crude ignores the lattice column

    GridConfig bad_region = parse_config_string(
        "dims = 2\nestimators = crude\ncovariances = identity\nregions = Q9,O1\n"
        "samples = 100\nmacro = 2\nseed = 1\n");
    rows = run_grid(bad_region);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].error.empty());
    CHECK(rows[1].error.empty());

    // commas and newlines would break the CSV shape, so they are scrubbed
    for (char c : rows[0].error) {
        CHECK(c != ',');
        CHECK(c != '\n');
    }
}

TEST_CASE("csv output round trips exactly", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = crude,sph-star\ncovariances = identity\n"
        "regions = O1,Q9\nlattices = auto\nsamples = 200\nmacro = 2\nseed = 11\n");
    std::vector<BenchRow> rows = run_grid(g);
    std::ostringstream first;
    emit_rows_csv(rows, first);
    std::istringstream in(first.str());
    std::vector<BenchRow> back = parse_rows_csv(in);
    REQUIRE(back.size() == rows.size());
    std::ostringstream second;
    emit_rows_csv(back, second);
    CHECK(first.str() == second.str());

    std::ostringstream timed;
    emit_rows_csv(rows, timed, true);
    CHECK(timed.str().find("wall_seconds") != std::string::npos);
    std::istringstream tin(timed.str());
    std::vector<BenchRow> tback = parse_rows_csv(tin);
    REQUIRE(tback.size() == rows.size());
    std::ostringstream timed2;
    emit_rows_csv(tback, timed2, true);
    CHECK(timed.str() == timed2.str());
}

TEST_CASE("csv parser rejects malformed input", "[bench]") {
    {
        std::istringstream in("");
        CHECK_THROWS_AS(parse_rows_csv(in), std::runtime_error);
    }
    {
        std::istringstream in("a,b,c\n");
        CHECK_THROWS_AS(parse_rows_csv(in), std::runtime_error);
    }
    {
        GridConfig g = parse_config_string(
            "dims = 2\nestimators = crude\ncovariances = identity\nregions = O1\n"
            "samples = 100\nmacro = 2\nseed = 1\n");
        std::ostringstream out;
        emit_rows_csv(run_grid(g), out);
        std::string text = out.str();
        text += "short,row\n";
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_rows_csv(in), std::runtime_error);
    }
}

TEST_CASE("markdown emission mirrors the csv fields", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = crude\ncovariances = identity\nregions = O1\n"
        "samples = 100\nmacro = 2\nseed = 1\n");
    std::vector<BenchRow> rows = run_grid(g);
    std::ostringstream out;
    emit_rows_markdown(rows, out);
    CHECK(out.str().find("| d |") != std::string::npos);
    CHECK(out.str().find("| crude |") != std::string::npos);
    CHECK(out.str().find("| --- |") != std::string::npos);

    std::ostringstream csv, md;
    CHECK_THROWS_AS(emit_rows(rows, "xml", csv), config_error);
    emit_rows(rows, "csv", csv);
    emit_rows(rows, "md", md);
    CHECK(csv.str().rfind("d,estimator,", 0) == 0);
    CHECK(md.str().rfind("| d |", 0) == 0);
}

TEST_CASE("region classes aggregate by first letter", "[bench]") {
    CHECK(region_class("E1") == "E");
    CHECK(region_class("O3") == "O");
    CHECK(region_class("R2") == "R");
    CHECK(region_class("S") == "S");
    CHECK(region_class("box:0,1;0,1") == "custom");
    CHECK(region_class("E10") == "custom");

    auto row = [](int d, const char* est, const char* region, double vr, double pvr,
                  const char* error = "") {
        BenchRow r;
        r.dim = d;
        r.estimator = est;
        r.region = region;
        r.vr = vr;
        r.pvr = pvr;
        r.error = error;
        return r;
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<BenchRow> rows = {
        row(2, "sph", "E1", 2.0, 4.0),
        row(2, "sph", "E3", 4.0, nan),
        row(2, "sph", "O1", 10.0, 20.0),
        row(2, "sph", "O3", inf, inf),  // flagged zero-variance cell: not an observation
        row(2, "sph", "E2", 100.0, 100.0, "broken cell"),
        row(3, "sph-star", "S", 7.0, nan),
        row(4, "sph-star", "R1", inf, nan),
    };
    std::vector<AggregateRow> agg = aggregate_by_region_class(rows);
    REQUIRE(agg.size() == 4);
    CHECK(agg[0].dim == 2);
    CHECK(agg[0].estimator == "sph");
    CHECK(agg[0].region_class == "E");
    CHECK(agg[0].cells == 2);  // the error row is skipped
    CHECK(agg[0].vr == 3.0);
    CHECK(agg[0].pvr == 4.0);  // nan pvr cells drop out of the pvr mean
    CHECK(agg[1].region_class == "O");
    CHECK(agg[1].cells == 2);
    CHECK(agg[1].vr == 10.0);   // the inf cell is excluded from the mean
    CHECK(agg[1].pvr == 20.0);
    CHECK(agg[2].region_class == "S");
    CHECK(std::isnan(agg[2].pvr));
    CHECK(agg[3].region_class == "R");
    CHECK(std::isnan(agg[3].vr));  // no finite contributor at all

    std::ostringstream csv, md;
    emit_aggregate(agg, "csv", csv);
    emit_aggregate(agg, "md", md);
    CHECK(csv.str().rfind("d,estimator,region_class,", 0) == 0);
    CHECK(csv.str().find("2,sph,E,3,4,2") != std::string::npos);
    CHECK(md.str().find("| 2 | sph | E | 3 | 4 | 2 |") != std::string::npos);
    CHECK_THROWS_AS(emit_aggregate(agg, "xml", csv), config_error);
}

TEST_CASE("progress stream names each finished cell", "[bench]") {
    GridConfig g = parse_config_string(
        "dims = 2\nestimators = crude\ncovariances = identity\nregions = O1,Q9\n"
        "samples = 100\nmacro = 2\nseed = 1\n");
    std::ostringstream progress;
    run_grid(g, &progress);
    CHECK(progress.str().find("[1/2]") != std::string::npos);
    CHECK(progress.str().find("[2/2]") != std::string::npos);
    CHECK(progress.str().find("ERROR") != std::string::npos);
    CHECK(progress.str().find("region=O1") != std::string::npos);
}
