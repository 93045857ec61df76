#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <spheremc/estimators.hpp>
#include <spheremc/specfun.hpp>

using namespace spheremc;

namespace {

// 4-sigma agreement band for two independent estimates of the same quantity.
void check_agree(const EstimateResult& a, const EstimateResult& b) {
    double band = 4.0 * std::sqrt(standard_error(a) * standard_error(a)
                                  + standard_error(b) * standard_error(b));
    CHECK(std::abs(a.estimate - b.estimate) <= band);
}

void check_near(const EstimateResult& r, double target, double sigmas = 4.0) {
    CHECK(std::abs(r.estimate - target) <= sigmas * standard_error(r));
}

}  // namespace

TEST_CASE("all five estimators recover the orthant probability", "[estimators]") {
    // P{all coordinates <= 0} = 2^-d for a centered normal, any rotation aside.
    const int d = 3;
    Problem p = make_problem(CovarianceModel{}, standard_region("O1", d));
    PointSet v = build_pointset(LatticeFamily::ad, d);
    RandomStream s(42, 1);
    const std::size_t m = 20000;

    EstimateResult crude = estimate_crude(p, m, s, 1);
    EstimateResult crude_at = estimate_crude_antithetic(p, m, s, 1);
    EstimateResult sph = estimate_spherical(p, v, m, s, 1);
    EstimateResult sph_at = estimate_spherical_antithetic(p, v, m, s, 1);
    EstimateResult star = estimate_spherical_star(p, v, m, s, 1);

    const double target = 0.125;
    check_near(crude, target);
    check_near(crude_at, target);
    check_near(sph, target);
    check_near(sph_at, target);
    check_near(star, target);

    // a cone is scale invariant, so integrating the radius out changes nothing
    // beyond the shared rotation stream
    CHECK(star.estimate == Catch::Approx(sph.estimate).margin(1e-12));
}

TEST_CASE("all five estimators recover a product box probability", "[estimators]") {
    const int d = 2;
    Problem p = make_problem(CovarianceModel{}, standard_region("R1", d));
    PointSet v = build_pointset(LatticeFamily::ad, d);
    RandomStream s(42, 2);
    const std::size_t m = 20000;

    const double target = 0.46606494267439227;  // (2 Phi(1) - 1)^2
    check_near(estimate_crude(p, m, s, 1), target);
    check_near(estimate_crude_antithetic(p, m, s, 1), target);
    check_near(estimate_spherical(p, v, m, s, 1), target);
    check_near(estimate_spherical_antithetic(p, v, m, s, 1), target);
    check_near(estimate_spherical_star(p, v, m, s, 1), target);
}

TEST_CASE("antithetic pairing on the plane orthant cuts variance threefold", "[estimators]") {
    // d=2 orthant: crude replicate is Bernoulli(1/4), variance 3/16; the
    // antithetic pair hits exactly once iff z lands in the (-,-) or (+,+)
    // quadrant, so the pair mean is {0, 1/2}-valued with variance 1/16.
    const int d = 2;
    Problem p = make_problem(CovarianceModel{}, standard_region("O1", d));
    RandomStream s(7, 5);
    const std::size_t m = 100000;

    EstimateResult crude = estimate_crude(p, m, s, 1);
    EstimateResult at = estimate_crude_antithetic(p, m, s, 1);

    CHECK(std::abs(crude.sample_variance - 3.0 / 16.0)
          <= 3.0 * variance_standard_error(crude));
    CHECK(std::abs(at.sample_variance - 1.0 / 16.0)
          <= 3.0 * variance_standard_error(at));

    double vr = variance_ratio(at, crude);
    CHECK(vr >= 2.5);
    CHECK(vr <= 3.5);
    // equal replicate cost, so the penalty leaves the ratio alone
    CHECK(penalized_variance_ratio(at, crude) == Catch::Approx(vr));
}

TEST_CASE("radial integration is exact on a centered ball", "[estimators]") {
    // every direction sees the same interval [0,1], so each replicate equals
    // the chi CDF at 1 and the spread collapses
    const LatticeFamily fams[] = {LatticeFamily::zd, LatticeFamily::ad,
                                  LatticeFamily::dd, LatticeFamily::dd};
    for (int d = 2; d <= 5; ++d) {
        PointSet v = build_pointset(fams[d - 2], d);
        Problem p = make_problem(CovarianceModel{},
                                 Region::ellipsoid(Vector(d, 0.0), 1.0));
        EstimateResult r = estimate_spherical_star(p, v, 50, RandomStream(11, d), 1);
        INFO("d=" << d << " set=" << v.name);
        CHECK(r.zero_variance);
        CHECK(r.sample_variance == 0.0);
        CHECK(r.max_value - r.min_value <= 1e-14);  // ulp wobble in the rotated norms
        CHECK(r.estimate == Catch::Approx(chi_cdf(1.0, d)).epsilon(0.0).margin(1e-13));
        CHECK(r.cost_excludes_cdf);
        CHECK(r.cost_per_replicate
              == static_cast<std::size_t>((d + 2) * (d - 1) / 2));
        CHECK(variance_ratio(r, r) == std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("replicate costs follow the draw-count formulas", "[estimators]") {
    const std::size_t cards[] = {6, 12, 24, 40, 72, 126, 240};
    const std::size_t sph_cost[] = {8, 17, 33, 54, 92, 153, 275};
    const std::size_t at_cost[] = {5, 11, 21, 34, 56, 90, 155};
    for (int d = 2; d <= 8; ++d) {
        std::size_t nv = cards[d - 2];
        CHECK(replicate_cost(EstimatorKind::crude, d, 0) == static_cast<std::size_t>(d));
        CHECK(replicate_cost(EstimatorKind::crude_at, d, 0) == static_cast<std::size_t>(d));
        CHECK(replicate_cost(EstimatorKind::spherical, d, nv) == sph_cost[d - 2]);
        CHECK(replicate_cost(EstimatorKind::spherical_at, d, nv) == at_cost[d - 2]);
        CHECK(replicate_cost(EstimatorKind::spherical_star, d, nv)
              == static_cast<std::size_t>((d + 2) * (d - 1) / 2));
    }
    CHECK_THROWS_AS(replicate_cost(EstimatorKind::crude, 0, 0), std::invalid_argument);
}

TEST_CASE("results are bit-identical across runs and thread counts", "[estimators]") {
    const int d = 3;
    Problem p = make_problem(CovarianceModel::one_factor(0.3),
                             standard_region("R1", d));
    PointSet v = build_pointset(LatticeFamily::ad, d);
    RandomStream s(77, 3);
    const std::size_t m = 400;

    auto same = [](const EstimateResult& a, const EstimateResult& b) {
        CHECK(a.estimate == b.estimate);
        CHECK(a.sample_variance == b.sample_variance);
        CHECK(a.fourth_central_moment == b.fourth_central_moment);
        CHECK(a.min_value == b.min_value);
        CHECK(a.max_value == b.max_value);
        CHECK(a.replicates == b.replicates);
    };

    EstimateResult a = estimate_spherical(p, v, m, s, 1);
    same(a, estimate_spherical(p, v, m, s, 1));
    same(a, estimate_spherical(p, v, m, s, 3));
    CHECK(a.seed == 77);
    CHECK(a.stream_id == 3);
    CHECK(a.generator == RandomStream::generator_name);

    EstimateResult c = estimate_crude_antithetic(p, m, s, 1);
    same(c, estimate_crude_antithetic(p, m, s, 4));

    EstimateResult st = estimate_spherical_star(p, v, m, s, 1);
    same(st, estimate_spherical_star(p, v, m, s, 2));
}

TEST_CASE("dispatch by kind matches the direct calls", "[estimators]") {
    const int d = 2;
    Problem p = make_problem(CovarianceModel{}, standard_region("R2", d));
    PointSet v = build_pointset(LatticeFamily::ad, d);
    RandomStream s(5, 9);
    const std::size_t m = 500;

    CHECK(estimate(EstimatorKind::crude, p, nullptr, m, s, 1).estimate
          == estimate_crude(p, m, s, 1).estimate);
    CHECK(estimate(EstimatorKind::crude_at, p, &v, m, s, 1).estimate
          == estimate_crude_antithetic(p, m, s, 1).estimate);
    CHECK(estimate(EstimatorKind::spherical, p, &v, m, s, 1).estimate
          == estimate_spherical(p, v, m, s, 1).estimate);
    CHECK(estimate(EstimatorKind::spherical_at, p, &v, m, s, 1).estimate
          == estimate_spherical_antithetic(p, v, m, s, 1).estimate);
    CHECK(estimate(EstimatorKind::spherical_star, p, &v, m, s, 1).estimate
          == estimate_spherical_star(p, v, m, s, 1).estimate);
}

TEST_CASE("rotated-set variants agree on a shifted box", "[estimators]") {
    const int d = 4;
    Problem p = make_problem(CovarianceModel{}, standard_region("R3", d));
    PointSet v = build_pointset(LatticeFamily::dd, d);
    RandomStream s(13, 4);
    const std::size_t m = 20000;

    EstimateResult sph = estimate_spherical(p, v, m, s, 1);
    EstimateResult at = estimate_spherical_antithetic(p, v, m, s, 1);
    EstimateResult star = estimate_spherical_star(p, v, m, s, 1);
    EstimateResult crude = estimate_crude(p, 2 * m, s, 1);

    check_agree(sph, at);
    check_agree(sph, star);
    check_agree(at, star);
    check_agree(crude, sph);
}

TEST_CASE("a nonzero mean and correlated covariance reach the same answer", "[estimators]") {
    const int d = 2;
    Vector mu{0.3, -0.2};
    Matrix sigma(2, 2);
    sigma(0, 0) = 1.0; sigma(0, 1) = 0.3;
    sigma(1, 0) = 0.3; sigma(1, 1) = 1.0;
    Problem p = make_problem(mu, sigma, standard_region("R1", d));
    PointSet v = build_pointset(LatticeFamily::ad, d);
    RandomStream s(21, 6);
    const std::size_t m = 40000;

    EstimateResult crude = estimate_crude(p, m, s, 1);
    check_agree(crude, estimate_crude_antithetic(p, m, s, 1));
    check_agree(crude, estimate_spherical(p, v, m / 2, s, 1));
    check_agree(crude, estimate_spherical_star(p, v, m / 2, s, 1));
}

TEST_CASE("antipodal pair sums stay within one hit on compatible regions", "[estimators]") {
    // A and -A share no interior, so of (x, -x) at most one lands inside and a
    // replicate can cover at most half the set.
    RandomStream s(31, 8);
    const std::size_t m = 5000;
    for (const char* label : {"R2", "O1"}) {
        Problem p = make_problem(CovarianceModel{}, standard_region(label, 2));
        PointSet v = build_pointset(LatticeFamily::ad, 2);
        EstimateResult r = estimate_spherical_antithetic(p, v, m, s, 1);
        INFO(label);
        CHECK(r.max_value <= 0.5 + 1e-12);
    }
    {
        Problem p = make_problem(CovarianceModel{}, standard_region("O3", 3));
        PointSet v = build_pointset(LatticeFamily::ad, 3);
        CHECK(estimate_spherical_antithetic(p, v, m, s, 1).max_value <= 0.5 + 1e-12);
    }
    // contrast: a symmetric box admits both pair members at once
    {
        Problem p = make_problem(CovarianceModel{}, standard_region("R1", 2));
        PointSet v = build_pointset(LatticeFamily::ad, 2);
        CHECK(estimate_spherical_antithetic(p, v, m, s, 1).max_value > 0.5);
    }
}

TEST_CASE("cap fractions in the single-point regime are two-valued", "[estimators]") {
    // cap of angle pi/12 on the circle: chord 2 sin(pi/12) < 1 = d_min(a2), so
    // a rotated copy puts at most one point inside. The fraction is then
    // (1/6) Bernoulli(1/2): mean 1/12, variance exactly 1/144.
    PointSet v = build_pointset(LatticeFamily::ad, 2);
    const double theta = M_PI / 12.0;
    Vector axis{1.0, 0.0};
    const std::size_t m = 50000;
    EstimateResult r = estimate_cap_rotation(v, axis, theta, m, RandomStream(3, 12), 1);

    CHECK(r.min_value == 0.0);
    CHECK(r.max_value * 6.0 == 1.0);
    check_near(r, 1.0 / 12.0);
    CHECK(std::abs(r.sample_variance - 1.0 / 144.0) <= 3.0 * variance_standard_error(r));
    CHECK(r.sample_variance
          <= variance_upper_bound(1.0 / 12.0, 1, 6) + 3.0 * variance_standard_error(r));
    CHECK(r.cost_per_replicate == 2);  // rotation only

    // an off-axis cap sees the same law: rotation invariance
    Vector tilted{0.6, -0.8};
    EstimateResult r2 = estimate_cap_rotation(v, tilted, theta, m, RandomStream(3, 13), 1);
    check_near(r2, 1.0 / 12.0);
    CHECK(r2.max_value * 6.0 == 1.0);
}

TEST_CASE("summary statistics follow their definitions", "[estimators]") {
    {
        EstimateResult r = detail::reduce_replicates({0.0, 0.0, 1.0, 1.0});
        CHECK(r.estimate == 0.5);
        CHECK(r.sample_variance == Catch::Approx(1.0 / 3.0));
        CHECK(r.fourth_central_moment == Catch::Approx(0.0625));
        CHECK(r.min_value == 0.0);
        CHECK(r.max_value == 1.0);
        CHECK(r.replicates == 4);
        CHECK_FALSE(r.zero_variance);
        CHECK(standard_error(r) == Catch::Approx(std::sqrt(r.sample_variance / 4.0)));
        double m = 4.0, s2 = r.sample_variance;
        double expect = std::sqrt((r.fourth_central_moment - s2 * s2 * (m - 3.0) / (m - 1.0)) / m);
        CHECK(variance_standard_error(r) == Catch::Approx(expect));
    }
    {
        EstimateResult r = detail::reduce_replicates({2.0, 2.0, 2.0});
        CHECK(r.zero_variance);
        CHECK(r.sample_variance == 0.0);
        CHECK(r.estimate == 2.0);
    }
    {
        EstimateResult target, baseline;
        target.sample_variance = 1.0;
        target.cost_per_replicate = 5;
        baseline.sample_variance = 3.0;
        baseline.cost_per_replicate = 10;
        CHECK(variance_ratio(target, baseline) == 3.0);
        CHECK(penalized_variance_ratio(target, baseline) == 6.0);
        target.sample_variance = 0.0;
        CHECK(std::isinf(variance_ratio(target, baseline)));
    }
}

TEST_CASE("estimator argument errors", "[estimators]") {
    Problem p = make_problem(CovarianceModel{}, standard_region("R1", 2));
    PointSet v = build_pointset(LatticeFamily::ad, 2);
    RandomStream s(1, 1);

    CHECK(needs_pointset(EstimatorKind::spherical));
    CHECK(needs_pointset(EstimatorKind::spherical_at));
    CHECK(needs_pointset(EstimatorKind::spherical_star));
    CHECK_FALSE(needs_pointset(EstimatorKind::crude));
    CHECK_FALSE(needs_pointset(EstimatorKind::crude_at));

    CHECK_THROWS_AS(estimate(EstimatorKind::spherical, p, nullptr, 100, s, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_crude(p, 1, s, 1), std::invalid_argument);

    Problem p3 = make_problem(CovarianceModel{}, standard_region("R1", 3));
    CHECK_THROWS_AS(estimate_spherical(p3, v, 100, s, 1), std::invalid_argument);

    PointSet half = positive_half(v);
    CHECK_THROWS_AS(estimate_spherical_antithetic(p, half, 100, s, 1), integrity_error);

    Problem pc = make_problem(CovarianceModel{},
                              Region::custom([](const double* x, int) { return x[0] > 0.0; }, 2));
    CHECK_THROWS_AS(estimate_spherical_star(pc, v, 100, s, 1), unsupported_region);
    CHECK_NOTHROW(estimate_spherical(pc, v, 100, s, 1));

    Vector axis{1.0, 0.0};
    CHECK_THROWS_AS(estimate_cap_rotation(v, axis, 0.0, 100, s, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_cap_rotation(v, axis, 4.0, 100, s, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_cap_rotation(v, Vector{0.0, 0.0}, 1.0, 100, s, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_cap_rotation(v, Vector{1.0, 0.0, 0.0}, 1.0, 100, s, 1),
                    std::invalid_argument);

    CHECK_THROWS_AS(make_problem(Vector(2, 0.0), Matrix(2, 2), standard_region("R1", 3)),
                    std::invalid_argument);
    Matrix bad(2, 2);
    bad(0, 0) = 1.0; bad(0, 1) = 2.0;
    bad(1, 0) = 2.0; bad(1, 1) = 1.0;
    CHECK_THROWS_AS(make_problem(Vector(2, 0.0), bad, standard_region("R1", 2)),
                    factorization_error);
}

TEST_CASE("estimator names round trip", "[estimators]") {
    for (EstimatorKind k : {EstimatorKind::crude, EstimatorKind::crude_at,
                            EstimatorKind::spherical, EstimatorKind::spherical_at,
                            EstimatorKind::spherical_star})
        CHECK(parse_estimator(to_string(k)) == k);
    CHECK_THROWS_AS(parse_estimator("sph-att"), std::invalid_argument);
}
