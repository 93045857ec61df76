#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <spheremc/linalg.hpp>
#include <spheremc/rng.hpp>

using namespace spheremc;

TEST_CASE("cholesky solves small systems by hand", "[linalg]") {
    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 0.3;
    s(1, 0) = 0.3;
    s(1, 1) = 1.0;
    Matrix l = cholesky(s);
    CHECK(l(0, 0) == 1.0);
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == 0.3);
    CHECK(l(1, 1) == Catch::Approx(std::sqrt(0.91)).epsilon(1e-15));

    // integer case, exact in floating point
    Matrix a(3, 3);
    double av[9] = {4, 2, 2, 2, 5, 3, 2, 3, 6};
    for (int i = 0; i < 9; ++i) a.data()[i] = av[i];
    Matrix la = cholesky(a);
    double expect[9] = {2, 0, 0, 1, 2, 0, 1, 1, 2};
    for (int i = 0; i < 9; ++i) CHECK(la.data()[i] == expect[i]);
}

TEST_CASE("cholesky of the identity is the identity", "[linalg]") {
    Matrix l = cholesky(Matrix::identity(5));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(l(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("cholesky rejects indefinite input", "[linalg]") {
    Matrix s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    s(1, 1) = 1.0;
    CHECK_THROWS_AS(cholesky(s), factorization_error);
}

TEST_CASE("covariance models produce the documented entries", "[linalg]") {
    Matrix id = build_covariance(CovarianceModel::identity(), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(id(i, j) == (i == j ? 1.0 : 0.0));

    Matrix of = build_covariance(CovarianceModel::one_factor(0.3), 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(of(i, j) == (i == j ? 1.0 : 0.3));

    Matrix ar = build_covariance(CovarianceModel::ar1(-0.1), 4);
    CHECK(ar(0, 3) == Catch::Approx(-0.001).epsilon(1e-15));
    CHECK(ar(1, 3) == Catch::Approx(0.01).epsilon(1e-15));
    CHECK(ar(2, 1) == -0.1);
    CHECK(ar(2, 2) == 1.0);
}

TEST_CASE("covariance models reject degenerate parameters", "[linalg]") {
    CHECK_THROWS_AS(build_covariance(CovarianceModel::ar1(1.0), 3), std::invalid_argument);
    CHECK_THROWS_AS(build_covariance(CovarianceModel::ar1(-1.0), 3), std::invalid_argument);
    // one-factor needs rho > -1/(d-1)
    CHECK_THROWS_AS(build_covariance(CovarianceModel::one_factor(-0.5), 3), std::invalid_argument);
    CHECK_NOTHROW(build_covariance(CovarianceModel::one_factor(-0.4), 3));
    CHECK_THROWS_AS(build_covariance(CovarianceModel::one_factor(1.0), 2), std::invalid_argument);
}

TEST_CASE("cholesky reconstructs every benchmark covariance", "[linalg]") {
    std::vector<CovarianceModel> models{CovarianceModel::identity()};
    for (double rho : {-0.1, 0.1, 0.2, 0.3}) {
        models.push_back(CovarianceModel::one_factor(rho));
        models.push_back(CovarianceModel::ar1(rho));
    }
    for (int d = 2; d <= 8; ++d) {
        for (const auto& m : models) {
            Matrix sigma = build_covariance(m, d);
            Matrix l = cholesky(sigma);
            Matrix lt(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) lt(i, j) = l(j, i);
            Matrix back(d, d);
            matmul(l, lt, back);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    CHECK(std::abs(back(i, j) - sigma(i, j)) <= 1e-12);
        }
    }
}

TEST_CASE("gram_schmidt returns an orthonormal frame", "[linalg]") {
    RandomStream rs(42, 0);
    for (int rep = 0; rep < 200; ++rep) {
        int d = 2 + rep % 7;
        Matrix m(d, d);
        for (int i = 0; i < d * d; ++i) m.data()[i] = rs.normal();
        Matrix q = gram_schmidt(m);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j <= i; ++j) {
                double ip = 0.0;
                for (int r = 0; r < d; ++r) ip += q(r, i) * q(r, j);
                CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-10);
            }
    }
}

TEST_CASE("gram_schmidt rejects dependent columns", "[linalg]") {
    Matrix m(3, 3);
    // second column is twice the first
    double mv[9] = {1, 2, 0, 2, 4, 0, 0, 0, 1};
    for (int i = 0; i < 9; ++i) m.data()[i] = mv[i];
    CHECK_THROWS_AS(gram_schmidt(m), degeneracy_error);
}

TEST_CASE("matrix vector kernels match hand results", "[linalg]") {
    Matrix m(2, 3);
    double mv[6] = {1, 2, 3, 4, 5, 6};
    for (int i = 0; i < 6; ++i) m.data()[i] = mv[i];
    Vector x{1.0, -1.0, 2.0};
    Vector y(2);
    matvec(m, x.data(), y.data());
    CHECK(y[0] == 5.0);
    CHECK(y[1] == 11.0);

    Matrix l(2, 2);
    l(0, 0) = 2.0;
    l(0, 1) = 0.0;
    l(1, 0) = 1.0;
    l(1, 1) = 3.0;
    Vector z{1.0, 1.0};
    Vector w(2);
    lower_tri_matvec(l, z.data(), w.data());
    CHECK(w[0] == 2.0);
    CHECK(w[1] == 4.0);

    CHECK(dot(x.data(), x.data(), 3) == 6.0);
    Vector v34{3.0, 4.0};
    CHECK(norm2(v34.data(), 2) == 5.0);
}

TEST_CASE("covariance model labels are stable", "[linalg]") {
    CHECK(to_string(CovarianceModel::identity()) == "identity");
    CHECK(to_string(CovarianceModel::one_factor(0.2)) == "one-factor:0.2");
    CHECK(to_string(CovarianceModel::ar1(-0.1)) == "ar1:-0.1");
}
