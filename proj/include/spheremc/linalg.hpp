#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace spheremc {

using Vector = std::vector<double>;

// Dense row-major matrix. Dimensions here are tiny (d <= 25), so the
// implementation favours clarity and exact control over conventions.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

struct factorization_error : std::runtime_error {
    explicit factorization_error(const std::string& what) : std::runtime_error(what) {}
};

struct degeneracy_error : std::runtime_error {
    explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

inline double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

// y = M x
inline void matvec(const Matrix& m, const double* x, double* y) {
    for (std::size_t i = 0; i < m.rows(); ++i) y[i] = dot(m.row(i), x, m.cols());
}

// C = A B
inline void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    if (c.rows() != a.rows() || c.cols() != b.cols()) c = Matrix(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.cols(); ++j) ci[j] = 0.0;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
}

// y = L x for lower-triangular L (upper part ignored).
inline void lower_tri_matvec(const Matrix& l, const double* x, double* y) {
    for (std::size_t i = 0; i < l.rows(); ++i) y[i] = dot(l.row(i), x, i + 1);
}

/// Cholesky factor (lower triangular, positive diagonal) of a symmetric
/// positive definite matrix. Throws factorization_error when a pivot falls
/// below 1e-12 times the largest diagonal entry.
inline Matrix cholesky(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("cholesky: matrix not square");
    std::size_t n = s.rows();
    double maxdiag = 0.0;
    for (std::size_t i = 0; i < n; ++i) maxdiag = std::max(maxdiag, std::abs(s(i, i)));
    if (maxdiag == 0.0) maxdiag = 1.0;
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = s(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (sum <= 1e-12 * maxdiag)
                    throw factorization_error("cholesky: matrix not positive definite (pivot "
                                              + std::to_string(sum) + " at index " + std::to_string(i) + ")");
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

/// Modified Gram-Schmidt with one re-orthogonalization pass, applied to the
/// columns of m. Returns a matrix with orthonormal columns spanning the same
/// space; throws degeneracy_error when a column is (numerically) dependent.
inline Matrix gram_schmidt(const Matrix& m) {
    std::size_t n = m.rows(), k = m.cols();
    Matrix q = m;
    for (std::size_t j = 0; j < k; ++j) {
        double orig = 0.0;
        for (std::size_t i = 0; i < n; ++i) orig += q(i, j) * q(i, j);
        orig = std::sqrt(orig);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < j; ++p) {
                double proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * q(i, p);
                for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, p);
            }
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        if (!(nrm > 1e-12 * std::max(orig, 1e-300)) || nrm == 0.0)
            throw degeneracy_error("gram_schmidt: dependent column " + std::to_string(j));
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

enum class CovarianceKind { identity, one_factor, ar1 };

struct CovarianceModel {
    CovarianceKind kind = CovarianceKind::identity;
    double rho = 0.0;

    static CovarianceModel identity() { return {CovarianceKind::identity, 0.0}; }
    static CovarianceModel one_factor(double rho) { return {CovarianceKind::one_factor, rho}; }
    static CovarianceModel ar1(double rho) { return {CovarianceKind::ar1, rho}; }
};

inline std::string to_string(const CovarianceModel& m);

/// Covariance matrix for the model at dimension d. one_factor has unit
/// diagonal and constant off-diagonal rho (requires -1/(d-1) < rho < 1);
/// ar1 has entries rho^|i-j| (requires |rho| < 1).
inline Matrix build_covariance(const CovarianceModel& model, int d) {
    if (d < 1) throw std::invalid_argument("build_covariance: dimension must be >= 1");
    std::size_t n = static_cast<std::size_t>(d);
    switch (model.kind) {
        case CovarianceKind::identity:
            return Matrix::identity(n);
        case CovarianceKind::one_factor: {
            if (d >= 2 && !(model.rho > -1.0 / (d - 1) && model.rho < 1.0))
                throw std::invalid_argument("build_covariance: one_factor rho outside (-1/(d-1), 1)");
            Matrix s(n, n, model.rho);
            for (std::size_t i = 0; i < n; ++i) s(i, i) = 1.0;
            return s;
        }
        case CovarianceKind::ar1: {
            if (!(std::abs(model.rho) < 1.0))
                throw std::invalid_argument("build_covariance: ar1 needs |rho| < 1");
            Matrix s(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    s(i, j) = std::pow(model.rho, std::abs(static_cast<int>(i) - static_cast<int>(j)));
            return s;
        }
    }
    throw std::invalid_argument("build_covariance: unknown model");
}

inline std::string to_string(const CovarianceModel& m) {
    char buf[40];
    switch (m.kind) {
        case CovarianceKind::identity: return "identity";
        case CovarianceKind::one_factor:
            std::snprintf(buf, sizeof(buf), "one-factor:%g", m.rho);
            return buf;
        case CovarianceKind::ar1:
            std::snprintf(buf, sizeof(buf), "ar1:%g", m.rho);
            return buf;
    }
    return "?";
}

}  // namespace spheremc
