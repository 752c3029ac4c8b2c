#ifndef JUMPKIT_HILBERT_HPP
#define JUMPKIT_HILBERT_HPP

// Dense complex linear-algebra substrate: states, operators, projectors,
// tensor products and the matrix-exponential oracle. hbar = 1 throughout;
// everything is double precision and dense (target dims <= ~2000).

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "jumpkit/errors.hpp"

namespace jumpkit {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

constexpr double kHermitianTol = 1e-12;
constexpr double kProjectorTol = 1e-10;
constexpr double kNormTol = 1e-10;

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& a, double tol = kHermitianTol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) < tol;
}

inline void require_finite(const Matrix& a, const std::string& who) {
    if (!a.allFinite()) throw NumericError(who + ": non-finite matrix entries");
}

inline void require_finite(const Vector& v, const std::string& who) {
    if (!v.allFinite()) throw NumericError(who + ": non-finite vector entries");
}

inline void require_hermitian(const Matrix& a, const std::string& who, double tol = kHermitianTol) {
    if (!is_hermitian(a, tol))
        throw ContractViolation(who + ": matrix is not Hermitian within " + std::to_string(tol));
}

inline void require_normalized(const Vector& v, const std::string& who, double tol = kNormTol) {
    if (std::abs(v.norm() - 1.0) > tol)
        throw ContractViolation(who + ": state is not normalized (norm = " + std::to_string(v.norm()) + ")");
}

// A square matrix with an asserted hermiticity flag. The Hermitian factory
// validates the flag; evolution oracles pick their algorithm from it.
struct Operator {
    Matrix matrix;
    bool hermitian = false;

    static Operator hermitian_op(Matrix m) {
        require_finite(m, "Operator");
        require_hermitian(m, "Operator");
        return Operator{std::move(m), true};
    }
    static Operator general(Matrix m) {
        require_finite(m, "Operator");
        if (m.rows() != m.cols()) throw ContractViolation("Operator: matrix is not square");
        return Operator{std::move(m), false};
    }
    Eigen::Index dim() const { return matrix.rows(); }
};

// Orthogonal projector, validated Hermitian and idempotent on construction.
class Projector {
  public:
    explicit Projector(Matrix m) : mat_(std::move(m)) {
        require_hermitian(mat_, "Projector");
        if (max_abs(mat_ * mat_ - mat_) >= kProjectorTol)
            throw ContractViolation("Projector: matrix is not idempotent");
    }

    // Projector onto the span of orthonormal columns.
    static Projector from_frame(const Matrix& frame) {
        if (frame.cols() > 0) {
            Matrix gram = frame.adjoint() * frame;
            if (max_abs(gram - Matrix::Identity(frame.cols(), frame.cols())) >= kProjectorTol)
                throw ContractViolation("Projector: frame columns are not orthonormal");
        }
        return Projector(frame * frame.adjoint());
    }

    // Diagonal projector keeping the listed basis indices.
    static Projector onto_basis(Eigen::Index dim, const std::vector<Eigen::Index>& kept) {
        Matrix m = Matrix::Zero(dim, dim);
        for (Eigen::Index k : kept) m(k, k) = 1.0;
        return Projector(std::move(m));
    }

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

  private:
    Matrix mat_;
};

inline Vector project(const Projector& p, const Vector& v) {
    if (p.dim() != v.size())
        throw ContractViolation("project: dimension mismatch (" + std::to_string(p.dim()) + " vs " +
                                std::to_string(v.size()) + ")");
    return p.matrix() * v;
}

// Cached eigendecomposition of a Hermitian matrix; applies e^{-iAt} exactly.
class SpectralDecomposition {
  public:
    explicit SpectralDecomposition(const Matrix& a) {
        require_hermitian(a, "SpectralDecomposition");
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        if (es.info() != Eigen::Success)
            throw NumericError("SpectralDecomposition: eigensolver failed");
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
    }

    Vector apply_exp(double t, const Vector& v) const {
        Vector c = eigenvectors_.adjoint() * v;
        for (Eigen::Index k = 0; k < c.size(); ++k)
            c[k] *= std::exp(Complex(0.0, -eigenvalues_[k] * t));
        return eigenvectors_ * c;
    }

    const RealVector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }

  private:
    RealVector eigenvalues_;
    Matrix eigenvectors_;
};

// e^{-iAt} v. Hermitian operators go through the norm-preserving
// eigendecomposition; general ones through dense scaling-and-squaring.
inline Vector matrix_exponential_apply(const Operator& a, double t, const Vector& v) {
    if (a.dim() != v.size()) throw ContractViolation("matrix_exponential_apply: dimension mismatch");
    if (!std::isfinite(t)) throw NumericError("matrix_exponential_apply: non-finite time");
    require_finite(a.matrix, "matrix_exponential_apply");
    require_finite(v, "matrix_exponential_apply");
    if (a.hermitian) return SpectralDecomposition(a.matrix).apply_exp(t, v);
    Matrix u = (Complex(0.0, -t) * a.matrix).exp();
    return u * v;
}

inline Vector matrix_exponential_apply(const Matrix& a, double t, const Vector& v) {
    return matrix_exponential_apply(is_hermitian(a) ? Operator::hermitian_op(a) : Operator::general(a), t, v);
}

// Kronecker products with the row-major pair convention: (i,j) -> i*dim_b + j.
inline Vector tensor(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

inline Matrix tensor(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n_points) {
    if (n_points < 2 || !(t1 > t0)) throw ContractViolation("uniform_grid: need n >= 2 and t1 > t0");
    std::vector<double> g(n_points);
    double dt = (t1 - t0) / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) g[k] = t0 + dt * static_cast<double>(k);
    g.back() = t1;
    return g;
}

inline std::vector<double> log_grid(double t0, double t1, std::size_t n_points) {
    if (!(t0 > 0.0) || !(t1 > t0) || n_points < 2) throw ContractViolation("log_grid: need 0 < t0 < t1, n >= 2");
    std::vector<double> g(n_points);
    double r = std::log(t1 / t0) / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) g[k] = t0 * std::exp(r * static_cast<double>(k));
    g.back() = t1;
    return g;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ContractViolation("fit_slope: need >= 2 paired points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw NumericError("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace jumpkit

#endif
