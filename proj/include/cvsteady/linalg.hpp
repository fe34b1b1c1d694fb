#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cvsteady::linalg {

/// Dense row-major real matrix. Sized at runtime; the library only ever uses
/// small dimensions (4, 6, 12 and 36 for the vectorized oracle).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);
    static Matrix diagonal(std::initializer_list<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// (M + Mᵀ)/2
Matrix symmetrized(const Matrix& m);

/// Largest |Mᵢⱼ − Mⱼᵢ|.
double asymmetry(const Matrix& m);

/// Eigenvalues of a square matrix, in the order they are deflated.
using Spectrum = std::vector<std::complex<double>>;

/// All eigenvalues of a real square matrix. Householder reduction to upper
/// Hessenberg form followed by Francis double-shift QR. The iteration is
/// capped at 100·n sweeps; NumericalError carries the count on failure.
Spectrum eigenvalues(const Matrix& m);

/// max Re(λ) over the spectrum.
double max_real_part(const Spectrum& spectrum);

struct RealSchur {
    Matrix t;  ///< quasi-upper-triangular, 1×1 and 2×2 diagonal blocks
    Matrix q;  ///< orthogonal, m = q·t·qᵀ
};

RealSchur real_schur(const Matrix& m);

/// Solves m·x = b by LU with partial pivoting. SingularMatrixError carries
/// the offending pivot when it falls below the conditioning threshold.
std::vector<double> solve_linear(const Matrix& m, std::span<const double> b);

/// Determinant by LU with partial pivoting (exact zero for a singular pivot).
double determinant(const Matrix& m);

/// Stationary covariance of dx = a·x dt + noise: solves a·c + c·aᵀ + d = 0
/// by Bartels–Stewart on the real Schur form of a. Requires every eigenvalue
/// of a to lie strictly in the left half plane; otherwise StabilityError.
/// The result is returned symmetrized.
Matrix solve_lyapunov(const Matrix& a, const Matrix& d);

/// Same equation solved through the n²×n² system (I⊗A + A⊗I)·vec(C) = −vec(D).
/// Independent of the Schur path; used as the reference solution.
Matrix solve_lyapunov_kronecker(const Matrix& a, const Matrix& d);

/// ‖a·c + c·aᵀ + d‖_F
double lyapunov_residual(const Matrix& a, const Matrix& c, const Matrix& d);

}  // namespace cvsteady::linalg
