#include "cvsteady/cvstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvsteady/errors.hpp"

namespace cvsteady::cvstate {
namespace {

double det2(const Matrix& m, std::size_t r, std::size_t c) {
    return m(r, c) * m(r + 1, c + 1) - m(r, c + 1) * m(r + 1, c);
}

void require_dim(const CovarianceMatrix& c, std::size_t dim, const char* who) {
    if (c.dim() != dim) {
        std::ostringstream os;
        os << who << ": expected a " << dim << "x" << dim << " covariance matrix, got " << c.dim() << "x" << c.dim();
        throw DimensionError(os.str());
    }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square() || (m_.rows() != 4 && m_.rows() != 6)) {
        std::ostringstream os;
        os << "covariance matrix must be 4x4 or 6x6, got " << m_.rows() << "x" << m_.cols();
        throw DimensionError(os.str());
    }
    if (!m_.all_finite()) throw ValidationError("covariance", "non-finite entry");
    const double scale = std::max(1.0, m_.max_abs());
    if (linalg::asymmetry(m_) > kSymmetryTol * scale) throw ValidationError("covariance", "matrix is not symmetric");
    for (std::size_t i = 0; i < m_.rows(); ++i)
        if (m_(i, i) < 0.0) throw ValidationError("covariance", "negative variance on the diagonal");
}

Mode parse_mode(std::string_view label) {
    if (label == "optical") return Mode::Optical;
    if (label == "mechanical") return Mode::Mechanical;
    if (label == "electrical") return Mode::Electrical;
    throw ValidationError("mode", "unknown mode '" + std::string(label) + "' (expected optical, mechanical or electrical)");
}

Matrix symplectic_form(std::size_t modes) {
    Matrix omega(2 * modes, 2 * modes);
    for (std::size_t k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

CovarianceMatrix extract_mech_lc(const CovarianceMatrix& c6) {
    require_dim(c6, 6, "extract_mech_lc");
    Matrix c4(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) c4(i, j) = c6(i + 2, j + 2);
    return CovarianceMatrix(std::move(c4));
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& c4) {
    require_dim(c4, 4, "partial_transpose");
    Matrix out = c4.matrix();
    for (std::size_t j = 0; j < 4; ++j) {
        if (j == 1) continue;
        out(1, j) = -out(1, j);
        out(j, 1) = -out(j, 1);
    }
    return CovarianceMatrix(std::move(out));
}

double min_symplectic_eigenvalue(const CovarianceMatrix& c4) {
    require_dim(c4, 4, "min_symplectic_eigenvalue");
    const Matrix& m = c4.matrix();
    const double sigma = det2(m, 0, 0) + det2(m, 2, 2) + 2.0 * det2(m, 0, 2);
    const double det = linalg::determinant(m);
    const double disc = std::max(0.0, sigma * sigma - 4.0 * det);
    const double nu_sq = 0.5 * (sigma - std::sqrt(disc));
    return std::sqrt(std::max(0.0, nu_sq));
}

double min_symplectic_eigenvalue_spectral(const CovarianceMatrix& c) {
    const auto spectrum = linalg::eigenvalues(symplectic_form(c.modes()) * c.matrix());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : spectrum) best = std::min(best, std::abs(z));
    return best;
}

double partially_transposed_nu(const CovarianceMatrix& c6) {
    return min_symplectic_eigenvalue(partial_transpose(extract_mech_lc(c6)));
}

double log_negativity_two_mode(const CovarianceMatrix& c4) {
    const double nu = min_symplectic_eigenvalue(partial_transpose(c4));
    if (nu <= 0.0) throw NumericalError("log_negativity: vanishing symplectic eigenvalue", 0);
    return std::max(0.0, -std::log(2.0 * nu));
}

double log_negativity(const CovarianceMatrix& c6) {
    require_dim(c6, 6, "log_negativity");
    return log_negativity_two_mode(extract_mech_lc(c6));
}

double duan_sum(const CovarianceMatrix& c6) {
    require_dim(c6, 6, "duan_sum");
    // X₊ = x + q over indices (2, 4); Y₋ = p − φ over (3, 5).
    const double x_plus = c6(2, 2) + c6(4, 4) + 2.0 * c6(2, 4);
    const double y_minus = c6(3, 3) + c6(5, 5) - 2.0 * c6(3, 5);
    return x_plus + y_minus;
}

double effective_occupation(const CovarianceMatrix& c6, Mode mode) {
    require_dim(c6, 6, "effective_occupation");
    const std::size_t k = mode == Mode::Optical ? 0 : mode == Mode::Mechanical ? 2 : 4;
    return 0.5 * (c6(k, k) + c6(k + 1, k + 1) - 1.0);
}

double physicality_margin(const CovarianceMatrix& c) {
    const std::size_t n = c.dim();
    const Matrix omega = symplectic_form(c.modes());
    Matrix embed(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            embed(i, j) = c(i, j);
            embed(i + n, j + n) = c(i, j);
            embed(i, j + n) = -0.5 * omega(i, j);
            embed(i + n, j) = 0.5 * omega(i, j);
        }
    const auto spectrum = linalg::eigenvalues(embed);
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& z : spectrum) lowest = std::min(lowest, z.real());
    return lowest;
}

}  // namespace cvsteady::cvstate
