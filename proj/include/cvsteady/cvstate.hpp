#pragma once

#include <string_view>

#include "cvsteady/linalg.hpp"

// Gaussian-state diagnostics on quadrature covariance matrices.
//
// Conventions: quadratures are ordered (X, Y, x, p, q, φ) for the full
// three-mode state and (x, p, q, φ) for the mechanics+LC pair. The vacuum
// variance is 1/2, so physical states satisfy C + iΩ/2 ⪰ 0, the partially
// transposed minimum symplectic eigenvalue certifies entanglement below 1/2,
// and the Duan bound is 2.
namespace cvsteady::cvstate {

using linalg::Matrix;

/// Symmetric covariance matrix of dimension 4 or 6, validated on construction.
class CovarianceMatrix {
public:
    static constexpr double kSymmetryTol = 1e-12;

    explicit CovarianceMatrix(Matrix m);

    std::size_t dim() const noexcept { return m_.rows(); }
    std::size_t modes() const noexcept { return m_.rows() / 2; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return m_(r, c); }
    const Matrix& matrix() const noexcept { return m_; }

private:
    Matrix m_;
};

enum class Mode { Optical, Mechanical, Electrical };

/// Accepts "optical", "mechanical" and "electrical"; ValidationError otherwise.
Mode parse_mode(std::string_view label);

/// ⊕ [[0, 1], [−1, 0]] over `modes` modes.
Matrix symplectic_form(std::size_t modes);

/// Rows/columns 3–6 of the three-mode matrix.
CovarianceMatrix extract_mech_lc(const CovarianceMatrix& c6);

/// P·C·P with P = diag(1, −1, 1, 1).
CovarianceMatrix partial_transpose(const CovarianceMatrix& c4);

/// Minimum symplectic eigenvalue of a two-mode matrix via the closed form
/// ν² = (Σ − √(Σ² − 4 det C))/2, Σ = det A + det B + 2 det K over the 2×2
/// blocks [[A, K], [Kᵀ, B]].
double min_symplectic_eigenvalue(const CovarianceMatrix& c4);

/// Same quantity from the moduli of the eigenvalues of Ω·C (identical to
/// those of iΩ·C). Works for any number of modes.
double min_symplectic_eigenvalue_spectral(const CovarianceMatrix& c);

/// ν̃₋ of the mechanics–LC partial transpose, before clamping.
double partially_transposed_nu(const CovarianceMatrix& c6);

/// E_N = max(0, −ln 2ν̃₋) across the mechanics–LC bipartition.
double log_negativity(const CovarianceMatrix& c6);

/// Two-mode version used on an already extracted 4×4 matrix.
double log_negativity_two_mode(const CovarianceMatrix& c4);

/// ⟨δX₊²⟩ + ⟨δY₋²⟩ with X₊ = x + q and Y₋ = p − φ.
double duan_sum(const CovarianceMatrix& c6);

/// ½(⟨δu²⟩ + ⟨δv²⟩ − 1) over the mode's quadrature pair, unclamped.
double effective_occupation(const CovarianceMatrix& c6, Mode mode);

/// Smallest eigenvalue of the real symmetric embedding of C + iΩ/2; a
/// physical state has this ≥ 0 (up to rounding).
double physicality_margin(const CovarianceMatrix& c);

}  // namespace cvsteady::cvstate
