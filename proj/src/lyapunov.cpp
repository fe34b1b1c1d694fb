#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvsteady/errors.hpp"
#include "cvsteady/linalg.hpp"

namespace cvsteady::linalg {
namespace {

void check_pair(const Matrix& a, const Matrix& d, const char* who) {
    if (!a.is_square() || a.rows() == 0) throw DimensionError(std::string(who) + ": drift matrix must be square");
    if (d.rows() != a.rows() || d.cols() != a.cols())
        throw DimensionError(std::string(who) + ": diffusion matrix shape does not match drift matrix");
    if (!a.all_finite() || !d.all_finite()) throw DimensionError(std::string(who) + ": non-finite entry");
}

struct Block {
    std::size_t start;
    std::size_t size;
};

std::vector<Block> diagonal_blocks(const Matrix& t) {
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < t.rows();) {
        const std::size_t size = (i + 1 < t.rows() && t(i + 1, i) != 0.0) ? 2 : 1;
        blocks.push_back({i, size});
        i += size;
    }
    return blocks;
}

}  // namespace

Matrix solve_lyapunov(const Matrix& a, const Matrix& d) {
    check_pair(a, d, "solve_lyapunov");
    const std::size_t n = a.rows();

    const RealSchur schur = real_schur(a);
    const Matrix& t = schur.t;
    const auto blocks = diagonal_blocks(t);

    // Stability from the diagonal blocks of the Schur form.
    double margin = -std::numeric_limits<double>::infinity();
    for (const Block& b : blocks) {
        const double re = b.size == 1 ? t(b.start, b.start) : 0.5 * (t(b.start, b.start) + t(b.start + 1, b.start + 1));
        margin = std::max(margin, re);
    }
    if (!(margin < 0.0)) {
        std::ostringstream os;
        os << "solve_lyapunov: drift matrix is not Hurwitz (max Re λ = " << margin << ")";
        throw StabilityError(os.str(), margin);
    }

    // T·Y + Y·Tᵀ = R with R = −Qᵀ·D·Q and C = Q·Y·Qᵀ.
    const Matrix& q = schur.q;
    Matrix r = q.transpose() * d * q;
    r *= -1.0;
    Matrix y(n, n);

    for (std::size_t bp = blocks.size(); bp-- > 0;) {
        const Block p = blocks[bp];
        for (std::size_t bq = blocks.size(); bq-- > 0;) {
            const Block s = blocks[bq];

            // rhs = R_ps − Σ_{k>p} T_pk·Y_ks − Σ_{k>s} Y_pk·T_skᵀ
            Matrix rhs(p.size, s.size);
            for (std::size_t i = 0; i < p.size; ++i)
                for (std::size_t j = 0; j < s.size; ++j) {
                    const std::size_t gi = p.start + i, gj = s.start + j;
                    double v = r(gi, gj);
                    for (std::size_t k = p.start + p.size; k < n; ++k) v -= t(gi, k) * y(k, gj);
                    for (std::size_t k = s.start + s.size; k < n; ++k) v -= y(gi, k) * t(gj, k);
                    rhs(i, j) = v;
                }

            // (I ⊗ T_pp + T_ss ⊗ I)·vec(Y_ps) = vec(rhs), column-major vec.
            const std::size_t m = p.size * s.size;
            Matrix k(m, m);
            std::vector<double> b(m);
            for (std::size_t j = 0; j < s.size; ++j)
                for (std::size_t i = 0; i < p.size; ++i) {
                    const std::size_t row = i + j * p.size;
                    b[row] = rhs(i, j);
                    for (std::size_t jj = 0; jj < s.size; ++jj)
                        for (std::size_t ii = 0; ii < p.size; ++ii) {
                            double v = 0.0;
                            if (jj == j) v += t(p.start + i, p.start + ii);
                            if (ii == i) v += t(s.start + j, s.start + jj);
                            k(row, ii + jj * p.size) = v;
                        }
                }

            std::vector<double> sol;
            try {
                sol = solve_linear(k, b);
            } catch (const SingularMatrixError& e) {
                throw NumericalError(std::string("solve_lyapunov: Schur block solve broke down: ") + e.what(), 0);
            }
            for (std::size_t j = 0; j < s.size; ++j)
                for (std::size_t i = 0; i < p.size; ++i) y(p.start + i, s.start + j) = sol[i + j * p.size];
        }
    }

    Matrix c = q * y * q.transpose();
    if (!c.all_finite()) throw NumericalError("solve_lyapunov: non-finite solution", 0);
    return symmetrized(c);
}

Matrix solve_lyapunov_kronecker(const Matrix& a, const Matrix& d) {
    check_pair(a, d, "solve_lyapunov_kronecker");
    const std::size_t n = a.rows();
    const std::size_t m = n * n;
    Matrix k(m, m);
    std::vector<double> rhs(m);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = i + j * n;
            rhs[row] = -d(i, j);
            for (std::size_t ii = 0; ii < n; ++ii) k(row, ii + j * n) += a(i, ii);
            for (std::size_t jj = 0; jj < n; ++jj) k(row, i + jj * n) += a(j, jj);
        }
    const std::vector<double> v = solve_linear(k, rhs);
    Matrix c(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) c(i, j) = v[i + j * n];
    return symmetrized(c);
}

double lyapunov_residual(const Matrix& a, const Matrix& c, const Matrix& d) {
    return (a * c + c * a.transpose() + d).frobenius_norm();
}

}  // namespace cvsteady::linalg
