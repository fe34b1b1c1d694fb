#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "cvsteady/errors.hpp"
#include "cvsteady/linalg.hpp"

namespace cvsteady::linalg {
namespace {

// Pivots smaller than this fraction of max|M| mean a condition number beyond
// roughly 1e-3/ε, which we treat as singular.
constexpr double kPivotRatio = 1e3 * std::numeric_limits<double>::epsilon();

struct LuFactors {
    Matrix lu;
    std::vector<std::size_t> perm;
    int swaps = 0;
    double smallest_pivot = std::numeric_limits<double>::infinity();
    bool exactly_singular = false;
};

LuFactors factorize(const Matrix& m) {
    if (!m.is_square()) throw DimensionError("LU of a non-square matrix");
    const std::size_t n = m.rows();
    LuFactors f{m, std::vector<std::size_t>(n), 0};
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
    Matrix& a = f.lu;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(f.perm[k], f.perm[p]);
            ++f.swaps;
        }
        const double pivot = a(k, k);
        f.smallest_pivot = std::min(f.smallest_pivot, std::abs(pivot));
        if (pivot == 0.0) {
            f.exactly_singular = true;
            continue;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = a(i, k) / pivot;
            a(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return f;
}

}  // namespace

std::vector<double> solve_linear(const Matrix& m, std::span<const double> b) {
    if (!m.is_square()) throw DimensionError("solve_linear: matrix is not square");
    if (b.size() != m.rows()) throw DimensionError("solve_linear: right-hand side length mismatch");
    if (!m.all_finite()) throw DimensionError("solve_linear: non-finite matrix entry");

    const std::size_t n = m.rows();
    const double scale = m.max_abs();
    const LuFactors f = factorize(m);
    if (f.exactly_singular || scale == 0.0 || f.smallest_pivot <= kPivotRatio * scale) {
        std::ostringstream os;
        os << "solve_linear: matrix is singular to working precision (pivot " << f.smallest_pivot
           << ", max entry " << scale << ")";
        throw SingularMatrixError(os.str(), f.smallest_pivot);
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

double determinant(const Matrix& m) {
    const LuFactors f = factorize(m);
    if (f.exactly_singular) return 0.0;
    double det = (f.swaps % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) det *= f.lu(i, i);
    return det;
}

}  // namespace cvsteady::linalg
