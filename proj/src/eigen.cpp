#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvsteady/errors.hpp"
#include "cvsteady/linalg.hpp"

namespace cvsteady::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDeflationTol = 1e-14;
constexpr std::size_t kSweepsPerDimension = 100;

// Householder reduction to upper Hessenberg form; h ← qᵀ·h·q with q accumulated.
void reduce_to_hessenberg(Matrix& h, Matrix& q) {
    const std::size_t n = h.rows();
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm += h(i, k) * h(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;

        const double alpha = h(k + 1, k) > 0.0 ? -norm : norm;
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += v[i] * v[i];
        if (vnorm == 0.0) continue;
        const double beta = 2.0 / vnorm;

        // h ← (I − βvvᵀ)·h
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
        }
        // h ← h·(I − βvvᵀ), q ← q·(I − βvvᵀ)
        for (Matrix* m : {&h, &q}) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = k + 1; j < n; ++j) s += (*m)(i, j) * v[j];
                s *= beta;
                for (std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= s * v[j];
            }
        }
        h(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix, after the EISPACK
// hqr2 scheme: exceptional shifts at iterations 10 and 30 of a stalled block,
// real 2×2 blocks rotated to triangular form, complex pairs left as 2×2 blocks.
void francis_qr(Matrix& h, Matrix& v, double deflation_floor) {
    const int nn = static_cast<int>(h.rows());
    const int low = 0;
    const int high = nn - 1;
    const std::size_t max_sweeps = kSweepsPerDimension * h.rows();

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

    int n = nn - 1;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w, x, y;
    int iter = 0;
    std::size_t sweeps = 0;

    while (n >= low) {
        int l = n;
        while (l > low) {
            s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            const double sub = std::abs(h(l, l - 1));
            if (sub < kEps * s || sub <= deflation_floor) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }

        if (l == n) {
            h(n, n) += exshift;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = h(n, n - 1) * h(n - 1, n);
            p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            h(n, n) += exshift;
            h(n - 1, n - 1) += exshift;
            x = h(n, n);

            if (q >= 0) {
                z = p >= 0 ? p + z : p - z;
                x = h(n, n - 1);
                s = std::abs(x) + std::abs(z);
                p = x / s;
                q = z / s;
                r = std::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for (int j = n - 1; j < nn; ++j) {
                    z = h(n - 1, j);
                    h(n - 1, j) = q * z + p * h(n, j);
                    h(n, j) = q * h(n, j) - p * z;
                }
                for (int i = 0; i <= n; ++i) {
                    z = h(i, n - 1);
                    h(i, n - 1) = q * z + p * h(i, n);
                    h(i, n) = q * h(i, n) - p * z;
                }
                for (int i = low; i <= high; ++i) {
                    z = v(i, n - 1);
                    v(i, n - 1) = q * z + p * v(i, n);
                    v(i, n) = q * v(i, n) - p * z;
                }
                h(n, n - 1) = 0.0;
            }
            n -= 2;
            iter = 0;
        } else {
            if (++sweeps > max_sweeps) {
                std::ostringstream os;
                os << "eigenvalues: QR iteration did not converge after " << max_sweeps << " sweeps";
                throw NumericalError(os.str(), max_sweeps);
            }
            x = h(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = h(n - 1, n - 1);
                w = h(n, n - 1) * h(n - 1, n);
            }
            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i) h(i, i) -= x;
                s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i) h(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            ++iter;

            int m = n - 2;
            while (m >= l) {
                z = h(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                q = h(m + 1, m + 1) - z - r - s;
                r = h(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    kEps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                h(i, i - 2) = 0.0;
                if (i > m + 2) h(i, i - 3) = 0.0;
            }

            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = h(k, k - 1);
                    q = h(k + 1, k - 1);
                    r = notlast ? h(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s == 0.0) continue;

                if (k != m)
                    h(k, k - 1) = -s * x;
                else if (l != m)
                    h(k, k - 1) = -h(k, k - 1);
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for (int j = k; j < nn; ++j) {
                    p = h(k, j) + q * h(k + 1, j);
                    if (notlast) {
                        p += r * h(k + 2, j);
                        h(k + 2, j) -= p * z;
                    }
                    h(k, j) -= p * x;
                    h(k + 1, j) -= p * y;
                }
                for (int i = 0; i <= std::min(n, k + 3); ++i) {
                    p = x * h(i, k) + y * h(i, k + 1);
                    if (notlast) {
                        p += z * h(i, k + 2);
                        h(i, k + 2) -= p * r;
                    }
                    h(i, k) -= p;
                    h(i, k + 1) -= p * q;
                }
                for (int i = low; i <= high; ++i) {
                    p = x * v(i, k) + y * v(i, k + 1);
                    if (notlast) {
                        p += z * v(i, k + 2);
                        v(i, k + 2) -= p * r;
                    }
                    v(i, k) -= p;
                    v(i, k + 1) -= p * q;
                }
            }
        }
    }

    // Bulge-chasing leaves stale values below the subdiagonal.
    for (int i = 0; i < nn; ++i)
        for (int j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

void check_square_finite(const Matrix& m, const char* who) {
    if (!m.is_square() || m.rows() == 0) {
        std::ostringstream os;
        os << who << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
    if (!m.all_finite()) throw DimensionError(std::string(who) + ": non-finite matrix entry");
}

}  // namespace

RealSchur real_schur(const Matrix& m) {
    check_square_finite(m, "real_schur");
    RealSchur out{m, Matrix::identity(m.rows())};
    reduce_to_hessenberg(out.t, out.q);
    francis_qr(out.t, out.q, kDeflationTol * m.frobenius_norm());
    return out;
}

Spectrum eigenvalues(const Matrix& m) {
    const RealSchur schur = real_schur(m);
    const Matrix& t = schur.t;
    const std::size_t n = t.rows();
    Spectrum out;
    out.reserve(n);
    for (std::size_t i = 0; i < n;) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            const double a = t(i, i), b = t(i, i + 1), c = t(i + 1, i), d = t(i + 1, i + 1);
            const double mean = 0.5 * (a + d);
            const double half_diff = 0.5 * (a - d);
            const double disc = half_diff * half_diff + b * c;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                out.emplace_back(mean + root, 0.0);
                out.emplace_back(mean - root, 0.0);
            } else {
                const double root = std::sqrt(-disc);
                out.emplace_back(mean, root);
                out.emplace_back(mean, -root);
            }
            i += 2;
        } else {
            out.emplace_back(t(i, i), 0.0);
            i += 1;
        }
    }
    return out;
}

double max_real_part(const Spectrum& spectrum) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : spectrum) best = std::max(best, z.real());
    return best;
}

}  // namespace cvsteady::linalg
