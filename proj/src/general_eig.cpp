#include "npm/general_eig.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace npm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder similarity reduction to upper Hessenberg form, accumulating the
// orthogonal transform: A = Q H Q^T.
void hessenberg(Matrix& h, Matrix& q) {
    const Index n = h.rows();
    q = Matrix::Identity(n, n);
    for (Index k = 0; k + 2 < n; ++k) {
        Vector x = h.col(k).segment(k + 1, n - k - 1);
        const double xnorm = x.norm();
        if (xnorm == 0.0) continue;
        // Reflector direction avoiding cancellation in the leading entry.
        const double alpha = x(0) >= 0.0 ? -xnorm : xnorm;
        Vector v = x;
        v(0) -= alpha;
        const double vsq = v.squaredNorm();
        if (vsq == 0.0) continue;
        const double beta = 2.0 / vsq;

        auto rows = h.block(k + 1, k, n - k - 1, n - k);
        rows -= beta * v * (v.transpose() * rows);
        auto cols = h.block(0, k + 1, n, n - k - 1);
        cols -= beta * (cols * v) * v.transpose();
        auto qcols = q.block(0, k + 1, n, n - k - 1);
        qcols -= beta * (qcols * v) * v.transpose();

        h(k + 1, k) = alpha;
        h.col(k).segment(k + 2, n - k - 2).setZero();
    }
}

// Francis double-shift QR on an upper Hessenberg matrix. On return h is
// quasi-upper-triangular (real Schur form, with 2x2 blocks only for complex
// conjugate pairs) and q accumulates the full orthogonal similarity.
void francis_qr(Matrix& h, Matrix& q) {
    const Index nn = h.rows();
    if (nn <= 1) return;

    // Envelope norm used in the negligibility fallback.
    double norm = 0.0;
    for (Index i = 0; i < nn; ++i)
        for (Index j = std::max<Index>(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));
    if (norm == 0.0) return;

    double exshift = 0.0;
    Index act = nn - 1;
    int iter = 0;

    while (act >= 0) {
        // Find the active block: smallest l with a negligible subdiagonal.
        Index l = act;
        while (l > 0) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
            --l;
        }

        if (l == act) {
            h(act, act) += exshift;
            --act;
            iter = 0;
            continue;
        }

        if (l == act - 1) {
            // 2x2 block at the bottom: split real pairs, keep complex pairs.
            h(act, act) += exshift;
            h(act - 1, act - 1) += exshift;
            const double w = h(act, act - 1) * h(act - 1, act);
            double p = (h(act - 1, act - 1) - h(act, act)) / 2.0;
            const double disc = p * p + w;
            if (disc >= 0.0) {
                // Real eigenvalues: rotate onto the eigenvector [z, h21] to
                // annihilate the subdiagonal.
                double z = std::sqrt(disc);
                z = p >= 0.0 ? p + z : p - z;
                const double x = h(act, act - 1);
                double s = std::abs(x) + std::abs(z);
                double cp = x / s;
                double cq = z / s;
                const double r = std::sqrt(cp * cp + cq * cq);
                cp /= r;
                cq /= r;
                for (Index j = act - 1; j < nn; ++j) {
                    const double t = h(act - 1, j);
                    h(act - 1, j) = cq * t + cp * h(act, j);
                    h(act, j) = cq * h(act, j) - cp * t;
                }
                for (Index i = 0; i <= act; ++i) {
                    const double t = h(i, act - 1);
                    h(i, act - 1) = cq * t + cp * h(i, act);
                    h(i, act) = cq * h(i, act) - cp * t;
                }
                for (Index i = 0; i < nn; ++i) {
                    const double t = q(i, act - 1);
                    q(i, act - 1) = cq * t + cp * q(i, act);
                    q(i, act) = cq * q(i, act) - cp * t;
                }
                h(act, act - 1) = 0.0;
            }
            act -= 2;
            iter = 0;
            continue;
        }

        // No deflation yet: one Francis double-shift sweep.
        double x = h(act, act);
        double y = h(act - 1, act - 1);
        double w = h(act, act - 1) * h(act - 1, act);

        if (iter == 10 || iter == 20) {
            // Exceptional shift (ad hoc, classic) to break symmetry cycles.
            exshift += x;
            for (Index i = 0; i <= act; ++i) h(i, i) -= x;
            const double s = std::abs(h(act, act - 1)) + std::abs(h(act - 1, act - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
        }
        ++iter;
        if (iter >= 30) {
            throw EigFailed("general_eig: QR iteration did not converge");
        }

        // Look for two consecutive small subdiagonals to start the sweep.
        Index m = act - 2;
        double p = 0.0, qv = 0.0, r = 0.0;
        while (m >= l) {
            const double z = h(m, m);
            const double rr = x - z;
            const double ss = y - z;
            p = (rr * ss - w) / h(m + 1, m) + h(m, m + 1);
            qv = h(m + 1, m + 1) - z - rr - ss;
            r = h(m + 2, m + 1);
            const double scale = std::abs(p) + std::abs(qv) + std::abs(r);
            p /= scale;
            qv /= scale;
            r /= scale;
            if (m == l) break;
            if (std::abs(h(m, m - 1)) * (std::abs(qv) + std::abs(r)) <
                kEps * (std::abs(p) *
                        (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1))))) {
                break;
            }
            --m;
        }
        for (Index i = m + 2; i <= act; ++i) {
            h(i, i - 2) = 0.0;
            if (i > m + 2) h(i, i - 3) = 0.0;
        }

        // Double QR step chasing the bulge from m to act.
        for (Index k = m; k < act; ++k) {
            const bool notlast = k != act - 1;
            if (k != m) {
                p = h(k, k - 1);
                qv = h(k + 1, k - 1);
                r = notlast ? h(k + 2, k - 1) : 0.0;
                x = std::abs(p) + std::abs(qv) + std::abs(r);
                if (x == 0.0) continue;
                p /= x;
                qv /= x;
                r /= x;
            }
            double s = std::sqrt(p * p + qv * qv + r * r);
            if (p < 0.0) s = -s;
            if (s == 0.0) continue;
            if (k != m) {
                h(k, k - 1) = -s * x;
            } else if (l != m) {
                h(k, k - 1) = -h(k, k - 1);
            }
            p += s;
            x = p / s;
            y = qv / s;
            const double z = r / s;
            qv /= p;
            r /= p;

            for (Index j = k; j < nn; ++j) {
                double pp = h(k, j) + qv * h(k + 1, j);
                if (notlast) pp += r * h(k + 2, j);
                h(k, j) -= pp * x;
                h(k + 1, j) -= pp * y;
                if (notlast) h(k + 2, j) -= pp * z;
            }
            const Index ilim = std::min(act, k + 3);
            for (Index i = 0; i <= ilim; ++i) {
                double pp = x * h(i, k) + y * h(i, k + 1);
                if (notlast) pp += z * h(i, k + 2);
                h(i, k) -= pp;
                h(i, k + 1) -= pp * qv;
                if (notlast) h(i, k + 2) -= pp * r;
            }
            for (Index i = 0; i < nn; ++i) {
                double pp = x * q(i, k) + y * q(i, k + 1);
                if (notlast) pp += z * q(i, k + 2);
                q(i, k) -= pp;
                q(i, k + 1) -= pp * qv;
                if (notlast) q(i, k + 2) -= pp * r;
            }
        }
    }

    // Deflation can leave roundoff-size bulge remnants below the first
    // subdiagonal; the quasi-triangular contract wants exact zeros there.
    for (Index i = 2; i < nn; ++i)
        for (Index j = 0; j + 1 < i; ++j) h(i, j) = 0.0;
}

// Convert the real Schur form to a complex upper-triangular form by
// triangularizing each conjugate-pair 2x2 block with a unitary rotation.
// pair_start[i] marks the first member of a conjugate pair at (i, i+1).
void complex_schur(const RealSchur& rs, ComplexMatrix& t, ComplexMatrix& q,
                   std::vector<bool>& pair_start) {
    const Index n = rs.t.rows();
    t = rs.t.cast<Complex>();
    q = rs.q.cast<Complex>();
    pair_start.assign(static_cast<size_t>(n), false);
    Index i = 0;
    while (i < n) {
        if (i == n - 1 || t(i + 1, i) == Complex(0.0)) {
            ++i;
            continue;
        }
        const double a = rs.t(i, i);
        const double b = rs.t(i, i + 1);
        const double c = rs.t(i + 1, i);
        const double d = rs.t(i + 1, i + 1);
        const double half = (a - d) / 2.0;
        // francis_qr leaves 2x2 blocks only for conjugate pairs, so the
        // discriminant is negative.
        const double disc = half * half + b * c;
        const Complex lambda((a + d) / 2.0, std::sqrt(std::max(0.0, -disc)));
        // Eigenvector of the 2x2 block for lambda.
        Eigen::Vector2cd v;
        if (std::abs(b) + std::abs(lambda - a) > std::abs(c) + std::abs(lambda - d)) {
            v << b, lambda - a;
        } else {
            v << lambda - d, c;
        }
        v.normalize();
        Eigen::Matrix2cd g;
        g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));

        t.middleRows(i, 2) = g.adjoint() * t.middleRows(i, 2);
        t.middleCols(i, 2) = t.middleCols(i, 2) * g;
        q.middleCols(i, 2) = q.middleCols(i, 2) * g;
        t(i + 1, i) = Complex(0.0);
        // Pin the pair exactly conjugate; the transform already puts them
        // within roundoff of these values.
        t(i, i) = lambda;
        t(i + 1, i + 1) = std::conj(lambda);
        pair_start[static_cast<size_t>(i)] = true;
        i += 2;
    }
}

// Unit eigenvector of the upper-triangular t for the eigenvalue at diagonal
// index j, via back-substitution with guarded denominators.
ComplexVector triangular_eigvec(const ComplexMatrix& t, Index j, double tnorm) {
    ComplexVector x = ComplexVector::Zero(t.rows());
    x(j) = Complex(1.0);
    const Complex lambda = t(j, j);
    for (Index i = j - 1; i >= 0; --i) {
        Complex s(0.0);
        for (Index k = i + 1; k <= j; ++k) s += t(i, k) * x(k);
        Complex denom = t(i, i) - lambda;
        if (std::abs(denom) < kEps * tnorm) denom = Complex(kEps * tnorm);
        x(i) = -s / denom;
        const double mag = std::abs(x(i));
        if (mag > 1e100) x.segment(i, j - i + 1) /= mag;
    }
    return x;
}

}  // namespace

RealSchur real_schur(const Matrix& m) {
    require_finite(m, "real_schur");
    if (m.rows() != m.cols()) throw ShapeError("real_schur: matrix not square");
    RealSchur rs;
    rs.t = m;
    hessenberg(rs.t, rs.q);
    francis_qr(rs.t, rs.q);
    return rs;
}

Spectrum general_eig(const Matrix& m) {
    require_finite(m, "general_eig");
    if (m.rows() != m.cols()) throw ShapeError("general_eig: matrix not square");
    const Index n = m.rows();
    if (n > 64) throw ShapeError("general_eig: oracle limited to n <= 64");

    const RealSchur rs = real_schur(m);
    ComplexMatrix t, qc;
    std::vector<bool> pair_start;
    complex_schur(rs, t, qc, pair_start);

    const double tnorm = std::max(t.norm(), 1.0);

    ComplexVector values(n);
    ComplexMatrix vectors(n, n);
    Index i = 0;
    while (i < n) {
        values(i) = t(i, i);
        ComplexVector psi = qc * triangular_eigvec(t, i, tnorm);
        psi /= psi.norm();
        // Deterministic phase: rotate the largest component onto the
        // positive real axis (makes real eigenvectors real).
        Index imax = 0;
        psi.cwiseAbs().maxCoeff(&imax);
        const Complex phase = psi(imax) / std::abs(psi(imax));
        psi /= phase;
        vectors.col(i) = psi;

        if (pair_start[static_cast<size_t>(i)]) {
            // Conjugate mate of a 2x2 pair: conjugation is exact for real input.
            values(i + 1) = std::conj(values(i));
            vectors.col(i + 1) = psi.conjugate();
            i += 2;
        } else {
            ++i;
        }
    }

    // Order: |lambda| descending, then Re descending, then Im descending.
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ma = std::abs(values(a));
        const double mb = std::abs(values(b));
        if (ma != mb) return ma > mb;
        if (values(a).real() != values(b).real()) return values(a).real() > values(b).real();
        return values(a).imag() > values(b).imag();
    });

    Spectrum spec;
    spec.values = ComplexVector(n);
    spec.vectors = ComplexMatrix(n, n);
    for (Index k = 0; k < n; ++k) {
        spec.values(k) = values(order[static_cast<size_t>(k)]);
        spec.vectors.col(k) = vectors.col(order[static_cast<size_t>(k)]);
    }
    spec.tie_with_next.resize(static_cast<size_t>(n > 0 ? n - 1 : 0));
    for (Index k = 0; k + 1 < n; ++k) {
        const double a = std::abs(spec.values(k));
        const double b = std::abs(spec.values(k + 1));
        spec.tie_with_next[static_cast<size_t>(k)] = (a - b) <= 1e-9 * std::max(a, b);
    }
    return spec;
}

}  // namespace npm
