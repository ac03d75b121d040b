#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "rdob/matrix.hpp"
#include "rdob/polynomial.hpp"

namespace rdob::num {

namespace detail {

// Osborne-style balancing with powers of two. A diagonal similarity, so it
// changes no eigenvalue and preserves Hessenberg structure.
inline void balance_in_place(CMat& a) {
    const std::size_t n = a.rows();
    bool converged = false;
    int guard = 0;
    while (!converged && guard++ < 100) {
        converged = true;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            // Underflow dust from squared-down exponentials must not be
            // scaled up into fake structure.
            if (c < 1e-280 || r < 1e-280) continue;
            double f = 1.0;
            double c2 = c, r2 = r;
            while (c2 < r2 / 2.0) {
                c2 *= 2.0;
                r2 /= 2.0;
                f *= 2.0;
            }
            while (c2 >= r2 * 2.0) {
                c2 /= 2.0;
                r2 *= 2.0;
                f /= 2.0;
            }
            if (c2 + r2 < 0.95 * (c + r)) {
                converged = false;
                for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

inline void hessenberg_in_place(CMat& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(a(i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;

        const Complex alpha = a(k + 1, k);
        const Complex beta =
            (alpha == Complex{}) ? Complex(-xnorm, 0.0) : -(alpha / std::abs(alpha)) * xnorm;

        std::vector<Complex> v(n - k - 1);
        v[0] = alpha - beta;
        for (std::size_t i = 1; i < v.size(); ++i) v[i] = a(k + 1 + i, k);
        double vnorm2 = 0.0;
        for (const auto& x : v) vnorm2 += std::norm(x);
        if (vnorm2 == 0.0) continue;
        const double tau = 2.0 / vnorm2;

        // Left: A(k+1:, k:) -= tau v (v^H A(k+1:, k:))
        for (std::size_t j = k; j < n; ++j) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * a(k + 1 + i, j);
            dot *= tau;
            for (std::size_t i = 0; i < v.size(); ++i) a(k + 1 + i, j) -= v[i] * dot;
        }
        // Right: A(:, k+1:) -= tau (A(:, k+1:) v) v^H
        for (std::size_t i = 0; i < n; ++i) {
            Complex dot = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) dot += a(i, k + 1 + j) * v[j];
            dot *= tau;
            for (std::size_t j = 0; j < v.size(); ++j) a(i, k + 1 + j) -= dot * std::conj(v[j]);
        }
        a(k + 1, k) = beta;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

struct Givens {
    double c;
    Complex s;
};

inline Givens make_givens(Complex a, Complex b) {
    const double absa = std::abs(a);
    const double r = std::hypot(absa, std::abs(b));
    if (r == 0.0) return {1.0, Complex{}};
    if (absa == 0.0) return {0.0, Complex(1.0, 0.0)};
    return {absa / r, (a / absa) * std::conj(b) / r};
}

// Eigenvalues of complex upper Hessenberg via explicit shifted QR with the
// Wilkinson shift. Subdiagonal deflation threshold 1e-10 relative to the
// neighbouring diagonal magnitudes.
inline std::vector<Complex> hessenberg_qr_eigenvalues(CMat h) {
    const std::size_t n = h.rows();
    std::vector<Complex> eig(n);
    if (n == 0) return eig;

    constexpr double kDeflate = 1e-10;
    double scale = inf_norm(h);
    if (scale == 0.0) scale = 1.0;

    std::size_t hi = n - 1;
    int iter_since_deflation = 0;
    long total_iters = 0;
    const long max_iters = 200 * static_cast<long>(n) + 200;

    while (true) {
        // Deflate trailing 1x1 blocks.
        while (hi > 0) {
            const double sub = std::abs(h(hi, hi - 1));
            if (sub <= kDeflate * (std::abs(h(hi - 1, hi - 1)) + std::abs(h(hi, hi))) ||
                sub <= 1e-16 * scale || sub <= 1e-290) {
                h(hi, hi - 1) = 0.0;
                eig[hi] = h(hi, hi);
                --hi;
                iter_since_deflation = 0;
            } else {
                break;
            }
        }
        if (hi == 0) {
            eig[0] = h(0, 0);
            break;
        }

        // Active block [lo, hi]: walk up until a negligible subdiagonal.
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            if (sub <= kDeflate * (std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo))) ||
                sub <= 1e-16 * scale || sub <= 1e-290) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }

        if (++total_iters > max_iters)
            throw numeric_error("eigenvalues: QR iteration failed to converge");

        // Wilkinson shift from the trailing 2x2 of the active block.
        Complex mu;
        {
            const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
            const Complex c = h(hi, hi - 1), d = h(hi, hi);
            const Complex tr2 = (a + d) * 0.5;
            const Complex disc = std::sqrt(tr2 * tr2 - (a * d - b * c));
            const Complex l1 = tr2 + disc, l2 = tr2 - disc;
            mu = (std::abs(l1 - d) < std::abs(l2 - d)) ? l1 : l2;
        }
        if (++iter_since_deflation % 12 == 0) {
            // Exceptional shift to break rare stagnation cycles.
            mu = h(hi, hi) + Complex(std::abs(h(hi, hi - 1)), 0.0) * 1.5;
        }

        // Explicit QR step on the active block: H - mu I = QR, H <- RQ + mu I.
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
        std::vector<Givens> rot(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            const Givens g = make_givens(h(i, i), h(i + 1, i));
            rot[i - lo] = g;
            for (std::size_t j = i; j <= hi; ++j) {
                const Complex t1 = h(i, j), t2 = h(i + 1, j);
                h(i, j) = g.c * t1 + g.s * t2;
                h(i + 1, j) = -std::conj(g.s) * t1 + g.c * t2;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const Givens g = rot[i - lo];
            const std::size_t top = lo;
            for (std::size_t r = top; r <= std::min(i + 2, hi); ++r) {
                const Complex t1 = h(r, i), t2 = h(r, i + 1);
                h(r, i) = g.c * t1 + std::conj(g.s) * t2;
                h(r, i + 1) = -g.s * t1 + g.c * t2;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
    }
    return eig;
}

}  // namespace detail

inline std::vector<Complex> eigenvalues(CMat a) {
    if (!a.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (!a.all_finite()) throw std::invalid_argument("eigenvalues: non-finite entries");

    // Power-of-two prescaling keeps the iteration out of the subnormal range
    // (exponentials of stiff stable matrices have entries near 1e-300 where
    // shifts and rotations stall).
    double top = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) top = std::max(top, std::abs(a(i, j)));
    if (top == 0.0) return std::vector<Complex>(a.rows(), Complex{});
    const double scale = std::exp2(-std::ceil(std::log2(top)));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            a(i, j) *= scale;
            // Entries this far below the dominant scale perturb no eigenvalue
            // meaningfully but their squared norms underflow inside the
            // Householder sweep.
            if (std::abs(a(i, j)) < 1e-120) a(i, j) = 0.0;
        }

    detail::balance_in_place(a);
    detail::hessenberg_in_place(a);
    auto eig = detail::hessenberg_qr_eigenvalues(std::move(a));
    if (scale != 1.0)
        for (auto& l : eig) l /= scale;
    return eig;
}

inline std::vector<Complex> eigenvalues(const RMat& a) { return eigenvalues(to_complex(a)); }

inline double spectral_radius(const RMat& a) {
    double r = 0.0;
    for (const auto& l : eigenvalues(a)) r = std::max(r, std::abs(l));
    return r;
}

// Polynomial roots via the (balanced) companion matrix.
inline std::vector<Complex> roots(const Polynomial& p) {
    if (p.is_zero()) throw std::invalid_argument("roots: zero polynomial");
    const auto& c = p.coeffs();
    const std::size_t n = p.degree();
    if (n == 0) return {};
    CMat comp(n, n);
    for (std::size_t j = 0; j < n; ++j) comp(0, j) = Complex(-c[j + 1] / c[0], 0.0);
    for (std::size_t i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    detail::balance_in_place(comp);
    return detail::hessenberg_qr_eigenvalues(std::move(comp));
}

}  // namespace rdob::num
