#pragma once

#include <cmath>
#include <vector>

#include "rdob/matrix.hpp"

namespace rdob::num {

namespace detail {

// Osborne balancing with powers of two: returns the scale d with
// a <- D^-1 A D, d = diag(D). Loop matrices assembled from biproper inverse
// realizations are wildly non-normal (norm ~1e19 against spectral radius
// ~1e6); without this the squaring phase of the exponential loses all
// accuracy to the hump.
inline std::vector<double> balance_in_place_real(RMat& a) {
    const std::size_t n = a.rows();
    std::vector<double> d(n, 1.0);
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
                d[i] *= f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
    return d;
}

}  // namespace detail

// Matrix exponential, Pade [13/13] with norm-based scaling and squaring,
// applied in balanced coordinates.
inline RMat expm(const RMat& m) {
    if (!m.square()) throw std::invalid_argument("expm: matrix must be square");
    if (!m.all_finite()) throw std::invalid_argument("expm: non-finite entries");
    const std::size_t n = m.rows();
    if (n == 0) return m;

    RMat a = m;
    const std::vector<double> d = detail::balance_in_place_real(a);

    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm = one_norm(a);
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        a = a * std::pow(2.0, -squarings);
    }

    const RMat eye = RMat::identity(n);
    const RMat a2 = a * a;
    const RMat a4 = a2 * a2;
    const RMat a6 = a2 * a4;

    const RMat u =
        a * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] +
             eye * b[1]);
    const RMat v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] +
                   a2 * b[2] + eye * b[0];

    RMat r = solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) *= d[i] / d[j];
    if (!r.all_finite()) throw numeric_error("expm: overflow");
    return r;
}

}  // namespace rdob::num
