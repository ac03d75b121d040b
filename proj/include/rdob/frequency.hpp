#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rdob/errors.hpp"

namespace rdob::num {

using Complex = std::complex<double>;

// Complex response samples over a strictly increasing positive frequency grid.
struct FrequencyResponse {
    std::vector<double> omegas;
    std::vector<Complex> values;

    FrequencyResponse() = default;
    FrequencyResponse(std::vector<double> w, std::vector<Complex> v)
        : omegas(std::move(w)), values(std::move(v)) {
        if (omegas.size() != values.size())
            throw std::invalid_argument("FrequencyResponse: length mismatch");
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            if (!(omegas[i] > 0.0))
                throw std::invalid_argument("FrequencyResponse: omegas must be > 0");
            if (i > 0 && !(omegas[i] > omegas[i - 1]))
                throw std::invalid_argument("FrequencyResponse: omegas must be increasing");
        }
    }

    std::size_t size() const { return omegas.size(); }
};

// Log-spaced grid, points_per_decade points per decade, both endpoints included.
inline std::vector<double> log_grid(double omega_min, double omega_max,
                                    std::size_t points_per_decade = 100) {
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw std::invalid_argument("log_grid: need 0 < omega_min < omega_max");
    if (points_per_decade == 0) throw std::invalid_argument("log_grid: zero density");
    const double lo = std::log10(omega_min), hi = std::log10(omega_max);
    const std::size_t n =
        static_cast<std::size_t>(std::ceil((hi - lo) * static_cast<double>(points_per_decade))) + 1;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    w.front() = omega_min;
    w.back() = omega_max;
    return w;
}

inline double magnitude_db(Complex v) { return 20.0 * std::log10(std::abs(v)); }
inline double phase_deg(Complex v) { return std::arg(v) * 180.0 / std::numbers::pi; }

}  // namespace rdob::num
