#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "rdob/frequency.hpp"

namespace rdob::analysis {

using num::Complex;
using num::FrequencyResponse;

// Cumulative power spectral density: running integral of the one-sided PSD,
// so the final value recovers the signal variance.
struct CpsdCurve {
    std::vector<double> freq_hz;
    std::vector<double> cumulative;

    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

    // Accumulated power at the highest bin not above f.
    double at(double f) const {
        double v = 0.0;
        for (std::size_t i = 0; i < freq_hz.size(); ++i) {
            if (freq_hz[i] > f) break;
            v = cumulative[i];
        }
        return v;
    }
};

namespace detail {

inline void fft_radix2(std::vector<Complex>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) *
                           (inverse ? 1.0 : -1.0);
        const Complex wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

}  // namespace detail

// Welch-averaged one-sided PSD (Hann window, 50 percent overlap) integrated
// cumulatively over frequency. The mean is removed first so the final value
// estimates the variance.
inline CpsdCurve cpsd(const std::vector<double>& signal, double fs,
                      std::size_t segment = 8192) {
    if (!(fs > 0.0)) throw std::invalid_argument("cpsd: fs must be > 0");
    while (segment > 8 && signal.size() < segment + segment / 2) segment /= 2;
    if (signal.size() < segment + segment / 2)
        throw std::invalid_argument("cpsd: signal too short for two windows");

    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(signal.size());

    std::vector<double> window(segment);
    double win_power = 0.0;
    for (std::size_t i = 0; i < segment; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(segment - 1)));
        win_power += window[i] * window[i];
    }

    const std::size_t hop = segment / 2;
    const std::size_t bins = segment / 2 + 1;
    std::vector<double> psd(bins, 0.0);
    std::size_t count = 0;
    for (std::size_t start = 0; start + segment <= signal.size(); start += hop) {
        std::vector<Complex> buf(segment);
        for (std::size_t i = 0; i < segment; ++i)
            buf[i] = (signal[start + i] - mean) * window[i];
        detail::fft_radix2(buf);
        for (std::size_t k = 0; k < bins; ++k) {
            double p = std::norm(buf[k]) / (fs * win_power);
            if (k != 0 && k != segment / 2) p *= 2.0;  // one-sided
            psd[k] += p;
        }
        ++count;
    }
    for (auto& p : psd) p /= static_cast<double>(count);

    CpsdCurve curve;
    curve.freq_hz.resize(bins);
    curve.cumulative.resize(bins);
    const double df = fs / static_cast<double>(segment);
    double acc = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        curve.freq_hz[k] = static_cast<double>(k) * df;
        acc += psd[k] * df;
        curve.cumulative[k] = acc;
    }
    return curve;
}

// Steady-state hysteresis loop: the dominant cycle length is estimated from
// the input spectrum, the leading transient is dropped, and the enclosed area
// comes from the shoelace formula over the last full cycle.
struct HysteresisLoop {
    std::vector<std::pair<double, double>> cycle;  // (u, y) samples
    double area = 0.0;
};

inline HysteresisLoop hysteresis_loop(const std::vector<double>& u,
                                      const std::vector<double>& y) {
    if (u.size() != y.size()) throw std::invalid_argument("hysteresis_loop: length mismatch");
    const std::size_t n = u.size();

    // Dominant period from the largest non-DC bin of the input.
    std::size_t m = 1;
    while (m * 2 <= n) m *= 2;
    std::vector<Complex> buf(m);
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += u[n - m + i];
    mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) buf[i] = u[n - m + i] - mean;
    detail::fft_radix2(buf);
    std::size_t kbest = 1;
    double best = 0.0;
    for (std::size_t k = 1; k < m / 2; ++k) {
        if (std::norm(buf[k]) > best) {
            best = std::norm(buf[k]);
            kbest = k;
        }
    }
    if (best == 0.0) throw std::invalid_argument("hysteresis_loop: no periodic content");
    const std::size_t period = m / kbest;
    if (n < 2 * period)
        throw std::invalid_argument("hysteresis_loop: fewer than two full periods");

    HysteresisLoop loop;
    loop.cycle.reserve(period);
    const std::size_t start = n - period;
    for (std::size_t i = 0; i < period; ++i) loop.cycle.emplace_back(u[start + i], y[start + i]);
    double area2 = 0.0;
    for (std::size_t i = 0; i < period; ++i) {
        const auto& [u0, y0] = loop.cycle[i];
        const auto& [u1, y1] = loop.cycle[(i + 1) % period];
        area2 += u0 * y1 - u1 * y0;
    }
    loop.area = std::abs(area2) / 2.0;
    return loop;
}

// Grid argmax of |value|; ties break toward the lowest frequency.
inline std::pair<double, double> peak(const FrequencyResponse& fr) {
    if (fr.size() == 0) throw std::invalid_argument("peak: empty response");
    double best = -1.0;
    double where = fr.omegas.front();
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const double m = std::abs(fr.values[i]);
        if (m > best) {
            best = m;
            where = fr.omegas[i];
        }
    }
    return {where, best};
}

}  // namespace rdob::analysis
