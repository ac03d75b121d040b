#pragma once

#include <atomic>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "rdob/augmented_loop.hpp"
#include "rdob/eig.hpp"
#include "rdob/expm.hpp"

namespace rdob::stab {

using num::Complex;
using num::RMat;

// Base-linear precondition: with the jumps removed the loop must already be
// stable, checked before any reset analysis.
inline bool base_linear_stable(const AugmentedLoop& loop) {
    for (const auto& l : num::eigenvalues(loop.A))
        if (l.real() >= 0.0) return false;
    return true;
}

inline double max_reset_eigenvalue(const AugmentedLoop& loop, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("stability: omega must be > 0");
    RMat e;
    try {
        e = num::expm(loop.A * (std::numbers::pi / omega));
    } catch (const numeric_error&) {
        throw numeric_error("stability: expm overflow at omega " + std::to_string(omega));
    }
    // Diagonal reset map: row scaling. Stiff modes leave underflow dust in
    // the exponential at low frequencies; flush it so the QR iteration sees
    // exact zeros instead of denormal noise.
    double top = 0.0;
    for (std::size_t i = 0; i < e.rows(); ++i)
        for (std::size_t j = 0; j < e.cols(); ++j) top = std::max(top, std::abs(e(i, j)));
    const double floor = 1e-250 * std::max(top, 1.0);
    for (std::size_t i = 0; i < e.rows(); ++i) {
        const double s = loop.reset_map(i, i);
        for (std::size_t j = 0; j < e.cols(); ++j) {
            e(i, j) *= s;
            if (std::abs(e(i, j)) < floor) e(i, j) = 0.0;
        }
    }
    double worst = 0.0;
    for (const auto& l : num::eigenvalues(e)) worst = std::max(worst, std::abs(l));
    return worst;
}

struct SweepResult {
    std::vector<double> omegas;
    std::vector<double> max_eig;
    bool all_stable = false;
};

inline unsigned sweep_thread_count(std::size_t work_items) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("RDOB_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(work_items, 1)));
}

// Stability sweep: per frequency, the largest eigenvalue magnitude of
// Abar_rho exp(A pi / w). The loop is grid-verified stable iff every value is
// below one. Evaluations are independent and run across threads.
inline SweepResult stability_sweep(const AugmentedLoop& loop, const std::vector<double>& omegas,
                                   unsigned threads = 0) {
    SweepResult result;
    result.omegas = omegas;
    result.max_eig.assign(omegas.size(), 0.0);
    if (threads == 0) threads = sweep_thread_count(omegas.size());

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < omegas.size();
                     i = next.fetch_add(1))
                    result.max_eig[i] = max_reset_eigenvalue(loop, omegas[i]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    result.all_stable = true;
    for (double v : result.max_eig)
        if (!(v < 1.0)) result.all_stable = false;
    return result;
}

// Augmented flow matrix for sinusoid-driven responses: the forcing sin(w s)
// rides along as a two-state oscillator, so one matrix exponential yields
// exact convolution integrals without inverting (A^2 + w^2 I), which is
// hopelessly ill-conditioned for the stiff loop matrices here.
inline RMat sin_drive_matrix(const RMat& a, const RMat& b, double omega) {
    const std::size_t n = a.rows();
    RMat w(n + 2, n + 2);
    w.set_block(0, 0, a);
    w.set_block(0, n, b);
    w(n, n + 1) = omega;
    w(n + 1, n) = -omega;
    return w;
}

// phi(t) = exp(A t) psi(t) = integral_0^t exp(A (t-s)) B sin(w s) ds, bounded
// for stable A. Computed as the top-right column of exp(W t).
inline RMat phi(const RMat& a, const RMat& b, double omega, double t) {
    const std::size_t n = a.rows();
    const RMat e = num::expm(sin_drive_matrix(a, b, omega) * t);
    return e.block(0, n + 1, n, 1);
}

// psi(t) = integral_0^t exp(-A s) B sin(w s) ds. Genuinely grows like
// exp(|lambda_min(A)| t) for stable A; the periodic-solution machinery works
// with phi instead.
inline RMat psi(const RMat& a, const RMat& b, double omega, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("psi: t must be >= 0");
    if (!(omega > 0.0)) throw std::invalid_argument("psi: omega must be > 0");
    const std::size_t n = a.rows();
    if (t == 0.0) return RMat(n, 1, 0.0);
    return num::expm(a * (-t)) * phi(a, b, omega, t);
}

// Periodic steady state under alpha sin(w t) with jumps at the input zero
// crossings: after-jump states eta* and zeta* = -eta*, plus the reconstructed
// trajectory over one full period.
struct PeriodicSolution {
    double omega = 0.0;
    double alpha = 0.0;
    RMat eta;
    RMat zeta;
    std::vector<double> times;
    std::vector<RMat> states;
};

inline PeriodicSolution periodic_solution(const AugmentedLoop& loop, double omega, double alpha,
                                          int samples_per_half = 256) {
    if (!(omega > 0.0)) throw std::invalid_argument("periodic_solution: omega must be > 0");
    const std::size_t n = loop.order();
    const RMat eye = RMat::identity(n);
    const double half = std::numbers::pi / omega;

    const RMat e = num::expm(loop.A * half);
    RMat m = e;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = loop.reset_map(i, i);
        for (std::size_t j = 0; j < n; ++j) m(i, j) *= s;
    }
    double rho = 0.0;
    for (const auto& l : num::eigenvalues(m)) rho = std::max(rho, std::abs(l));
    if (!(rho < 1.0)) throw numeric_error("periodic_solution: recursion divergent");

    const RMat phi_half = phi(loop.A, loop.B1, omega, half);
    const RMat rho_phi = loop.reset_map * phi_half;
    // Fixed point eta* = (I - M^2)^-1 (M^2 - M) alpha psi(pi/w), evaluated in
    // the equivalent overflow-safe form -alpha (I + M)^-1 Abar_rho phi(pi/w).
    const RMat eta = num::solve(eye + m, rho_phi) * (-alpha);
    const RMat zeta = eta * -1.0;

    PeriodicSolution sol;
    sol.omega = omega;
    sol.alpha = alpha;
    sol.eta = eta;
    sol.zeta = zeta;

    // March the augmented (state + oscillator) system one exact exponential
    // step at a time; the jump zeroes reset states and leaves the oscillator
    // untouched.
    const double dt = half / samples_per_half;
    const RMat estep = num::expm(sin_drive_matrix(loop.A, loop.B1, omega) * dt);
    RMat z(n + 2, 1);
    auto record = [&](double t) {
        sol.times.push_back(t);
        sol.states.push_back(z.block(0, 0, n, 1));
    };
    auto jump = [&] {
        for (std::size_t i = 0; i < n; ++i) z(i, 0) *= loop.reset_map(i, i);
    };
    for (std::size_t i = 0; i < n; ++i) z(i, 0) = eta(i, 0);
    z(n, 0) = 0.0;          // sin(0)
    z(n + 1, 0) = alpha;    // alpha cos(0)
    record(0.0);
    for (int k = 1; k <= samples_per_half; ++k) {
        z = estep * z;
        record(k * dt);
    }
    jump();
    record(half);
    for (int k = 1; k <= samples_per_half; ++k) {
        z = estep * z;
        record(half + k * dt);
    }
    return sol;
}

}  // namespace rdob::stab
