#pragma once

#include "rdob/describing_function.hpp"
#include "rdob/dob.hpp"

namespace rdob::arch {

// Direct phase compensation: the estimating filter becomes Q1 * CgLp * Q2,
// with Q1 filtering the reset trigger ahead of the CgLp.
struct Rdob1 {
    LinearDob base;
    Model q1;
    Model q2;
    reset::ResetElement cglp;
};

// Controller-side compensation: the effective controller becomes
// Q_co * CgLp * C; the inner DOB keeps its linear Q.
struct Rdob2 {
    LinearDob base;
    Model q_co;
    reset::ResetElement cglp;
    Model controller_core;
};

// Quasi-linear response of the nonlinear estimating filter Q1 * DF * Q2.
inline FrequencyResponse nonlinear_q_response(const Rdob1& cfg, const std::vector<double>& grid) {
    std::vector<Complex> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = cfg.q1.at(grid[i]) * reset::describing_function(cfg.cglp, grid[i]) *
               cfg.q2.at(grid[i]);
    return {grid, std::move(v)};
}

// Quasi-linear response of the nonlinear controller Q_co * DF * C.
inline FrequencyResponse nonlinear_controller_response(const Rdob2& cfg,
                                                       const std::vector<double>& grid) {
    std::vector<Complex> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = cfg.q_co.at(grid[i]) * reset::describing_function(cfg.cglp, grid[i]) *
               cfg.controller_core.at(grid[i]);
    return {grid, std::move(v)};
}

// Tuning helper for config-1: picks the reset low-pass corner so that the
// combined nonlinear filter Q1 * DF * Q2 has (approximately) zero phase at
// the estimating filter's corner. Smaller corners put more lead there; the
// designed corner is the bisection point of the phase sign change.
inline double tune_cglp_corner(const Rdob1& cfg, reset::CgLpParams params, double omega_q,
                               double lo_factor = 0.02, double hi_factor = 1.0) {
    auto phase_at = [&](double wr) {
        reset::CgLpParams p = params;
        p.omega_r = wr;
        Rdob1 probe = cfg;
        probe.cglp = reset::cglp(p);
        const auto fr = nonlinear_q_response(probe, {omega_q});
        return num::phase_deg(fr.values[0]);
    };
    double lo = lo_factor * omega_q, hi = hi_factor * omega_q;
    if (phase_at(lo) < 0.0) return lo;  // even the widest lead cannot reach zero
    if (phase_at(hi) > 0.0) return hi;
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(lo * hi);
        (phase_at(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

namespace detail {
inline FrequencyResponse overall_from(const LinearDob& d, const std::vector<double>& grid,
                                      const std::vector<Complex>& q_eff,
                                      const std::vector<Complex>& c_eff) {
    std::vector<Complex> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex p = d.plant.at(grid[i]);
        const Complex pn = d.nominal.at(grid[i]);
        const Complex s_inner =
            guarded_div(pn * (1.0 - q_eff[i]), q_eff[i] * (p - pn) + pn, "overall_sensitivity");
        const Complex s_outer = guarded_div(1.0, 1.0 + pn * c_eff[i], "overall_sensitivity");
        v[i] = s_inner * s_outer;
    }
    return {grid, std::move(v)};
}
}  // namespace detail

// Overall sensitivity S * S_c of the plain linear DOB.
inline FrequencyResponse overall_sensitivity_linear(const LinearDob& d,
                                                    const std::vector<double>& grid) {
    std::vector<Complex> q(grid.size()), c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        q[i] = d.q.at(grid[i]);
        c[i] = d.controller.at(grid[i]);
    }
    return detail::overall_from(d, grid, q, c);
}

// Overall sensitivity with the CgLp replaced by its describing function:
// config-1 modifies the inner Q, config-2 modifies the outer controller.
inline FrequencyResponse overall_sensitivity_rdob(const Rdob1& cfg,
                                                  const std::vector<double>& grid) {
    const FrequencyResponse q_eff = nonlinear_q_response(cfg, grid);
    std::vector<Complex> c(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c[i] = cfg.base.controller.at(grid[i]);
    return detail::overall_from(cfg.base, grid, q_eff.values, c);
}

inline FrequencyResponse overall_sensitivity_rdob(const Rdob2& cfg,
                                                  const std::vector<double>& grid) {
    std::vector<Complex> q(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) q[i] = cfg.base.q.at(grid[i]);
    const FrequencyResponse c_eff = nonlinear_controller_response(cfg, grid);
    return detail::overall_from(cfg.base, grid, q, c_eff.values);
}

}  // namespace rdob::arch
