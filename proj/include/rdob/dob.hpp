#pragma once

#include <vector>

#include "rdob/eig.hpp"
#include "rdob/frequency.hpp"
#include "rdob/model.hpp"
#include "rdob/state_space.hpp"

namespace rdob::arch {

using num::Complex;
using num::FrequencyResponse;
using num::Model;
using num::Polynomial;
using num::StateSpace;
using num::TransferFunction;
using num::DiscreteTransferFunction;

// Disturbance-observer loop: plant P, nominal model P_n, disturbance
// estimating filter Q, outer controller C, and a proper realization of the
// nominal inverse for state-space work.
struct LinearDob {
    Model plant;
    Model nominal;
    Model q;
    Model controller;
    StateSpace nominal_inverse;             // realized properized inverse
    TransferFunction nominal_inverse_tf;    // its rational form
};

struct SensitivityPair {
    FrequencyResponse s;
    FrequencyResponse t;
};

struct ClosedLoopMaps {
    FrequencyResponse h_ry;
    FrequencyResponse h_dy;
    FrequencyResponse h_ny;
};

namespace detail {
inline Complex guarded_div(Complex num, Complex den, const char* what) {
    if (std::abs(den) < 1e-280) throw numeric_error(std::string(what) + ": pole on grid");
    return num / den;
}
}  // namespace detail

// Inner-loop sensitivity/complementary pair of the DOB itself:
//   S = P_n (1-Q) / (Q (P-P_n) + P_n),  T = Q P / (Q (P-P_n) + P_n).
// With P = P_n these reduce to (1-Q) and Q pointwise.
inline SensitivityPair inner_sensitivities(const LinearDob& d, const std::vector<double>& grid) {
    std::vector<Complex> s(grid.size()), t(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex p = d.plant.at(grid[i]);
        const Complex pn = d.nominal.at(grid[i]);
        const Complex q = d.q.at(grid[i]);
        const Complex den = q * (p - pn) + pn;
        s[i] = detail::guarded_div(pn * (1.0 - q), den, "inner_sensitivities");
        t[i] = detail::guarded_div(q * p, den, "inner_sensitivities");
    }
    return {FrequencyResponse(grid, std::move(s)), FrequencyResponse(grid, std::move(t))};
}

// Outer loop without the DOB: S_c = 1/(1 + P_n C), T_c = P_n C / (1 + P_n C).
inline SensitivityPair outer_sensitivities(const LinearDob& d, const std::vector<double>& grid) {
    std::vector<Complex> s(grid.size()), t(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex l = d.nominal.at(grid[i]) * d.controller.at(grid[i]);
        s[i] = detail::guarded_div(1.0, 1.0 + l, "outer_sensitivities");
        t[i] = detail::guarded_div(l, 1.0 + l, "outer_sensitivities");
    }
    return {FrequencyResponse(grid, std::move(s)), FrequencyResponse(grid, std::move(t))};
}

// Realized closed-loop maps with controller and DOB in place (P = P_n form):
//   H_ry = T_c,  H_dy = P S_c (1-Q),  H_ny = T_c + Q / (1 + P_n C).
inline ClosedLoopMaps closed_loop_maps(const LinearDob& d, const std::vector<double>& grid) {
    std::vector<Complex> ry(grid.size()), dy(grid.size()), ny(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex p = d.plant.at(grid[i]);
        const Complex pn = d.nominal.at(grid[i]);
        const Complex c = d.controller.at(grid[i]);
        const Complex q = d.q.at(grid[i]);
        const Complex one_plus_l = 1.0 + pn * c;
        ry[i] = detail::guarded_div(pn * c, one_plus_l, "closed_loop_maps");
        dy[i] = p * detail::guarded_div(1.0, one_plus_l, "closed_loop_maps") * (1.0 - q);
        ny[i] = ry[i] + detail::guarded_div(q, one_plus_l, "closed_loop_maps");
    }
    return {FrequencyResponse(grid, std::move(ry)), FrequencyResponse(grid, std::move(dy)),
            FrequencyResponse(grid, std::move(ny))};
}

// Proper inverse of a minimum-phase nominal model: numerator and denominator
// swapped, padded with repeated real poles at omega_aug until biproper.
inline TransferFunction properize_inverse_tf(const TransferFunction& pn, double omega_aug) {
    if (!(omega_aug > 0.0))
        throw std::invalid_argument("properize_inverse: omega_aug must be > 0");
    const int rel = pn.relative_degree();
    if (rel < 0) throw std::invalid_argument("properize_inverse: improper nominal model");
    if (pn.num.degree() > 0) {
        for (const auto& z : num::roots(pn.num)) {
            if (z.real() >= 0.0)
                throw std::invalid_argument("properize_inverse: unstable inverse zeros");
        }
    }
    Polynomial den = pn.num;
    const Polynomial pad{1.0 / omega_aug, 1.0};
    for (int i = 0; i < rel; ++i) den = den * pad;
    return {pn.den, den};
}

inline StateSpace properize_inverse(const TransferFunction& pn, double omega_aug) {
    return num::tf_to_ss_cascade(properize_inverse_tf(pn, omega_aug));
}

namespace detail {
// Cancel root pairs shared between numerator and denominator, then rebuild.
// Exact products are kept when nothing cancels.
inline void cancel_common_roots(Polynomial& num, Polynomial& den) {
    auto zn = num::roots(num);
    auto zd = num::roots(den);
    bool cancelled = false;
    for (auto it = zn.begin(); it != zn.end();) {
        bool matched = false;
        for (auto jt = zd.begin(); jt != zd.end(); ++jt) {
            if (std::abs(*it - *jt) <= 1e-6 * (1.0 + std::abs(*it))) {
                zd.erase(jt);
                it = zn.erase(it);
                matched = true;
                cancelled = true;
                break;
            }
        }
        if (!matched) ++it;
    }
    if (!cancelled) return;
    num = Polynomial::from_roots(zn, num.leading());
    den = Polynomial::from_roots(zd, den.leading());
}
}  // namespace detail

// Q2 such that Q1 * Q2 reproduces Q. Shared factors cancel so the designed
// split stays minimal; an improper quotient is rejected.
inline Model split_q(const Model& q, const Model& q1) {
    if (q.discrete() != q1.discrete())
        throw std::invalid_argument("split_q: mixing continuous and discrete models");
    Polynomial num, den;
    if (q.discrete()) {
        if (q.dtf().sample_time != q1.dtf().sample_time)
            throw std::invalid_argument("split_q: sample time mismatch");
        num = q.dtf().num * q1.dtf().den;
        den = q.dtf().den * q1.dtf().num;
    } else {
        num = q.ctf().num * q1.ctf().den;
        den = q.ctf().den * q1.ctf().num;
    }
    detail::cancel_common_roots(num, den);
    if (num.degree() > den.degree())
        throw std::invalid_argument("split_q: improper quotient");
    if (q.discrete())
        return Model(num::DiscreteTransferFunction{num, den, q.dtf().sample_time});
    return Model(TransferFunction{num, den});
}

// Series PID with normalized integrator, lead-lag and output low-pass:
//   C = K ((s/wi + 1)/(s/wi)) ((s/w1 + 1)/(s/w2 + 1)) (1/(s/wf + 1)).
inline TransferFunction pid_series(double k, double wi, double w1, double w2, double wf) {
    if (!(0.0 < wi && wi < w1 && w1 < w2 && w2 < wf))
        throw std::invalid_argument("pid_series: need 0 < wi < w1 < w2 < wf");
    const Polynomial num = (Polynomial{1.0 / wi, 1.0} * Polynomial{1.0 / w1, 1.0}) * k;
    const Polynomial den =
        Polynomial{1.0 / wi, 0.0} * Polynomial{1.0 / w2, 1.0} * Polynomial{1.0 / wf, 1.0};
    return {num, den};
}

}  // namespace rdob::arch
