#pragma once

#include <numbers>

#include "rdob/expm.hpp"
#include "rdob/reset_element.hpp"

namespace rdob::reset {

using num::CMat;
using num::Complex;

// Jump correction of the sinusoidal-input describing function:
//   Theta(w) = (2/pi) (I + E) (I + Arho E)^-1 (I - Arho) ((A/w)^2 + I)^-1,
// with E = exp(pi A / w). Vanishes when Arho = I.
inline RMat theta_rho(const ResetElement& el, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("theta_rho: omega must be > 0");
    const std::size_t n = el.order();
    const RMat eye = RMat::identity(n);
    const RMat e = num::expm(el.base.A * (std::numbers::pi / omega));
    RMat gate;
    try {
        gate = num::solve(eye + el.reset_matrix * e, eye - el.reset_matrix);
    } catch (const numeric_error&) {
        throw numeric_error("describing function undefined at omega: singular I + Arho*exp(pi A/w)");
    }
    const RMat aw = el.base.A * (1.0 / omega);
    const RMat lam = num::solve(aw * aw + eye, eye);
    return (eye + e) * gate * lam * (2.0 / std::numbers::pi);
}

// First-harmonic quasi-linear response C (jwI - A)^-1 (I + j Theta(w)) B + D.
inline Complex describing_function(const ResetElement& el, double omega) {
    if (!(omega > 0.0))
        throw std::invalid_argument("describing_function: omega must be > 0");
    const std::size_t n = el.order();
    if (n == 0) return Complex(el.base.D(0, 0), 0.0);
    const RMat theta = theta_rho(el, omega);

    CMat resolvent(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            resolvent(i, j) = (i == j ? Complex(0.0, omega) : Complex{}) - el.base.A(i, j);
    CMat rhs(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = el.base.B(i, 0);
        for (std::size_t j = 0; j < n; ++j)
            acc += Complex(0.0, theta(i, j)) * el.base.B(j, 0);
        rhs(i, 0) = acc;
    }
    CMat x;
    try {
        x = num::solve(std::move(resolvent), std::move(rhs));
    } catch (const numeric_error&) {
        throw numeric_error("describing_function: pole at j*omega");
    }
    Complex acc = el.base.D(0, 0);
    for (std::size_t i = 0; i < n; ++i) acc += Complex(el.base.C(0, i), 0.0) * x(i, 0);
    return acc;
}

// Linear frequency response of the base system, reset ignored.
inline Complex base_response(const ResetElement& el, double omega) {
    return num::ss_response(el.base, omega);
}

}  // namespace rdob::reset
