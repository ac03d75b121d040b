#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "rdob/errors.hpp"
#include "rdob/polynomial.hpp"

namespace rdob::num {

// Continuous-time rational transfer function num(s)/den(s).
struct TransferFunction {
    Polynomial num;
    Polynomial den;

    TransferFunction() : num{1.0}, den{1.0} {}
    TransferFunction(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero()) throw std::invalid_argument("TransferFunction: zero denominator");
    }

    static TransferFunction gain(double k) { return {Polynomial{k}, Polynomial{1.0}}; }

    // deg(den) - deg(num); negative means improper.
    int relative_degree() const {
        return static_cast<int>(den.degree()) - static_cast<int>(num.degree());
    }
    bool proper() const { return relative_degree() >= 0; }
};

// Discrete-time rational transfer function num(z)/den(z) at a fixed sample time.
struct DiscreteTransferFunction {
    Polynomial num;
    Polynomial den;
    double sample_time = 0.0;

    DiscreteTransferFunction() : num{1.0}, den{1.0}, sample_time(1.0) {}
    DiscreteTransferFunction(Polynomial n, Polynomial d, double ts)
        : num(std::move(n)), den(std::move(d)), sample_time(ts) {
        if (den.is_zero()) throw std::invalid_argument("DiscreteTransferFunction: zero denominator");
        if (!(sample_time > 0.0))
            throw std::invalid_argument("DiscreteTransferFunction: sample_time must be > 0");
    }

    int relative_degree() const {
        return static_cast<int>(den.degree()) - static_cast<int>(num.degree());
    }
    bool proper() const { return relative_degree() >= 0; }
};

namespace detail {
inline Complex eval_rational(const Polynomial& num, const Polynomial& den, Complex point,
                             const char* what) {
    const Complex d = den.eval(point);
    const double bound = den.eval_magnitude_bound(point);
    if (std::abs(d) <= 1e-13 * bound || std::abs(d) < 1e-300)
        throw numeric_error(std::string(what) + ": evaluation at a pole");
    return num.eval(point) / d;
}
}  // namespace detail

inline Complex eval_tf(const TransferFunction& tf, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("eval_tf: omega must be > 0");
    return detail::eval_rational(tf.num, tf.den, Complex(0.0, omega), "eval_tf");
}

inline Complex eval_ztf(const DiscreteTransferFunction& tf, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("eval_ztf: omega must be > 0");
    if (!(omega < std::numbers::pi / tf.sample_time))
        throw std::invalid_argument("eval_ztf: omega at or beyond the Nyquist rate");
    const Complex z = std::exp(Complex(0.0, omega * tf.sample_time));
    return detail::eval_rational(tf.num, tf.den, z, "eval_ztf");
}

inline TransferFunction series(const TransferFunction& a, const TransferFunction& b) {
    return {a.num * b.num, a.den * b.den};
}

inline DiscreteTransferFunction series(const DiscreteTransferFunction& a,
                                       const DiscreteTransferFunction& b) {
    if (a.sample_time != b.sample_time)
        throw std::invalid_argument("series: sample time mismatch");
    return {a.num * b.num, a.den * b.den, a.sample_time};
}

// Unity-feedback closure L/(1+L) (negative feedback, the default) or L/(1-L).
inline TransferFunction feedback(const TransferFunction& loop, int sign = -1) {
    if (sign != -1 && sign != 1) throw std::invalid_argument("feedback: sign must be +1 or -1");
    const Polynomial closed =
        (sign == -1) ? loop.den + loop.num : loop.den - loop.num;
    if (closed.is_zero()) throw numeric_error("feedback: degenerate closure");
    return {loop.num, closed};
}

inline DiscreteTransferFunction feedback(const DiscreteTransferFunction& loop, int sign = -1) {
    if (sign != -1 && sign != 1) throw std::invalid_argument("feedback: sign must be +1 or -1");
    const Polynomial closed =
        (sign == -1) ? loop.den + loop.num : loop.den - loop.num;
    if (closed.is_zero()) throw numeric_error("feedback: degenerate closure");
    return {loop.num, closed, loop.sample_time};
}

// Discrete equivalent via the bilinear (Tustin) map s = (2/T)(z-1)/(z+1),
// as an exact polynomial substitution. Unlike zero-order-hold sampling this
// never aliases: fast stable poles land near z = -1 instead of folding.
inline DiscreteTransferFunction c2d_tustin(const TransferFunction& tf, double ts) {
    if (!(ts > 0.0)) throw std::invalid_argument("c2d_tustin: sample time must be > 0");
    const double k = 2.0 / ts;
    const Polynomial zp{k, -k};  // k (z - 1)
    const Polynomial zm{1.0, 1.0};  // z + 1
    const std::size_t n = std::max(tf.num.degree(), tf.den.degree());

    auto substitute = [&](const Polynomial& p) {
        Polynomial acc;
        const auto& c = p.coeffs();
        const std::size_t deg = p.degree();
        for (std::size_t i = 0; i <= deg; ++i) {
            const std::size_t power = deg - i;  // coefficient of s^power
            Polynomial term{c[i]};
            for (std::size_t j = 0; j < power; ++j) term = term * zp;
            for (std::size_t j = 0; j < n - power; ++j) term = term * zm;
            acc = acc + term;
        }
        return acc;
    };

    Polynomial num = substitute(tf.num);
    Polynomial den = substitute(tf.den);
    if (den.is_zero()) throw numeric_error("c2d_tustin: denominator vanished");
    const double lead = den.leading();
    return {num * (1.0 / lead), den * (1.0 / lead), ts};
}

// Continuous equivalent via the inverse bilinear (Tustin) map
// z = (1 + sT/2) / (1 - sT/2), done as a polynomial substitution so the result
// is exact in the coefficients.
inline TransferFunction d2c_tustin(const DiscreteTransferFunction& dtf) {
    const double half = dtf.sample_time / 2.0;
    const Polynomial zp{half, 1.0};    // 1 + sT/2
    const Polynomial zm{-half, 1.0};   // 1 - sT/2
    const std::size_t n = std::max(dtf.num.degree(), dtf.den.degree());

    auto substitute = [&](const Polynomial& p) {
        Polynomial acc;  // zero
        const auto& c = p.coeffs();
        const std::size_t deg = p.degree();
        for (std::size_t k = 0; k <= deg; ++k) {
            const std::size_t power = deg - k;  // coefficient of z^power
            Polynomial term{c[k]};
            for (std::size_t i = 0; i < power; ++i) term = term * zp;
            for (std::size_t i = 0; i < n - power; ++i) term = term * zm;
            acc = acc + term;
        }
        return acc;
    };

    Polynomial num = substitute(dtf.num);
    Polynomial den = substitute(dtf.den);
    if (den.is_zero()) throw numeric_error("d2c_tustin: denominator vanished");
    // Normalize so the denominator is monic; keeps coefficients at sane scale.
    const double lead = den.leading();
    return {num * (1.0 / lead), den * (1.0 / lead)};
}

}  // namespace rdob::num
