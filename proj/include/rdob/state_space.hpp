#pragma once

#include <algorithm>
#include <optional>
#include <utility>

#include "rdob/eig.hpp"
#include "rdob/matrix.hpp"
#include "rdob/transfer_function.hpp"

namespace rdob::num {

// SISO state-space realization. Continuous unless a sample time is present.
struct StateSpace {
    RMat A, B, C, D;
    std::optional<double> sample_time;

    StateSpace() : A(0, 0), B(0, 1), C(1, 0), D(1, 1, 0.0) {}

    StateSpace(RMat a, RMat b, RMat c, RMat d, std::optional<double> ts = std::nullopt)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)), sample_time(ts) {
        if (!A.square()) throw std::invalid_argument("StateSpace: A must be square");
        if (B.rows() != A.rows() || C.cols() != A.rows() || B.cols() != D.cols() ||
            C.rows() != D.rows())
            throw std::invalid_argument("StateSpace: inconsistent dimensions");
        if (sample_time && !(*sample_time > 0.0))
            throw std::invalid_argument("StateSpace: sample_time must be > 0");
    }

    std::size_t order() const { return A.rows(); }
    bool discrete() const { return sample_time.has_value(); }
};

namespace detail {
inline StateSpace controllable_canonical(const Polynomial& num, const Polynomial& den,
                                         std::optional<double> ts) {
    if (static_cast<int>(den.degree()) < static_cast<int>(num.degree()))
        throw std::invalid_argument("tf_to_ss: improper system");
    const std::size_t n = den.degree();
    const double a0 = den.leading();

    // Monic denominator coefficients a[0..n-1] (ascending powers) and numerator
    // padded to degree n, b[0..n] ascending.
    std::vector<double> a(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = den.coeffs()[n - i] / a0;
    std::vector<double> b(n + 1, 0.0);
    for (std::size_t i = 0; i <= num.degree(); ++i)
        b[i] = num.coeffs()[num.degree() - i] / a0;

    RMat A(n, n), B(n, 1), C(1, n), D(1, 1);
    for (std::size_t i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = -a[j];
    if (n > 0) B(n - 1, 0) = 1.0;
    D(0, 0) = b[n];
    for (std::size_t j = 0; j < n; ++j) C(0, j) = b[j] - b[n] * a[j];
    return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D), ts);
}
}  // namespace detail

// Controllable-canonical realization. Rejects improper transfer functions.
inline StateSpace tf_to_ss(const TransferFunction& tf) {
    return detail::controllable_canonical(tf.num, tf.den, std::nullopt);
}

inline StateSpace tf_to_ss(const DiscreteTransferFunction& tf) {
    return detail::controllable_canonical(tf.num, tf.den, tf.sample_time);
}

// Frequency response C (pI - A)^-1 B + D with p = jw (continuous) or
// p = exp(jw Ts) (discrete).
inline Complex ss_response(const StateSpace& ss, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("ss_response: omega must be > 0");
    Complex point;
    if (ss.discrete()) {
        if (!(omega < std::numbers::pi / *ss.sample_time))
            throw std::invalid_argument("ss_response: omega at or beyond the Nyquist rate");
        point = std::exp(Complex(0.0, omega * *ss.sample_time));
    } else {
        point = Complex(0.0, omega);
    }
    const std::size_t n = ss.order();
    if (n == 0) return Complex(ss.D(0, 0), 0.0);

    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = (i == j ? point : Complex{}) - ss.A(i, j);
    CMat rhs(n, 1);
    for (std::size_t i = 0; i < n; ++i) rhs(i, 0) = ss.B(i, 0);
    CMat x;
    try {
        x = solve(std::move(m), std::move(rhs));
    } catch (const numeric_error&) {
        throw numeric_error("ss_response: pole at the evaluation point");
    }
    Complex acc = ss.D(0, 0);
    for (std::size_t i = 0; i < n; ++i) acc += Complex(ss.C(0, i), 0.0) * x(i, 0);
    return acc;
}

// Series composition u -> a -> b -> y as a block-triangular realization.
inline StateSpace ss_series(const StateSpace& a, const StateSpace& b) {
    if (a.discrete() != b.discrete() ||
        (a.discrete() && *a.sample_time != *b.sample_time))
        throw std::invalid_argument("ss_series: domain or sample time mismatch");
    const std::size_t na = a.order(), nb = b.order();
    RMat A(na + nb, na + nb), B(na + nb, 1), C(1, na + nb), D(1, 1);
    A.set_block(0, 0, a.A);
    A.set_block(na, na, b.A);
    A.set_block(na, 0, b.B * a.C);
    B.set_block(0, 0, a.B);
    B.set_block(na, 0, b.B * a.D);
    C.set_block(0, 0, a.C * b.D(0, 0));
    C.set_block(0, na, b.C);
    D(0, 0) = b.D(0, 0) * a.D(0, 0);
    return StateSpace(std::move(A), std::move(B), std::move(C), std::move(D), a.sample_time);
}

namespace detail {

// Real factors (degree 1 or 2, monic) from a root list; conjugate pairs fold
// into quadratics.
inline std::vector<Polynomial> real_factors(std::vector<Complex> roots) {
    std::vector<Polynomial> factors;
    while (!roots.empty()) {
        const Complex r = roots.back();
        roots.pop_back();
        if (std::abs(r.imag()) <= 1e-8 * (1.0 + std::abs(r))) {
            factors.push_back(Polynomial{1.0, -r.real()});
            continue;
        }
        // Remove the closest conjugate partner.
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double d = std::abs(roots[i] - std::conj(r));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        roots.erase(roots.begin() + best);
        factors.push_back(Polynomial{1.0, -2.0 * r.real(), std::norm(r)});
    }
    std::sort(factors.begin(), factors.end(), [](const Polynomial& a, const Polynomial& b) {
        return a.degree() > b.degree();
    });
    return factors;
}

}  // namespace detail

// Cascade-of-biquads realization for wide-dynamic-range rational models. A
// single companion form of, say, a resonant fourth-order plant times padding
// poles carries coefficients spanning ~1e18; factored sections stay well
// conditioned. Continuous models only (needs the root factorization).
inline StateSpace tf_to_ss_cascade(const TransferFunction& tf) {
    if (tf.relative_degree() < 0)
        throw std::invalid_argument("tf_to_ss_cascade: improper system");
    if (tf.den.degree() <= 2) return tf_to_ss(tf);

    auto den_factors = detail::real_factors(roots(tf.den));
    auto num_factors = tf.num.degree() > 0 ? detail::real_factors(roots(tf.num))
                                           : std::vector<Polynomial>{};

    struct Section {
        Polynomial num{1.0};
        Polynomial den{1.0};
    };
    std::vector<Section> sections;
    sections.reserve(den_factors.size());
    for (auto& d : den_factors) sections.push_back({Polynomial{1.0}, d});

    for (const auto& nf : num_factors) {
        bool placed = false;
        for (auto& sec : sections) {
            if (sec.den.degree() >= sec.num.degree() + nf.degree()) {
                sec.num = sec.num * nf;
                placed = true;
                break;
            }
        }
        if (!placed) {
            // Merge two first-order sections to host a quadratic numerator.
            std::vector<std::size_t> linear;
            for (std::size_t i = 0; i < sections.size(); ++i)
                if (sections[i].den.degree() == 1 && sections[i].num.degree() == 0)
                    linear.push_back(i);
            if (nf.degree() != 2 || linear.size() < 2)
                throw numeric_error("tf_to_ss_cascade: could not place numerator factor");
            sections[linear[0]].den = sections[linear[0]].den * sections[linear[1]].den;
            sections[linear[0]].num = nf;
            sections.erase(sections.begin() + linear[1]);
        }
    }

    const double gain = tf.num.leading() / tf.den.leading();
    sections.front().num = sections.front().num * gain;

    StateSpace acc = tf_to_ss(TransferFunction{sections[0].num, sections[0].den});
    for (std::size_t i = 1; i < sections.size(); ++i)
        acc = ss_series(acc, tf_to_ss(TransferFunction{sections[i].num, sections[i].den}));
    return acc;
}

}  // namespace rdob::num
