#pragma once

#include <string>
#include <vector>

#include "rdob/interconnect.hpp"
#include "rdob/reset_element.hpp"

namespace rdob::stab {

// Open-loop matrices for the sinusoidal-input stability test: flow matrix A,
// input columns B1 (drive) and B2 (measurement noise), output row C, and the
// augmented reset map (identity on non-reset states, the element's own
// pattern on the reset block).
struct AugmentedLoop {
    RMat A;
    RMat B1;
    RMat B2;
    RMat C;
    RMat reset_map;
    std::vector<std::pair<std::string, std::size_t>> layout;
    std::size_t reset_offset = 0;
    std::size_t reset_size = 0;

    std::size_t order() const { return A.rows(); }
};

// Frequency response C (jwI - A)^-1 B of the frozen (reset-free) loop from
// the selected input; the oracle hook for checking the assembled matrices
// against independent rational loop algebra.
inline num::Complex loop_response(const AugmentedLoop& loop, double omega, int input = 1) {
    const std::size_t n = loop.order();
    const RMat& b = (input == 2) ? loop.B2 : loop.B1;
    num::CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = (i == j ? num::Complex(0.0, omega) : num::Complex{}) - loop.A(i, j);
    num::CMat rhs(n, 1);
    for (std::size_t i = 0; i < n; ++i) rhs(i, 0) = b(i, 0);
    const num::CMat x = num::solve(std::move(m), std::move(rhs));
    num::Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += num::Complex(loop.C(0, i), 0.0) * x(i, 0);
    return acc;
}

namespace detail {
inline AugmentedLoop finish(const Interconnect::Assembled& asm_,
                            const reset::ResetElement& cglp, std::size_t cglp_index,
                            std::vector<std::pair<std::string, std::size_t>> layout) {
    AugmentedLoop loop;
    loop.A = asm_.A;
    loop.B1 = asm_.B[0];
    loop.B2 = asm_.B[1];
    const std::size_t n = asm_.A.rows();
    loop.C = RMat(1, n);
    for (std::size_t j = 0; j < n; ++j) loop.C(0, j) = asm_.out_x(0, j);

    loop.reset_map = RMat::identity(n);
    loop.reset_offset = asm_.spans[cglp_index].first;
    loop.reset_size = asm_.spans[cglp_index].second;
    loop.reset_map.set_block(loop.reset_offset, loop.reset_offset, cglp.reset_matrix);
    loop.layout = std::move(layout);
    return loop;
}
}  // namespace detail

// Config-1 open loop, drive u at the plant/compensation junction, noise n at
// the measurement. Inner DOB loop closed; chain Q1 -> CgLp -> Q2 forms the
// disturbance estimate subtracted from u.
inline AugmentedLoop augment_rdob1(const StateSpace& plant, const StateSpace& pn_inverse,
                                   const StateSpace& q1, const reset::ResetElement& cglp,
                                   const StateSpace& q2) {
    Interconnect net(2);  // w0 = u, w1 = n
    const auto p = net.add_block(plant);
    const auto inv = net.add_block(pn_inverse);
    const auto f1 = net.add_block(q1);
    const auto g = net.add_block(cglp.base);
    const auto f2 = net.add_block(q2);

    net.connect(p, f2, -1.0);       // plant input u - d_hat
    net.connect_input(p, 0, 1.0);
    net.connect(inv, p, 1.0);       // inverse sees y + n
    net.connect_input(inv, 1, 1.0);
    net.connect(f1, inv, 1.0);      // raw estimate Pn^-1 y_m - (u - d_hat)
    net.connect(f1, f2, 1.0);
    net.connect_input(f1, 0, -1.0);
    net.connect(g, f1, 1.0);
    net.connect(f2, g, 1.0);

    const auto asm_ = net.assemble();
    return detail::finish(asm_, cglp, g,
                          {{"plant", plant.order()},
                           {"pn_inverse", pn_inverse.order()},
                           {"q1", q1.order()},
                           {"cglp", cglp.order()},
                           {"q2", q2.order()}});
}

// Config-2 open loop, drive at the error entry of the Q_co -> CgLp -> C chain,
// noise at the measurement. Inner DOB loop (linear Q) closed; the outer
// summing junction is open.
inline AugmentedLoop augment_rdob2(const StateSpace& plant, const StateSpace& pn_inverse,
                                   const StateSpace& q, const StateSpace& q_co,
                                   const reset::ResetElement& cglp, const StateSpace& c) {
    Interconnect net(2);  // w0 = e, w1 = n
    const auto p = net.add_block(plant);
    const auto inv = net.add_block(pn_inverse);
    const auto fq = net.add_block(q);
    const auto fco = net.add_block(q_co);
    const auto g = net.add_block(cglp.base);
    const auto fc = net.add_block(c);

    net.connect(p, fc, 1.0);        // plant input u - d_hat
    net.connect(p, fq, -1.0);
    net.connect(inv, p, 1.0);
    net.connect_input(inv, 1, 1.0);
    net.connect(fq, inv, 1.0);      // raw estimate with the self-term d_hat
    net.connect(fq, fc, -1.0);
    net.connect(fq, fq, 1.0);
    net.connect_input(fco, 0, 1.0);
    net.connect(g, fco, 1.0);
    net.connect(fc, g, 1.0);

    const auto asm_ = net.assemble();
    return detail::finish(asm_, cglp, g,
                          {{"plant", plant.order()},
                           {"pn_inverse", pn_inverse.order()},
                           {"q", q.order()},
                           {"q_co", q_co.order()},
                           {"cglp", cglp.order()},
                           {"c", c.order()}});
}

}  // namespace rdob::stab
