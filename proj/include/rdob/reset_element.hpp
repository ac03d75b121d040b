#pragma once

#include "rdob/state_space.hpp"

namespace rdob::reset {

using num::RMat;
using num::StateSpace;

// Linear base dynamics plus a diagonal 0/1 reset matrix applied to the state
// when the element's input crosses zero.
struct ResetElement {
    StateSpace base;
    RMat reset_matrix;

    ResetElement(StateSpace b, RMat rho) : base(std::move(b)), reset_matrix(std::move(rho)) {
        if (!reset_matrix.square() || reset_matrix.rows() != base.order())
            throw std::invalid_argument("ResetElement: reset matrix dimension mismatch");
        for (std::size_t i = 0; i < reset_matrix.rows(); ++i)
            for (std::size_t j = 0; j < reset_matrix.cols(); ++j) {
                const double v = reset_matrix(i, j);
                if (i != j && v != 0.0)
                    throw std::invalid_argument("ResetElement: reset matrix must be diagonal");
                if (i == j && v != 0.0 && v != 1.0)
                    throw std::invalid_argument("ResetElement: diagonal entries must be 0 or 1");
            }
    }

    std::size_t order() const { return base.order(); }
};

// Reset integrator: the base is 1/s and the single state resets to zero.
inline ResetElement clegg() {
    return ResetElement(StateSpace(RMat{{0.0}}, RMat{{1.0}}, RMat{{1.0}}, RMat{{0.0}}),
                        RMat{{0.0}});
}

// First-order reset low-pass at omega_r.
inline ResetElement fore(double omega_r) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("fore: omega_r must be > 0");
    return ResetElement(
        StateSpace(RMat{{-omega_r}}, RMat{{omega_r}}, RMat{{1.0}}, RMat{{0.0}}), RMat{{0.0}});
}

// Second-order reset element: resetting low-pass 1/((s/wr)^2 + 2 zr s/wr + 1)
// with both states resetting to zero.
inline ResetElement sore(double omega_r, double zeta_r) {
    if (!(omega_r > 0.0)) throw std::invalid_argument("sore: omega_r must be > 0");
    if (!(zeta_r > 0.0)) throw std::invalid_argument("sore: zeta_r must be > 0");
    RMat a{{0.0, 1.0}, {-omega_r * omega_r, -2.0 * zeta_r * omega_r}};
    RMat b{{0.0}, {omega_r * omega_r}};
    RMat c{{1.0, 0.0}};
    return ResetElement(StateSpace(std::move(a), std::move(b), std::move(c), RMat{{0.0}}),
                        RMat(2, 2, 0.0));
}

struct CgLpParams {
    double omega_r;        // reset low-pass corner (rad/s)
    double zeta_r;         // damping of the reset low-pass
    double alpha = 1.25;   // corner-shift factor; lead starts at alpha * omega_r
    double omega_f;        // lead termination (rad/s)

    double omega_ralpha() const { return alpha * omega_r; }

    void validate() const {
        if (!(omega_r > 0.0)) throw std::invalid_argument("CgLpParams: omega_r must be > 0");
        if (!(zeta_r > 0.0)) throw std::invalid_argument("CgLpParams: zeta_r must be > 0");
        if (!(alpha >= 1.0)) throw std::invalid_argument("CgLpParams: alpha must be >= 1");
        if (!(omega_f > omega_ralpha()))
            throw std::invalid_argument("CgLpParams: omega_f must exceed alpha * omega_r");
    }
};

// Constant-gain lead-phase element: SORE in series with the non-resetting lead
// ((s/wra)^2 + 2 zr s/wra + 1) / ((s/wf)^2 + 2 s/wf + 1). Only the two SORE
// states reset.
inline ResetElement cglp(const CgLpParams& p) {
    p.validate();
    const double wr2 = p.omega_r * p.omega_r;
    const double wra = p.omega_ralpha();
    const double wra2 = wra * wra;
    const double wf = p.omega_f;
    const double wf2 = wf * wf;

    RMat a{{0.0, 1.0, 0.0, 0.0},
           {-wr2, -2.0 * p.zeta_r * p.omega_r, 0.0, 0.0},
           {0.0, 0.0, 0.0, 1.0},
           {1.0, 0.0, -wf2, -2.0 * wf}};
    RMat b{{0.0}, {wr2}, {0.0}, {0.0}};
    RMat c{{wf2 / wra2, 0.0, wf2 - wf2 * wf2 / wra2,
            2.0 * wf2 * p.zeta_r / wra - 2.0 * wf2 * wf / wra2}};
    RMat rho(4, 4, 0.0);
    rho(2, 2) = 1.0;
    rho(3, 3) = 1.0;
    return ResetElement(StateSpace(std::move(a), std::move(b), std::move(c), RMat{{0.0}}),
                        std::move(rho));
}

// Same base dynamics with the reset disabled; collapses every analysis to the
// underlying linear element.
inline ResetElement with_identity_reset(const ResetElement& el) {
    return ResetElement(el.base, RMat::identity(el.order()));
}

}  // namespace rdob::reset
