#pragma once

#include "rdob/expm.hpp"
#include "rdob/state_space.hpp"

namespace rdob::num {

// Bilinear (Tustin) discretization in state space:
//   Ad = (I - TA/2)^-1 (I + TA/2),  Bd = (I - TA/2)^-1 B T,
//   Cd = C (I - TA/2)^-1,           Dd = D + C Bd / 2.
// Delay-free, so it preserves loop phase where zero-order hold would not.
inline StateSpace c2d_tustin(const StateSpace& ss, double ts) {
    if (ss.discrete()) throw std::invalid_argument("c2d_tustin: system already discrete");
    if (!(ts > 0.0)) throw std::invalid_argument("c2d_tustin: sample time must be > 0");
    const std::size_t n = ss.order();
    const RMat ima = RMat::identity(n) - ss.A * (ts / 2.0);
    const RMat ad = solve(ima, RMat::identity(n) + ss.A * (ts / 2.0));
    const RMat bd = solve(ima, ss.B * ts);
    const RMat cd = solve(ima.transpose(), ss.C.transpose()).transpose();
    const RMat dd = ss.D + ss.C * bd * 0.5;
    return StateSpace(ad, bd, cd, dd, ts);
}

// Zero-order-hold discretization via the augmented exponential
// exp([A B; 0 0] T) = [Ad Bd; 0 I].
inline StateSpace c2d_zoh(const StateSpace& ss, double ts) {
    if (ss.discrete()) throw std::invalid_argument("c2d_zoh: system already discrete");
    if (!(ts > 0.0)) throw std::invalid_argument("c2d_zoh: sample time must be > 0");
    const std::size_t n = ss.order();
    RMat aug(n + 1, n + 1);
    aug.set_block(0, 0, ss.A * ts);
    aug.set_block(0, n, ss.B * ts);
    const RMat e = expm(aug);
    return StateSpace(e.block(0, 0, n, n), e.block(0, n, n, 1), ss.C, ss.D, ts);
}

}  // namespace rdob::num
