#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "oracles.hpp"
#include "rdob/preset_loops.hpp"
#include "rdob/stability.hpp"

using namespace rdob;
using namespace rdob::stab;
using arch::DesignPreset;
using arch::make_preset;
using num::Complex;
using num::RMat;
using num::StateSpace;

namespace {
constexpr double kPi = std::numbers::pi;

StateSpace scalar_block(double a, double b, double c, double d) {
    return StateSpace(RMat{{a}}, RMat{{b}}, RMat{{c}}, RMat{{d}});
}

double max_abs(const RMat& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, std::abs(m(i, j)));
    return best;
}
}  // namespace

TEST_CASE("config-1 augmentation has the reference block pattern") {
    // Strictly proper plant and Q-filters, biproper inverse: the assembled
    // matrices must match the reference sparsity and signs entry for entry.
    const StateSpace plant = scalar_block(-2.0, 3.0, 5.0, 0.0);
    const StateSpace inv = scalar_block(-7.0, 11.0, 13.0, 17.0);
    const StateSpace q1 = scalar_block(-19.0, 23.0, 29.0, 0.0);
    const reset::ResetElement g = reset::cglp({10.0, 1.0, 1.25, 1000.0});
    const StateSpace q2 = scalar_block(-31.0, 37.0, 41.0, 0.0);

    const AugmentedLoop loop = augment_rdob1(plant, inv, q1, g, q2);
    REQUIRE(loop.order() == 8);
    REQUIRE(loop.reset_offset == 3);
    REQUIRE(loop.reset_size == 4);

    RMat want(8, 8);
    want(0, 0) = -2.0;
    want(0, 7) = -3.0 * 41.0;                 // -B_P C_Q2
    want(1, 0) = 11.0 * 5.0;                  // B_I C_P
    want(1, 1) = -7.0;
    want(2, 0) = 23.0 * 17.0 * 5.0;           // B_Q1 D_I C_P
    want(2, 1) = 23.0 * 13.0;                 // B_Q1 C_I
    want(2, 2) = -19.0;
    want(2, 7) = 23.0 * 41.0;                 // B_Q1 C_Q2
    want.set_block(3, 3, g.base.A);
    want.set_block(3, 2, g.base.B * 29.0);    // B_g C_Q1
    want.set_block(7, 3, g.base.C * 37.0);    // B_Q2 C_g
    want(7, 7) = -31.0;
    REQUIRE(max_abs(loop.A - want) == 0.0);

    RMat b1(8, 1), b2(8, 1);
    b1(0, 0) = 3.0;
    b1(2, 0) = -23.0;
    b2(1, 0) = 11.0;
    b2(2, 0) = 23.0 * 17.0;
    REQUIRE(max_abs(loop.B1 - b1) == 0.0);
    REQUIRE(max_abs(loop.B2 - b2) == 0.0);

    RMat c(1, 8);
    c(0, 0) = 5.0;
    REQUIRE(max_abs(loop.C - c) == 0.0);

    // Reset map: ones everywhere except the CgLp's resetting states.
    for (std::size_t i = 0; i < 8; ++i) {
        const double expect = (i == 3 || i == 4) ? 0.0 : 1.0;
        REQUIRE(loop.reset_map(i, i) == expect);
    }
}

TEST_CASE("config-2 augmentation: derived pattern with the self-term on Q") {
    const StateSpace plant = scalar_block(-2.0, 3.0, 5.0, 0.0);
    const StateSpace inv = scalar_block(-7.0, 11.0, 13.0, 17.0);
    const StateSpace q = scalar_block(-43.0, 47.0, 53.0, 0.0);
    const StateSpace qco = scalar_block(-59.0, 61.0, 67.0, 0.0);
    const reset::ResetElement g = reset::cglp({10.0, 1.0, 1.25, 1000.0});
    const StateSpace c = scalar_block(-71.0, 73.0, 79.0, 83.0);

    const AugmentedLoop loop = augment_rdob2(plant, inv, q, qco, g, c);
    REQUIRE(loop.order() == 9);
    REQUIRE(loop.reset_offset == 4);

    RMat want(9, 9);
    want(0, 0) = -2.0;
    want(0, 2) = -3.0 * 53.0;                    // -B_P C_Q
    want.set_block(0, 4, g.base.C * (3.0 * 83.0));  // B_P D_C C_g
    want(0, 8) = 3.0 * 79.0;                     // B_P C_C
    want(1, 0) = 11.0 * 5.0;
    want(1, 1) = -7.0;
    want(2, 0) = 47.0 * 17.0 * 5.0;              // B_Q D_I C_P
    want(2, 1) = 47.0 * 13.0;                    // B_Q C_I
    want(2, 2) = -43.0 + 47.0 * 53.0;            // A_Q + B_Q C_Q
    want.set_block(2, 4, g.base.C * (-47.0 * 83.0));  // -B_Q D_C C_g
    want(2, 8) = -47.0 * 79.0;                   // -B_Q C_C
    want(3, 3) = -59.0;
    want.set_block(4, 4, g.base.A);
    want.set_block(4, 3, g.base.B * 67.0);       // B_g C_Qco
    want.set_block(8, 4, g.base.C * 73.0);       // B_C C_g
    want(8, 8) = -71.0;
    REQUIRE(max_abs(loop.A - want) < 1e-12);

    // B1 injects at the Q_co input only.
    RMat b1(9, 1);
    b1(3, 0) = 61.0;
    REQUIRE(max_abs(loop.B1 - b1) == 0.0);

    RMat b2(9, 1);
    b2(1, 0) = 11.0;
    b2(2, 0) = 47.0 * 17.0;                      // B_Q D_I
    REQUIRE(max_abs(loop.B2 - b2) == 0.0);
}

TEST_CASE("example preset config-1 loop is 10 states with the expected layout") {
    const DesignPreset p = make_preset("example-sec2");
    const AugmentedLoop loop = arch::build_rdob1_loop(p);
    REQUIRE(loop.order() == 10);  // plant 2 + inverse 2 + Q1 1 + CgLp 4 + Q2 1
    REQUIRE(loop.layout.size() == 5);
    REQUIRE(loop.layout[0].second == 2);
    REQUIRE(loop.layout[1].second == 2);
    REQUIRE(loop.layout[2].second == 1);
    REQUIRE(loop.layout[3].second == 4);
    REQUIRE(loop.layout[4].second == 1);
    REQUIRE(base_linear_stable(loop));
}

TEST_CASE("frozen config-1 loop matches the rational loop gain") {
    const DesignPreset p = make_preset("example-sec2");
    const AugmentedLoop loop = arch::build_rdob1_loop(p);
    const num::TransferFunction inv_tf =
        arch::properize_inverse_tf(p.dob.nominal.ctf(), 20.0 * 1e5);
    for (double w : num::log_grid(1e1, 1e5, 30)) {
        const Complex pv = p.dob.plant.at(w);
        const Complex pn_inv = num::eval_tf(inv_tf, w);
        const Complex q_eff = p.rdob1->q1.at(w) * reset::base_response(p.rdob1->cglp, w) *
                              p.rdob1->q2.at(w);
        // y/u of the closed inner loop with the exact realized inverse:
        // u_c = u - d_hat, d_hat = Q_eff (PnInv P u_c - u_c).
        const Complex den = 1.0 + q_eff * (pn_inv * pv - 1.0);
        const Complex want = pv / den;
        const Complex got = loop_response(loop, w, 1);
        REQUIRE(std::abs(got - want) <= 1e-6 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("frozen config-2 loop matches the rational chain response") {
    const DesignPreset p = make_preset("example-sec2");
    const AugmentedLoop loop = arch::build_rdob2_loop(p);
    // The open chain contains the controller's pure integrator, so A has a
    // marginal eigenvalue at the origin; everything else must be stable.
    for (const auto& l : num::eigenvalues(loop.A)) REQUIRE(l.real() < 1e-6);
    const num::TransferFunction inv_tf =
        arch::properize_inverse_tf(p.dob.nominal.ctf(), 20.0 * 1e5);
    for (double w : num::log_grid(1e1, 1e5, 30)) {
        const Complex pv = p.dob.plant.at(w);
        const Complex pn_inv = num::eval_tf(inv_tf, w);
        const Complex q = p.dob.q.at(w);
        const Complex chain = p.rdob2->q_co.at(w) * reset::base_response(p.rdob2->cglp, w) *
                              p.rdob2->controller_core.at(w);
        const Complex den = 1.0 + q * (pn_inv * pv - 1.0);
        const Complex want = chain * pv / den;
        const Complex got = loop_response(loop, w, 1);
        REQUIRE(std::abs(got - want) <= 1e-6 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("sweep trivial cases: full reset and identity reset") {
    const DesignPreset p = make_preset("example-sec2");
    AugmentedLoop loop = arch::build_rdob1_loop(p);
    const auto grid = num::log_grid(1e0, 1e5, 10);

    AugmentedLoop all_reset = loop;
    all_reset.reset_map = RMat(loop.order(), loop.order(), 0.0);
    for (double v : stability_sweep(all_reset, grid, 2).max_eig) REQUIRE(v == 0.0);

    AugmentedLoop frozen = loop;
    frozen.reset_map = RMat::identity(loop.order());
    double worst_re = -1e300;
    for (const auto& l : num::eigenvalues(loop.A)) worst_re = std::max(worst_re, l.real());
    const auto swept = stability_sweep(frozen, grid, 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double want = std::exp(kPi * worst_re / grid[i]);
        // The dominant mode here is the plant's critically damped double
        // pole; its defective cluster splits both eigenvalue routes, and the
        // split is amplified exponentially as pi/w grows.
        if (want < 1e-100) {
            REQUIRE(swept.max_eig[i] < 1e-90);
        } else if (want < 1e-20) {
            REQUIRE(swept.max_eig[i] > 0.5 * want);
            REQUIRE(swept.max_eig[i] < 2.0 * want);
        } else {
            REQUIRE(swept.max_eig[i] == Catch::Approx(want).epsilon(2e-3));
        }
    }
    REQUIRE(swept.all_stable);  // Hurwitz A <-> identity-reset sweep below one

    // Shifting the spectrum into the right half-plane must flip the verdict
    // (swept above 1e3 rad/s so the growing exponential stays representable).
    AugmentedLoop unstable = frozen;
    unstable.A = unstable.A + RMat::identity(loop.order()) * 2000.0;
    const auto bad = stability_sweep(unstable, num::log_grid(1e3, 1e5, 10), 2);
    REQUIRE_FALSE(bad.all_stable);
}

TEST_CASE("psi closed form agrees with quadrature") {
    // psi(0) = 0.
    const RMat a{{-1.0}};
    const RMat b{{1.0}};
    REQUIRE(max_abs(psi(a, b, 1.0, 0.0)) == 0.0);

    // Scalar case at t = pi: (e^pi + 1)/2.
    const RMat got = psi(a, b, 1.0, kPi);
    REQUIRE(got(0, 0) == Catch::Approx((std::exp(kPi) + 1.0) / 2.0).epsilon(1e-12));
    const RMat quad = oracles::psi_quadrature(a, b, 1.0, kPi);
    REQUIRE(std::abs(got(0, 0) - quad(0, 0)) < 1e-10 * std::abs(got(0, 0)));

    // A = 0 reduces to the plain sine integral, zero over a full period.
    const RMat zero{{0.0}};
    REQUIRE(max_abs(psi(zero, b, 2.0, kPi)) < 1e-14);

    // Matrix case against quadrature.
    const RMat a2{{0.0, 1.0}, {-4.0, -2.0}};
    const RMat b2{{0.0}, {4.0}};
    const RMat got2 = psi(a2, b2, 3.0, 0.7);
    const RMat quad2 = oracles::psi_quadrature(a2, b2, 3.0, 0.7);
    REQUIRE(max_abs(got2 - quad2) < 1e-10 * (1.0 + max_abs(got2)));
}

TEST_CASE("periodic solution: fixed point, recursion and periodicity") {
    const DesignPreset p = make_preset("example-sec2");
    const AugmentedLoop loop = arch::build_rdob1_loop(p);
    const double w = 2e3, alpha = 1.0;

    // Unforced case.
    const PeriodicSolution rest = periodic_solution(loop, w, 0.0, 32);
    REQUIRE(max_abs(rest.eta) == 0.0);
    for (const auto& x : rest.states) REQUIRE(max_abs(x) == 0.0);

    const PeriodicSolution sol = periodic_solution(loop, w, alpha, 64);

    // 200 iterations of the jump recursion from x(0+) = 0 reach the
    // closed-form fixed point.
    const std::size_t n = loop.order();
    const RMat e = num::expm(loop.A * (kPi / w));
    RMat m = e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) *= loop.reset_map(i, i);
    const RMat ph = phi(loop.A, loop.B1, w, kPi / w);
    const RMat rho_phi = loop.reset_map * ph;
    RMat eta(n, 1, 0.0);
    for (int k = 0; k < 200; ++k) {
        const RMat zeta = m * eta + rho_phi * alpha;
        eta = m * zeta - rho_phi * alpha;
    }
    const double scale = 1.0 + max_abs(sol.eta);
    REQUIRE(max_abs(eta - sol.eta) < 1e-8 * scale);

    // zeta* = -eta* and the solution is 2pi/w periodic: the jump applied to
    // the final state returns eta*.
    REQUIRE(max_abs(sol.zeta + sol.eta) < 1e-12 * scale);
    const RMat wrapped = loop.reset_map * sol.states.back();
    REQUIRE(max_abs(wrapped - sol.eta) < 1e-8 * scale);
}

TEST_CASE("literal fixed-point formula on a benign loop") {
    // Small-norm loop where exp(-A t) cannot overflow: the literal
    // (I - M^2)^-1 (M^2 - M) alpha psi form must match the implementation.
    const StateSpace plant = scalar_block(-1.0, 1.0, 1.0, 0.0);
    const StateSpace inv = scalar_block(-2.0, 1.0, 1.0, 1.0);
    const StateSpace q1 = scalar_block(-1.5, 1.0, 1.0, 0.0);
    const reset::ResetElement g = reset::cglp({1.0, 1.0, 1.25, 3.0});
    const StateSpace q2 = scalar_block(-2.5, 1.0, 1.0, 0.0);
    const AugmentedLoop loop = augment_rdob1(plant, inv, q1, g, q2);

    const double w = 1.3, alpha = 0.8;
    const std::size_t n = loop.order();
    const RMat e = num::expm(loop.A * (kPi / w));
    RMat m = e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) *= loop.reset_map(i, i);
    const RMat eye = RMat::identity(n);
    const RMat ps = psi(loop.A, loop.B1, w, kPi / w);
    const RMat literal = num::solve(eye - m * m, (m * m - m) * ps * alpha);

    const PeriodicSolution sol = periodic_solution(loop, w, alpha, 16);
    REQUIRE(max_abs(literal - sol.eta) < 1e-7 * (1.0 + max_abs(sol.eta)));
}

TEST_CASE("periodic solution matches a long-run reset simulation") {
    const DesignPreset p = make_preset("example-sec2");
    const AugmentedLoop loop = arch::build_rdob1_loop(p);
    const double w = 2e3, alpha = 1.0;
    const int half_steps = 4096;
    const PeriodicSolution sol = periodic_solution(loop, w, alpha, half_steps);

    // RK4 the driven loop over 24 periods with jumps at the input crossings.
    const std::size_t n = loop.order();
    const double h = (kPi / w) / half_steps;
    std::vector<double> x(n, 0.0), k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto deriv = [&](const std::vector<double>& xs, double t, std::vector<double>& out) {
        const double u = alpha * std::sin(w * t);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = loop.B1(i, 0) * u;
            for (std::size_t j = 0; j < n; ++j) acc += loop.A(i, j) * xs[j];
            out[i] = acc;
        }
    };
    auto rk4_step = [&](double t) {
        deriv(x, t, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        deriv(tmp, t + 0.5 * h, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        deriv(tmp, t + 0.5 * h, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        deriv(tmp, t + h, k4);
        for (std::size_t i = 0; i < n; ++i)
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    auto jump = [&] {
        for (std::size_t i = 0; i < n; ++i) x[i] *= loop.reset_map(i, i);
    };

    const long total = 24L * 2L * half_steps;
    for (long step = 0; step < total; ++step) {
        rk4_step(step * h);
        if ((step + 1) % half_steps == 0) jump();
    }

    // x now holds the post-jump state at the start of period 25; walk the
    // stored trajectory samples, which duplicate the jump instant pre/post.
    const double t_base = 24.0 * (2.0 * kPi / w);
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t k = 0; k < sol.states.size(); ++k) {
        double y_sim = 0.0, y_ref = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            y_sim += loop.C(0, j) * x[j];
            y_ref += loop.C(0, j) * sol.states[k](j, 0);
        }
        err2 += (y_sim - y_ref) * (y_sim - y_ref);
        ref2 += y_ref * y_ref;
        if (k + 1 < sol.states.size()) {
            if (k + 1 == static_cast<std::size_t>(half_steps) + 1)
                jump();  // duplicated sample: same instant, after the reset
            else
                rk4_step(t_base + sol.times[k]);
        }
    }
    REQUIRE(std::sqrt(err2) <= 0.01 * std::sqrt(ref2));
}

TEST_CASE("piezo presets pass the stability sweep (coarse grid)") {
    for (const char* name : {"piezo-sec5-rdob1", "piezo-sec5-rdob2"}) {
        const DesignPreset p = make_preset(name);
        const AugmentedLoop loop = p.rdob1 ? arch::build_rdob1_loop(p)
                                           : arch::build_rdob2_loop(p);
        REQUIRE(base_linear_stable(loop));
        const auto swept = stability_sweep(loop, num::log_grid(1e0, 1e5, 20), 2);
        REQUIRE(swept.all_stable);
    }
}
