#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "rdob/discretize.hpp"
#include "rdob/interconnect.hpp"
#include "rdob/models.hpp"
#include "rdob/presets.hpp"

namespace rdob::sim {

using arch::DesignPreset;
using num::RMat;
using num::StateSpace;

enum class Architecture { none, linear_dob, rdob1, rdob2 };
enum class Mode { continuous, discrete };

inline Architecture architecture_from_string(const std::string& s) {
    if (s == "none") return Architecture::none;
    if (s == "linear-dob") return Architecture::linear_dob;
    if (s == "rdob1") return Architecture::rdob1;
    if (s == "rdob2") return Architecture::rdob2;
    throw std::invalid_argument("unknown architecture: " + s);
}

inline std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::none: return "none";
        case Architecture::linear_dob: return "linear-dob";
        case Architecture::rdob1: return "rdob1";
        case Architecture::rdob2: return "rdob2";
    }
    return "?";
}

struct SimConfig {
    double dt = 1e-4;
    double duration = 1.0;
    Mode mode = Mode::discrete;
    Architecture architecture = Architecture::linear_dob;
    double ref_amplitude = 1.0;
    double ref_freq_hz = 30.0;
    bool identity_reset = false;  // freeze the CgLp jumps (collapse checks)
};

struct SimTrace {
    std::vector<double> t, r, e, u, d, n, y;
    std::vector<double> reset_times;
    bool diverged = false;

    std::size_t size() const { return t.size(); }
};

namespace detail {

struct LoopPlan {
    stab::Interconnect::Assembled net;  // inputs w = [r, d, n]
    std::size_t plant_block = 0;
    std::optional<std::size_t> trigger_block;
    std::optional<std::pair<std::size_t, std::size_t>> reset_span;  // offset,size
    RMat reset_matrix{0, 0};
    std::size_t plant_input_block = 0;  // v index whose input is u + d
    std::size_t control_block = 0;      // controller output
    std::size_t dhat_block = 0;         // disturbance-estimate output
};

inline StateSpace realize(const num::Model& m, Mode mode, double dt) {
    if (mode == Mode::discrete) {
        if (m.discrete()) {
            if (m.dtf().sample_time != dt)
                throw std::invalid_argument(
                    "simulate: discrete block sample time differs from dt");
            return num::tf_to_ss(m.dtf());
        }
        return num::c2d_zoh(num::tf_to_ss_cascade(m.ctf()), dt);
    }
    return num::tf_to_ss_cascade(m.continuous_equivalent());
}

inline StateSpace realize(const StateSpace& ss, Mode mode, double dt) {
    if (mode == Mode::discrete) return num::c2d_zoh(ss, dt);
    return ss;
}

// The CgLp lead tail goes through the bilinear map: the hold delay of
// zero-order sampling at the loop's critical band is enough to tip the
// discrete piezo loop unstable.
inline StateSpace realize_lead(const StateSpace& ss, Mode mode, double dt) {
    if (mode == Mode::discrete) return num::c2d_tustin(ss, dt);
    return ss;
}

// A reset element whose base splits into the resetting front states driving a
// non-resetting tail through one scalar signal (the CgLp: SORE -> lead). The
// parts are realized as separate blocks so that a sample-boundary jump in
// discrete mode clears exactly the resetting filter, as a per-block digital
// implementation would; discretizing the whole element at once entangles the
// states inside each step.
struct SplitElement {
    StateSpace reset_part;   // input: element input, output: coupling signal
    StateSpace linear_part;  // input: coupling signal, output: element output
    RMat reset_matrix;       // acting on the reset part's states
};

inline SplitElement split_reset_element(const reset::ResetElement& el) {
    const std::size_t n = el.order();
    std::size_t r = 0;
    while (r < n && el.reset_matrix(r, r) == 0.0) ++r;
    for (std::size_t i = r; i < n; ++i)
        if (el.reset_matrix(i, i) != 1.0)
            throw std::invalid_argument("split_reset_element: reset states must lead");
    if (r == 0 || r == n)
        throw std::invalid_argument("split_reset_element: nothing to split");

    const std::size_t l = n - r;
    // No feedback from the tail into the resetting front.
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = r; j < n; ++j)
            if (el.base.A(i, j) != 0.0)
                throw std::invalid_argument("split_reset_element: coupled tail");
    // Rank-one coupling A21 = b c^T defining the scalar interface signal.
    const RMat a21 = el.base.A.block(r, 0, l, r);
    std::size_t bi = 0, bj = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (std::abs(a21(i, j)) > best) {
                best = std::abs(a21(i, j));
                bi = i;
                bj = j;
            }
    if (best == 0.0) throw std::invalid_argument("split_reset_element: no coupling");
    RMat b(l, 1), c(1, r);
    for (std::size_t i = 0; i < l; ++i) b(i, 0) = a21(i, bj);
    for (std::size_t j = 0; j < r; ++j) c(0, j) = a21(bi, j) / a21(bi, bj);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (std::abs(a21(i, j) - b(i, 0) * c(0, j)) > 1e-12 * (1.0 + best))
                throw std::invalid_argument("split_reset_element: coupling not rank one");
    // Output on the front states must ride the same interface signal.
    const RMat cr = el.base.C.block(0, 0, 1, r);
    double d_w = 0.0;
    for (std::size_t j = 0; j < r; ++j)
        if (c(0, j) != 0.0) d_w = cr(0, j) / c(0, j);
    for (std::size_t j = 0; j < r; ++j)
        if (std::abs(cr(0, j) - d_w * c(0, j)) > 1e-12 * (1.0 + std::abs(d_w)))
            throw std::invalid_argument("split_reset_element: front output off the interface");
    SplitElement out{
        StateSpace(el.base.A.block(0, 0, r, r), el.base.B.block(0, 0, r, 1), c, RMat{{0.0}}),
        StateSpace(el.base.A.block(r, r, l, l), b, el.base.C.block(0, r, 1, l), RMat{{d_w}}),
        el.reset_matrix.block(0, 0, r, r)};
    // Element input must not drive the tail directly.
    for (std::size_t i = 0; i < l; ++i)
        if (el.base.B(r + i, 0) != 0.0)
            throw std::invalid_argument("split_reset_element: input drives the tail");
    return out;
}

// The properized inverse pads sit far above the Nyquist rate by design;
// zero-order-hold sampling would alias them, so the discrete realization goes
// through the bilinear map instead.
inline StateSpace realize_inverse(const arch::LinearDob& dob, Mode mode, double dt) {
    if (mode == Mode::discrete) return num::tf_to_ss(num::c2d_tustin(dob.nominal_inverse_tf, dt));
    return dob.nominal_inverse;
}

inline LoopPlan build_plan(const DesignPreset& preset, const SimConfig& cfg) {
    const Mode mode = cfg.mode;
    const double dt = cfg.dt;
    stab::Interconnect net(3);  // w0 = r, w1 = d, w2 = n
    LoopPlan plan;

    const StateSpace plant = realize(preset.dob.plant, mode, dt);
    switch (cfg.architecture) {
        case Architecture::none: {
            const auto p = net.add_block(plant);
            const auto c = net.add_block(realize(preset.dob.controller, mode, dt));
            net.connect(p, c, 1.0);
            net.connect_input(p, 1, 1.0);
            net.connect(c, p, -1.0);
            net.connect_input(c, 0, 1.0);
            net.connect_input(c, 2, -1.0);
            plan.plant_block = p;
            plan.plant_input_block = p;
            plan.control_block = c;
            plan.dhat_block = c;  // unused: u_c = out_C
            break;
        }
        case Architecture::linear_dob: {
            const auto p = net.add_block(plant);
            const auto inv = net.add_block(realize_inverse(preset.dob, mode, dt));
            const auto q = net.add_block(realize(preset.dob.q, mode, dt));
            const auto c = net.add_block(realize(preset.dob.controller, mode, dt));
            net.connect(p, c, 1.0);
            net.connect(p, q, -1.0);
            net.connect_input(p, 1, 1.0);
            net.connect(inv, p, 1.0);
            net.connect_input(inv, 2, 1.0);
            net.connect(q, inv, 1.0);
            net.connect(q, c, -1.0);
            net.connect(q, q, 1.0);
            net.connect(c, p, -1.0);
            net.connect_input(c, 0, 1.0);
            net.connect_input(c, 2, -1.0);
            plan.plant_block = p;
            plan.plant_input_block = p;
            plan.control_block = c;
            plan.dhat_block = q;
            break;
        }
        case Architecture::rdob1: {
            if (!preset.rdob1)
                throw std::invalid_argument("preset has no config-1 design: " + preset.name);
            const SplitElement cglp = split_reset_element(preset.rdob1->cglp);
            const auto p = net.add_block(plant);
            const auto inv = net.add_block(realize_inverse(preset.dob, mode, dt));
            const auto q1 = net.add_block(realize(preset.rdob1->q1, mode, dt));
            const auto gr = net.add_block(realize(cglp.reset_part, mode, dt));
            const auto gl = net.add_block(realize_lead(cglp.linear_part, mode, dt));
            const auto q2 = net.add_block(realize(preset.rdob1->q2, mode, dt));
            const auto c = net.add_block(realize(preset.dob.controller, mode, dt));
            net.connect(p, c, 1.0);
            net.connect(p, q2, -1.0);
            net.connect_input(p, 1, 1.0);
            net.connect(inv, p, 1.0);
            net.connect_input(inv, 2, 1.0);
            net.connect(q1, inv, 1.0);
            net.connect(q1, c, -1.0);
            net.connect(q1, q2, 1.0);
            net.connect(gr, q1, 1.0);
            net.connect(gl, gr, 1.0);
            net.connect(q2, gl, 1.0);
            net.connect(c, p, -1.0);
            net.connect_input(c, 0, 1.0);
            net.connect_input(c, 2, -1.0);
            plan.plant_block = p;
            plan.plant_input_block = p;
            plan.trigger_block = q1;
            plan.control_block = c;
            plan.dhat_block = q2;
            plan.reset_matrix = cglp.reset_matrix;
            break;
        }
        case Architecture::rdob2: {
            if (!preset.rdob2)
                throw std::invalid_argument("preset has no config-2 design: " + preset.name);
            const SplitElement cglp = split_reset_element(preset.rdob2->cglp);
            const auto p = net.add_block(plant);
            const auto inv = net.add_block(realize_inverse(preset.dob, mode, dt));
            const auto q = net.add_block(realize(preset.dob.q, mode, dt));
            const auto qco = net.add_block(realize(preset.rdob2->q_co, mode, dt));
            const auto gr = net.add_block(realize(cglp.reset_part, mode, dt));
            const auto gl = net.add_block(realize_lead(cglp.linear_part, mode, dt));
            const auto cc = net.add_block(realize(preset.rdob2->controller_core, mode, dt));
            net.connect(p, cc, 1.0);
            net.connect(p, q, -1.0);
            net.connect_input(p, 1, 1.0);
            net.connect(inv, p, 1.0);
            net.connect_input(inv, 2, 1.0);
            net.connect(q, inv, 1.0);
            net.connect(q, cc, -1.0);
            net.connect(q, q, 1.0);
            net.connect(qco, p, -1.0);
            net.connect_input(qco, 0, 1.0);
            net.connect_input(qco, 2, -1.0);
            net.connect(gr, qco, 1.0);
            net.connect(gl, gr, 1.0);
            net.connect(cc, gl, 1.0);
            plan.plant_block = p;
            plan.plant_input_block = p;
            plan.trigger_block = qco;
            plan.control_block = cc;
            plan.dhat_block = q;
            plan.reset_matrix = cglp.reset_matrix;
            break;
        }
    }

    plan.net = net.assemble();
    // Balance the assembled flow matrix: the raw interconnection is highly
    // non-normal (inverse realizations carry ~1e19 output rows) and both RK4
    // and the discrete iteration lose their eigenvalue-based stability
    // guarantees without it. Diagonal scaling commutes with the diagonal
    // reset map, so the jump semantics are untouched.
    {
        std::vector<double> d = num::detail::balance_in_place_real(plan.net.A);
        const std::size_t n = plan.net.A.rows();
        for (auto& col : plan.net.B)
            for (std::size_t i = 0; i < n; ++i) col(i, 0) /= d[i];
        for (std::size_t b = 0; b < plan.net.out_x.rows(); ++b)
            for (std::size_t j = 0; j < n; ++j) plan.net.out_x(b, j) *= d[j];
    }
    if (plan.trigger_block) {
        // The CgLp base block sits immediately after the trigger block in
        // every wiring above.
        const std::size_t g_index = *plan.trigger_block + 1;
        plan.reset_span = plan.net.spans[g_index];
        if (cfg.identity_reset)
            plan.reset_matrix = RMat::identity(plan.reset_matrix.rows());
    }
    return plan;
}

}  // namespace detail

// Hysteresis drive: by default the bounded disturbance is driven by a scaled
// copy of the reference so that runs across architectures see identical
// disturbance sequences; driving by the realized control input couples the
// operator into the loop instead.
struct DisturbanceSetup {
    models::HysteresisModel* hysteresis = nullptr;
    double drive_scale = 1.0;
    bool drive_by_control = false;
};

inline SimTrace simulate(const DesignPreset& preset, const SimConfig& cfg,
                         const DisturbanceSetup& dist = {},
                         models::NoiseSource* noise = nullptr) {
    if (!(cfg.dt > 0.0) || !(cfg.duration > 0.0))
        throw std::invalid_argument("simulate: dt and duration must be > 0");
    detail::LoopPlan plan = detail::build_plan(preset, cfg);
    const std::size_t n = plan.net.A.rows();
    const double w_ref = 2.0 * std::numbers::pi * cfg.ref_freq_hz;

    std::vector<double> x(n, 0.0);
    const long steps = static_cast<long>(std::llround(cfg.duration / cfg.dt));

    SimTrace trace;
    trace.t.reserve(steps + 1);

    // Output rows: out = out_x x + out_w w.
    auto block_out = [&](std::size_t b, const double* w) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += plan.net.out_x(b, j) * x[j];
        for (std::size_t k = 0; k < 3; ++k) acc += plan.net.out_w(b, k) * w[k];
        return acc;
    };

    double drive_prev = 0.0;
    double trig_prev = 0.0;
    bool have_trig = false;

    auto apply_reset = [&] {
        if (!plan.reset_span) return;
        const auto [off, len] = *plan.reset_span;
        for (std::size_t i = 0; i < len; ++i) x[off + i] *= plan.reset_matrix(i, i);
    };

    // RK4 on xdot = A x + B w with r evaluated at stage times, d and n held.
    std::vector<double> k1(n), k2(n), k3(n), k4(n), xs(n);
    auto deriv = [&](const std::vector<double>& state, double r_val, double d_val, double n_val,
                     std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = plan.net.B[0](i, 0) * r_val + plan.net.B[1](i, 0) * d_val +
                         plan.net.B[2](i, 0) * n_val;
            for (std::size_t j = 0; j < n; ++j) acc += plan.net.A(i, j) * state[j];
            out[i] = acc;
        }
    };

    for (long k = 0; k <= steps; ++k) {
        const double t = k * cfg.dt;
        const double r = cfg.ref_amplitude * std::sin(w_ref * t);
        const double n_val = noise ? noise->sample() : 0.0;

        double w[3] = {r, 0.0, n_val};

        // The plant is strictly proper, so no block output depends on d at
        // the same instant; signals here are valid before the d update.
        double u_c = block_out(plan.control_block, w);
        if (cfg.architecture != Architecture::none)
            u_c -= block_out(plan.dhat_block, w);

        double d_val = 0.0;
        if (dist.hysteresis) {
            const double drive = dist.drive_by_control ? u_c : dist.drive_scale * r;
            d_val = dist.hysteresis->step(drive, drive - drive_prev);
            drive_prev = drive;
        }
        w[1] = d_val;

        // Reset detection on the trigger signal at this sample.
        if (plan.trigger_block) {
            double trig = block_out(*plan.trigger_block, w);
            if (have_trig && (trig_prev * trig < 0.0 || trig == 0.0)) {
                apply_reset();
                trig = block_out(*plan.trigger_block, w);
                trace.reset_times.push_back(t);
            }
            trig_prev = trig;
            have_trig = true;
        }

        const double y = block_out(plan.plant_block, w);
        trace.t.push_back(t);
        trace.r.push_back(r);
        trace.n.push_back(n_val);
        trace.d.push_back(d_val);
        trace.y.push_back(y);
        trace.e.push_back(r - y - n_val);
        trace.u.push_back(u_c);

        double norm2 = 0.0;
        for (double v : x) norm2 += v * v;
        if (!std::isfinite(norm2) || norm2 > 1e24) {
            trace.diverged = true;
            break;
        }
        if (k == steps) break;

        if (cfg.mode == Mode::discrete) {
            std::vector<double> xn(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = plan.net.B[0](i, 0) * r + plan.net.B[1](i, 0) * d_val +
                             plan.net.B[2](i, 0) * n_val;
                for (std::size_t j = 0; j < n; ++j) acc += plan.net.A(i, j) * x[j];
                xn[i] = acc;
            }
            x = std::move(xn);
        } else {
            const double h = cfg.dt;
            auto r_at = [&](double tt) { return cfg.ref_amplitude * std::sin(w_ref * tt); };
            deriv(x, r_at(t), d_val, n_val, k1);
            for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
            deriv(xs, r_at(t + 0.5 * h), d_val, n_val, k2);
            for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
            deriv(xs, r_at(t + 0.5 * h), d_val, n_val, k3);
            for (std::size_t i = 0; i < n; ++i) xs[i] = x[i] + h * k3[i];
            deriv(xs, r_at(t + h), d_val, n_val, k4);
            for (std::size_t i = 0; i < n; ++i)
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    return trace;
}

// The 30 Hz tracking comparison: identical reference, disturbance and noise
// sequences across the architectures.
struct ScenarioRun {
    Architecture architecture;
    SimTrace trace;
};

inline std::vector<ScenarioRun> run_scenario(const DesignPreset& preset, const SimConfig& base,
                                             const models::BoucWenParams& bw, double drive_scale,
                                             std::uint32_t seed, double noise_sigma) {
    std::vector<ScenarioRun> runs;
    for (Architecture a : {Architecture::none, Architecture::linear_dob, Architecture::rdob1,
                           Architecture::rdob2}) {
        if (a == Architecture::rdob1 && !preset.rdob1) continue;
        if (a == Architecture::rdob2 && !preset.rdob2) continue;
        SimConfig cfg = base;
        cfg.architecture = a;
        models::HysteresisModel hyst(bw, cfg.dt);
        models::NoiseSource noise(seed, noise_sigma);
        DisturbanceSetup dist{&hyst, drive_scale, false};
        runs.push_back({a, simulate(preset, cfg, dist, &noise)});
    }
    return runs;
}

}  // namespace rdob::sim
