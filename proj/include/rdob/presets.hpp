#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rdob/models.hpp"
#include "rdob/rdob_config.hpp"

namespace rdob::arch {

// A named bundle of the worked designs: the introductory second-order example
// and the piezo-stage design (plant identified at 10 kHz, discrete controller
// and estimating filters).
struct DesignPreset {
    std::string name;
    LinearDob dob;
    std::optional<Rdob1> rdob1;
    std::optional<Rdob2> rdob2;
    double sample_time;           // control rate for discrete simulation
    double reference_freq_hz;     // default tracking scenario
    double max_analysis_omega;    // keep grids below the discrete Nyquist rate
};

inline std::vector<std::string> preset_names() {
    return {"example-sec2", "piezo-sec5-linear", "piezo-sec5-rdob1", "piezo-sec5-rdob2"};
}

namespace detail {

inline TransferFunction damped_lpf2(double wc) {
    return {Polynomial{1.0}, Polynomial{1.0 / (wc * wc), 2.0 / wc, 1.0}};
}

inline DesignPreset example_sec2() {
    const double wp = 1000.0;
    const double wq = 1e4;
    const double wf = 1e5;

    const TransferFunction pn = damped_lpf2(wp);
    const TransferFunction c = pid_series(33.6, 1000.0, 3333.0, 30000.0, wf);
    const TransferFunction q = damped_lpf2(wq);

    LinearDob dob{Model(pn), Model(pn), Model(q), Model(c),
                  properize_inverse(pn, 20.0 * wf), properize_inverse_tf(pn, 20.0 * wf)};

    // Q factors exactly into two first-order low-passes at wq.
    const Model q1(TransferFunction{Polynomial{1.0}, Polynomial{1.0 / wq, 1.0}});
    const Model q2 = split_q(Model(q), q1);
    Rdob1 r1{dob, q1, q2, reset::cglp({wq, 1.0, 1.25, wf})};

    // The controller's own output low-pass serves as Q_co.
    const Model q_co(TransferFunction{Polynomial{1.0}, Polynomial{1.0 / wf, 1.0}});
    const Model c_core(TransferFunction{
        (Polynomial{1.0 / 1000.0, 1.0} * Polynomial{1.0 / 3333.0, 1.0}) * 33.6,
        Polynomial{1.0 / 1000.0, 0.0} * Polynomial{1.0 / 30000.0, 1.0}});
    Rdob2 r2{dob, q_co, reset::cglp({wp, 1.0, 1.25, wf}), c_core};

    return {"example-sec2", dob, r1, r2, 1e-6, 30.0, 1e7};
}

inline TransferFunction piezo_nominal() { return models::piezo_plant(); }

inline DiscreteTransferFunction piezo_controller(double ts) {
    const Polynomial num = Polynomial{1.0, -0.9725} * Polynomial{1.0, 0.06267} *
                           Polynomial{1.0, -1.844, 0.9391} * Polynomial{1.0, -1.523, 0.8819} *
                           777.9;
    const Polynomial den = Polynomial{1.0, 0.904} * Polynomial{1.0, -0.9979} *
                           Polynomial{1.0, -0.9982} * Polynomial{1.0, 0.02331} *
                           Polynomial{1.0, -1.555, 0.789};
    return {num, den, ts};
}

inline DiscreteTransferFunction piezo_q(double ts) {
    const Polynomial num = Polynomial{1.0, 3.104} * Polynomial{1.0, 0.221} * 2.31e-3;
    const Polynomial den = Polynomial{1.0, -0.5762} * Polynomial{1.0, -1.789, 0.8165};
    return {num, den, ts};
}

inline DiscreteTransferFunction piezo_q1(double ts) {
    return {Polynomial{0.5302, -0.9712, 0.4531}, Polynomial{1.0, -1.881, 0.8931}, ts};
}

inline DesignPreset piezo(const std::string& name) {
    const double ts = 1e-4;
    const double wf = 2.0 * std::numbers::pi * 5000.0;

    const TransferFunction pn = piezo_nominal();
    LinearDob dob{Model(pn), Model(pn), Model(piezo_q(ts)), Model(piezo_controller(ts)),
                  properize_inverse(pn, 20.0 * wf), properize_inverse_tf(pn, 20.0 * wf)};

    DesignPreset p{name, dob, std::nullopt, std::nullopt, ts, 30.0,
                   0.98 * std::numbers::pi / ts};
    if (name == "piezo-sec5-rdob1") {
        const Model q1(piezo_q1(ts));
        const Model q2 = split_q(dob.q, q1);
        p.rdob1 = Rdob1{dob, q1, q2,
                        reset::cglp({2.0 * std::numbers::pi * 100.0, 0.7, 1.25, wf})};
    } else if (name == "piezo-sec5-rdob2") {
        // The controller's internal low-pass could serve as Q_co; the
        // augmented state matrices assume a separate filter, so a first-order
        // low-pass at wf is designed here.
        const Model q_co(TransferFunction{Polynomial{1.0}, Polynomial{1.0 / wf, 1.0}});
        p.rdob2 = Rdob2{dob, q_co,
                        reset::cglp({2.0 * std::numbers::pi * 700.0, 0.7, 1.25, wf}),
                        dob.controller};
    }
    return p;
}

}  // namespace detail

inline DesignPreset make_preset(const std::string& name) {
    if (name == "example-sec2") return detail::example_sec2();
    if (name == "piezo-sec5-linear" || name == "piezo-sec5-rdob1" ||
        name == "piezo-sec5-rdob2")
        return detail::piezo(name);
    throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace rdob::arch
