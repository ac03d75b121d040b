#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "rdob/transfer_function.hpp"

namespace rdob::models {

using num::Polynomial;
using num::TransferFunction;

// Bouc-Wen (Duhem-class) hysteresis operator producing a bounded input
// disturbance. Asymmetry enters through an input-polarity-dependent shape
// coefficient; a small leak makes the loops rate dependent.
struct BoucWenParams {
    double stiffness = 1.0;    // output scale applied to the internal state
    double amplitude = 1.0;    // growth coefficient
    double beta = 0.6;         // shape (dissipative) coefficient
    double gamma = 0.3;        // shape coefficient, |gamma| <= beta(1-|asymmetry|)
    double asymmetry = 0.25;   // polarity-dependent modulation of beta, |.| < 1
    double leak = 0.0;         // 1/s, rate dependence
    double input_scale = 1.0;  // drive normalization (units of u)
};

class HysteresisModel {
public:
    HysteresisModel(const BoucWenParams& p, double dt) : p_(p), dt_(dt) {
        if (!(p.amplitude > 0.0) || !(p.beta > 0.0))
            throw std::invalid_argument("HysteresisModel: amplitude and beta must be > 0");
        if (!(std::abs(p.asymmetry) < 1.0))
            throw std::invalid_argument("HysteresisModel: |asymmetry| must be < 1");
        const double beta_min = p.beta * (1.0 - std::abs(p.asymmetry));
        if (p.gamma < 0.0 || p.gamma > beta_min)
            throw std::invalid_argument(
                "HysteresisModel: boundedness needs 0 <= gamma <= beta (1 - |asymmetry|)");
        if (p.leak < 0.0) throw std::invalid_argument("HysteresisModel: leak must be >= 0");
        if (!(p.input_scale > 0.0))
            throw std::invalid_argument("HysteresisModel: input_scale must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("HysteresisModel: dt must be > 0");
        state_bound_ = p.amplitude / (beta_min + p.gamma);
    }

    // One update for input value u and increment du; returns the disturbance.
    double step(double u, double du) {
        if (!std::isfinite(u) || !std::isfinite(du))
            throw std::invalid_argument("hysteresis_step: non-finite input");
        const double un = u / p_.input_scale;
        const double dun = du / p_.input_scale;
        // Subdivide large increments so the explicit update stays inside the
        // invariant region.
        const int parts =
            1 + static_cast<int>(std::min(63.0, std::abs(dun) * (p_.beta + p_.gamma) / 0.1));
        const double d_inc = dun / parts;
        const double d_t = dt_ / parts;
        for (int k = 0; k < parts; ++k) {
            const double u_here = un - dun + d_inc * (k + 1);
            const double beta_eff =
                p_.beta * (1.0 + p_.asymmetry * (u_here >= 0.0 ? 1.0 : -1.0));
            h_ += p_.amplitude * d_inc - beta_eff * std::abs(d_inc) * h_ -
                  p_.gamma * d_inc * std::abs(h_) - p_.leak * d_t * h_;
        }
        if (h_ > state_bound_) h_ = state_bound_;
        if (h_ < -state_bound_) h_ = -state_bound_;
        return p_.stiffness * h_;
    }

    double bound() const { return p_.stiffness * state_bound_; }
    double state() const { return h_; }
    void reset_state(double h = 0.0) { h_ = h; }
    const BoucWenParams& params() const { return p_; }

private:
    BoucWenParams p_;
    double dt_;
    double state_bound_;
    double h_ = 0.0;
};

// Seeded Gaussian source, optionally low-pass shaped at a corner frequency.
// The Box-Muller transform over the mt19937 stream keeps the sequence
// reproducible across platforms.
class NoiseSource {
public:
    NoiseSource(std::uint32_t seed, double sigma) : rng_(seed), sigma_(sigma) {
        if (sigma < 0.0) throw std::invalid_argument("NoiseSource: sigma must be >= 0");
    }

    NoiseSource(std::uint32_t seed, double sigma, double corner_rad_s, double dt)
        : NoiseSource(seed, sigma) {
        if (!(corner_rad_s > 0.0) || !(dt > 0.0))
            throw std::invalid_argument("NoiseSource: corner and dt must be > 0");
        const double a = std::exp(-corner_rad_s * dt);
        lp_pole_ = a;
        // Restore unit stationary variance after the one-pole shaping.
        lp_gain_ = std::sqrt((1.0 + a) / (1.0 - a)) * (1.0 - a);
    }

    double sample() {
        if (sigma_ == 0.0) {
            // Keep the stream position advancing so seeding stays comparable.
            (void)rng_();
            return 0.0;
        }
        const double g = gaussian();
        if (!lp_pole_) return sigma_ * g;
        lp_state_ = *lp_pole_ * lp_state_ + g;
        return sigma_ * lp_gain_ * lp_state_;
    }

private:
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_()) + 0.5) * (1.0 / 4294967296.0);
        const double u2 = (static_cast<double>(rng_()) + 0.5) * (1.0 / 4294967296.0);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::mt19937 rng_;
    double sigma_;
    std::optional<double> lp_pole_;
    double lp_gain_ = 1.0;
    double lp_state_ = 0.0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Identified two-mode model of the piezo stage (displacement per volt).
inline TransferFunction piezo_plant() {
    const Polynomial num = Polynomial{1.0, 439.8, 1.934e7} * 5.8e4;
    const Polynomial den = Polynomial{1.0, 754.0, 1.421e7} * Polynomial{1.0, 638.3, 3.948e7};
    return {num, den};
}

}  // namespace rdob::models
