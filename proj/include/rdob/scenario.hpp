#pragma once

#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "rdob/models.hpp"
#include "rdob/reset_element.hpp"
#include "rdob/simulate.hpp"

namespace rdob::cli {

// Declarative simulation scenario. Unknown keys are rejected by name so a
// typo cannot silently fall back to a default.
struct ScenarioConfig {
    std::string preset = "piezo-sec5-rdob1";
    std::string architecture;  // empty: inferred from the preset name
    std::string mode = "discrete";
    double dt = 0.0;           // 0: preset/mode default
    double duration = 2.0;
    double ref_amplitude = 1.0;
    double ref_freq_hz = 30.0;

    bool hysteresis_enabled = true;
    models::BoucWenParams bouc_wen = default_piezo_bouc_wen();
    double hyst_drive_scale = 0.0;  // 0: 1 / |P_n(0)|
    bool hyst_drive_by_control = false;

    std::uint32_t seed = 1;
    double noise_sigma = 1e-6;
    std::optional<double> noise_corner_hz = 500.0;

    std::optional<reset::CgLpParams> cglp_override;
    std::string output_dir = ".";

    static models::BoucWenParams default_piezo_bouc_wen() {
        // Loop width ~10-15 percent of the voltage stroke, gently saturated so
        // the loops stay smooth like the identified ones.
        models::BoucWenParams p;
        p.stiffness = 65.0;
        p.amplitude = 1.0;
        p.beta = 0.6;
        p.gamma = 0.3;
        p.asymmetry = 0.25;
        p.leak = 20.0;
        p.input_scale = 500.0;
        return p;
    }
};

namespace detail {

inline void require_known_keys(const nlohmann::json& j, const std::string& scope,
                               const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw std::invalid_argument("scenario: unknown key '" +
                                        (scope.empty() ? key : scope + "." + key) + "'");
    }
}

template <class T>
T fetch(const nlohmann::json& j, const std::string& scope, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("scenario: bad value for key '" +
                                    (scope.empty() ? key : scope + "." + key) + "'");
    }
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
    using detail::fetch;
    using detail::require_known_keys;
    if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");
    require_known_keys(j, "",
                       {"preset", "architecture", "mode", "dt", "duration", "reference",
                        "hysteresis", "noise", "cglp", "output_dir"});

    ScenarioConfig cfg;
    cfg.preset = fetch<std::string>(j, "", "preset", cfg.preset);
    cfg.architecture = fetch<std::string>(j, "", "architecture", cfg.architecture);
    cfg.mode = fetch<std::string>(j, "", "mode", cfg.mode);
    if (cfg.mode != "discrete" && cfg.mode != "continuous")
        throw std::invalid_argument("scenario: mode must be 'discrete' or 'continuous'");
    cfg.dt = fetch<double>(j, "", "dt", cfg.dt);
    cfg.duration = fetch<double>(j, "", "duration", cfg.duration);
    cfg.output_dir = fetch<std::string>(j, "", "output_dir", cfg.output_dir);

    if (j.contains("reference")) {
        const auto& r = j.at("reference");
        require_known_keys(r, "reference", {"amplitude", "frequency_hz"});
        cfg.ref_amplitude = fetch<double>(r, "reference", "amplitude", cfg.ref_amplitude);
        cfg.ref_freq_hz = fetch<double>(r, "reference", "frequency_hz", cfg.ref_freq_hz);
    }
    if (j.contains("hysteresis")) {
        const auto& h = j.at("hysteresis");
        require_known_keys(h, "hysteresis",
                           {"enabled", "stiffness", "amplitude", "beta", "gamma", "asymmetry",
                            "leak", "input_scale", "drive_scale", "drive_by_control"});
        cfg.hysteresis_enabled = fetch<bool>(h, "hysteresis", "enabled", cfg.hysteresis_enabled);
        auto& p = cfg.bouc_wen;
        p.stiffness = fetch<double>(h, "hysteresis", "stiffness", p.stiffness);
        p.amplitude = fetch<double>(h, "hysteresis", "amplitude", p.amplitude);
        p.beta = fetch<double>(h, "hysteresis", "beta", p.beta);
        p.gamma = fetch<double>(h, "hysteresis", "gamma", p.gamma);
        p.asymmetry = fetch<double>(h, "hysteresis", "asymmetry", p.asymmetry);
        p.leak = fetch<double>(h, "hysteresis", "leak", p.leak);
        p.input_scale = fetch<double>(h, "hysteresis", "input_scale", p.input_scale);
        cfg.hyst_drive_scale = fetch<double>(h, "hysteresis", "drive_scale", cfg.hyst_drive_scale);
        cfg.hyst_drive_by_control =
            fetch<bool>(h, "hysteresis", "drive_by_control", cfg.hyst_drive_by_control);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        require_known_keys(n, "noise", {"seed", "sigma", "corner_hz"});
        cfg.seed = fetch<std::uint32_t>(n, "noise", "seed", cfg.seed);
        cfg.noise_sigma = fetch<double>(n, "noise", "sigma", cfg.noise_sigma);
        if (n.contains("corner_hz")) {
            const double c = fetch<double>(n, "noise", "corner_hz", 0.0);
            if (c > 0.0)
                cfg.noise_corner_hz = c;
            else
                cfg.noise_corner_hz.reset();
        }
    }
    if (j.contains("cglp")) {
        const auto& g = j.at("cglp");
        require_known_keys(g, "cglp", {"omega_r", "zeta_r", "alpha", "omega_f"});
        reset::CgLpParams p{fetch<double>(g, "cglp", "omega_r", 2.0 * std::numbers::pi * 100.0),
                            fetch<double>(g, "cglp", "zeta_r", 0.7),
                            fetch<double>(g, "cglp", "alpha", 1.25),
                            fetch<double>(g, "cglp", "omega_f", 2.0 * std::numbers::pi * 5000.0)};
        p.validate();
        cfg.cglp_override = p;
    }
    return cfg;
}

// Mode/preset-dependent defaults: the piezo designs run at the identified
// 10 kHz rate; the faster example design needs a proportionally faster step.
inline double default_dt(const std::string& preset, const std::string& mode) {
    const bool example = preset == "example-sec2";
    if (mode == "discrete") return example ? 2e-6 : 1e-4;
    return example ? 5e-7 : 4e-6;
}

}  // namespace rdob::cli
