#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rdob/analysis.hpp"
#include "rdob/csv.hpp"
#include "rdob/describing_function.hpp"
#include "rdob/preset_loops.hpp"
#include "rdob/scenario.hpp"
#include "rdob/stability.hpp"

namespace rdob::cli {

namespace detail {

struct GridOptions {
    double omega_min = 0.0;   // 0: command default
    double omega_max = 0.0;
    std::size_t per_decade = 100;
    std::string out_dir = ".";

    std::vector<double> grid(double def_min, double def_max) const {
        const double lo = omega_min > 0.0 ? omega_min : def_min;
        const double hi = omega_max > 0.0 ? omega_max : def_max;
        return num::log_grid(lo, hi, per_decade);
    }
};

inline void add_grid_options(CLI::App* cmd, GridOptions& g) {
    cmd->add_option("--grid-per-decade", g.per_decade, "log-grid density");
    cmd->add_option("--omega-min", g.omega_min, "grid start (rad/s)");
    cmd->add_option("--omega-max", g.omega_max, "grid end (rad/s)");
    cmd->add_option("--out", g.out_dir, "output directory");
}

inline std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    if (!p.empty()) std::filesystem::create_directories(p);
    return p;
}

inline int run_df(const std::string& element, reset::CgLpParams p, const GridOptions& g) {
    reset::ResetElement el = [&] {
        if (element == "clegg") return reset::clegg();
        if (element == "fore") return reset::fore(p.omega_r);
        if (element == "sore") return reset::sore(p.omega_r, p.zeta_r);
        if (element == "cglp") return reset::cglp(p);
        throw std::invalid_argument("unknown element: " + element);
    }();

    const double def_min = (element == "clegg") ? 1e-2 : p.omega_r / 100.0;
    const double def_max = (element == "cglp") ? 10.0 * p.omega_f
                           : (element == "clegg") ? 1e4
                                                  : 1000.0 * p.omega_r;
    const auto grid = g.grid(def_min, def_max);

    CsvWriter csv(ensure_dir(g.out_dir) / ("df_" + element + ".csv"),
                  {"omega", "df_re", "df_im", "df_mag_db", "df_phase_deg", "base_re", "base_im",
                   "base_mag_db", "base_phase_deg"});
    for (double w : grid) {
        const auto df = reset::describing_function(el, w);
        const auto base = reset::base_response(el, w);
        csv.row({w, df.real(), df.imag(), num::magnitude_db(df), num::phase_deg(df), base.real(),
                 base.imag(), num::magnitude_db(base), num::phase_deg(base)});
    }
    return 0;
}

inline int run_sens(const std::string& preset_name, const std::string& arch_name,
                    const GridOptions& g) {
    const arch::DesignPreset preset = arch::make_preset(preset_name);
    const auto grid = g.grid(1e1, std::min(preset.max_analysis_omega, 1e6));

    std::vector<num::Complex> inner(grid.size()), outer(grid.size());
    if (arch_name == "linear") {
        const auto in = arch::inner_sensitivities(preset.dob, grid);
        const auto out = arch::outer_sensitivities(preset.dob, grid);
        inner = in.s.values;
        outer = out.s.values;
    } else if (arch_name == "rdob1") {
        if (!preset.rdob1) throw std::invalid_argument("preset has no config-1 design");
        const auto q_eff = arch::nonlinear_q_response(*preset.rdob1, grid);
        const auto out = arch::outer_sensitivities(preset.dob, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto pn = preset.dob.nominal.at(grid[i]);
            const auto pv = preset.dob.plant.at(grid[i]);
            inner[i] = pn * (1.0 - q_eff.values[i]) /
                       (q_eff.values[i] * (pv - pn) + pn);
        }
        outer = out.s.values;
    } else if (arch_name == "rdob2") {
        if (!preset.rdob2) throw std::invalid_argument("preset has no config-2 design");
        const auto in = arch::inner_sensitivities(preset.dob, grid);
        const auto c_eff = arch::nonlinear_controller_response(*preset.rdob2, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto pn = preset.dob.nominal.at(grid[i]);
            outer[i] = 1.0 / (1.0 + pn * c_eff.values[i]);
        }
        inner = in.s.values;
    } else {
        throw std::invalid_argument("unknown architecture: " + arch_name +
                                    " (want linear|rdob1|rdob2)");
    }

    CsvWriter csv(ensure_dir(g.out_dir) / ("sens_" + preset_name + "_" + arch_name + ".csv"),
                  {"omega", "inner_mag", "inner_phase_deg", "outer_mag", "outer_phase_deg",
                   "overall_mag", "overall_phase_deg"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const num::Complex total = inner[i] * outer[i];
        csv.row({grid[i], std::abs(inner[i]), num::phase_deg(inner[i]), std::abs(outer[i]),
                 num::phase_deg(outer[i]), std::abs(total), num::phase_deg(total)});
    }
    return 0;
}

inline int run_stab(const std::string& preset_name, std::string config, const GridOptions& g) {
    const arch::DesignPreset preset = arch::make_preset(preset_name);
    if (config.empty()) {
        if (preset.rdob1)
            config = "rdob1";
        else if (preset.rdob2)
            config = "rdob2";
        else
            throw std::invalid_argument("preset has no reset configuration: " + preset_name);
    }
    stab::AugmentedLoop loop = (config == "rdob1") ? arch::build_rdob1_loop(preset)
                               : (config == "rdob2")
                                   ? arch::build_rdob2_loop(preset)
                                   : throw std::invalid_argument("config must be rdob1|rdob2");

    if (!stab::base_linear_stable(loop)) {
        std::cerr << "base linear system unstable; reset analysis skipped\n";
        return 2;
    }
    GridOptions sweep = g;
    if (sweep.per_decade == 100) sweep.per_decade = 60;  // sweep default density
    const auto grid = sweep.grid(1e-1, 1e5);
    const auto result = stab::stability_sweep(loop, grid);

    CsvWriter csv(ensure_dir(g.out_dir) / ("stab_" + preset_name + "_" + config + ".csv"),
                  {"omega", "max_eig_mag"});
    for (std::size_t i = 0; i < grid.size(); ++i) csv.row({grid[i], result.max_eig[i]});
    std::cout << (result.all_stable ? "stable over the sweep\n"
                                    : "NOT stable over the sweep\n");
    return 0;
}

inline int run_sim(const std::string& scenario_path, const GridOptions& g,
                   std::optional<std::uint32_t> seed_override) {
    nlohmann::json j;
    {
        std::ifstream in(scenario_path);
        if (!in) throw std::invalid_argument("cannot open scenario: " + scenario_path);
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
        }
    }
    ScenarioConfig sc = parse_scenario(j);
    if (seed_override) sc.seed = *seed_override;
    if (g.out_dir != ".") sc.output_dir = g.out_dir;

    arch::DesignPreset preset = arch::make_preset(sc.preset);
    if (sc.cglp_override) {
        if (preset.rdob1) preset.rdob1->cglp = reset::cglp(*sc.cglp_override);
        if (preset.rdob2) preset.rdob2->cglp = reset::cglp(*sc.cglp_override);
    }

    sim::SimConfig cfg;
    cfg.mode = (sc.mode == "discrete") ? sim::Mode::discrete : sim::Mode::continuous;
    cfg.dt = sc.dt > 0.0 ? sc.dt : default_dt(sc.preset, sc.mode);
    cfg.duration = sc.duration;
    cfg.ref_amplitude = sc.ref_amplitude;
    cfg.ref_freq_hz = sc.ref_freq_hz;
    if (!sc.architecture.empty())
        cfg.architecture = sim::architecture_from_string(sc.architecture);
    else if (preset.rdob1)
        cfg.architecture = sim::Architecture::rdob1;
    else if (preset.rdob2)
        cfg.architecture = sim::Architecture::rdob2;
    else
        cfg.architecture = sim::Architecture::linear_dob;

    std::optional<models::HysteresisModel> hyst;
    sim::DisturbanceSetup dist;
    if (sc.hysteresis_enabled) {
        hyst.emplace(sc.bouc_wen, cfg.dt);
        dist.hysteresis = &*hyst;
        dist.drive_by_control = sc.hyst_drive_by_control;
        dist.drive_scale = sc.hyst_drive_scale;
        if (dist.drive_scale == 0.0) {
            const auto& pn = preset.dob.nominal.ctf();
            dist.drive_scale = std::abs(pn.den.eval(0.0) / pn.num.eval(0.0));
        }
    }
    std::optional<models::NoiseSource> noise;
    if (sc.noise_corner_hz)
        noise.emplace(sc.seed, sc.noise_sigma,
                      2.0 * std::numbers::pi * *sc.noise_corner_hz, cfg.dt);
    else
        noise.emplace(sc.seed, sc.noise_sigma);

    const sim::SimTrace tr = sim::simulate(preset, cfg, dist, &*noise);

    const auto dir = ensure_dir(sc.output_dir);
    {
        CsvWriter csv(dir / "trace.csv", {"t", "r", "e", "u", "d", "n", "y"});
        for (std::size_t i = 0; i < tr.size(); ++i)
            csv.row({tr.t[i], tr.r[i], tr.e[i], tr.u[i], tr.d[i], tr.n[i], tr.y[i]});
    }
    {
        CsvWriter csv(dir / "resets.csv", {"t_reset"});
        for (double t : tr.reset_times) csv.row({t});
    }
    double rms_e = 0.0;
    for (double e : tr.e) rms_e += e * e;
    rms_e = std::sqrt(rms_e / static_cast<double>(tr.size()));
    double loop_area = 0.0;
    bool cpsd_ok = false;
    double err_var = 0.0;
    try {
        const auto curve = analysis::cpsd(tr.e, 1.0 / cfg.dt);
        CsvWriter csv(dir / "cpsd_error.csv", {"freq_hz", "cumulative_power"});
        for (std::size_t i = 0; i < curve.freq_hz.size(); ++i)
            csv.row({curve.freq_hz[i], curve.cumulative[i]});
        err_var = curve.total();
        cpsd_ok = true;
    } catch (const std::invalid_argument&) {
        // short runs simply skip the spectral outputs
    }
    try {
        const auto loop = analysis::hysteresis_loop(tr.r, tr.y);
        CsvWriter csv(dir / "hysteresis_loop.csv", {"r", "y"});
        for (const auto& [u, y] : loop.cycle) csv.row({u, y});
        loop_area = loop.area;
    } catch (const std::invalid_argument&) {
    }
    {
        CsvWriter csv(dir / "summary.csv", {"key", "value"});
        csv.row("rms_error", rms_e);
        csv.row("error_variance", cpsd_ok ? err_var : 0.0);
        csv.row("loop_area", loop_area);
        csv.row("reset_count", static_cast<double>(tr.reset_times.size()));
        csv.row("diverged", tr.diverged ? 1.0 : 0.0);
    }
    if (tr.diverged) {
        std::cerr << "simulation diverged; partial trace written\n";
        return 2;
    }
    return 0;
}

}  // namespace detail

inline int run(int argc, char** argv) {
    CLI::App app{"reset disturbance observer toolbox"};
    app.require_subcommand(1);

    detail::GridOptions grid;

    auto* df = app.add_subcommand("df", "describing function of a reset element");
    std::string element;
    reset::CgLpParams cglp_params{2.0 * std::numbers::pi * 100.0, 0.7, 1.25,
                                  2.0 * std::numbers::pi * 5000.0};
    df->add_option("element", element, "clegg|fore|sore|cglp")->required();
    df->add_option("--wr", cglp_params.omega_r, "corner (rad/s)");
    df->add_option("--zeta", cglp_params.zeta_r, "damping");
    df->add_option("--alpha", cglp_params.alpha, "corner-shift factor");
    df->add_option("--wf", cglp_params.omega_f, "lead termination (rad/s)");
    detail::add_grid_options(df, grid);

    auto* sens = app.add_subcommand("sens", "sensitivity functions for a preset");
    std::string preset_name, arch_name = "linear";
    sens->add_option("preset", preset_name, "design preset")->required();
    sens->add_option("architecture", arch_name, "linear|rdob1|rdob2");
    detail::add_grid_options(sens, grid);

    auto* stab_cmd = app.add_subcommand("stab", "sinusoidal-input stability sweep");
    std::string stab_preset, stab_config;
    stab_cmd->add_option("preset", stab_preset, "design preset")->required();
    stab_cmd->add_option("config", stab_config, "rdob1|rdob2 (default from preset)");
    detail::add_grid_options(stab_cmd, grid);

    auto* sim_cmd = app.add_subcommand("sim", "run a scenario file");
    std::string scenario_path;
    std::uint32_t seed = 0;
    bool seed_set = false;
    sim_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--seed", seed, "noise seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    sim_cmd->add_option("--out", grid.out_dir, "output directory");

    auto* presets_cmd = app.add_subcommand("presets", "list the named design presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (df->parsed()) return detail::run_df(element, cglp_params, grid);
        if (sens->parsed()) return detail::run_sens(preset_name, arch_name, grid);
        if (stab_cmd->parsed()) return detail::run_stab(stab_preset, stab_config, grid);
        if (sim_cmd->parsed())
            return detail::run_sim(scenario_path, grid,
                                   seed_set ? std::optional<std::uint32_t>(seed) : std::nullopt);
        if (presets_cmd->parsed()) {
            for (const auto& name : arch::preset_names()) std::cout << name << "\n";
            return 0;
        }
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace rdob::cli
