#include "becsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/units.hpp"

namespace becsim::scenario {

namespace fs = std::filesystem;
using nlohmann::json;
using units::Dimension;

namespace {

double quantity(const json& node, Dimension dim) {
    if (node.is_number()) return node.get<double>();
    if (node.is_string()) {
        return units::parse_quantity(node.get<std::string>(), dim);
    }
    throw ConfigError("expected a number or unit string, got: " + node.dump());
}

double quantity_or(const json& obj, const char* key, Dimension dim,
                   double fallback) {
    if (!obj.contains(key)) return fallback;
    return quantity(obj.at(key), dim);
}

evap::RampProfile parse_ramp(const json& node, Dimension dim) {
    if (node.is_number() || node.is_string()) {
        return evap::RampProfile::constant(quantity(node, dim));
    }
    if (!node.is_object() || !node.contains("profile")) {
        throw ConfigError("ramp must be a value or {profile: ...}: " +
                          node.dump());
    }
    const std::string profile = node.at("profile").get<std::string>();
    if (profile == "constant") {
        return evap::RampProfile::constant(quantity(node.at("value"), dim));
    }
    if (profile == "exponential") {
        const double v0 = quantity(node.at("from"), dim);
        const double v1 = quantity(node.at("to"), dim);
        const double tau = quantity(node.at("tau"), Dimension::Time);
        if (!(tau > 0.0)) throw ConfigError("ramp: tau must be > 0");
        return evap::RampProfile::exponential(v0, v1, tau);
    }
    throw ConfigError("unknown ramp profile: " + profile);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

PotentialSpec reservoir_potential(const ReservoirConfig& r,
                                  const AtomSpecies& sp) {
    if (r.trap_type == "quadrupole") {
        return quadrupole(r.gradient, sp);
    }
    if (r.trap_type == "harmonic") {
        return harmonic(2.0 * pi * r.frequency, sp);
    }
    throw ConfigError("unknown reservoir trap type: " + r.trap_type);
}

ScenarioConfig parse_config_impl(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    ScenarioConfig cfg;
    cfg.name = doc.value("name", std::string{});

    if (!doc.contains("species")) throw ConfigError("config: species missing");
    const json& sp = doc.at("species");
    if (sp.is_string()) {
        if (!find_species(sp.get<std::string>(), cfg.species)) {
            throw ConfigError("unknown species preset: " +
                              sp.get<std::string>());
        }
    } else if (sp.is_object()) {
        // Inline species; two-body coefficients are per-scenario (evap.k2).
        cfg.species.name = sp.value("name", std::string("custom"));
        cfg.species.mass = quantity(sp.at("mass"), Dimension::Mass);
        cfg.species.scattering_length =
            quantity(sp.at("scattering_length"), Dimension::ScatteringLength);
        cfg.species.magnetic_moment =
            quantity_or(sp, "magnetic_moment", Dimension::MagneticMoment, 0.0);
        cfg.species.recoil_temperature =
            quantity_or(sp, "recoil_temperature", Dimension::Temperature, 0.0);
        cfg.species.background_rate =
            quantity_or(sp, "background_rate", Dimension::Rate, 0.0);
        try {
            cfg.species.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("species: ") + e.what());
        }
    } else {
        throw ConfigError("species must be a preset name or an object");
    }

    if (doc.contains("reservoir")) {
        const json& r = doc.at("reservoir");
        ReservoirConfig rc;
        const json& trap = r.at("trap");
        rc.trap_type = trap.at("type").get<std::string>();
        rc.gradient = quantity_or(trap, "gradient", Dimension::FieldGradient, 0.0);
        rc.frequency = quantity_or(trap, "frequency", Dimension::Frequency, 0.0);
        rc.atoms = quantity(r.at("atoms"), Dimension::Dimensionless);
        rc.temperature = quantity(r.at("temperature"), Dimension::Temperature);
        if (!(rc.atoms > 0.0) || !(rc.temperature > 0.0)) {
            throw ConfigError("reservoir: atoms and temperature must be > 0");
        }
        cfg.reservoir = rc;
    }

    if (doc.contains("dimple")) {
        const json& d = doc.at("dimple");
        DimpleConfig dc;
        dc.waist = quantity(d.at("waist"), Dimension::Length);
        dc.depth = quantity(d.at("depth"), Dimension::EnergyAsKelvin);
        dc.beam_count = d.value("beam_count", 2);
        if (dc.beam_count != 1 && dc.beam_count != 2) {
            throw ConfigError("dimple: beam_count must be 1 or 2");
        }
        if (!(dc.waist > 0.0) || !(dc.depth > 0.0)) {
            throw ConfigError("dimple: waist and depth must be > 0");
        }
        cfg.dimple = dc;
    }

    if (doc.contains("loading")) {
        const std::string mode =
            doc.at("loading").value("mode", std::string("diabatic"));
        if (mode != "diabatic" && mode != "adiabatic") {
            throw ConfigError("loading: mode must be diabatic or adiabatic");
        }
        cfg.adiabatic_loading = mode == "adiabatic";
        if (!cfg.reservoir || !cfg.dimple) {
            throw ConfigError("loading requires reservoir and dimple sections");
        }
    }

    if (doc.contains("evap")) {
        const json& e = doc.at("evap");
        EvapConfig ec;
        ec.t_end = quantity(e.at("t_end"), Dimension::Time);
        if (!(ec.t_end > 0.0)) throw ConfigError("evap: t_end must be > 0");
        ec.atoms = quantity_or(e, "atoms", Dimension::Dimensionless, 0.0);
        ec.temperature =
            quantity_or(e, "temperature", Dimension::Temperature, 0.0);
        if (!e.contains("eta")) throw ConfigError("evap: eta ramp missing");
        ec.eta = parse_ramp(e.at("eta"), Dimension::Dimensionless);
        if (e.contains("scattering_length")) {
            ec.scattering_length =
                parse_ramp(e.at("scattering_length"), Dimension::ScatteringLength);
        } else {
            ec.scattering_length =
                evap::RampProfile::constant(cfg.species.scattering_length);
        }
        const std::string policy =
            e.value("waist_policy", std::string("constant_waist"));
        if (policy == "constant_waist") {
            ec.waist_policy = evap::WaistPolicy::ConstantWaist;
        } else if (policy == "constant_omega") {
            ec.waist_policy = evap::WaistPolicy::ConstantOmega;
        } else {
            throw ConfigError("evap: unknown waist_policy " + policy);
        }
        ec.waist = quantity_or(e, "waist", Dimension::Length, 0.0);
        ec.trap_frequency =
            quantity_or(e, "trap_frequency", Dimension::Frequency, 0.0);
        ec.levitation = e.value("levitation", false);
        ec.gravity = quantity_or(e, "gravity", Dimension::Dimensionless,
                                 standard_gravity);
        ec.background_lifetime =
            quantity_or(e, "background_lifetime", Dimension::Time, 0.0);
        if (e.contains("laser_heating")) {
            const json& lh = e.at("laser_heating");
            ec.laser_rate = quantity(lh.at("rate"), Dimension::Rate);
            ec.laser_depth_ref =
                quantity(lh.at("reference_depth"), Dimension::EnergyAsKelvin);
        }
        ec.k2 = quantity_or(e, "k2", Dimension::Dimensionless, 0.0);  // m^3/s
        ec.tbr = e.value("tbr", true);
        ec.delta = e.value("delta", 1.5);
        ec.rel_tol = e.value("rel_tol", 1e-8);
        cfg.evap = ec;
    }

    if (doc.contains("outputs")) {
        const json& o = doc.at("outputs");
        cfg.outputs.csv = o.value("csv", cfg.outputs.csv);
        cfg.outputs.summary = o.value("summary", cfg.outputs.summary);
        cfg.outputs.stride = o.value("stride", 1);
        if (cfg.outputs.stride < 1) throw ConfigError("outputs: stride >= 1");
    }

    if (!cfg.reservoir && !cfg.evap) {
        throw ConfigError("config defines neither a loading nor an evap stage");
    }
    return cfg;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    try {
        return parse_config_impl(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    return parse_config(doc);
}

LoadStage run_load_stage(const ScenarioConfig& cfg) {
    if (!cfg.reservoir || !cfg.dimple) {
        throw ConfigError("loading stage needs reservoir and dimple sections");
    }
    const AtomSpecies& sp = cfg.species;
    const thermo::SampleState reservoir{cfg.reservoir->atoms,
                                        cfg.reservoir->temperature};
    const PotentialSpec magnetic = reservoir_potential(*cfg.reservoir, sp);
    const PotentialSpec laser =
        gaussian_dimple(cfg.dimple->depth, cfg.dimple->waist, sp);

    LoadStage stage;
    stage.result = cfg.adiabatic_loading
                       ? thermo::adiabatic_load(reservoir, magnetic, laser)
                       : thermo::diabatic_load(reservoir, magnetic, laser);
    stage.sigma =
        evap::cross_section(sp.scattering_length, reservoir.temperature,
                            loading::quadrupole_kev_eta, sp.mass);
    stage.timescales = loading::timescales(reservoir, magnetic, sp, stage.sigma,
                                           stage.result.dimple_radius);
    stage.reservoir_hydrodynamic =
        stage.timescales.t_coll < stage.timescales.t_osc;
    stage.threshold_atoms =
        loading::hydrodynamic_threshold(stage.timescales, stage.sigma);

    const thermo::ThermoReport rep = thermo::report(reservoir, magnetic);
    stage.t_load = loading::loading_time(
        stage.result.transferred_atoms, stage.timescales, rep.peak_density,
        reservoir.atom_number, stage.threshold_atoms);
    stage.t_load_adiabatic = loading::adiabatic_loading_time(stage.t_load);

    if (cfg.reservoir->trap_type == "quadrupole") {
        stage.losses =
            loading::loss_budget(stage.result, stage.timescales, sp,
                                 cfg.reservoir->gradient, stage.sigma);
    }
    stage.final_eta =
        cfg.dimple->depth / (k_boltzmann * stage.result.final_temperature);
    return stage;
}

namespace {

evap::ControlSchedule build_schedule(const ScenarioConfig& cfg,
                                     double initial_waist) {
    const EvapConfig& e = *cfg.evap;
    evap::ControlSchedule s;
    s.eta = e.eta;
    s.scattering_length = e.scattering_length;
    s.waist_policy = e.waist_policy;
    s.initial_waist = initial_waist;
    s.delta = e.delta;
    // Levitation cancels gravity to a residual 0.01 m/s^2.
    s.g_eff = e.levitation ? 0.01 : e.gravity;
    s.gamma_bg =
        e.background_lifetime > 0.0 ? 1.0 / e.background_lifetime : 0.0;
    s.gamma_laser_ref = e.laser_rate;
    s.depth_ref = e.laser_depth_ref;
    s.k2_coeff = e.k2;
    s.tbr_enabled = e.tbr;
    return s;
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& outdir) {
    fs::create_directories(outdir);
    RunSummary summary;

    if (cfg.reservoir && cfg.dimple) {
        summary.load = run_load_stage(cfg);
    }

    if (cfg.evap) {
        const EvapConfig& e = *cfg.evap;
        double n0 = e.atoms;
        double t0 = e.temperature;
        if ((n0 <= 0.0 || t0 <= 0.0)) {
            if (!summary.load) {
                throw ConfigError(
                    "evap: initial atoms/temperature required without a "
                    "loading stage");
            }
            if (n0 <= 0.0) n0 = summary.load->result.transferred_atoms;
            if (t0 <= 0.0) t0 = summary.load->result.final_temperature;
        }

        if (e.trap_frequency > 0.0 && e.waist > 0.0) {
            throw ConfigError("evap: waist and trap_frequency are exclusive");
        }
        double waist = e.waist;
        if (waist <= 0.0 && cfg.dimple) waist = cfg.dimple->waist;
        if (e.trap_frequency > 0.0) {
            const double g_eff = e.levitation ? 0.01 : e.gravity;
            const double depth = e.eta.value(0.0) * k_boltzmann * t0;
            waist = waist_for_frequency(2.0 * pi * e.trap_frequency, depth,
                                        cfg.species, g_eff);
        }
        if (waist <= 0.0) {
            throw ConfigError("evap: no waist (set waist, dimple.waist or "
                              "trap_frequency)");
        }

        const evap::ControlSchedule schedule = build_schedule(cfg, waist);
        const evap::EvapState initial{
            n0, evap::energy_of(n0, t0, schedule.delta)};
        const evap::Trajectory traj =
            evap::integrate(initial, cfg.species, schedule, e.t_end, e.rel_tol);

        EvapStage stage;
        stage.status = traj.status;
        stage.t_bec = traj.t_bec;
        stage.final_atoms = traj.final_atom_number;
        stage.final_temperature = traj.final_temperature;
        stage.final_psd = traj.final_psd;
        stage.waist_reduction = traj.initial_waist / traj.final_waist;

        const std::string csv = trajectory_csv_text(traj, cfg.outputs.stride);
        write_file((fs::path(outdir) / cfg.outputs.csv).string(), csv);
        // Flags come from the emitted rows so a post-processor reading the
        // CSV reproduces them exactly.
        stage.flags = flags_from_points(
            read_trajectory_csv((fs::path(outdir) / cfg.outputs.csv).string()),
            schedule.delta);
        summary.evap = stage;
    }

    write_file((fs::path(outdir) / cfg.outputs.summary).string(),
               summary_text(summary));
    return summary;
}

std::string trajectory_csv_text(const evap::Trajectory& traj, int stride) {
    std::ostringstream out;
    out << "t_s,N,T_K,D,Gamma_el_s,p_coll,Gamma3_over_Gammaev,alpha_g,eta,"
           "omega_rad_s,a_m,w0_m,gamma,dDoverD_s\n";
    const std::size_t n = traj.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
        const auto& p = traj.points[i];
        out << fmt(p.t) << ',' << fmt(p.atom_number) << ','
            << fmt(p.temperature) << ',' << fmt(p.psd) << ','
            << fmt(p.gamma_el) << ',' << fmt(p.p_coll) << ','
            << fmt(p.gamma3_over_gamma_ev) << ',' << fmt(p.alpha_g) << ','
            << fmt(p.eta) << ',' << fmt(p.omega) << ','
            << fmt(p.scattering_length) << ',' << fmt(p.waist) << ','
            << fmt(p.gamma) << ',' << fmt(p.dln_psd_dt) << '\n';
    }
    return out.str();
}

std::vector<evap::TrajectoryPoint> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<evap::TrajectoryPoint> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        evap::TrajectoryPoint p;
        double* fields[] = {&p.t,       &p.atom_number,
                            &p.temperature, &p.psd,
                            &p.gamma_el, &p.p_coll,
                            &p.gamma3_over_gamma_ev, &p.alpha_g,
                            &p.eta,      &p.omega,
                            &p.scattering_length, &p.waist,
                            &p.gamma,    &p.dln_psd_dt};
        std::stringstream row(line);
        std::string cell;
        for (double* f : fields) {
            if (!std::getline(row, cell, ',')) {
                throw std::runtime_error("short CSV row in " + path);
            }
            *f = std::strtod(cell.c_str(), nullptr);
        }
        pts.push_back(p);
    }
    return pts;
}

TrajectoryFlags flags_from_points(const std::vector<evap::TrajectoryPoint>& pts,
                                  double delta) {
    TrajectoryFlags f;
    std::size_t ok = 0, intervals = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (p.p_coll > 1.0) f.hydro_violated = true;
        const double limit = evap::tbr_elastic_rate_limit(p.eta, delta) *
                             (p.temperature * 1e6);
        if (p.gamma_el > limit) f.tbr_criterion_violated = true;
        if (i + 1 < pts.size()) {
            const auto& q = pts[i + 1];
            const double dt = q.t - p.t;
            if (dt > 0.0) {
                ++intervals;
                const double dln_depth =
                    std::log((q.eta * q.temperature) / (p.eta * p.temperature)) /
                    dt;
                const double dln_uprime = 2.0 * std::log(q.omega / p.omega) / dt;
                const bool depth_ok = std::abs(dln_depth) <= p.gamma_el;
                const bool shape_ok =
                    std::abs(dln_uprime) <= p.omega / (2.0 * pi);
                if (depth_ok && shape_ok) ++ok;
            }
        }
    }
    f.adiabatic_fraction =
        intervals == 0 ? 1.0 : static_cast<double>(ok) / intervals;
    f.adiabatic_90 = f.adiabatic_fraction >= 0.9;
    return f;
}

std::vector<SweepRow> sweep(const json& base_config,
                            const std::string& parameter_path,
                            const std::vector<std::string>& values,
                            const std::string& outdir) {
    fs::create_directories(outdir);
    // Navigate the dot-separated path up to the leaf.
    std::vector<std::string> keys;
    std::stringstream ss(parameter_path);
    std::string k;
    while (std::getline(ss, k, '.')) keys.push_back(k);
    if (keys.empty()) throw ConfigError("sweep: empty parameter path");

    std::vector<SweepRow> rows;
    std::ostringstream table;
    table << "value,N_f,T_f_K,D_f,r_d_m,N_d0,t_load_s,two_body_fraction,"
             "three_body_fraction,majorana_fraction,status,t_bec_s,final_N,"
             "final_T_K,final_D,error\n";

    int index = 0;
    for (const std::string& v : values) {
        json doc = base_config;
        json* node = &doc;
        for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
            if (!node->contains(keys[i])) {
                throw ConfigError("sweep: path not found: " + parameter_path);
            }
            node = &node->at(keys[i]);
        }
        // Store the raw token; parse_config applies the unit conversion.
        char* endp = nullptr;
        const double plain = std::strtod(v.c_str(), &endp);
        if (endp && *endp == '\0') {
            (*node)[keys.back()] = plain;
        } else {
            (*node)[keys.back()] = v;
        }

        SweepRow row;
        row.value = v;
        try {
            ScenarioConfig cfg = parse_config(doc);
            cfg.outputs.csv = "sweep_" + std::to_string(index) + ".csv";
            cfg.outputs.summary = "sweep_" + std::to_string(index) + ".txt";
            row.summary = run_scenario(cfg, outdir);
        } catch (const std::exception& e) {
            row.error = e.what();
        }

        table << v << ',';
        if (row.summary.load) {
            const LoadStage& L = *row.summary.load;
            table << fmt(L.result.transferred_atoms) << ','
                  << fmt(L.result.final_temperature) << ','
                  << fmt(L.result.final_psd) << ','
                  << fmt(L.result.dimple_radius) << ','
                  << fmt(L.threshold_atoms) << ',' << fmt(L.t_load) << ','
                  << fmt(L.losses.two_body_fraction) << ','
                  << fmt(L.losses.three_body_fraction) << ','
                  << fmt(L.losses.majorana_fraction) << ',';
        } else {
            table << ",,,,,,,,,";
        }
        if (row.summary.evap) {
            const EvapStage& E = *row.summary.evap;
            table << status_name(E.status) << ','
                  << (std::isnan(E.t_bec) ? "" : fmt(E.t_bec)) << ','
                  << fmt(E.final_atoms) << ',' << fmt(E.final_temperature)
                  << ',' << fmt(E.final_psd) << ',';
        } else {
            table << ",,,,,";
        }
        table << row.error << '\n';
        rows.push_back(std::move(row));
        ++index;
    }
    write_file((fs::path(outdir) / "sweep.csv").string(), table.str());
    return rows;
}

const char* status_name(evap::EvapStatus s) {
    switch (s) {
        case evap::EvapStatus::BecReached: return "BEC_REACHED";
        case evap::EvapStatus::Timeout: return "TIMEOUT";
        case evap::EvapStatus::Stalled: return "STALLED";
    }
    return "?";
}

std::string summary_text(const RunSummary& s) {
    std::ostringstream out;
    if (s.load) {
        const LoadStage& L = *s.load;
        out << "load.final_temperature_K: " << fmt(L.result.final_temperature)
            << "\nload.transferred_atoms: " << fmt(L.result.transferred_atoms)
            << "\nload.final_psd: " << fmt(L.result.final_psd)
            << "\nload.dimple_radius_m: " << fmt(L.result.dimple_radius)
            << "\nload.eta_d: " << fmt(L.result.eta_d)
            << "\nload.eta_v: " << fmt(L.result.eta_v)
            << "\nload.final_eta: " << fmt(L.final_eta)
            << "\nload.t_osc_s: " << fmt(L.timescales.t_osc)
            << "\nload.t_coll_s: " << fmt(L.timescales.t_coll)
            << "\nload.reservoir_hydrodynamic: "
            << (L.reservoir_hydrodynamic ? "yes" : "no")
            << "\nload.threshold_atoms: " << fmt(L.threshold_atoms)
            << "\nload.t_load_s: " << fmt(L.t_load)
            << "\nload.t_load_adiabatic_s: " << fmt(L.t_load_adiabatic)
            << "\nload.two_body_fraction: " << fmt(L.losses.two_body_fraction)
            << "\nload.three_body_fraction: "
            << fmt(L.losses.three_body_fraction)
            << "\nload.majorana_fraction: " << fmt(L.losses.majorana_fraction)
            << "\nload.majorana_radius_m: " << fmt(L.losses.majorana_radius)
            << "\nload.total_lost: " << fmt(L.losses.total_lost) << "\n";
    }
    if (s.evap) {
        const EvapStage& E = *s.evap;
        out << "evap.status: " << status_name(E.status) << "\n";
        if (!std::isnan(E.t_bec)) {
            out << "evap.t_bec_s: " << fmt(E.t_bec) << "\n";
        }
        out << "evap.final_atoms: " << fmt(E.final_atoms)
            << "\nevap.final_temperature_K: " << fmt(E.final_temperature)
            << "\nevap.final_psd: " << fmt(E.final_psd)
            << "\nevap.waist_reduction: " << fmt(E.waist_reduction)
            << "\nflags.hydro_violated: "
            << (E.flags.hydro_violated ? "yes" : "no")
            << "\nflags.tbr_criterion_violated: "
            << (E.flags.tbr_criterion_violated ? "yes" : "no")
            << "\nflags.adiabatic_90: " << (E.flags.adiabatic_90 ? "yes" : "no")
            << "\nflags.adiabatic_fraction: " << fmt(E.flags.adiabatic_fraction)
            << "\n";
    }
    return out.str();
}

}  // namespace becsim::scenario
