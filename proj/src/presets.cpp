#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/scenario.hpp"

namespace becsim::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Cs loading scenario: 1e9 atoms at 150 uK in a 10 mT/cm quadrupole, crossed
// dimple of depth kB x 1720 uK focused to a 100 um waist.
json cs_load_base() {
    return json{
        {"name", "fig2-cs-load"},
        {"species", "cesium"},
        {"reservoir",
         {{"trap", {{"type", "quadrupole"}, {"gradient", "10 mT/cm"}}},
          {"atoms", 1e9},
          {"temperature", "150 uK"}}},
        {"dimple", {{"waist", "100 um"}, {"depth", "1720 uK"}, {"beam_count", 2}}},
        {"loading", {{"mode", "diabatic"}}},
    };
}

// Rb benchmark trap: eta = 10, 1500 Hz at 38 uK, i.e. an effective waist of
// 40.6 um; 6 s background lifetime; constant waist.
json rb_base(double atoms, const char* temperature, bool gravity, bool tbr) {
    json evap = {
        {"t_end", "8 s"},
        {"atoms", atoms},
        {"temperature", temperature},
        {"eta", 10.0},
        {"scattering_length", "100 a0"},
        {"waist_policy", "constant_waist"},
        {"waist", "40.62 um"},
        {"background_lifetime", "6 s"},
        {"tbr", tbr},
    };
    if (gravity) {
        evap["gravity"] = standard_gravity;
    } else {
        evap["gravity"] = 0.01;  // levitated counterfactual
    }
    return json{{"species", "rubidium87"}, {"evap", evap}};
}

// Cs dimple evaporation: 1e8 atoms at 200 uK, eta = 9, 100 um waist,
// 3 s background lifetime, photon-scattering heating 11 /s x T_recoil at the
// initial depth, magnetically levitated.
json cs_evap_base() {
    return json{
        {"species", "cesium"},
        {"evap",
         {{"t_end", "3 s"},
          {"atoms", 1e8},
          {"temperature", "200 uK"},
          {"eta", 9.0},
          {"scattering_length", "100 a0"},
          {"waist_policy", "constant_waist"},
          {"waist", "100 um"},
          {"levitation", true},
          {"background_lifetime", "3 s"},
          {"laser_heating",
           {{"rate", "11 /s"}, {"reference_depth", "1800 uK"}}}}},
    };
}

}  // namespace

json preset_config(const std::string& name) {
    if (name == "fig2-cs-load") return cs_load_base();

    if (name == "fig8-rb-ideal") {
        json j = rb_base(6.7e5, "38 uK", false, false);
        j["name"] = name;
        return j;
    }
    if (name == "fig8-rb-nogravity") {
        json j = rb_base(6.7e5, "38 uK", false, true);
        j["name"] = name;
        return j;
    }
    if (name == "fig8-rb-notbr") {
        json j = rb_base(6.7e5, "38 uK", true, false);
        j["name"] = name;
        return j;
    }
    if (name == "fig8-rb-full") {
        json j = rb_base(6.7e5, "38 uK", true, true);
        j["name"] = name;
        return j;
    }
    if (name == "fig8-rb-highN") {
        // Same beam, started from the directly measured initial conditions.
        json j = rb_base(2e6, "75 uK", true, true);
        j["name"] = name;
        return j;
    }

    if (name == "fig9-cs-eta9") {
        json j = cs_evap_base();
        j["name"] = name;
        return j;
    }
    if (name == "fig9-cs-etaramp") {
        json j = cs_evap_base();
        j["name"] = name;
        j["evap"]["eta"] = {{"profile", "exponential"},
                            {"from", 9.0},
                            {"to", 6.0},
                            {"tau", "0.2 s"}};
        return j;
    }
    if (name == "fig10-cs-waistzoom") {
        json j = cs_evap_base();
        j["name"] = name;
        j["evap"]["waist_policy"] = "constant_omega";
        j["evap"]["t_end"] = "2 s";
        return j;
    }
    if (name == "fig10-cs-waistzoom-aramp") {
        json j = cs_evap_base();
        j["name"] = name;
        j["evap"]["waist_policy"] = "constant_omega";
        j["evap"]["t_end"] = "2 s";
        j["evap"]["scattering_length"] = {{"profile", "exponential"},
                                          {"from", "30 a0"},
                                          {"to", "10 a0"},
                                          {"tau", "0.2 s"}};
        return j;
    }
    throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"fig2-cs-load",       "fig8-rb-ideal",
            "fig8-rb-nogravity",  "fig8-rb-notbr",
            "fig8-rb-full",       "fig8-rb-highN",
            "fig9-cs-eta9",       "fig9-cs-etaramp",
            "fig10-cs-waistzoom", "fig10-cs-waistzoom-aramp"};
}

namespace {

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

struct LoadSweepRow {
    double waist;
    LoadStage stage;
    thermo::DimpleAnalytic analytic;
    double t_adiabatic;  // adiabatic-loading final temperature
    double p_coll_dimple;
    double psd_gain_exact;
};

// Shared waist sweep of the Cs loading scenario, 40-400 um.
std::vector<LoadSweepRow> cs_load_sweep() {
    const json base = cs_load_base();
    std::vector<LoadSweepRow> rows;
    for (int w_um = 40; w_um <= 400; w_um += 10) {
        json doc = base;
        doc["dimple"]["waist"] = std::to_string(w_um) + " um";
        const ScenarioConfig cfg = parse_config(doc);
        LoadSweepRow row;
        row.waist = w_um * 1e-6;
        row.stage = run_load_stage(cfg);
        const double t_i = cfg.reservoir->temperature;
        row.analytic = thermo::dimple_analytic(t_i, row.stage.result.eta_d,
                                               row.stage.result.eta_v);

        const thermo::SampleState res{cfg.reservoir->atoms, t_i};
        const PotentialSpec magnetic =
            quadrupole(cfg.reservoir->gradient, cfg.species);
        const PotentialSpec laser =
            gaussian_dimple(cfg.dimple->depth, cfg.dimple->waist, cfg.species);
        row.t_adiabatic =
            thermo::adiabatic_load(res, magnetic, laser).final_temperature;

        // Hydrodynamic indicator of the filled dimple.
        const double t_f = row.stage.result.final_temperature;
        const double sigma_f =
            evap::cross_section(cfg.species.scattering_length, t_f,
                                row.stage.final_eta, cfg.species.mass);
        const double gamma_el = evap::elastic_rate(
            row.stage.result.peak_density, sigma_f, t_f, cfg.species.mass);
        const double omega_d = std::sqrt(
            4.0 * cfg.dimple->depth /
            (cfg.species.mass * cfg.dimple->waist * cfg.dimple->waist));
        row.p_coll_dimple = gamma_el / (4.0 * omega_d);

        const thermo::ThermoReport rep = thermo::report(res, magnetic);
        const double d_i = res.atom_number / rep.partition_function;
        row.psd_gain_exact = row.stage.result.final_psd / d_i;
        rows.push_back(row);
    }
    return rows;
}

RunSummary run_preset_to(const std::string& preset, const std::string& outdir,
                         const std::string& csv_name) {
    json doc = preset_config(preset);
    doc["outputs"] = {{"csv", csv_name}, {"summary", csv_name + ".summary.txt"}};
    return run_scenario(parse_config(doc), outdir);
}

std::string check_status(const std::string& label, const RunSummary& s,
                         bool expect_bec) {
    const bool bec = s.evap && s.evap->status == evap::EvapStatus::BecReached;
    std::ostringstream out;
    out << label << ": " << (s.evap ? status_name(s.evap->status) : "none")
        << "  expected " << (expect_bec ? "BEC_REACHED" : "no condensate")
        << "  " << (bec == expect_bec ? "ok" : "MISMATCH") << "\n";
    return out.str();
}

std::string check_line(const std::string& label, double value, double lo,
                       double hi) {
    std::ostringstream out;
    out << label << ": " << fmt(value) << "  expected [" << fmt(lo) << ", "
        << fmt(hi) << "]  " << (value >= lo && value <= hi ? "ok" : "MISMATCH")
        << "\n";
    return out.str();
}

}  // namespace

void reproduce(const std::string& figure_id, const std::string& outdir) {
    fs::create_directories(outdir);

    if (figure_id == "fig2" || figure_id == "fig5" || figure_id == "fig6") {
        const auto rows = cs_load_sweep();
        std::ostringstream csv, check;
        if (figure_id == "fig2") {
            csv << "w0_m,T_f_K,D_f,N_f,T_f_adiabatic_K,T_f_analytic_K,"
                   "transfer_analytic,psd_gain_analytic,transfer_approx,"
                   "psd_gain_approx,psd_gain_exact\n";
            for (const auto& r : rows) {
                csv << fmt(r.waist) << ',' << fmt(r.stage.result.final_temperature)
                    << ',' << fmt(r.stage.result.final_psd) << ','
                    << fmt(r.stage.result.transferred_atoms) << ','
                    << fmt(r.t_adiabatic) << ','
                    << fmt(r.analytic.final_temperature) << ','
                    << fmt(r.analytic.transfer_fraction) << ','
                    << fmt(r.analytic.psd_gain) << ','
                    << fmt(r.analytic.transfer_fraction_approx) << ','
                    << fmt(r.analytic.psd_gain_approx) << ','
                    << fmt(r.psd_gain_exact) << '\n';
            }
            const auto& r100 = rows[6];  // w0 = 100 um
            check << check_line("final eta at w0=100um", r100.stage.final_eta,
                                7.0, 9.0)
                  << check_line("N_f at w0=100um",
                                r100.stage.result.transferred_atoms, 5e7, 1e12)
                  << check_line("D_f at w0=100um", r100.stage.result.final_psd,
                                1.0 / 1400, 1.0 / 350);
            write_file((fs::path(outdir) / "fig2.csv").string(), csv.str());
            write_file((fs::path(outdir) / "fig2_check.txt").string(),
                       check.str());
            return;
        }
        if (figure_id == "fig5") {
            csv << "w0_m,t_load_s,t_load_adiabatic_s,t_coll_s,p_coll\n";
            for (const auto& r : rows) {
                csv << fmt(r.waist) << ',' << fmt(r.stage.t_load) << ','
                    << fmt(r.stage.t_load_adiabatic) << ','
                    << fmt(r.stage.timescales.t_coll) << ','
                    << fmt(r.p_coll_dimple) << '\n';
            }
            check << check_line("t_osc (ms)",
                                rows[0].stage.timescales.t_osc * 1e3, 7.2, 10.8)
                  << check_line("t_coll (ms)",
                                rows[0].stage.timescales.t_coll * 1e3, 4.9, 9.1);
            write_file((fs::path(outdir) / "fig5.csv").string(), csv.str());
            write_file((fs::path(outdir) / "fig5_check.txt").string(),
                       check.str());
            return;
        }
        // fig6
        csv << "w0_m,N_f,N_d0,N_d0_waist_approx,two_body_fraction,"
               "three_body_fraction,majorana_fraction\n";
        double crossing = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            csv << fmt(r.waist) << ',' << fmt(r.stage.result.transferred_atoms)
                << ',' << fmt(r.stage.threshold_atoms) << ','
                << fmt(loading::hydrodynamic_threshold_waist(r.waist,
                                                             r.stage.sigma))
                << ',' << fmt(r.stage.losses.two_body_fraction) << ','
                << fmt(r.stage.losses.three_body_fraction) << ','
                << fmt(r.stage.losses.majorana_fraction) << '\n';
            if (i > 0 && crossing == 0.0) {
                const double prev = rows[i - 1].stage.result.transferred_atoms -
                                    rows[i - 1].stage.threshold_atoms;
                const double cur = r.stage.result.transferred_atoms -
                                   r.stage.threshold_atoms;
                if (prev > 0.0 && cur <= 0.0) {
                    const double f = prev / (prev - cur);
                    crossing = rows[i - 1].waist +
                               f * (r.waist - rows[i - 1].waist);
                }
            }
        }
        check << check_line("N_f = N_d0 crossing (um)", crossing * 1e6, 100.0,
                            170.0);
        write_file((fs::path(outdir) / "fig6.csv").string(), csv.str());
        write_file((fs::path(outdir) / "fig6_check.txt").string(), check.str());
        return;
    }

    if (figure_id == "fig8") {
        const RunSummary full =
            run_preset_to("fig8-rb-full", outdir, "fig8_full.csv");
        run_preset_to("fig8-rb-nogravity", outdir, "fig8_nogravity.csv");
        run_preset_to("fig8-rb-notbr", outdir, "fig8_notbr.csv");
        const RunSummary ideal =
            run_preset_to("fig8-rb-ideal", outdir, "fig8_ideal.csv");
        std::ostringstream check;
        check << check_status("no-gravity no-TBR run", ideal, true)
              << check_status("full-model run", full, false);
        const auto pts = read_trajectory_csv(
            (fs::path(outdir) / "fig8_full.csv").string());
        double dmax = 0.0;
        for (const auto& p : pts) dmax = std::max(dmax, p.psd);
        check << check_line("full-model max D", dmax, 0.0, 0.999999);
        write_file((fs::path(outdir) / "fig8_check.txt").string(), check.str());
        return;
    }

    if (figure_id == "fig9") {
        const RunSummary left =
            run_preset_to("fig9-cs-eta9", outdir, "fig9_left.csv");
        const RunSummary right =
            run_preset_to("fig9-cs-etaramp", outdir, "fig9_right.csv");
        std::ostringstream check;
        check << check_status("constant eta = 9 run", left, false)
              << check_status("eta 9->6 ramp run", right, true)
              << check_line("ramp BEC time (s)", right.evap->t_bec, 0.5, 2.0);
        write_file((fs::path(outdir) / "fig9_check.txt").string(), check.str());
        return;
    }

    if (figure_id == "fig10") {
        run_preset_to("fig10-cs-waistzoom", outdir, "fig10_left.csv");
        const RunSummary right = run_preset_to("fig10-cs-waistzoom-aramp",
                                               outdir, "fig10_right.csv");
        std::ostringstream check;
        check << check_status("interaction-ramp run", right, true)
              << check_line("BEC time (s)", right.evap->t_bec, 0.175, 0.525)
              << check_line("final N", right.evap->final_atoms, 1e7, 4e7)
              << check_line("final T (uK)",
                            right.evap->final_temperature * 1e6, 7.0, 28.0)
              << check_line("waist reduction", right.evap->waist_reduction,
                            2.0, 4.5);
        write_file((fs::path(outdir) / "fig10_check.txt").string(),
                   check.str());
        return;
    }

    throw UnknownFigure("unknown figure id: " + figure_id);
}

}  // namespace becsim::scenario
