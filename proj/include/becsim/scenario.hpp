#ifndef BECSIM_SCENARIO_HPP
#define BECSIM_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "becsim/evap.hpp"
#include "becsim/loading.hpp"
#include "becsim/thermo.hpp"

namespace becsim::scenario {

struct ReservoirConfig {
    std::string trap_type;     // "quadrupole" | "harmonic"
    double gradient = 0.0;     // T/m (quadrupole)
    double frequency = 0.0;    // Hz (harmonic)
    double atoms = 0.0;
    double temperature = 0.0;  // K
};

struct DimpleConfig {
    double waist = 0.0;  // m
    double depth = 0.0;  // J
    int beam_count = 2;  // 1 or 2 (crossed); geometry idealized either way
};

struct EvapConfig {
    double t_end = 0.0;       // s
    double atoms = 0.0;       // 0: take the loading result
    double temperature = 0.0; // K; 0: take the loading result
    evap::RampProfile eta = evap::RampProfile::constant(0.0);
    evap::RampProfile scattering_length = evap::RampProfile::constant(0.0);
    evap::WaistPolicy waist_policy = evap::WaistPolicy::ConstantWaist;
    double waist = 0.0;           // m; 0: from dimple.waist or trap_frequency
    double trap_frequency = 0.0;  // Hz; derive the waist at t = 0 when set
    bool levitation = false;
    double gravity = 0.0;  // m/s^2; 0 means the standard value
    double background_lifetime = 0.0;  // s; 0 means lossless
    double laser_rate = 0.0;           // 1/s at reference depth
    double laser_depth_ref = 0.0;      // J
    double k2 = 0.0;                   // m^3/s, two-body coefficient
    bool tbr = true;
    double delta = 1.5;
    double rel_tol = 1e-8;
};

struct OutputConfig {
    std::string csv = "trajectory.csv";
    std::string summary = "summary.txt";
    int stride = 1;
};

struct ScenarioConfig {
    std::string name;
    AtomSpecies species;
    std::optional<ReservoirConfig> reservoir;
    std::optional<DimpleConfig> dimple;
    bool adiabatic_loading = false;
    std::optional<EvapConfig> evap;
    OutputConfig outputs;
};

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config_file(const std::string& path);

struct LoadStage {
    thermo::DimpleLoadResult result;
    loading::LoadingTimescales timescales;
    double sigma = 0.0;            // reservoir cross section used, m^2
    double threshold_atoms = 0.0;  // N_d^0
    double t_load = 0.0;
    double t_load_adiabatic = 0.0;
    loading::LossBudget losses;
    double final_eta = 0.0;  // dimple depth / kB T_f
    bool reservoir_hydrodynamic = false;  // t_coll < t_osc
};

struct TrajectoryFlags {
    bool hydro_violated = false;        // any p_coll > 1
    bool tbr_criterion_violated = false;  // any Gamma_el > C(eta) T(uK)
    bool adiabatic_90 = false;
    double adiabatic_fraction = 1.0;
};

struct EvapStage {
    evap::EvapStatus status = evap::EvapStatus::Timeout;
    double t_bec = 0.0;  // NaN unless BecReached
    double final_atoms = 0.0;
    double final_temperature = 0.0;
    double final_psd = 0.0;
    double waist_reduction = 1.0;  // initial / final
    TrajectoryFlags flags;
};

struct RunSummary {
    std::optional<LoadStage> load;
    std::optional<EvapStage> evap;
};

// Executes the configured stages, writing the trajectory CSV and the text
// summary under outdir. Completion is exit-status 0 regardless of the BEC
// outcome; ConfigError / PhysicsError propagate to the caller.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::string& outdir);

// The loading stage alone, no file output.
LoadStage run_load_stage(const ScenarioConfig& cfg);

// Trajectory CSV helpers. Columns, in order:
// t_s,N,T_K,D,Gamma_el_s,p_coll,Gamma3_over_Gammaev,alpha_g,eta,
// omega_rad_s,a_m,w0_m,gamma,dDoverD_s
std::string trajectory_csv_text(const evap::Trajectory& traj, int stride);
std::vector<evap::TrajectoryPoint> read_trajectory_csv(const std::string& path);

// Post-processor: recomputes the summary flags from trajectory rows alone
// (finite differences for the adiabaticity conditions).
TrajectoryFlags flags_from_points(const std::vector<evap::TrajectoryPoint>& pts,
                                  double delta);

// Runs the scenario once per value of the addressed config parameter
// (dot-separated path, unit strings allowed) and writes one table row per
// value to sweep.csv; failed rows record the error and the sweep continues.
struct SweepRow {
    std::string value;  // raw token as supplied
    std::string error;
    RunSummary summary;
};
std::vector<SweepRow> sweep(const nlohmann::json& base_config,
                            const std::string& parameter_path,
                            const std::vector<std::string>& values,
                            const std::string& outdir);

// Named scenario presets (fig2-cs-load, fig8-rb-full, fig9-cs-etaramp, ...).
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Emits per-curve CSVs for one of {fig2, fig5, fig6, fig8, fig9, fig10}
// plus a check report with the expected ranges. Throws UnknownFigure.
void reproduce(const std::string& figure_id, const std::string& outdir);

std::string summary_text(const RunSummary& summary);
const char* status_name(evap::EvapStatus s);

}  // namespace becsim::scenario

#endif
