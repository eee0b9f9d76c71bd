#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/scenario.hpp"
#include "becsim/units.hpp"

using namespace becsim;
namespace sc = becsim::scenario;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("becsim_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("unit parsing") {
    using units::Dimension;
    CHECK(units::parse_quantity("150 uK", Dimension::Temperature) ==
          doctest::Approx(150e-6));
    CHECK(units::parse_quantity("10 mT/cm", Dimension::FieldGradient) ==
          doctest::Approx(1.0));
    CHECK(units::parse_quantity("100 a0", Dimension::ScatteringLength) ==
          doctest::Approx(100 * bohr_radius));
    CHECK(units::parse_quantity("1720 uK", Dimension::EnergyAsKelvin) ==
          doctest::Approx(k_boltzmann * 1720e-6));
    CHECK(units::parse_quantity("0.2 s", Dimension::Time) ==
          doctest::Approx(0.2));
    CHECK(units::parse_quantity("11 /s", Dimension::Rate) ==
          doctest::Approx(11.0));
    CHECK(units::parse_quantity("2.5", Dimension::Length) ==
          doctest::Approx(2.5));
    CHECK_THROWS_AS(units::parse_quantity("10 parsec", Dimension::Length),
                    ConfigError);
    CHECK_THROWS_AS(units::parse_quantity("fast", Dimension::Time),
                    ConfigError);
}

TEST_CASE("config parsing and validation") {
    for (const auto& name : sc::preset_names()) {
        CHECK_NOTHROW(sc::parse_config(sc::preset_config(name)));
    }
    CHECK_THROWS_AS(sc::preset_config("fig99"), ConfigError);
    CHECK_THROWS_AS(sc::parse_config(json{{"species", "unobtainium"},
                                          {"evap", {{"t_end", "1 s"}}}}),
                    ConfigError);
    CHECK_THROWS_AS(sc::parse_config(json{{"species", "cesium"}}), ConfigError);
}

TEST_CASE("inline species definitions are accepted") {
    json doc = {
        {"species",
         {{"name", "sodium"},
          {"mass", "22.99 u"},
          {"scattering_length", "52 a0"},
          {"recoil_temperature", "2.4 uK"}}},
        {"evap",
         {{"t_end", 1e-7},
          {"atoms", 1e6},
          {"temperature", "10 uK"},
          {"eta", 8.0},
          {"waist", "50 um"},
          {"levitation", true},
          {"tbr", false}}},
    };
    const sc::ScenarioConfig cfg = sc::parse_config(doc);
    CHECK(cfg.species.mass == doctest::Approx(22.99 * atomic_mass_unit));
    CHECK(cfg.species.scattering_length ==
          doctest::Approx(52 * bohr_radius));
    const auto out = temp_dir("inline");
    CHECK_NOTHROW(sc::run_scenario(cfg, out.string()));

    json bad = doc;
    bad["species"].erase("mass");
    CHECK_THROWS_AS(sc::parse_config(bad), ConfigError);
}

TEST_CASE("short lossless run leaves the sample unchanged") {
    json doc = {
        {"species", "cesium"},
        {"evap",
         {{"t_end", 1e-7},
          {"atoms", 1e8},
          {"temperature", "200 uK"},
          {"eta", 9.0},
          {"scattering_length", "100 a0"},
          {"waist", "100 um"},
          {"levitation", true},
          {"tbr", false}}},
    };
    const auto out = temp_dir("noop");
    const sc::RunSummary s =
        sc::run_scenario(sc::parse_config(doc), out.string());
    REQUIRE(s.evap.has_value());
    CHECK(std::abs(s.evap->final_atoms / 1e8 - 1.0) < 1e-5);
    CHECK(std::abs(s.evap->final_temperature / 200e-6 - 1.0) < 1e-5);
    CHECK(s.evap->status == evap::EvapStatus::Timeout);
}

TEST_CASE("trajectory csv is byte-identical across runs") {
    const auto out1 = temp_dir("det1");
    const auto out2 = temp_dir("det2");
    const sc::ScenarioConfig cfg =
        sc::parse_config(sc::preset_config("fig9-cs-etaramp"));
    sc::run_scenario(cfg, out1.string());
    sc::run_scenario(cfg, out2.string());
    CHECK(slurp((out1 / "trajectory.csv").string()) ==
          slurp((out2 / "trajectory.csv").string()));
    CHECK(slurp((out1 / "summary.txt").string()) ==
          slurp((out2 / "summary.txt").string()));
}

TEST_CASE("summary flags agree with a post-processor pass over the csv") {
    const auto out = temp_dir("flags");
    const sc::ScenarioConfig cfg =
        sc::parse_config(sc::preset_config("fig10-cs-waistzoom-aramp"));
    const sc::RunSummary s = sc::run_scenario(cfg, out.string());
    REQUIRE(s.evap.has_value());

    const auto pts = sc::read_trajectory_csv((out / "trajectory.csv").string());
    const sc::TrajectoryFlags recomputed = sc::flags_from_points(pts, 1.5);
    CHECK(recomputed.hydro_violated == s.evap->flags.hydro_violated);
    CHECK(recomputed.tbr_criterion_violated ==
          s.evap->flags.tbr_criterion_violated);
    CHECK(recomputed.adiabatic_90 == s.evap->flags.adiabatic_90);
    CHECK(recomputed.adiabatic_fraction ==
          doctest::Approx(s.evap->flags.adiabatic_fraction));
}

TEST_CASE("csv columns survive a read-back round trip") {
    const auto out = temp_dir("roundtrip");
    const sc::ScenarioConfig cfg =
        sc::parse_config(sc::preset_config("fig9-cs-eta9"));
    sc::run_scenario(cfg, out.string());
    const auto pts = sc::read_trajectory_csv((out / "trajectory.csv").string());
    REQUIRE(pts.size() > 10);
    CHECK(pts.front().t == 0.0);
    CHECK(pts.front().atom_number == doctest::Approx(1e8));
    CHECK(pts.front().temperature == doctest::Approx(200e-6));
    CHECK(pts.front().eta == doctest::Approx(9.0));
    CHECK(pts.front().waist == doctest::Approx(100e-6));
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].t > pts[i - 1].t);
        CHECK(pts[i].atom_number <= pts[i - 1].atom_number);
    }
}

TEST_CASE("sweep over a single value matches run_scenario") {
    const auto out_sweep = temp_dir("sweep1");
    const auto out_run = temp_dir("sweep1run");
    const json base = sc::preset_config("fig2-cs-load");

    const auto rows =
        sc::sweep(base, "dimple.waist", {"100 um"}, out_sweep.string());
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].error.empty());
    REQUIRE(rows[0].summary.load.has_value());

    const sc::RunSummary direct =
        sc::run_scenario(sc::parse_config(base), out_run.string());
    REQUIRE(direct.load.has_value());
    CHECK(rows[0].summary.load->result.transferred_atoms ==
          direct.load->result.transferred_atoms);
    CHECK(rows[0].summary.load->result.final_temperature ==
          direct.load->result.final_temperature);
    CHECK(fs::exists(out_sweep / "sweep.csv"));
}

TEST_CASE("sweep records failed rows and continues") {
    const auto out = temp_dir("sweepfail");
    const json base = sc::preset_config("fig2-cs-load");
    // A 1 cm waist at this depth dumps too much energy: the energy balance
    // leaves the allowed temperature window and the row must fail cleanly.
    const auto rows = sc::sweep(base, "dimple.waist", {"100 um", "1 cm"},
                                out.string());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error.empty());
    CHECK(!rows[1].error.empty());
}

TEST_CASE("harmonic reservoirs run the loading stage") {
    json doc = {
        {"species", "rubidium87"},
        {"reservoir",
         {{"trap", {{"type", "harmonic"}, {"frequency", "20 Hz"}}},
          {"atoms", 1e8},
          {"temperature", "30 uK"}}},
        {"dimple", {{"waist", "60 um"}, {"depth", "300 uK"}}},
        {"loading", {{"mode", "diabatic"}}},
    };
    const auto out = temp_dir("harmres");
    const sc::RunSummary s =
        sc::run_scenario(sc::parse_config(doc), out.string());
    REQUIRE(s.load.has_value());
    CHECK(s.load->result.transferred_atoms > 0.0);
    CHECK(s.load->result.final_temperature > 30e-6);  // dimple heats the cloud
    // No magnetic-field zero in a harmonic reservoir: no loss budget entries.
    CHECK(s.load->losses.majorana_fraction == 0.0);
}

TEST_CASE("loading preset summary fields") {
    const auto out = temp_dir("loadstage");
    const sc::RunSummary s = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig2-cs-load")), out.string());
    REQUIRE(s.load.has_value());
    CHECK(s.load->final_eta == doctest::Approx(8.0).epsilon(0.05));
    CHECK(s.load->reservoir_hydrodynamic);  // t_coll slightly below t_osc
    CHECK(s.load->t_load > 0.0);
    CHECK(s.load->t_load_adiabatic == doctest::Approx(3.0 * s.load->t_load));
    CHECK(fs::exists(out / "summary.txt"));
}

TEST_CASE("rb benchmark preset reports no condensate") {
    const auto out = temp_dir("rbfull");
    const sc::RunSummary s = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig8-rb-full")), out.string());
    REQUIRE(s.evap.has_value());
    CHECK(s.evap->status != evap::EvapStatus::BecReached);
    CHECK(s.evap->final_psd < 1.0);
}

TEST_CASE("loading chains into evaporation when both stages are present") {
    json doc = sc::preset_config("fig2-cs-load");
    doc["evap"] = {
        {"t_end", "3 s"},
        {"eta", {{"profile", "exponential"},
                 {"from", 8.0},
                 {"to", 6.0},
                 {"tau", "0.2 s"}}},
        {"scattering_length", "100 a0"},
        {"waist_policy", "constant_waist"},
        {"levitation", true},
        {"background_lifetime", "3 s"},
    };
    const auto out = temp_dir("chain");
    const sc::RunSummary s = sc::run_scenario(sc::parse_config(doc), out.string());
    REQUIRE(s.load.has_value());
    REQUIRE(s.evap.has_value());
    // The evaporation stage starts from the loaded sample: first trajectory
    // row carries N_f and T_f of the loading stage, at the dimple waist.
    const auto pts = sc::read_trajectory_csv((out / "trajectory.csv").string());
    REQUIRE(!pts.empty());
    CHECK(pts.front().atom_number ==
          doctest::Approx(s.load->result.transferred_atoms));
    CHECK(pts.front().temperature ==
          doctest::Approx(s.load->result.final_temperature));
    CHECK(pts.front().waist == doctest::Approx(100e-6));
    CHECK(s.evap->status == evap::EvapStatus::BecReached);
}

TEST_CASE("species two-body model is non-negative") {
    AtomSpecies cs;
    REQUIRE(find_species("cesium", cs));
    REQUIRE(static_cast<bool>(cs.k2_model));
    for (double b : {0.0, 1e-5, 1e-3, 0.1}) {
        for (double t : {1e-7, 1e-5, 1e-3}) {
            CHECK(cs.k2_model(b, t) >= 0.0);
        }
    }
}

TEST_CASE("reproduce fig2 emits the waist sweep with clean checks") {
    const auto out = temp_dir("repro2");
    sc::reproduce("fig2", out.string());
    CHECK(fs::exists(out / "fig2.csv"));
    const std::string check = slurp((out / "fig2_check.txt").string());
    CHECK(check.find("MISMATCH") == std::string::npos);
    // 37 sweep rows plus the header.
    std::istringstream rows(slurp((out / "fig2.csv").string()));
    std::string line;
    int count = 0;
    while (std::getline(rows, line)) ++count;
    CHECK(count == 38);
}

TEST_CASE("reproduce emits the expected files") {
    const auto out = temp_dir("repro8");
    sc::reproduce("fig8", out.string());
    for (const char* f : {"fig8_full.csv", "fig8_nogravity.csv",
                          "fig8_notbr.csv", "fig8_ideal.csv",
                          "fig8_check.txt"}) {
        CHECK(fs::exists(out / f));
    }
    CHECK_THROWS_AS(sc::reproduce("fig99", temp_dir("bad").string()),
                    UnknownFigure);
}

TEST_CASE("cli binary runs a preset end to end") {
#ifdef BECSIM_CLI_PATH
    const auto out = temp_dir("cli");
    const std::string cmd = std::string(BECSIM_CLI_PATH) + " --outdir " +
                            out.string() +
                            " run fig9-cs-etaramp > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "summary.txt"));

    // Separate process invocations produce byte-identical output.
    const auto out2 = temp_dir("cli2");
    const std::string cmd2 = std::string(BECSIM_CLI_PATH) + " --outdir " +
                             out2.string() +
                             " run fig9-cs-etaramp > /dev/null 2>&1";
    CHECK(std::system(cmd2.c_str()) == 0);
    CHECK(slurp((out / "trajectory.csv").string()) ==
          slurp((out2 / "trajectory.csv").string()));

    const std::string bad = std::string(BECSIM_CLI_PATH) +
                            " run no_such_config.json > /dev/null 2>&1";
    CHECK(std::system(bad.c_str()) != 0);
#endif
}

TEST_CASE("evap stage without any waist source is rejected") {
    json doc = {
        {"species", "cesium"},
        {"evap",
         {{"t_end", "1 s"},
          {"atoms", 1e8},
          {"temperature", "200 uK"},
          {"eta", 9.0}}},
    };
    const auto out = temp_dir("nowaist");
    CHECK_THROWS_AS(sc::run_scenario(sc::parse_config(doc), out.string()),
                    ConfigError);
}
