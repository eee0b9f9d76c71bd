// Acceptance suite: runs every shipping criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "becsim/constants.hpp"
#include "becsim/evap.hpp"
#include "becsim/loading.hpp"
#include "becsim/numerics.hpp"
#include "becsim/scenario.hpp"
#include "becsim/thermo.hpp"

using namespace becsim;
namespace sc = becsim::scenario;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& title, bool ok,
               const std::string& detail) {
    std::printf("CRITERION %2d [%s] %s: %s\n", n, ok ? "PASS" : "FAIL",
                title.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

const AtomSpecies cs = cesium_f3mf3();

double power_law_z1(double u_prime, double delta, double mass, double t) {
    const double lam = thermo::thermal_wavelength(mass, t);
    return std::pow(lam, -3.0) * std::pow(k_boltzmann * t / u_prime, delta) *
           4.0 * pi * delta * std::tgamma(delta) / 3.0;
}

fs::path outdir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("becsim_accept_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double temp = 120e-6;
    const double omega = 2.0 * pi * 1050.0;

    const double z_h = thermo::partition_function(harmonic(omega, cs), temp);
    const double z_h_ref =
        power_law_z1(0.5 * cs.mass * omega * omega, 1.5, cs.mass, temp);
    const double err_h = std::abs(z_h / z_h_ref - 1.0);

    const double z_q = thermo::partition_function(quadrupole(1.0, cs), 150e-6);
    const double z_q_ref =
        power_law_z1(0.75 * bohr_magneton, 3.0, cs.mass, 150e-6);
    const double err_q = std::abs(z_q / z_q_ref - 1.0);

    const thermo::ThermoReport rep =
        thermo::report({1e7, temp}, harmonic(omega, cs));
    const double d_ref =
        1e7 * std::pow(hbar * omega / (k_boltzmann * temp), 3);
    const double err_d = std::abs(rep.phase_space_density / d_ref - 1.0);

    // The evaporation engine routes D through the closed form directly.
    evap::TrapControls ctl;
    ctl.eta = 9.0;
    ctl.scattering_length = 100 * bohr_radius;
    ctl.omega = omega;
    ctl.waist = 100e-6;
    ctl.mass = cs.mass;
    ctl.u_prime = 0.5 * cs.mass * omega * omega;
    ctl.tbr_enabled = false;
    const evap::EvapState st{1e7, evap::energy_of(1e7, temp, ctl.delta)};
    const double err_closed =
        std::abs(evap::evap_rhs(st, ctl).psd / d_ref - 1.0);

    const double wall = seconds_since(t0);
    criterion(1, "partition-function closed forms",
              err_h < 1e-6 && err_q < 1e-6 && err_d < 1e-6 &&
                  err_closed < 1e-14 && wall < 1.0,
              fmt("rel err delta=3/2: %.2e, delta=3: %.2e, harmonic D "
                  "(quadrature): %.2e, (closed): %.2e, runtime %.2fs",
                  err_h, err_q, err_d, err_closed, wall));
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    const thermo::DimpleLoadResult out = thermo::diabatic_load(
        {1e9, 150e-6}, quadrupole(1.0, cs),
        gaussian_dimple(k_boltzmann * 1720e-6, 100e-6, cs));
    const double eta_f = 1720e-6 / out.final_temperature;
    const double wall = seconds_since(t0);
    const bool ok = eta_f >= 7.0 && eta_f <= 9.0 &&
                    out.transferred_atoms >= 5e7 &&
                    out.final_psd >= 1.0 / 1400.0 &&
                    out.final_psd <= 1.0 / 350.0 && wall < 10.0;
    criterion(2, "dimple load benchmark", ok,
              fmt("eta_f=%.2f (7..9), N_f=%.3g (>=5e7), D_f=1/%.0f "
                  "(1/1400..1/350), runtime %.2fs",
                  eta_f, out.transferred_atoms, 1.0 / out.final_psd, wall));
}

void criterion_3() {
    const loading::LoadingTimescales ts =
        loading::timescales({1e9, 150e-6}, quadrupole(1.0, cs), cs);
    const bool ok = std::abs(ts.t_osc - 9e-3) <= 0.2 * 9e-3 &&
                    std::abs(ts.t_coll - 7e-3) <= 0.3 * 7e-3;
    criterion(3, "reservoir timescales", ok,
              fmt("t_osc=%.2fms (9 +-20%%), t_coll=%.2fms (7 +-30%%)",
                  ts.t_osc * 1e3, ts.t_coll * 1e3));
}

void criterion_4() {
    const double p1 = loading::escape_probability(1.0);
    const double p2 = loading::escape_probability(2.0);
    bool monotone = true;
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double p = loading::escape_probability(14.0 * i / 1000.0);
        if (p >= prev) monotone = false;
        prev = p;
    }
    const bool ok = p1 >= 0.45 && p1 <= 0.55 && p2 >= 0.25 && p2 <= 0.35 &&
                    monotone;
    criterion(4, "escape probability", ok,
              fmt("p(1)=%.4f (0.45..0.55), p(2)=%.4f (0.25..0.35), "
                  "monotone=%s",
                  p1, p2, monotone ? "yes" : "no"));
}

void criterion_5() {
    // N_f = N_d0 crossing on the benchmark waist sweep.
    const PotentialSpec magnetic = quadrupole(1.0, cs);
    const thermo::SampleState res{1e9, 150e-6};
    const double sigma = evap::cross_section(
        cs.scattering_length, res.temperature, loading::quadrupole_kev_eta,
        cs.mass);

    double crossing = 0.0, prev_gap = 0.0, prev_w = 0.0;
    for (double w0 = 80e-6; w0 <= 220e-6; w0 += 10e-6) {
        const thermo::DimpleLoadResult load = thermo::diabatic_load(
            res, magnetic, gaussian_dimple(k_boltzmann * 1720e-6, w0, cs));
        const loading::LoadingTimescales ts = loading::timescales(
            res, magnetic, cs, sigma, load.dimple_radius);
        const double gap = load.transferred_atoms -
                           loading::hydrodynamic_threshold(ts, sigma);
        if (prev_w > 0.0 && prev_gap > 0.0 && gap <= 0.0) {
            crossing = prev_w + (w0 - prev_w) * prev_gap / (prev_gap - gap);
            break;
        }
        prev_gap = gap;
        prev_w = w0;
    }
    const bool ok = crossing >= 100e-6 && crossing <= 170e-6;
    criterion(5, "hydrodynamic crossover waist", ok,
              fmt("N_f = N_d0 at w0 = %.0f um (100..170)", crossing * 1e6));
}

void criterion_6() {
    double worst = 0.0;
    for (double ag : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        for (double eta : {4.5, 6.0, 8.0, 10.0, 12.0, 14.0}) {
            const evap::EvapRates r =
                evap::evaporation_rate_and_energy(1.0, eta, 1.5, ag);
            auto base = [&](double etap) {
                return std::exp(-etap) * (etap - 4.0) / std::sqrt(2.0);
            };
            const double g_ref = num::integrate_adaptive(
                [&](double th) {
                    return base(eta + ag * (1.0 - std::cos(th))) * std::sin(th);
                },
                0.0, pi / 2.0, 1e-11);
            const double e_num = num::integrate_adaptive(
                [&](double th) {
                    const double etap = eta + ag * (1.0 - std::cos(th));
                    return base(etap) * (etap + 1.0) * std::sin(th);
                },
                0.0, pi / 2.0, 1e-11);
            worst = std::max(worst, std::abs(r.gamma_ev / g_ref - 1.0));
            worst = std::max(worst,
                             std::abs(r.e_ev_per_nkt / (e_num / g_ref) - 1.0));
        }
    }
    const double g6 =
        evap::evaporation_rate_and_energy(1.0, 6.0, 1.5, 0.0).gamma_ev;
    const double exact6 = std::exp(-6.0) * 2.0 / std::sqrt(2.0);
    const bool limit_ok = std::abs(g6 / exact6 - 1.0) < 1e-4 &&
                          std::abs(g6 - 0.0035) < 5e-5;
    criterion(6, "gravity-averaged evaporation", worst < 1e-6 && limit_ok,
              fmt("worst closed-form vs quadrature: %.2e (<1e-6), "
                  "Gamma_ev(eta=6)/Gamma_el = %.6f (~0.0035)",
                  worst, g6));
}

void criterion_7() {
    std::mt19937 rng(20260811);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double delta = 1.5;
    int violations = 0;
    double closest = 1e300;
    for (int i = 0; i < 1000; ++i) {
        const double a = bohr_radius * std::pow(10.0, 1.0 + 2.4771 * u(rng));
        const double t = 1e-7 * std::pow(10.0, 3.4771 * u(rng));
        const double n0 = std::pow(10.0, 17.0 + 4.0 * u(rng));
        const double eta = 4.5 + 9.5 * u(rng);
        const evap::TbrTerms tbr =
            evap::tbr_terms(a, t, n0, eta, delta, cs.mass, 0.0);
        const double sigma = evap::cross_section(a, t, eta, cs.mass);
        const double gamma_el = evap::elastic_rate(n0, sigma, t, cs.mass);
        const double bound = 0.15 * std::pow(3.0, 1.5 - delta) * hbar *
                             gamma_el / (k_boltzmann * t) * gamma_el;
        if (tbr.gamma3 > bound) ++violations;
        closest = std::min(closest, bound / tbr.gamma3);
    }
    criterion(7, "three-body rate bound", violations == 0,
              fmt("0 violations in 1000 random states (min bound/rate = %.3f)",
                  closest));
}

void criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();

    const sc::RunSummary ideal = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig8-rb-ideal")),
        outdir("c8_ideal").string());
    const bool ideal_ok =
        ideal.evap->status == evap::EvapStatus::BecReached &&
        ideal.evap->t_bec <= 5.0;

    const sc::RunSummary full = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig8-rb-full")),
        outdir("c8_full").string());
    const bool full_ok = full.evap->status != evap::EvapStatus::BecReached;

    const sc::RunSummary high = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig8-rb-highN")),
        outdir("c8_high").string());
    const bool high_ok = high.evap->status == evap::EvapStatus::BecReached;

    const double wall = seconds_since(t0);
    criterion(8, "evaporation benchmark trio",
              ideal_ok && full_ok && high_ok && wall < 30.0,
              fmt("ideal: %s t=%.2fs (BEC<=5s %s); full: %s D_end=%.3g "
                  "(no-BEC %s); highN: %s D_end=%.3g (BEC %s); runtime %.1fs",
                  sc::status_name(ideal.evap->status), ideal.evap->t_bec,
                  ideal_ok ? "ok" : "violated",
                  sc::status_name(full.evap->status), full.evap->final_psd,
                  full_ok ? "ok" : "violated",
                  sc::status_name(high.evap->status), high.evap->final_psd,
                  high_ok ? "ok" : "violated", wall));
}

void criterion_9() {
    const sc::RunSummary s = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig9-cs-etaramp")),
        outdir("c9").string());
    const bool ok = s.evap->status == evap::EvapStatus::BecReached &&
                    s.evap->t_bec >= 0.5 && s.evap->t_bec <= 2.0;
    criterion(9, "depth-ramp strategy", ok,
              fmt("%s, t_bec=%.3fs (0.5..2)", sc::status_name(s.evap->status),
                  s.evap->t_bec));
}

void criterion_10() {
    const sc::RunSummary s = sc::run_scenario(
        sc::parse_config(sc::preset_config("fig10-cs-waistzoom-aramp")),
        outdir("c10").string());
    const double t_bec = s.evap->t_bec;
    const double n = s.evap->final_atoms;
    const double t_uk = s.evap->final_temperature * 1e6;
    const double shrink = s.evap->waist_reduction;
    const bool ok = s.evap->status == evap::EvapStatus::BecReached &&
                    t_bec >= 0.35 * 0.5 && t_bec <= 0.35 * 1.5 && n >= 1e7 &&
                    n <= 4e7 && t_uk >= 7.0 && t_uk <= 28.0 && shrink >= 2.0 &&
                    shrink <= 4.5;
    criterion(10, "waist-zoom + interaction-ramp strategy", ok,
              fmt("%s, t_bec=%.3fs (0.175..0.525), N=%.3g (1e7..4e7), "
                  "T=%.1fuK (7..28), waist/%.2f (2..4.5)",
                  sc::status_name(s.evap->status), t_bec, n, t_uk, shrink));
}

void criterion_11() {
    bool ok = true;
    std::string detail;
    for (double delta : {1.5, 3.0}) {
        double best_eta = 0.0, best = -1e300;
        for (double eta = delta + 2.55; eta <= 16.0; eta += 1e-3) {
            const double v =
                std::exp(-eta) * (eta - 2.5 - delta) * (eta - 1.5 - delta);
            if (v > best) {
                best = v;
                best_eta = eta;
            }
        }
        if (std::abs(best_eta - (4.1 + delta)) > 0.3) ok = false;
        detail += fmt("delta=%.1f: eta*=%.3f (%.1f +-0.3)  ", delta, best_eta,
                      4.1 + delta);
    }
    criterion(11, "optimal depth diagnostic", ok, detail);
}

void criterion_12() {
    const auto d1 = outdir("c12_a");
    const auto d2 = outdir("c12_b");
    const sc::ScenarioConfig cfg =
        sc::parse_config(sc::preset_config("fig10-cs-waistzoom-aramp"));
    sc::run_scenario(cfg, d1.string());
    sc::run_scenario(cfg, d2.string());
    const std::string a = slurp(d1 / "trajectory.csv");
    const std::string b = slurp(d2 / "trajectory.csv");
    const bool ok = !a.empty() && a == b;
    criterion(12, "byte-identical reruns", ok,
              fmt("%zu bytes, identical=%s", a.size(), ok ? "yes" : "no"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures;
}
