#ifndef BECSIM_EVAP_HPP
#define BECSIM_EVAP_HPP

#include <cmath>
#include <vector>

#include "becsim/species.hpp"

namespace becsim::evap {

// Fully resolved controls at one instant of an evaporation run.
struct TrapControls {
    double eta = 0.0;                // trap depth / kB T
    double eta_rate = 0.0;           // d eta/dt, 1/s
    double scattering_length = 0.0;  // m
    double a_rate = 0.0;             // da/dt, m/s
    double omega = 0.0;              // rad/s
    double waist = 0.0;              // m
    double delta = 1.5;              // power-law index (3/2 harmonic)
    double u_prime = 0.0;            // J/m^(3/delta); only needed off-harmonic
    double g_eff = 0.0;              // m/s^2
    double gamma_bg = 0.0;           // 1/s
    double k2_coeff = 0.0;           // m^3/s two-body coefficient (K2)
    double gamma_laser_ref = 0.0;    // 1/s at depth_ref
    double depth_ref = 0.0;          // J
    double recoil_temperature = 0.0; // K
    double mass = 0.0;               // kg
    bool tbr_enabled = true;
    bool constant_waist = true;      // waist policy, drives the U'-rate term
};

// Integration state: atom number and total energy; T = E / ((3/2+delta) N kB).
struct EvapState {
    double atom_number = 0.0;
    double energy = 0.0;  // J
};

double temperature_of(const EvapState& s, double delta);
double energy_of(double atom_number, double temperature, double delta);

// v_r = 4 sqrt(kB T / (pi m)), mean relative speed.
double relative_velocity(double temperature, double mass);

// Thermally averaged collision momentum: k_ev^2 = k^2 (eta/3)(pi/4) with
// k = m v_r / (2 hbar).
double k_ev(double temperature, double mass, double eta);

// sigma = 8 pi a^2 / (1 + k_ev^2 a^2).
double cross_section(double scattering_length, double temperature, double eta,
                     double mass);

// Gamma_el = n0 sigma v_r.
double elastic_rate(double peak_density, double sigma, double temperature,
                    double mass);

// Gravitational tilt parameter alpha_g = (m g / kB T)(g/omega^2 +
// sqrt(2 eta kB T / (m omega^2))).
double alpha_g(double temperature, double eta, double omega, double g,
               double mass);

struct EvapRates {
    double gamma_ev = 0.0;      // 1/s, averaged over escape directions
    double e_ev_per_nkt = 0.0;  // E_ev / (N kB T), averaged
};

// Closed-form direction-averaged escape rate and mean removed energy for a
// tilted trap; alpha_g -> 0 recovers Gamma_el e^-eta (eta - 5/2 - delta)/sqrt(2)
// and (eta + 1) N kB T. Throws InvalidEta when eta <= 5/2 + delta.
EvapRates evaporation_rate_and_energy(double gamma_el, double eta, double delta,
                                      double alpha_g);

// f(p) = 1 / (1 + p^3).
double hydro_smoothing(double p_coll);

// Probability of colliding before the evaporation point. Harmonic traps use
// Gamma_el / (4 omega); other exponents fall back to the mean-free-path form
// sqrt(pi) sigma_r nbar sigma (an extrapolation beyond the harmonic case).
double collision_probability(double gamma_el, double omega, double delta,
                             double temperature, double n0, double sigma,
                             double u_prime = 0.0);

// L3 = 225 (hbar/m) a^4 / (1 + 0.1 (k_ev a)^4).
double three_body_coefficient(double scattering_length, double temperature,
                              double eta, double mass);

struct TbrTerms {
    double gamma3 = 0.0;               // 1/s
    double binding_temperature = 0.0;  // T_h = 2 hbar^2 / (3 m a^2 kB), K
    double f_tbr = 0.0;                // trapped-product smoothing
    double heat_per_event = 0.0;       // J: (2/3) delta kB T + kB T_h f_TBR
    double heating_power_per_atom = 0.0;  // J/s, gamma3 * heat_per_event, overflow-safe
};

TbrTerms tbr_terms(double scattering_length, double temperature, double n0,
                   double eta, double delta, double mass, double p_coll);

// All instantaneous quantities entering the (N, E) equations, plus the
// derivatives themselves.
struct Derived {
    double temperature = 0.0;
    double psd = 0.0;
    double peak_density = 0.0;
    double sigma = 0.0;
    double gamma_el = 0.0;
    double p_coll = 0.0;
    double f_hydro = 0.0;
    double alpha_g = 0.0;
    double gamma_ev = 0.0;
    double e_ev_per_nkt = 0.0;
    double gamma3 = 0.0;
    double binding_temperature = 0.0;
    double f_tbr = 0.0;
    double gamma_loss = 0.0;
    double gamma_laser = 0.0;
    double gamma_pot = 0.0;     // d ln U'/dt resolved along the solution
    double dln_depth_dt = 0.0;  // d ln U0/dt, for the adiabaticity check
    double dn_dt = 0.0;
    double de_dt = 0.0;
};

Derived evap_rhs(const EvapState& state, const TrapControls& controls);

// Zero-gravity phase-space-density diagnostic and strategy indicators.
struct PsdDiagnostics {
    double dln_psd_dt = 0.0;   // 1/s
    double gamma = 0.0;        // (dD/D)/(dN/N)
    double eta_optimal = 0.0;  // ~ 4.1 + delta
    double tbr_coefficient = 0.0;  // C(eta): TBR negligible when
                                   // Gamma_el (1/s) << C * T (uK)
    bool hydro_ok = false;     // Gamma_el < 3 omega
    bool tbr_ok = false;       // Gamma_el < C(eta) T(uK)
};

PsdDiagnostics psd_rate(const EvapState& state, const TrapControls& controls);

// C(eta) of the elastic-rate bound above (300 at eta = 6, ~15 at eta = 10
// for harmonic traps).
double tbr_elastic_rate_limit(double eta, double delta);

// Minimum-time estimate from the loss-free rate at Gamma_el ~ omega:
// -ln(D_i) / (0.01 omega) at eta ~ 6, -ln(D_i) / (0.001 omega) at eta ~ 10,
// log-linear in eta elsewhere (an extrapolation outside [6, 10]).
double bec_time_estimate(double psd_initial, double omega, double eta);

// ---- schedules and trajectory integration ----

struct RampProfile {
    double start = 0.0;
    double end = 0.0;
    double tau = 0.0;  // s; 0 means constant at `start`

    static RampProfile constant(double v) { return {v, v, 0.0}; }
    static RampProfile exponential(double v0, double v_inf, double tau) {
        return {v0, v_inf, tau};
    }
    double value(double t) const {
        if (tau <= 0.0) return start;
        return end + (start - end) * std::exp(-t / tau);
    }
    double rate(double t) const {
        if (tau <= 0.0) return 0.0;
        return -(start - end) / tau * std::exp(-t / tau);
    }
};

enum class WaistPolicy { ConstantWaist, ConstantOmega };

struct ControlSchedule {
    RampProfile eta;
    RampProfile scattering_length;
    WaistPolicy waist_policy = WaistPolicy::ConstantWaist;
    double initial_waist = 0.0;  // m; fixed waist, or the waist at t = 0
    double delta = 1.5;
    double g_eff = 0.0;
    double gamma_bg = 0.0;
    double k2_coeff = 0.0;
    double gamma_laser_ref = 0.0;
    double depth_ref = 0.0;
    bool tbr_enabled = true;
};

struct TrajectoryPoint {
    double t = 0.0;
    double atom_number = 0.0;
    double temperature = 0.0;
    double psd = 0.0;
    double gamma_el = 0.0;
    double p_coll = 0.0;
    double gamma3_over_gamma_ev = 0.0;
    double alpha_g = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double scattering_length = 0.0;
    double waist = 0.0;
    double gamma = 0.0;        // (dD/D)/(dN/N)
    double dln_psd_dt = 0.0;   // 1/s
};

enum class EvapStatus { BecReached, Timeout, Stalled };

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    EvapStatus status = EvapStatus::Timeout;
    double t_bec = std::nan("");  // s, set when status == BecReached
    double final_atom_number = 0.0;
    double final_temperature = 0.0;
    double final_psd = 0.0;
    double adiabatic_fraction = 0.0;  // steps meeting both adiabatic conditions
    double initial_waist = 0.0;       // m
    double final_waist = 0.0;         // m
};

// Integrates the coupled (N, E) equations with adaptive Runge-Kutta and
// records one trajectory point per accepted step. Stops early with
// BecReached when D crosses 1 (linear interpolation inside the step) or
// Stalled when N or T reaches its floor (N >= 1, T >= 1 nK).
Trajectory integrate(const EvapState& initial, const AtomSpecies& species,
                     const ControlSchedule& schedule, double t_end,
                     double rel_tol = 1e-8);

// Controls resolved from a schedule at time t for temperature T; exposed for
// diagnostics and tests. omega_fixed is used by the constant-omega policy.
TrapControls resolve_controls(const ControlSchedule& schedule,
                              const AtomSpecies& species, double t,
                              double temperature, double omega_fixed);

}  // namespace becsim::evap

#endif
