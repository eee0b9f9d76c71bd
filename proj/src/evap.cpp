#include "becsim/evap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/numerics.hpp"
#include "becsim/potentials.hpp"

namespace becsim::evap {

double temperature_of(const EvapState& s, double delta) {
    return s.energy / ((1.5 + delta) * s.atom_number * k_boltzmann);
}

double energy_of(double atom_number, double temperature, double delta) {
    return (1.5 + delta) * atom_number * k_boltzmann * temperature;
}

double relative_velocity(double temperature, double mass) {
    return 4.0 * std::sqrt(k_boltzmann * temperature / (pi * mass));
}

double k_ev(double temperature, double mass, double eta) {
    const double k = mass * relative_velocity(temperature, mass) / (2.0 * hbar);
    return k * std::sqrt(eta / 3.0 * pi / 4.0);
}

double cross_section(double scattering_length, double temperature, double eta,
                     double mass) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("cross_section: T must be > 0");
    }
    const double a = scattering_length;
    const double ka = k_ev(temperature, mass, eta) * a;
    return 8.0 * pi * a * a / (1.0 + ka * ka);
}

double elastic_rate(double peak_density, double sigma, double temperature,
                    double mass) {
    return peak_density * sigma * relative_velocity(temperature, mass);
}

double alpha_g(double temperature, double eta, double omega, double g,
               double mass) {
    const double kt = k_boltzmann * temperature;
    const double r_edge =
        g / (omega * omega) + std::sqrt(2.0 * eta * kt / (mass * omega * omega));
    return mass * g * r_edge / kt;
}

EvapRates evaporation_rate_and_energy(double gamma_el, double eta, double delta,
                                      double ag) {
    if (!(eta > 2.5 + delta)) {
        throw InvalidEta("evaporation rate needs eta > 5/2 + delta");
    }
    if (ag < 0.0) {
        throw std::invalid_argument("evaporation rate: alpha_g must be >= 0");
    }
    // Overflow-safe arrangement: e^-eta-ag (e^ag - 1)/ag = e^-eta (1-e^-ag)/ag.
    const double pref = gamma_el * std::exp(-eta) / std::sqrt(2.0);
    const double grow = num::one_minus_exp_over(ag);  // (1 - e^-ag)/ag
    const double damp = std::exp(-ag);
    const double shape = (eta - 1.5 - delta) * grow - damp;

    EvapRates out;
    out.gamma_ev = pref * shape;
    // (E_ev - E_ev^eta)/(N kB T) from the same averaging; the exponential
    // prefactor cancels in the ratio, which keeps deep traps finite.
    const double bracket = (eta - 0.5 - delta) * (grow - damp) - ag * damp;
    out.e_ev_per_nkt = (eta + 1.0) + bracket / shape;
    return out;
}

double hydro_smoothing(double p_coll) {
    return 1.0 / (1.0 + p_coll * p_coll * p_coll);
}

double collision_probability(double gamma_el, double omega, double delta,
                             double temperature, double n0, double sigma,
                             double u_prime) {
    if (std::abs(delta - 1.5) < 1e-12) {
        return gamma_el / (4.0 * omega);
    }
    if (!(u_prime > 0.0)) {
        throw std::invalid_argument(
            "collision_probability: U' required for non-harmonic traps");
    }
    const double kt = k_boltzmann * temperature;
    const double sigma_r = std::pow(kt / (2.0 * u_prime), delta / 3.0);
    const double nbar = n0 * std::pow(2.0, -delta);
    return std::sqrt(pi) * sigma_r * nbar * sigma;
}

double three_body_coefficient(double scattering_length, double temperature,
                              double eta, double mass) {
    const double a = scattering_length;
    const double ka = k_ev(temperature, mass, eta) * a;
    const double ka4 = ka * ka * ka * ka;
    return 225.0 * hbar / mass * a * a * a * a / (1.0 + 0.1 * ka4);
}

TbrTerms tbr_terms(double scattering_length, double temperature, double n0,
                   double eta, double delta, double mass, double p_coll) {
    TbrTerms out;
    const double a = scattering_length;
    const double kt = k_boltzmann * temperature;
    const double l3 = three_body_coefficient(a, temperature, eta, mass);
    out.gamma3 = l3 * n0 * n0 * std::pow(3.0, -delta);
    out.binding_temperature =
        a != 0.0 ? 2.0 * hbar * hbar / (3.0 * mass * a * a * k_boltzmann)
                 : std::numeric_limits<double>::infinity();

    const double f_hydro = hydro_smoothing(p_coll);
    const double x = out.binding_temperature / (eta * temperature);
    out.f_tbr = 1.0 - f_hydro * (1.0 - hydro_smoothing(x));

    // T_h f_TBR stays finite for a -> 0 only through the Gamma3 T_h product;
    // assemble the heating power from overflow-safe pieces.
    const double gamma3_th = l3 * n0 * n0 * std::pow(3.0, -delta) *
                             (a != 0.0 ? 2.0 * hbar * hbar /
                                             (3.0 * mass * a * a * k_boltzmann)
                                       : 0.0);
    out.heating_power_per_atom =
        out.gamma3 * (2.0 / 3.0) * delta * kt + gamma3_th * k_boltzmann * out.f_tbr;
    out.heat_per_event =
        (2.0 / 3.0) * delta * kt + k_boltzmann * out.binding_temperature * out.f_tbr;
    return out;
}

namespace {

// d ln Z1/d ln(eta T) for the gravity-corrected frequency at fixed waist:
// omega = sqrt(4 eta kB T/(m w0^2)) beta(x), x = sqrt(2) m w0 g/(eta kB T).
double waist_rate_factor(const TrapControls& c, double temperature) {
    const double depth = c.eta * k_boltzmann * temperature;
    const double x = std::sqrt(2.0) * c.mass * c.waist * c.g_eff / depth;
    const double beta = 0.5 + 0.5 * std::sqrt(1.0 + x);
    return 1.0 - x / (2.0 * std::sqrt(1.0 + x) * beta);
}

double psd_of(double atom_number, double temperature, const TrapControls& c) {
    if (std::abs(c.delta - 1.5) < 1e-12) {
        const double r = hbar * c.omega / (k_boltzmann * temperature);
        return atom_number * r * r * r;
    }
    const double lam =
        std::sqrt(2.0 * pi * hbar * hbar / (c.mass * k_boltzmann * temperature));
    const double z1 = std::pow(lam, -3.0) *
                      std::pow(k_boltzmann * temperature / c.u_prime, c.delta) *
                      4.0 * pi * c.delta * std::tgamma(c.delta) / 3.0;
    return atom_number / z1;
}

double peak_density_of(double atom_number, double temperature,
                       const TrapControls& c) {
    const double lam =
        std::sqrt(2.0 * pi * hbar * hbar / (c.mass * k_boltzmann * temperature));
    return psd_of(atom_number, temperature, c) / (lam * lam * lam);
}

}  // namespace

Derived evap_rhs(const EvapState& state, const TrapControls& c) {
    Derived d;
    const double n = state.atom_number;
    const double t = temperature_of(state, c.delta);
    const double kt = k_boltzmann * t;
    d.temperature = t;
    d.psd = psd_of(n, t, c);
    d.peak_density = peak_density_of(n, t, c);
    d.sigma = cross_section(c.scattering_length, t, c.eta, c.mass);
    d.gamma_el = elastic_rate(d.peak_density, d.sigma, t, c.mass);
    d.p_coll = collision_probability(d.gamma_el, c.omega, c.delta, t,
                                     d.peak_density, d.sigma, c.u_prime);
    d.f_hydro = hydro_smoothing(d.p_coll);
    d.alpha_g = alpha_g(t, c.eta, c.omega, c.g_eff, c.mass);
    const EvapRates ev =
        evaporation_rate_and_energy(d.gamma_el, c.eta, c.delta, d.alpha_g);
    d.gamma_ev = ev.gamma_ev;
    d.e_ev_per_nkt = ev.e_ev_per_nkt;

    double tbr_heating = 0.0;
    if (c.tbr_enabled) {
        const TbrTerms tbr = tbr_terms(c.scattering_length, t, d.peak_density,
                                       c.eta, c.delta, c.mass, d.p_coll);
        d.gamma3 = tbr.gamma3;
        d.binding_temperature = tbr.binding_temperature;
        d.f_tbr = tbr.f_tbr;
        tbr_heating = tbr.heating_power_per_atom;
    }

    const double nbar = d.peak_density * std::pow(2.0, -c.delta);
    d.gamma_loss = c.gamma_bg + c.k2_coeff * nbar;
    d.gamma_laser = c.depth_ref > 0.0
                        ? c.gamma_laser_ref * (c.eta * kt / c.depth_ref)
                        : 0.0;

    d.dn_dt = -(d.gamma_ev * d.f_hydro + d.gamma_loss + d.gamma3) * n;

    const double e_ev = d.e_ev_per_nkt * n * kt;
    const double heating =
        n * (d.gamma_laser * k_boltzmann * c.recoil_temperature + tbr_heating);
    const double base = -(d.gamma_loss + d.gamma3) * state.energy -
                        e_ev * d.gamma_ev * d.f_hydro + heating;

    const double e_pot = c.delta * n * kt;
    if (c.constant_waist) {
        // U' tracks eta T at fixed waist, so Gamma_pot depends on dT/dt;
        // substitute dT/T = dE/E - dN/N and solve the linear relation for dE.
        const double kfac = waist_rate_factor(c, t);
        const double coup = e_pot * kfac;
        d.de_dt = (base + coup * (c.eta_rate / c.eta - d.dn_dt / n)) /
                  (1.0 - coup / state.energy);
        d.gamma_pot = kfac * (c.eta_rate / c.eta +
                              (d.de_dt / state.energy - d.dn_dt / n));
    } else {
        // Constant omega: U' = m omega^2 / 2 is frozen.
        d.de_dt = base;
        d.gamma_pot = 0.0;
    }
    d.dln_depth_dt =
        c.eta_rate / c.eta + (d.de_dt / state.energy - d.dn_dt / n);
    return d;
}

PsdDiagnostics psd_rate(const EvapState& state, const TrapControls& c) {
    const Derived d = evap_rhs(state, c);
    const double t = d.temperature;

    PsdDiagnostics out;
    const double evap_term = d.gamma_el / std::sqrt(2.0) * std::exp(-c.eta) *
                             (c.eta - 2.5 - c.delta) * (c.eta - 1.5 - c.delta) *
                             d.f_hydro;
    double tbr_term = 0.0;
    if (c.tbr_enabled && d.gamma3 > 0.0) {
        const double th_f =
            std::isfinite(d.binding_temperature)
                ? d.binding_temperature * d.f_tbr
                : 0.0;  // f_tbr -> finite while gamma3 -> 0 faster
        tbr_term = d.gamma3 * ((5.0 / 3.0) * c.delta * t + th_f) / t;
    }
    const double laser_term =
        d.gamma_laser * c.recoil_temperature / t;
    out.dln_psd_dt = evap_term - d.gamma_loss - laser_term - tbr_term;
    out.gamma = out.dln_psd_dt / (d.dn_dt / state.atom_number);
    out.eta_optimal = 4.1 + c.delta;
    out.tbr_coefficient = tbr_elastic_rate_limit(c.eta, c.delta);
    out.hydro_ok = d.gamma_el < 3.0 * c.omega;
    out.tbr_ok = d.gamma_el < out.tbr_coefficient * (t * 1e6);
    return out;
}

double tbr_elastic_rate_limit(double eta, double delta) {
    // TBR heating (~10 Gamma_3) stays below Gamma_ev when
    // Gamma_el < e^-eta (eta - 5/2 - delta) / (1.5 sqrt(2) 3^(3/2-delta))
    //            * kB/hbar * T;  expressed per uK of temperature.
    const double coef = std::exp(-eta) * (eta - 2.5 - delta) /
                        (1.5 * std::sqrt(2.0) * std::pow(3.0, 1.5 - delta));
    return coef * k_boltzmann * 1e-6 / hbar;
}

double bec_time_estimate(double psd_initial, double omega, double eta) {
    if (!(psd_initial > 0.0) || !(psd_initial < 1.0)) {
        return 0.0;
    }
    // Anchors 0.01 omega at eta = 6 and 0.001 omega at eta = 10,
    // log-linear in eta between and beyond.
    const double coef = std::pow(10.0, -2.0 - (eta - 6.0) / 4.0);
    return -std::log(psd_initial) / (coef * omega);
}

TrapControls resolve_controls(const ControlSchedule& s, const AtomSpecies& sp,
                              double t, double temperature, double omega_fixed) {
    TrapControls c;
    c.eta = s.eta.value(t);
    c.eta_rate = s.eta.rate(t);
    c.scattering_length = s.scattering_length.value(t);
    c.a_rate = s.scattering_length.rate(t);
    c.delta = s.delta;
    c.g_eff = s.g_eff;
    c.gamma_bg = s.gamma_bg;
    c.k2_coeff = s.k2_coeff;
    c.gamma_laser_ref = s.gamma_laser_ref;
    c.depth_ref = s.depth_ref;
    c.recoil_temperature = sp.recoil_temperature;
    c.mass = sp.mass;
    c.tbr_enabled = s.tbr_enabled;

    const double depth = c.eta * k_boltzmann * temperature;
    if (s.waist_policy == WaistPolicy::ConstantWaist) {
        c.constant_waist = true;
        c.waist = s.initial_waist;
        c.omega = dimple_frequency_with_gravity(depth, c.waist, sp, s.g_eff);
    } else {
        c.constant_waist = false;
        c.omega = omega_fixed;
        c.waist = waist_for_frequency(c.omega, depth, sp, s.g_eff);
    }
    c.u_prime = 0.5 * c.mass * c.omega * c.omega;  // harmonic convention
    return c;
}

Trajectory integrate(const EvapState& initial, const AtomSpecies& species,
                     const ControlSchedule& schedule, double t_end,
                     double rel_tol) {
    if (!(initial.atom_number > 0.0) || !(initial.energy > 0.0)) {
        throw std::invalid_argument("evap::integrate: initial state invalid");
    }
    if (!(t_end > 0.0)) {
        throw std::invalid_argument("evap::integrate: t_end must be > 0");
    }
    if (std::abs(schedule.delta - 1.5) > 1e-12) {
        // Waist-based control resolution models the optical dimple, which is
        // harmonic; the rate functions stay general in delta.
        throw std::invalid_argument(
            "evap::integrate: trajectory integration requires delta = 3/2");
    }
    constexpr double n_floor = 1.0;
    constexpr double t_floor = 1e-9;  // K

    const double t0_temp = temperature_of(initial, schedule.delta);
    double omega_fixed = 0.0;
    if (schedule.waist_policy == WaistPolicy::ConstantOmega) {
        omega_fixed = dimple_frequency_with_gravity(
            schedule.eta.value(0.0) * k_boltzmann * t0_temp,
            schedule.initial_waist, species, schedule.g_eff);
    }

    auto controls_at = [&](double t, double temperature) {
        return resolve_controls(schedule, species, t, temperature, omega_fixed);
    };

    Trajectory traj;
    traj.initial_waist = schedule.initial_waist;

    auto rhs = [&](double t, const num::StateVec<2>& y) -> num::StateVec<2> {
        const EvapState s{y[0], y[1]};
        const double temp = temperature_of(s, schedule.delta);
        const Derived d = evap_rhs(s, controls_at(t, temp));
        return {d.dn_dt, d.de_dt};
    };
    auto out_of_domain = [&](const num::StateVec<2>& y) {
        return !(y[0] > 0.0) || !(y[1] > 0.0);
    };
    auto psd_at = [&](double t, const num::StateVec<2>& y) {
        const EvapState s{y[0], y[1]};
        const double temp = temperature_of(s, schedule.delta);
        const TrapControls c = controls_at(t, temp);
        return psd_of(y[0], temp, c);
    };
    // Fires on D crossing 1 and, abruptly, on the state floors.
    auto stop_event = [&](double t, const num::StateVec<2>& y) {
        const EvapState s{y[0], y[1]};
        const double temp = temperature_of(s, schedule.delta);
        if (y[0] < n_floor || temp < t_floor) return 2.0;
        return psd_at(t, y) - 1.0;
    };

    std::size_t adiabatic_ok = 0;
    auto record = [&](double t, const num::StateVec<2>& y) {
        const EvapState s{y[0], y[1]};
        const double temp = temperature_of(s, schedule.delta);
        const TrapControls c = controls_at(t, temp);
        const Derived d = evap_rhs(s, c);
        const PsdDiagnostics diag = psd_rate(s, c);

        TrajectoryPoint p;
        p.t = t;
        p.atom_number = s.atom_number;
        p.temperature = temp;
        p.psd = d.psd;
        p.gamma_el = d.gamma_el;
        p.p_coll = d.p_coll;
        p.gamma3_over_gamma_ev = d.gamma3 / d.gamma_ev;
        p.alpha_g = d.alpha_g;
        p.eta = c.eta;
        p.omega = c.omega;
        p.scattering_length = c.scattering_length;
        p.waist = c.waist;
        p.gamma = diag.gamma;
        p.dln_psd_dt = diag.dln_psd_dt;
        traj.points.push_back(p);

        const bool depth_ok = std::abs(d.dln_depth_dt) <= d.gamma_el;
        const bool shape_ok =
            std::abs(d.gamma_pot) <= c.omega / (2.0 * pi);
        if (depth_ok && shape_ok) ++adiabatic_ok;
    };

    num::StateVec<2> y{initial.atom_number, initial.energy};
    record(0.0, y);  // leading row at t = 0

    num::OdeOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-30;
    opt.h_max = t_end / 16.0;

    const num::OdeResult r =
        num::integrate_rk45<2>(rhs, y, 0.0, t_end, opt, record, stop_event,
                               out_of_domain);

    if (r.stopped) {
        // Distinguish the stop causes. The event location is linear in the
        // state, so a degeneracy crossing reads back slightly below 1; a
        // floor stop interpolates mid-step and may sit above the floors.
        const EvapState fin{y[0], y[1]};
        const bool floored = fin.atom_number < n_floor ||
                             temperature_of(fin, schedule.delta) < t_floor;
        const bool bec = !floored && psd_at(r.t_end, y) > 0.9;
        traj.status = bec ? EvapStatus::BecReached : EvapStatus::Stalled;
        if (bec) traj.t_bec = r.t_end;
    } else {
        traj.status = EvapStatus::Timeout;
    }
    const EvapState fin{y[0], y[1]};
    traj.final_atom_number = fin.atom_number;
    traj.final_temperature = temperature_of(fin, schedule.delta);
    traj.final_psd = traj.points.empty() ? 0.0 : traj.points.back().psd;
    traj.final_waist = traj.points.empty() ? schedule.initial_waist
                                           : traj.points.back().waist;
    traj.adiabatic_fraction =
        traj.points.empty()
            ? 0.0
            : static_cast<double>(adiabatic_ok) / traj.points.size();
    return traj;
}

}  // namespace becsim::evap
