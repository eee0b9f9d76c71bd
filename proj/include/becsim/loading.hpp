#ifndef BECSIM_LOADING_HPP
#define BECSIM_LOADING_HPP

#include "becsim/thermo.hpp"

namespace becsim::loading {

// The reservoir collision-time convention uses the evaporation cross section
// evaluated at eta = 4, which restores k_ev ~ k for the infinitely deep
// magnetic trap.
inline constexpr double quadrupole_kev_eta = 4.0;

struct LoadingTimescales {
    double t_osc = 0.0;           // s, sqrt(m l^2 / kB T_i)
    double t_coll = 0.0;          // s, 1/Gamma_el in the reservoir
    double v_i = 0.0;             // m/s, sqrt(kB T_i / m)
    double reservoir_size = 0.0;  // l = V_e^(1/3), m
    double dimple_radius = 0.0;   // r_d, m (0 when not tied to a dimple)
};

struct LossBudget {
    double two_body_fraction = 0.0;
    double three_body_fraction = 0.0;
    double majorana_fraction = 0.0;
    double majorana_radius = 0.0;  // m
    double total_lost = 0.0;       // N_loss
};

// p(eta) = 1 + 2 e^-eta sqrt(eta/pi) - erf(sqrt(eta)): probability that a
// collision promotes an atom above eta kB T.
double escape_probability(double eta);

// Reservoir kinetic scales. sigma is the elastic cross section used for
// t_coll; pass the dimple radius when one is defined for the scenario.
LoadingTimescales timescales(const thermo::SampleState& reservoir,
                             const PotentialSpec& magnetic,
                             const AtomSpecies& species, double sigma,
                             double dimple_radius = 0.0);

// Convenience overload: sigma from the reservoir state at eta = 4.
LoadingTimescales timescales(const thermo::SampleState& reservoir,
                             const PotentialSpec& magnetic,
                             const AtomSpecies& species);

// Atom number in the dimple region at which it turns hydrodynamic:
// N_d^0 = 2 (t_osc / t_coll) r_d^2 / sigma.
double hydrodynamic_threshold(const LoadingTimescales& ts, double sigma);

// Gaussian-waist shortcut, r_d^2 ~ 2 w0^2: N_d^0 ~ 4 w0^2 / sigma.
double hydrodynamic_threshold_waist(double waist, double sigma);

// Dimple fill time: exponential up to the hydrodynamic threshold, then
// linear. Throws InvalidRegime when the dimple is emptier than the
// reservoir (the log argument falls below 1).
double loading_time(double transferred_atoms, const LoadingTimescales& ts,
                    double reservoir_peak_density, double reservoir_atoms,
                    double threshold_atoms);

// Slow-ramp estimate: about three times the diabatic fill time.
double adiabatic_loading_time(double t_load);

// Loss fractions accumulated over the fill. field_gradient is the magnetic
// gradient B' (T/m): the two-body rate is evaluated at B ~ B' (sigma_r)_d
// and the Majorana radius uses mu B'.
LossBudget loss_budget(const thermo::DimpleLoadResult& load,
                       const LoadingTimescales& ts, const AtomSpecies& species,
                       double field_gradient, double sigma);

}  // namespace becsim::loading

#endif
