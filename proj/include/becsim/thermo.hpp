#ifndef BECSIM_THERMO_HPP
#define BECSIM_THERMO_HPP

#include "becsim/potentials.hpp"

namespace becsim::thermo {

struct SampleState {
    double atom_number = 0.0;  // N
    double temperature = 0.0;  // K
};

struct ThermoReport {
    double partition_function = 0.0;   // Z1
    double phase_space_density = 0.0;  // D = N/Z1 = n0 Lambda^3
    double peak_density = 0.0;         // n0, 1/m^3
    double free_energy = 0.0;          // F = N kB T (ln D - 1), J
    double entropy = 0.0;              // S = -dF/dT, J/K
    double energy = 0.0;               // E = F + T S, J
    double effective_volume = 0.0;     // V_e = N/n0, m^3
    double thermal_wavelength = 0.0;   // Lambda, m
};

struct DimpleLoadResult {
    double final_temperature = 0.0;  // T_f, K
    double transferred_atoms = 0.0;  // N_f
    double final_psd = 0.0;          // D_f in the combined trap
    double dimple_radius = 0.0;      // r_d, where U_f(r_d) = 0
    double eta_d = 0.0;              // dimple depth / kB T_i
    double eta_v = 0.0;              // V_d / V_e
    double dimple_volume = 0.0;      // V_d = N_f / n_f, m^3
    double peak_density = 0.0;       // (n0)_f, 1/m^3
};

// Self-consistent evaluation of the box-model load formulas, both the exact
// coupled forms and their small-parameter approximations.
struct DimpleAnalytic {
    double final_temperature = 0.0;        // T_f
    double transfer_fraction = 0.0;        // N_f / N_i
    double psd_gain = 0.0;                 // D_f / D_i
    double transfer_fraction_approx = 0.0; // eta_V e^eta_d
    double psd_gain_approx = 0.0;          // e^eta_d
};

double thermal_wavelength(double mass, double temperature);

// Z1 = Lambda^-3 \int_0^inf 4 pi r^2 exp(-(U(r)-U(0))/kB T) dr via adaptive
// quadrature, for an infinite trap depth. Gravity is ignored here. Throws
// DivergentIntegral when the potential does not grow without bound.
double partition_function(const PotentialSpec& trap, double temperature,
                          double rel_tol = 1e-12);

ThermoReport report(const SampleState& state, const PotentialSpec& trap);

// Radius where the combined potential crosses zero; 0 when it never does.
double dimple_radius(const PotentialSpec& combined);

// Sudden (energy-conserving) superposition of a laser dimple on a filled
// magnetic trap. Preconditions: U_magn(0) = 0 and U_laser(inf) = 0.
DimpleLoadResult diabatic_load(const SampleState& reservoir,
                               const PotentialSpec& magnetic,
                               const PotentialSpec& laser);

// Slow (entropy-conserving) superposition.
DimpleLoadResult adiabatic_load(const SampleState& reservoir,
                                const PotentialSpec& magnetic,
                                const PotentialSpec& laser);

DimpleAnalytic dimple_analytic(double t_initial, double eta_d, double eta_v);

}  // namespace becsim::thermo

#endif
