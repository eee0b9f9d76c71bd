#ifndef BECSIM_POTENTIALS_HPP
#define BECSIM_POTENTIALS_HPP

#include <limits>
#include <variant>
#include <vector>

#include "becsim/species.hpp"

namespace becsim {

// Radial potential terms. Each evaluates isotropically in r; gravity enters
// only through the -m g z tilt applied by PotentialSpec.

struct PowerLawTerm {
    double u_prime = 0.0;  // J / m^(3/delta)
    double delta = 0.0;    // dimensionless exponent parameter, U = U' r^(3/delta)
    double r_edge = std::numeric_limits<double>::infinity();  // m, trap edge
};

struct GaussianDimpleTerm {
    double depth = 0.0;  // U0, J;  U(r) = -U0 exp(-2 r^2 / w0^2)
    double waist = 0.0;  // w0, m
};

struct QuadrupoleTerm {
    double gradient_energy = 0.0;  // mu B', J/m;  U(r) = mu B' r
};

struct HarmonicTerm {
    double omega = 0.0;  // rad/s;  U(r) = m omega^2 r^2 / 2
    double r_edge = std::numeric_limits<double>::infinity();  // m
};

struct PotentialSpec {
    using Term =
        std::variant<PowerLawTerm, GaussianDimpleTerm, QuadrupoleTerm, HarmonicTerm>;
    std::vector<Term> terms;  // evaluated as a sum
    double mass = 0.0;        // kg; used by harmonic terms and the gravity tilt
    double gravity = 0.0;     // m/s^2; full potential is U(r) - m g z

    void validate() const;  // throws std::invalid_argument
};

PotentialSpec power_law(double u_prime, double delta, const AtomSpecies& sp,
                        double r_edge = std::numeric_limits<double>::infinity());
PotentialSpec gaussian_dimple(double depth, double waist, const AtomSpecies& sp);
// Quadrupole with field gradient b_prime (T/m); gradient energy |mu| B'.
PotentialSpec quadrupole(double b_prime, const AtomSpecies& sp);
PotentialSpec harmonic(double omega, const AtomSpecies& sp,
                       double r_edge = std::numeric_limits<double>::infinity());

// Sum of two potentials for the same species; gravity settings must agree.
PotentialSpec sum(const PotentialSpec& a, const PotentialSpec& b);
PotentialSpec with_gravity(PotentialSpec spec, double g);

// U(r) without the gravity tilt.
double radial_value(const PotentialSpec& spec, double r);
// d2U/dr2 at radius r (no gravity; the tilt is linear in z).
double radial_second_derivative(const PotentialSpec& spec, double r);
// Full potential U(sqrt(rho^2+z^2)) - m g z.
double potential_value(const PotentialSpec& spec, double rho, double z);

struct TrapGeometry {
    double depth = 0.0;             // J; +inf for unbounded traps
    double minimum_energy = 0.0;    // J, U_g at the minimum
    double minimum_position = 0.0;  // m along the sag axis (+z)
    double r_edge = 0.0;            // m, trap-edge radius convention
    double omega_eff = 0.0;         // rad/s; 0 when the minimum is not smooth
};

// Locates the potential minimum along the sag axis and measures the trap
// depth, redefined under gravity as U_g at the edge point on the sag axis
// minus the minimum. Throws NoBoundMinimum when gravity overwhelms the trap.
TrapGeometry analyze_trap(const PotentialSpec& spec, const AtomSpecies& sp);

// Gravity-corrected harmonic frequency of a Gaussian dimple of given depth:
//   omega = sqrt(4 U0 / (m w0^2)) * (1/2 + 1/2 sqrt(1 + sqrt(2) m w0 g / U0)).
// crossed_beams applies the 2^(1/3) stiffening of two identical orthogonal
// beams; the default matches the idealized isotropic form.
double dimple_frequency_with_gravity(double depth, double waist,
                                     const AtomSpecies& sp, double g,
                                     bool crossed_beams = false);

// Inverse of the above: waist giving angular frequency omega at this depth.
double waist_for_frequency(double omega, double depth, const AtomSpecies& sp,
                           double g);

}  // namespace becsim

#endif
