#ifndef BECSIM_CONSTANTS_HPP
#define BECSIM_CONSTANTS_HPP

// Physical constants (CODATA 2018), SI units throughout the library.
namespace becsim {

inline constexpr double k_boltzmann = 1.380649e-23;        // J/K
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double bohr_radius = 5.29177210903e-11;   // m
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double standard_gravity = 9.81;           // m/s^2
inline constexpr double pi = 3.14159265358979323846;

}  // namespace becsim

#endif
