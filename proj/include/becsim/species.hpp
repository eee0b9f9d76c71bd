#ifndef BECSIM_SPECIES_HPP
#define BECSIM_SPECIES_HPP

#include <functional>
#include <string>
#include <string_view>

namespace becsim {

// Atomic species data. Scattering length is stored signed; every formula in
// the model uses a^2 or a^4, so only the magnitude enters computations.
struct AtomSpecies {
    std::string name;
    double mass = 0.0;                // kg
    double scattering_length = 0.0;   // m (signed)
    double magnetic_moment = 0.0;     // J/T
    double recoil_temperature = 0.0;  // K
    double background_rate = 0.0;     // 1/s
    double laser_heating_rate = 0.0;  // 1/s at the reference trap depth

    // Two-body inelastic coefficient K2(B [T], T [K]) -> m^3/s. Empty when
    // the species has no known two-body loss channel.
    std::function<double(double, double)> k2_model;

    void validate() const;  // throws std::invalid_argument
};

// Cs in f=3, m_f=-3: mu = 3|mu_B|/4, a = -3000 a0 at zero field, with the
// measured two-body rate K2 ~ 4e-11 B^2(mT) T(uK)^-0.78 cm^3/s.
AtomSpecies cesium_f3mf3();

// 87Rb with a = 100 a0; no two-body channel in the trapped ground state.
AtomSpecies rubidium87();

// Preset lookup by name ("cesium", "rubidium87", a few aliases).
// Returns false when unknown.
bool find_species(std::string_view name, AtomSpecies& out);

}  // namespace becsim

#endif
