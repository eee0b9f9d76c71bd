#include "becsim/species.hpp"

#include <cmath>
#include <stdexcept>

#include "becsim/constants.hpp"

namespace becsim {

void AtomSpecies::validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("species: mass must be > 0");
    if (recoil_temperature < 0.0) {
        throw std::invalid_argument("species: recoil temperature must be >= 0");
    }
    if (background_rate < 0.0) {
        throw std::invalid_argument("species: background rate must be >= 0");
    }
}

AtomSpecies cesium_f3mf3() {
    AtomSpecies s;
    s.name = "cesium";
    s.mass = 132.905451961 * atomic_mass_unit;
    s.scattering_length = -3000.0 * bohr_radius;  // zero-field value
    s.magnetic_moment = 0.75 * bohr_magneton;
    s.recoil_temperature = 0.2e-6;  // K, D2-line recoil
    s.k2_model = [](double b_tesla, double temp_kelvin) {
        // 4e-11 cm^3/s * B^2(mT) * T(uK)^-0.78, converted to SI.
        const double b_mt = b_tesla * 1e3;
        const double t_uk = temp_kelvin * 1e6;
        if (t_uk <= 0.0) return 0.0;
        return 4e-17 * b_mt * b_mt * std::pow(t_uk, -0.78);
    };
    return s;
}

AtomSpecies rubidium87() {
    AtomSpecies s;
    s.name = "rubidium87";
    s.mass = 86.909180531 * atomic_mass_unit;
    s.scattering_length = 100.0 * bohr_radius;
    s.magnetic_moment = bohr_magneton;  // |2,2> stretched state
    s.recoil_temperature = 0.362e-6;    // K, D2-line recoil
    return s;
}

bool find_species(std::string_view name, AtomSpecies& out) {
    if (name == "cesium" || name == "Cs" || name == "cs" ||
        name == "cesium_f3mf3") {
        out = cesium_f3mf3();
        return true;
    }
    if (name == "rubidium87" || name == "Rb" || name == "rb" ||
        name == "rubidium" || name == "rb87") {
        out = rubidium87();
        return true;
    }
    return false;
}

}  // namespace becsim
