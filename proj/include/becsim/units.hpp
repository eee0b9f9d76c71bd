#ifndef BECSIM_UNITS_HPP
#define BECSIM_UNITS_HPP

#include <string>

namespace becsim::units {

// Expected dimension of a config quantity. Energy-like trap depths are
// written as temperatures ("1720 uK") and converted through kB.
enum class Dimension {
    Dimensionless,
    Length,           // m
    Time,             // s
    Temperature,      // K
    EnergyAsKelvin,   // J, accepts temperature units
    FieldGradient,    // T/m
    Frequency,        // Hz (plain, not angular)
    ScatteringLength, // m, accepts a0
    Rate,             // 1/s
    Mass,             // kg, accepts u
    MagneticMoment,   // J/T, accepts muB
};

// Parses "150 uK", "100 um", "10 mT/cm", "100 a0", "0.2 s", "11 /s" or a
// bare number (already in SI for the requested dimension). Throws
// ConfigError on unknown units or dimension mismatches.
double parse_quantity(const std::string& text, Dimension dim);

}  // namespace becsim::units

#endif
