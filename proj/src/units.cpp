#include "becsim/units.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"

namespace becsim::units {

namespace {

struct Parsed {
    double value;
    std::string unit;  // empty when the text is a bare number
};

Parsed split(const std::string& text) {
    const char* s = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s) {
        throw ConfigError("unit parse: no leading number in '" + text + "'");
    }
    std::string unit(end);
    std::size_t b = unit.find_first_not_of(" \t");
    std::size_t e = unit.find_last_not_of(" \t");
    unit = b == std::string::npos ? "" : unit.substr(b, e - b + 1);
    return {v, unit};
}

const std::map<std::string, double> kLength = {
    {"m", 1.0},  {"cm", 1e-2}, {"mm", 1e-3},
    {"um", 1e-6}, {"nm", 1e-9},
};

const std::map<std::string, double> kTime = {
    {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"min", 60.0},
};

const std::map<std::string, double> kTemperature = {
    {"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"nK", 1e-9},
};

const std::map<std::string, double> kGradient = {
    {"T/m", 1.0},   {"mT/cm", 0.1}, {"T/cm", 100.0},
    {"G/cm", 1e-2}, {"mT/m", 1e-3},
};

const std::map<std::string, double> kFrequency = {
    {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6},
};

const std::map<std::string, double> kRate = {
    {"/s", 1.0}, {"1/s", 1.0}, {"Hz", 1.0},
};

double lookup(const std::map<std::string, double>& table,
              const Parsed& p, const char* what) {
    auto it = table.find(p.unit);
    if (it == table.end()) {
        throw ConfigError(std::string("unit parse: '") + p.unit +
                          "' is not a " + what + " unit");
    }
    return p.value * it->second;
}

}  // namespace

double parse_quantity(const std::string& text, Dimension dim) {
    const Parsed p = split(text);
    if (p.unit.empty()) return p.value;  // bare number: SI for the dimension

    switch (dim) {
        case Dimension::Dimensionless:
            throw ConfigError("unit parse: '" + text +
                              "' must be a bare number");
        case Dimension::Length:
            return lookup(kLength, p, "length");
        case Dimension::Time:
            return lookup(kTime, p, "time");
        case Dimension::Temperature:
            return lookup(kTemperature, p, "temperature");
        case Dimension::EnergyAsKelvin:
            return lookup(kTemperature, p, "temperature") * k_boltzmann;
        case Dimension::FieldGradient:
            return lookup(kGradient, p, "field-gradient");
        case Dimension::Frequency:
            return lookup(kFrequency, p, "frequency");
        case Dimension::ScatteringLength:
            if (p.unit == "a0") return p.value * bohr_radius;
            return lookup(kLength, p, "length");
        case Dimension::Rate:
            return lookup(kRate, p, "rate");
        case Dimension::Mass:
            if (p.unit == "u") return p.value * atomic_mass_unit;
            if (p.unit == "kg") return p.value;
            throw ConfigError("unit parse: '" + p.unit + "' is not a mass unit");
        case Dimension::MagneticMoment:
            if (p.unit == "muB") return p.value * std::abs(bohr_magneton);
            if (p.unit == "J/T") return p.value;
            throw ConfigError("unit parse: '" + p.unit +
                              "' is not a magnetic-moment unit");
    }
    throw ConfigError("unit parse: unhandled dimension");
}

}  // namespace becsim::units
