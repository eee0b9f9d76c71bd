#include "becsim/loading.hpp"

#include <cmath>
#include <stdexcept>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/evap.hpp"

namespace becsim::loading {

double escape_probability(double eta) {
    if (eta < 0.0) {
        throw std::invalid_argument("escape_probability: eta must be >= 0");
    }
    return 1.0 + 2.0 * std::exp(-eta) * std::sqrt(eta / pi) -
           std::erf(std::sqrt(eta));
}

LoadingTimescales timescales(const thermo::SampleState& reservoir,
                             const PotentialSpec& magnetic,
                             const AtomSpecies& species, double sigma,
                             double dimple_radius) {
    const thermo::ThermoReport rep = thermo::report(reservoir, magnetic);
    LoadingTimescales ts;
    ts.reservoir_size = std::cbrt(rep.effective_volume);
    ts.v_i = std::sqrt(k_boltzmann * reservoir.temperature / species.mass);
    ts.t_osc = ts.reservoir_size / ts.v_i;
    const double gamma_el = evap::elastic_rate(rep.peak_density, sigma,
                                               reservoir.temperature,
                                               species.mass);
    ts.t_coll = 1.0 / gamma_el;
    ts.dimple_radius = dimple_radius;
    return ts;
}

LoadingTimescales timescales(const thermo::SampleState& reservoir,
                             const PotentialSpec& magnetic,
                             const AtomSpecies& species) {
    const double sigma =
        evap::cross_section(species.scattering_length, reservoir.temperature,
                            quadrupole_kev_eta, species.mass);
    return timescales(reservoir, magnetic, species, sigma);
}

double hydrodynamic_threshold(const LoadingTimescales& ts, double sigma) {
    return 2.0 * (ts.t_osc / ts.t_coll) * ts.dimple_radius * ts.dimple_radius /
           sigma;
}

double hydrodynamic_threshold_waist(double waist, double sigma) {
    return 4.0 * waist * waist / sigma;
}

double loading_time(double transferred_atoms, const LoadingTimescales& ts,
                    double reservoir_peak_density, double reservoir_atoms,
                    double threshold_atoms) {
    if (!(transferred_atoms > 0.0) || !(ts.dimple_radius > 0.0)) {
        throw std::invalid_argument("loading_time: need N_f > 0 and r_d > 0");
    }
    const double rd3 = std::pow(ts.dimple_radius, 3);
    const double dimple_density = transferred_atoms / rd3;
    if (dimple_density < reservoir_peak_density) {
        throw InvalidRegime("loading_time: dimple emptier than the reservoir");
    }
    if (transferred_atoms <= threshold_atoms) {
        return 2.0 * ts.t_coll * std::log(dimple_density / reservoir_peak_density);
    }
    // Exponential fill up to the hydrodynamic threshold, linear beyond.
    const double exp_part =
        2.0 * ts.t_coll *
        std::log(threshold_atoms / rd3 / reservoir_peak_density);
    const double l2 = ts.reservoir_size * ts.reservoir_size;
    const double lin_part = ts.t_coll * l2 /
                            (ts.dimple_radius * ts.dimple_radius) *
                            (transferred_atoms - threshold_atoms) /
                            reservoir_atoms;
    return exp_part + lin_part;
}

double adiabatic_loading_time(double t_load) { return 3.0 * t_load; }

LossBudget loss_budget(const thermo::DimpleLoadResult& load,
                       const LoadingTimescales& ts, const AtomSpecies& species,
                       double field_gradient, double sigma) {
    LossBudget out;
    const double t_f = load.final_temperature;
    const double n_f = load.peak_density;
    const double m = species.mass;

    // Reservoir temperature and peak density back out of the timescales.
    const double t_i = m * ts.v_i * ts.v_i / k_boltzmann;
    const double n_i =
        1.0 / (ts.t_coll * sigma * evap::relative_velocity(t_i, m));

    // Two-body losses, evaluated at the field a cloud radius away from the
    // zero: B ~ B' (sigma_r)_d with (sigma_r)_d from the dimple volume.
    const double sigma_r = std::cbrt(load.dimple_volume) / std::sqrt(2.0 * pi);
    if (species.k2_model) {
        const double b_field = field_gradient * sigma_r;
        out.two_body_fraction = ts.t_coll * species.k2_model(b_field, t_f) * n_f;
    }

    const double eta_f = load.eta_d * t_i / t_f;
    const double l3 = evap::three_body_coefficient(species.scattering_length,
                                                   t_f, eta_f, m);
    out.three_body_fraction = (2.0 / 3.0) * ts.t_coll * l3 * n_f * n_f;

    const double v_d = std::sqrt(k_boltzmann * t_f / m);
    const double mu_bprime =
        std::abs(species.magnetic_moment) * field_gradient;
    out.majorana_radius = std::sqrt(hbar * v_d / mu_bprime);
    out.majorana_fraction = (out.majorana_radius * out.majorana_radius) /
                            (load.dimple_radius * load.dimple_radius) *
                            (n_f / n_i);

    out.total_lost = load.transferred_atoms *
                     (out.two_body_fraction + out.three_body_fraction +
                      out.majorana_fraction);
    return out;
}

}  // namespace becsim::loading
