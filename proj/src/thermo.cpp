#include "becsim/thermo.hpp"

#include <cmath>
#include <stdexcept>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/numerics.hpp"

namespace becsim::thermo {

namespace {

// Cutoff where the Boltzmann factor has decayed to e^-40; beyond that the
// tail underflows any 1e-12 relative budget.
constexpr double kCutoffKT = 40.0;

double find_cutoff(const PotentialSpec& trap, double kt) {
    const double u0 = radial_value(trap, 0.0);
    double r = 1e-7;
    while (radial_value(trap, r) - u0 < kCutoffKT * kt) {
        r *= 2.0;
        if (r > 1e3) {
            throw DivergentIntegral(
                "partition_function: potential never reaches the cutoff");
        }
    }
    // The potential must keep growing past the cutoff: a bounded trap
    // (bare Gaussian) has a divergent spatial integral regardless of where
    // the Boltzmann factor is truncated.
    const double du1 = radial_value(trap, 4.0 * r) - u0;
    const double du2 = radial_value(trap, 16.0 * r) - u0;
    if (!(du2 > du1 + kt)) {
        throw DivergentIntegral(
            "partition_function: potential is bounded; integral diverges");
    }
    // Tighten by bisection so the cutoff moves smoothly with T.
    auto f = [&](double x) {
        return radial_value(trap, x) - u0 - kCutoffKT * kt;
    };
    num::RootOptions opt;
    opt.x_rel_tol = 1e-13;
    return num::find_root(f, r / 2.0, r, opt);
}

// \int_0^rmax 4 pi r^2 exp(-(U(r)-U(0))/kB T) dr
double boltzmann_volume(const PotentialSpec& trap, double temperature,
                        double rel_tol) {
    const double kt = k_boltzmann * temperature;
    const double u0 = radial_value(trap, 0.0);
    const double rmax = find_cutoff(trap, kt);
    auto f = [&](double r) {
        const double x = (radial_value(trap, r) - u0) / kt;
        return 4.0 * pi * r * r * std::exp(-x);
    };
    return num::integrate_radial(f, rmax, rel_tol);
}

double free_energy_of(double n, double temperature, const PotentialSpec& trap,
                      double rel_tol) {
    const double z1 = partition_function(trap, temperature, rel_tol);
    const double d = n / z1;
    return n * k_boltzmann * temperature * (std::log(d) - 1.0);
}

struct EnergyEntropy {
    double energy;
    double entropy;
};

// S from a centered difference of F with relative step 1e-5; E = F + T S.
EnergyEntropy energy_entropy(double n, double temperature,
                             const PotentialSpec& trap, double rel_tol) {
    const double h = 1e-5 * temperature;
    const double f0 = free_energy_of(n, temperature, trap, rel_tol);
    const double fp = free_energy_of(n, temperature + h, trap, rel_tol);
    const double fm = free_energy_of(n, temperature - h, trap, rel_tol);
    const double s = -(fp - fm) / (2.0 * h);
    return {f0 + temperature * s, s};
}

DimpleLoadResult finish_load(const SampleState& reservoir,
                             const PotentialSpec& laser,
                             const PotentialSpec& combined, double t_final,
                             const ThermoReport& initial_report) {
    const double kt_f = k_boltzmann * t_final;
    const double u_f0 = radial_value(combined, 0.0);

    DimpleLoadResult out;
    out.final_temperature = t_final;
    out.dimple_radius = dimple_radius(combined);
    out.eta_d = -radial_value(laser, 0.0) / (k_boltzmann * reservoir.temperature);

    const double z1_f = partition_function(combined, t_final);
    const double lam_f = thermal_wavelength(combined.mass, t_final);
    out.final_psd = reservoir.atom_number / z1_f;
    out.peak_density = out.final_psd / (lam_f * lam_f * lam_f);

    if (out.dimple_radius > 0.0) {
        auto f = [&](double r) {
            const double x = (radial_value(combined, r) - u_f0) / kt_f;
            return 4.0 * pi * r * r * std::exp(-x);
        };
        const double vol = num::integrate_radial(f, out.dimple_radius, 1e-12);
        out.transferred_atoms = out.peak_density * vol;
    }
    out.dimple_volume = out.transferred_atoms / out.peak_density;
    out.eta_v = out.dimple_volume / initial_report.effective_volume;
    return out;
}

}  // namespace

double thermal_wavelength(double mass, double temperature) {
    return std::sqrt(2.0 * pi * hbar * hbar /
                     (mass * k_boltzmann * temperature));
}

double partition_function(const PotentialSpec& trap, double temperature,
                          double rel_tol) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("partition_function: T must be > 0");
    }
    trap.validate();
    const double lam = thermal_wavelength(trap.mass, temperature);
    return boltzmann_volume(trap, temperature, rel_tol) / (lam * lam * lam);
}

ThermoReport report(const SampleState& state, const PotentialSpec& trap) {
    if (!(state.atom_number > 0.0) || !(state.temperature > 0.0)) {
        throw std::invalid_argument("thermo::report: N and T must be > 0");
    }
    constexpr double tol = 1e-12;
    ThermoReport r;
    r.partition_function = partition_function(trap, state.temperature, tol);
    r.phase_space_density = state.atom_number / r.partition_function;
    r.thermal_wavelength = thermal_wavelength(trap.mass, state.temperature);
    const double lam3 = std::pow(r.thermal_wavelength, 3);
    r.peak_density = r.phase_space_density / lam3;
    r.effective_volume = state.atom_number / r.peak_density;
    r.free_energy = state.atom_number * k_boltzmann * state.temperature *
                    (std::log(r.phase_space_density) - 1.0);
    const auto es = energy_entropy(state.atom_number, state.temperature, trap, tol);
    r.entropy = es.entropy;
    r.energy = es.energy;
    return r;
}

double dimple_radius(const PotentialSpec& combined) {
    if (radial_value(combined, 0.0) >= 0.0) return 0.0;
    double hi = 1e-7;
    while (radial_value(combined, hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e3) return 0.0;
    }
    auto f = [&](double r) { return radial_value(combined, r); };
    num::RootOptions opt;
    opt.x_rel_tol = 1e-13;
    return num::find_root(f, 0.0, hi, opt);
}

DimpleLoadResult diabatic_load(const SampleState& reservoir,
                               const PotentialSpec& magnetic,
                               const PotentialSpec& laser) {
    const PotentialSpec combined = sum(magnetic, laser);
    const ThermoReport init = report(reservoir, magnetic);
    const double t_i = reservoir.temperature;
    const double n = reservoir.atom_number;
    const double kt_i = k_boltzmann * t_i;

    // Energy gained when the dimple is switched on under the frozen
    // reservoir distribution n_i(r).
    auto overlap = [&](double r) {
        const double x = radial_value(magnetic, r) / kt_i;
        return 4.0 * pi * r * r * init.peak_density * std::exp(-x) *
               radial_value(laser, r);
    };
    const double rmax = [&] {
        double r = 1e-7;
        while (radial_value(magnetic, r) < kCutoffKT * kt_i) r *= 2.0;
        return r;
    }();
    const double laser_energy = num::integrate_radial(overlap, rmax, 1e-12);
    const double e_target = init.energy - laser_energy;

    const double offset = n * radial_value(combined, 0.0);
    auto balance = [&](double t) {
        return energy_entropy(n, t, combined, 1e-12).energy + offset - e_target;
    };
    num::RootOptions opt;
    opt.x_rel_tol = 1e-14;
    opt.residual_tol = 1e-9 * std::abs(e_target);
    double t_f;
    try {
        t_f = num::find_root(balance, t_i / 100.0, t_i * 100.0, opt);
    } catch (const NoRoot&) {
        throw NoRoot("diabatic_load: no energy balance in [T_i/100, 100 T_i]");
    }
    return finish_load(reservoir, laser, combined, t_f, init);
}

DimpleLoadResult adiabatic_load(const SampleState& reservoir,
                                const PotentialSpec& magnetic,
                                const PotentialSpec& laser) {
    const PotentialSpec combined = sum(magnetic, laser);
    const ThermoReport init = report(reservoir, magnetic);
    const double t_i = reservoir.temperature;
    const double n = reservoir.atom_number;

    auto balance = [&](double t) {
        return energy_entropy(n, t, combined, 1e-12).entropy - init.entropy;
    };
    num::RootOptions opt;
    opt.x_rel_tol = 1e-14;
    opt.residual_tol = 1e-8 * std::abs(init.entropy);
    double t_f;
    try {
        t_f = num::find_root(balance, t_i / 100.0, t_i * 100.0, opt);
    } catch (const NoRoot&) {
        throw NoRoot("adiabatic_load: no entropy balance in [T_i/100, 100 T_i]");
    }
    return finish_load(reservoir, laser, combined, t_f, init);
}

DimpleAnalytic dimple_analytic(double t_initial, double eta_d, double eta_v) {
    if (!(eta_d > 0.0) || !(eta_v > 0.0) || !(eta_v < 1.0)) {
        throw std::invalid_argument(
            "dimple_analytic: need eta_d > 0 and 0 < eta_V < 1");
    }
    // T_f and N_f/N_i are mutually coupled; a fixed-point pass converges
    // quickly because the heating correction is small.
    double t_f = t_initial;
    double fraction = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double boost = std::exp(eta_d * t_initial / t_f);
        fraction = eta_v * boost / (1.0 - eta_v + eta_v * boost);
        const double t_next =
            t_initial * (1.0 + 0.5 * eta_d * eta_v * (1.0 + fraction));
        if (std::abs(t_next - t_f) < 1e-15 * t_initial) {
            t_f = t_next;
            break;
        }
        t_f = t_next;
    }
    DimpleAnalytic out;
    out.final_temperature = t_f;
    out.transfer_fraction = fraction;
    const double ratio = t_f / t_initial;
    out.psd_gain = fraction * ratio * ratio / eta_v;
    out.transfer_fraction_approx = eta_v * std::exp(eta_d);
    out.psd_gain_approx = std::exp(eta_d);
    return out;
}

}  // namespace becsim::thermo
